#pragma once

#include "weightlab/spd_matrix.hpp"

#include <memory>
#include <vector>

namespace weightlab {

// Fixed set of unit sampling directions, antipodally reduced (support
// functions of symmetric bodies are even, so half the sphere suffices).
// d=1: the single direction +1. d=2: uniform angular grid on the upper half
// circle. d=3: Fibonacci lattice on the upper hemisphere.
class DirectionSet {
public:
    DirectionSet(int d, int m);

    int dim() const { return d_; }
    int count() const { return m_; }
    const double* dir(int j) const { return dirs_.data() + static_cast<std::size_t>(j) * d_; }

    // shared canonical set per dimension (m = 1 / 180 / 512)
    static std::shared_ptr<const DirectionSet> canonical(int d);

    bool same_as(const DirectionSet& o) const { return d_ == o.d_ && m_ == o.m_; }

private:
    int d_;
    int m_;
    std::vector<double> dirs_; // m x d
};

using DirsPtr = std::shared_ptr<const DirectionSet>;

enum class BodyKind { segment, ellipsoid, sampled };

// Origin-symmetric closed bounded convex set, represented by its support
// function. Segments and ellipsoids keep exact representations; everything
// else stores support values on a DirectionSet (the outer polytope of those
// halfspace constraints).
class ConvexBody {
public:
    ConvexBody() = default;

    static ConvexBody segment(std::vector<double> v, DirsPtr dirs = nullptr);
    static ConvexBody ellipsoid(const SpdMatrix& a, DirsPtr dirs = nullptr);
    static ConvexBody sampled(std::vector<double> h, DirsPtr dirs);
    static ConvexBody zero(int d, DirsPtr dirs = nullptr);
    static ConvexBody unit_ball(int d, DirsPtr dirs = nullptr);
    // zonotope sum of segments +-g_i (exact support values on the sample set)
    static ConvexBody zonotope(const std::vector<std::vector<double>>& gens, DirsPtr dirs = nullptr);

    BodyKind kind() const { return kind_; }
    int dim() const { return d_; }
    const DirsPtr& dirs() const { return dirs_; }
    const std::vector<double>& segment_vector() const { return seg_; }
    const SpdMatrix& ellipsoid_matrix() const { return ell_; }

    // sup over the body of <v,u> for unit u. Exact for segment/ellipsoid;
    // sampled bodies use the max of the two nearest samples off-grid
    // (conservative outward).
    double support(const double* u) const;

    // support at sample direction j (exact for every kind)
    double support_sample(int j) const;
    std::vector<double> support_samples() const;

    bool is_absorbing(double tol = 0.0) const; // h > tol on every sample

    // 2D sublinearity spot-check on adjacent direction triples
    bool convexity_check(double tol = 1e-9) const;

private:
    BodyKind kind_ = BodyKind::segment;
    int d_ = 0;
    std::vector<double> seg_;
    SpdMatrix ell_;
    std::vector<double> h_;
    DirsPtr dirs_;
};

// Support-function calculus: h_{K+L} = h_K + h_L, h_{aK} = a h_K,
// h_{hull(K u L)} = max(h_K, h_L). Results stay segments for collinear
// segments and ellipsoids for proportional ellipsoids, otherwise sampled.
ConvexBody minkowski_sum(const ConvexBody& k, const ConvexBody& l);
ConvexBody scale(double alpha, const ConvexBody& k);
ConvexBody hull_union(const ConvexBody& k, const ConvexBody& l);

// L inside K up to slack: h_L <= h_K (1 + slack) on all samples.
bool contains(const ConvexBody& k, const ConvexBody& l, double slack = 0.0);

// sup of |v| over the body (exact for segment/ellipsoid, max sample otherwise)
double magnitude(const ConvexBody& k);

// image set A K for symmetric A: h_{AK}(u) = h_K(A u)
ConvexBody apply_matrix(const SpdMatrix& a, const ConvexBody& k);

struct BodyField {
    DyadicGrid grid;
    int d = 1;
    std::vector<ConvexBody> values;

    BodyField() = default;
    BodyField(const DyadicGrid& g, int dd, DirsPtr dirs = nullptr);
};

} // namespace weightlab

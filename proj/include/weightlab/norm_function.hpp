#pragma once

#include "weightlab/convex_body.hpp"

#include <memory>

namespace weightlab {

// Measurable family of norms x -> rho(x, .), realized either from a matrix
// weight (rho(x,v) = |W(x)v|) or from a convex body field (Minkowski gauge
// of K(x)). Duals come with exact fast paths: |W(x)^{-1}v| for the matrix
// case, the support function for the gauge case; dual_sampled is the generic
// sampled-sup formula.
class NormFunction {
public:
    static NormFunction from_matrix_weight(std::shared_ptr<const MatrixField> w);
    static NormFunction from_body_field(std::shared_ptr<const BodyField> f);

    int dim() const { return d_; }
    const DyadicGrid& grid() const;
    const DirsPtr& dirs() const { return dirs_; }

    double eval(index_t cell, const double* v) const;
    double dual(index_t cell, const double* v) const;

    // max over sample directions u of |<v,u>| / rho(x,u); throws naming the
    // direction when rho vanishes there.
    double dual_sampled(index_t cell, const double* v) const;

    bool matrix_backed() const { return w_ != nullptr; }
    const MatrixField& matrix_field() const { return *w_; }

private:
    std::shared_ptr<const MatrixField> w_;
    std::shared_ptr<const BodyField> f_;
    DirsPtr dirs_;
    int d_ = 0;
};

// (avg over cells of Q of rho(x,v)^p)^(1/p); throws for p < 1.
double p_average_norm(const NormFunction& rho, const Cube& q, double p, const double* v);

} // namespace weightlab

#pragma once

#include "weightlab/convex_body.hpp"
#include "weightlab/john.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace weightlab {

// ---------------------------------------------------------------------------
// maximal operators

// Dyadic Hardy-Littlewood maximal: per cell the max over the containing
// dyadic cubes of the average of |f|.
ScalarField maximal_scalar(const ScalarField& f);

// Universal weighted dyadic maximal: max over containing cubes of the
// w-weighted average of |f|.
ScalarField maximal_weighted_universal(const ScalarField& f, const ScalarField& w);

// Christ-Goldberg maximal with conjugation exponent r:
// max over containing cubes Q of avg_Q |W(x)^{1/r} W(y)^{-1/r} f(y)| dy.
// r = 1 is the classical operator.
ScalarField christ_goldberg(const MatrixField& w, const VectorField& f, double r = 1.0,
                            bool* clamped = nullptr);

// Same with the fixed reducing matrix of (W, Q, p) in place of W(x)^{1/r}.
ScalarField christ_goldberg_aux(const MatrixField& w, const VectorField& f, double p,
                                bool* clamped = nullptr);

// ---------------------------------------------------------------------------
// sparse families and sparse operators

// Dyadic cubes Q with designated disjoint witness sets E(Q) of at least half
// the measure, stored as finest-level cell ids.
struct SparseFamily {
    DyadicGrid grid;
    std::vector<Cube> members;
    std::vector<std::vector<index_t>> witness;
};

// nested cubes [0,2^-k)^n with E(Q) = Q minus the next member
SparseFamily sparse_nested_halves(const DyadicGrid& g);
// random cube selection on levels 0, stride, 2*stride, ... with greedy
// witness assignment; retries with fresh randomness, then throws
SparseFamily sparse_random(const DyadicGrid& g, std::uint64_t seed, int level_stride);
// maximal cubes where the average of |f| exceeds `threshold` times the
// parent selection's average (threshold >= 2 guarantees the witness)
SparseFamily sparse_stopping_time(const ScalarField& f, double threshold);

bool is_sparse(const SparseFamily& s);

// sum over members of (avg_Q f) chi_Q
ScalarField sparse_scalar(const SparseFamily& s, const ScalarField& f);

// ---------------------------------------------------------------------------
// convex set-valued operators

// { avg_Q k f : |k| <= 1 }: support function h(u) = avg_Q |<f(y),u>| dy,
// exact per sample; collapses to segment(v) when f is constant on Q.
ConvexBody convex_average(const VectorField& f, const Cube& q, DirsPtr dirs = nullptr);

// per cell the Minkowski sum of convex_average(f,Q) over members containing it
BodyField convex_sparse(const SparseFamily& s, const VectorField& f, DirsPtr dirs = nullptr);

// hull of the Aumann averages over containing cubes; per sample direction
// this is the scalar dyadic maximal applied to y -> h_{F(y)}(u)
BodyField convex_maximal(const BodyField& f);

// (sum magnitude(W^{1/p}(x) F(x))^p |cell|)^{1/p}
double lp_norm_bodyfield(const BodyField& f, double p, const MatrixField* w = nullptr);

// ---------------------------------------------------------------------------
// iteration operators

struct RubioOptions {
    int trials = 16;             // random fields for the norm estimate
    std::uint64_t seed = 1;
    std::optional<double> norm_estimate; // skip the internal estimate
};

struct RubioScalarResult {
    ScalarField field;
    double norm_used = 0.0; // normalization constant a (measured, raised to
                            // the realized ratios along this input's orbit)
    double tail_bound = 0.0; // 2^-K * ||h||
};

struct RubioConvexResult {
    BodyField field;
    double norm_used = 0.0;
    double tail_bound = 0.0;
};

// truncated series sum_{k<=K} M^k h / (2a)^k
RubioScalarResult rubio_iteration_scalar(const ScalarField& h, const ScalarField& w, double p,
                                         int truncation, const RubioOptions& opts = {});
RubioConvexResult rubio_iteration_convex(const BodyField& f, const MatrixField& w, double p,
                                         int truncation, const RubioOptions& opts = {});

// ---------------------------------------------------------------------------
// operator norm estimation

struct OpNormEstimate {
    double estimate = 0.0; // max realized ratio: a lower bound on the norm
    int trials = 0;
    std::uint64_t seed = 0;
    bool lower_bound = true;
};

using ScalarOp = std::function<ScalarField(const ScalarField&)>;
using BodyOp = std::function<BodyField(const BodyField&)>;

// Max of ||op f|| / ||f|| over a deterministic battery (constant field, every
// cube indicator) plus `trials` random fields, each orbit-deepened a few
// applications of the operator.
OpNormEstimate operator_norm_estimate_scalar(const ScalarOp& op, const DyadicGrid& g, double p,
                                             const ScalarField* w, int trials, std::uint64_t seed,
                                             int orbit = 6);
OpNormEstimate operator_norm_estimate_convex(const BodyOp& op, const DyadicGrid& g, int d, double p,
                                             const MatrixField* w, int trials, std::uint64_t seed,
                                             int orbit = 6);

// ---------------------------------------------------------------------------
// truncated Hilbert transform (1D)

// T_eps f(x) = int_{|x-y|>eps} f(y)/(x-y) dy with exact per-cell log
// integration; x may lie outside [0,1).
double hilbert_truncated_at(const ScalarField& f, double x, double eps);
// evaluated at the center of a cell
double hilbert_truncated(const ScalarField& f, index_t cell, double eps);
// T* f at cell centers: max of |T_eps f| over the cell-boundary distances
// (|T_eps| is monotone in eps between boundary crossings, so that finite set
// attains the sup)
ScalarField hilbert_maximal(const ScalarField& f);

// reads WEIGHTLAB_THREADS and caps the OpenMP thread count
void apply_thread_env_cap();

} // namespace weightlab

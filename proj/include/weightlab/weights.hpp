#pragma once

#include "weightlab/norm_function.hpp"

#include <string>
#include <vector>

namespace weightlab {

// A weight-class characteristic together with the cube attaining the
// supremum and whether eigenvalue clamping fired along the way.
struct CharacteristicReport {
    std::string variant;
    double p = 0.0;
    double value = 0.0;
    Cube argmax_cube;
    bool clamped = false;
};

// sup_Q (avg_Q w) (avg_Q w^{1-p'})^{p-1} over all dyadic cubes; p > 1.
CharacteristicReport scalar_ap(const ScalarField& w, double p);

// sup_Q max_{x in Q} (avg_Q w) / w(x).
CharacteristicReport scalar_a1(const ScalarField& w);

// sigma = w^{1-p'} cellwise.
ScalarField dual_weight(const ScalarField& w, double p);

// w0 * w1^{1-p} cellwise.
ScalarField reverse_factorization_scalar(const ScalarField& w0, const ScalarField& w1, double p);

// sup_Q | (avg_Q W)^{1/2} (avg_Q W^{-1})^{1/2} |_op.
CharacteristicReport matrix_a2_tv(const MatrixField& w);

// sup_Q avg_x ( avg_y |W^{1/p}(x) W^{-1/p}(y)|_op^{p'} )^{p/p'}; p > 1.
CharacteristicReport matrix_ap_roudenko(const MatrixField& w, double p);

// sup_Q max_{x in Q} avg_y |W^{-1}(x) W(y)|_op.
CharacteristicReport matrix_a1(const MatrixField& w);

// Smallest C with <rho*>_{p',Q}(v) <= C (<rho>_{p,Q})*(v) over all dyadic Q
// and the given test vectors; the dual of the averaged norm is evaluated by
// the sampled-sup formula.
double tv_norm_ap_constant(const NormFunction& rho, double p,
                           const std::vector<std::vector<double>>& test_vectors);

// Smallest C with MF(x) inside C F(x): max over cells and sample directions
// of h_{MF(x)}(u) / h_{F(x)}(u). Throws naming the cell if F(x) is not
// absorbing.
CharacteristicReport a1k_characteristic(const BodyField& f);

} // namespace weightlab

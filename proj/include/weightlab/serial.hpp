#pragma once

#include "weightlab/operators.hpp"
#include "weightlab/weights.hpp"

// Single-threaded reference implementations: plain direct summation over
// cubes and cells, no tower averaging, no OpenMP. They are the baseline for
// the benchmark and the independent oracle for the parallel kernels.
namespace weightlab::serial {

double average(const ScalarField& f, const Cube& q);
ScalarField maximal_scalar(const ScalarField& f);
ScalarField maximal_weighted_universal(const ScalarField& f, const ScalarField& w);
ScalarField christ_goldberg(const MatrixField& w, const VectorField& f, double r = 1.0);
CharacteristicReport scalar_ap(const ScalarField& w, double p);
CharacteristicReport scalar_a1(const ScalarField& w);
CharacteristicReport matrix_ap_roudenko(const MatrixField& w, double p);
CharacteristicReport matrix_a1(const MatrixField& w);
CharacteristicReport matrix_a2_tv(const MatrixField& w);
BodyField convex_maximal(const BodyField& f);
ScalarField hilbert_maximal(const ScalarField& f);

} // namespace weightlab::serial

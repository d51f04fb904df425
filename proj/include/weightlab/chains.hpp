#pragma once

#include "weightlab/config.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/weights.hpp"

#include <map>
#include <string>
#include <vector>

namespace weightlab {

// One verified inequality lhs <= rhs. slack = (rhs - lhs) / max(|rhs|, tiny).
struct ChainLine {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double slack = 0.0;
};

struct ChainReport {
    std::string name;
    std::vector<ChainLine> lines;
    std::map<std::string, double> metrics;

    bool passed() const;
    ChainLine& add(const std::string& id, double lhs, double rhs, double fp_guard = 1e-12);
};

// Weighted L2 duality chain for the sparse operator: duality pairing, the
// factor-2 witness step, the A2 insertion, the passage to universal maximal
// functions, their L2 bounds with constant 2, and the headline
// ||T_S f|| <= 8 [w]_{A2} ||f||. One group of lines per trial.
ChainReport verify_sparse_a2_chain(const ExperimentConfig& cfg);

// Extrapolation estimate chain at p != 2 for the sparse operator, built from
// two iteration operators, the dual witness, the Hoelder split I1/I2, the
// composite-weight A2 bound via reverse factorization, and the assembled
// bound ||T_S f||_{L^p(w)} <= C ||f||_{L^p(w)}.
ChainReport verify_extrapolation_chain(const ExperimentConfig& cfg);

// Matrix-weighted L2 chain for the convex-body sparse operator (d = 2,
// segment-valued inputs): explicit dual selection, witness doubling,
// Cauchy-Schwarz split into the two conjugated maximal operators, their L2
// norms, and the end bound with the per-trial constant reported against
// [W]_{A2}^2.
ChainReport verify_convex_sparse_w2_chain(const ExperimentConfig& cfg);

struct SweepRow {
    double a = 0.0;
    double characteristic = 0.0;
    std::string op;
    double ratio = 0.0;
    double slope = 0.0;       // running top-half fit; NaN when undefined
    double slope_stderr = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::map<std::string, double> final_slopes;
    std::map<std::string, double> final_stderr;

    std::string to_csv() const; // RFC-4180, CRLF line endings
};

// Power-weight sweep w_a = (x + 2^-L)^a: characteristic, measured operator
// norm ratios (maximal, sparse, truncated-singular vs maximal, and the
// rotated-diagonal matrix variant), with running log-log slopes.
SweepResult sweep_sharp_constants(const ExperimentConfig& cfg);

} // namespace weightlab

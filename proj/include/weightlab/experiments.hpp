#pragma once

#include "weightlab/chains.hpp"

#include <iosfwd>
#include <string>

namespace weightlab {

struct ExperimentResult {
    std::string name;
    bool passed = false;
    std::string json;     // main artifact (deterministic for a given config)
    std::string csv;      // optional second artifact
    std::string csv_name; // file name for the csv when present
    std::string summary;  // one human-readable line
    std::map<std::string, double> metrics;
};

// experiments: duality, collapse, reverse-factorization, sparse-a2,
// extrapolation, convex-w2, sweep, john, convex-maximal, iteration, hilbert
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// writes artifacts under cfg.out_dir (if set) and a summary line to `out`;
// returns 0 when every asserted line passed, 1 otherwise
int run_and_write(const ExperimentConfig& cfg, std::ostream& out);

} // namespace weightlab

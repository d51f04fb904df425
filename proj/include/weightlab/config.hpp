#pragma once

#include "weightlab/convex_body.hpp"
#include "weightlab/rng.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weightlab {

// Weight generator: constant | power(a) | random(seed,roughness) |
// diagonal(a1,...,ad) | rotated-diagonal(seed). Power weights are offset by
// 2^-depth to stay strictly positive on the grid; diagonal entries are power
// weights with the listed exponents; rotated-diagonal conjugates a diagonal
// of power weights by a rotation drawn from the seed.
struct WeightSpec {
    enum class Kind { constant, power, random, diagonal, rotated_diagonal };
    Kind kind = Kind::constant;
    double value = 1.0;            // constant
    double exponent = 0.0;         // power
    std::uint64_t seed = 1;        // random / rotated_diagonal
    double roughness = 0.5;        // random
    std::vector<double> exponents; // diagonal / rotated_diagonal

    std::string to_string() const;
    static WeightSpec parse(const std::string& text);
};

struct ExperimentConfig {
    std::string experiment;
    int depth = 6;
    int dim = 1; // spatial dimension n
    int d = 1;   // vector dimension
    double p = 2.0;
    WeightSpec weight;
    int trials = 1;
    std::uint64_t seed = 1;
    int truncation = 40; // iteration series order
    std::string sparse_family = "nested-halves";
    std::string out_dir;

    // flat key=value serialization, one pair per line, keys sorted
    std::string to_kv() const;
    static ExperimentConfig from_kv(const std::string& text);
    static ExperimentConfig from_kv_file(const std::string& path);

    void validate() const; // throws std::invalid_argument naming the field
};

// generators ------------------------------------------------------------

// power profile (x + 2^-L)^a on [0,1); 1D, cell centers
ScalarField make_power_weight(const DyadicGrid& g, double a);
ScalarField make_scalar_weight(const DyadicGrid& g, const WeightSpec& spec);
// strictly positive lognormal field
ScalarField make_random_positive(const DyadicGrid& g, std::uint64_t seed, double roughness);
MatrixField make_matrix_weight(const DyadicGrid& g, int d, const WeightSpec& spec);
VectorField make_random_vector_field(const DyadicGrid& g, int d, std::uint64_t seed);
// absorbing bodies: random zonotopes fattened by a small ball
BodyField make_random_body_field(const DyadicGrid& g, int d, std::uint64_t seed, DirsPtr dirs = nullptr);

} // namespace weightlab

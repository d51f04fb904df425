#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace weightlab {

using index_t = std::int64_t;

// Dyadic discretization of [0,1)^n, n in {1,2}. Cells are the cubes of the
// finest level `depth`; all functions are piecewise constant on cells, so
// every integral is an exact finite sum. `offset` shifts cube boundaries by
// that many finest cells per axis (wrapping modulo the domain), which models
// a translated dyadic grid over the same cell data.
struct DyadicGrid {
    int dim = 1;
    int depth = 0;
    index_t offset = 0;

    DyadicGrid() = default;
    DyadicGrid(int n, int L, index_t off = 0);

    index_t side() const { return index_t(1) << depth; }
    index_t cell_count() const { return index_t(1) << (dim * depth); }
    index_t cubes_at_level(int level) const { return index_t(1) << (dim * level); }
    index_t cube_count() const;
    double cell_measure() const;

    bool operator==(const DyadicGrid&) const = default;
};

// A dyadic cube: level 0 is the whole domain, level `depth` a single cell.
struct Cube {
    int level = 0;
    std::array<index_t, 2> index{0, 0};

    Cube() = default;
    Cube(int lv, index_t i0, index_t i1 = 0) : level(lv), index{i0, i1} {}

    bool operator==(const Cube&) const = default;
};

double cube_measure(const DyadicGrid& g, const Cube& q);
void check_cube(const DyadicGrid& g, const Cube& q); // throws std::domain_error

// Linear cube ids enumerate levels 0..depth, row-major within a level.
index_t cube_id(const DyadicGrid& g, const Cube& q);
Cube cube_from_id(const DyadicGrid& g, index_t id);
std::string cube_to_string(const Cube& q, int dim);

// Ancestor cube (at `level`) of a finest-level cell, honoring the offset.
Cube ancestor_of_cell(const DyadicGrid& g, index_t cell, int level);

// Finest-level cell ids covered by a cube, in deterministic order.
std::vector<index_t> cells_of_cube(const DyadicGrid& g, const Cube& q);

struct ScalarField {
    DyadicGrid grid;
    std::vector<double> values; // one per cell

    ScalarField() = default;
    ScalarField(const DyadicGrid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.cell_count()), fill) {}
};

// Vector-valued field, d components per cell stored contiguously.
struct VectorField {
    DyadicGrid grid;
    int d = 1;
    std::vector<double> values; // cell_count * d

    VectorField() = default;
    VectorField(const DyadicGrid& g, int dd, double fill = 0.0)
        : grid(g), d(dd), values(static_cast<std::size_t>(g.cell_count()) * dd, fill) {}

    double* at(index_t cell) { return values.data() + cell * d; }
    const double* at(index_t cell) const { return values.data() + cell * d; }
};

// Exact mean of a scalar field over a cube (all cells carry equal measure).
double average(const ScalarField& f, const Cube& q);
std::vector<double> average(const VectorField& f, const Cube& q);

// Per-level cube averages of a scalar field, averages[k] has 2^(n k) entries.
// Built bottom-up from the cells, so each entry is an exact mean.
std::vector<std::vector<double>> level_averages(const ScalarField& f);

// (sum f^p w |cell|)^(1/p); optional strictly positive scalar weight.
// Throws std::domain_error for p < 1.
double lp_norm(const ScalarField& f, double p, const ScalarField* weight = nullptr);

// Same cell values on the grid shifted by `offset` finest cells per axis.
ScalarField with_offset(const ScalarField& f, index_t offset);

// Duplicate every cell 2^n times: same piecewise-constant function one level deeper.
ScalarField refine(const ScalarField& f);

} // namespace weightlab

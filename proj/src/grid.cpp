#include "weightlab/grid.hpp"
#include "weightlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace weightlab {

double Rng::normal() {
    // Box-Muller; 1-u keeps the log argument in (0,1]
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

Rng Rng::fork(std::uint64_t stream) const {
    Rng mixer(state_ ^ (0xd1342543de82ef95ull * (stream + 1)));
    return Rng(mixer.next_u64());
}

DyadicGrid::DyadicGrid(int n, int L, index_t off) : dim(n), depth(L), offset(off) {
    if (n != 1 && n != 2) throw std::domain_error("DyadicGrid: dim must be 1 or 2");
    if (L < 0 || L > 20) throw std::domain_error("DyadicGrid: depth out of range");
    if (off < 0) throw std::domain_error("DyadicGrid: offset must be nonnegative");
}

index_t DyadicGrid::cube_count() const {
    index_t total = 0;
    for (int k = 0; k <= depth; ++k) total += cubes_at_level(k);
    return total;
}

double DyadicGrid::cell_measure() const {
    return std::ldexp(1.0, -dim * depth);
}

double cube_measure(const DyadicGrid& g, const Cube& q) {
    return std::ldexp(1.0, -g.dim * q.level);
}

void check_cube(const DyadicGrid& g, const Cube& q) {
    if (q.level < 0 || q.level > g.depth)
        throw std::domain_error("cube level outside grid");
    index_t n = index_t(1) << q.level;
    for (int a = 0; a < g.dim; ++a)
        if (q.index[a] < 0 || q.index[a] >= n)
            throw std::domain_error("cube index outside grid");
    if (g.dim == 1 && q.index[1] != 0)
        throw std::domain_error("cube index outside grid");
}

index_t cube_id(const DyadicGrid& g, const Cube& q) {
    check_cube(g, q);
    index_t base = 0;
    for (int k = 0; k < q.level; ++k) base += g.cubes_at_level(k);
    index_t n = index_t(1) << q.level;
    return base + (g.dim == 1 ? q.index[0] : q.index[0] * n + q.index[1]);
}

Cube cube_from_id(const DyadicGrid& g, index_t id) {
    for (int k = 0; k <= g.depth; ++k) {
        index_t c = g.cubes_at_level(k);
        if (id < c) {
            index_t n = index_t(1) << k;
            if (g.dim == 1) return Cube(k, id);
            return Cube(k, id / n, id % n);
        }
        id -= c;
    }
    throw std::domain_error("cube id outside grid");
}

std::string cube_to_string(const Cube& q, int dim) {
    std::string s = "L" + std::to_string(q.level) + ":" + std::to_string(q.index[0]);
    if (dim == 2) s += "," + std::to_string(q.index[1]);
    return s;
}

Cube ancestor_of_cell(const DyadicGrid& g, index_t cell, int level) {
    index_t s = g.side();
    int shift = g.depth - level;
    index_t x0, x1 = 0;
    if (g.dim == 1) {
        x0 = cell;
    } else {
        x0 = cell / s;
        x1 = cell % s;
    }
    auto unshift = [&](index_t x) { return ((x - g.offset) % s + s) % s; };
    Cube q;
    q.level = level;
    q.index[0] = unshift(x0) >> shift;
    q.index[1] = g.dim == 2 ? (unshift(x1) >> shift) : 0;
    return q;
}

std::vector<index_t> cells_of_cube(const DyadicGrid& g, const Cube& q) {
    check_cube(g, q);
    index_t s = g.side();
    index_t w = index_t(1) << (g.depth - q.level);
    std::vector<index_t> out;
    out.reserve(static_cast<std::size_t>(g.dim == 1 ? w : w * w));
    if (g.dim == 1) {
        for (index_t j = 0; j < w; ++j)
            out.push_back((q.index[0] * w + j + g.offset) % s);
    } else {
        for (index_t j0 = 0; j0 < w; ++j0) {
            index_t x0 = (q.index[0] * w + j0 + g.offset) % s;
            for (index_t j1 = 0; j1 < w; ++j1) {
                index_t x1 = (q.index[1] * w + j1 + g.offset) % s;
                out.push_back(x0 * s + x1);
            }
        }
    }
    return out;
}

std::vector<std::vector<double>> level_averages(const ScalarField& f) {
    const DyadicGrid& g = f.grid;
    std::vector<std::vector<double>> avg(static_cast<std::size_t>(g.depth) + 1);
    // base level: map cube coordinates through the offset to cells
    avg[g.depth].resize(static_cast<std::size_t>(g.cell_count()));
    index_t s = g.side();
    if (g.dim == 1) {
        for (index_t i = 0; i < s; ++i)
            avg[g.depth][i] = f.values[(i + g.offset) % s];
    } else {
        for (index_t i0 = 0; i0 < s; ++i0)
            for (index_t i1 = 0; i1 < s; ++i1)
                avg[g.depth][i0 * s + i1] =
                    f.values[((i0 + g.offset) % s) * s + ((i1 + g.offset) % s)];
    }
    for (int k = g.depth - 1; k >= 0; --k) {
        index_t n = index_t(1) << k;
        avg[k].resize(static_cast<std::size_t>(g.cubes_at_level(k)));
        if (g.dim == 1) {
            for (index_t i = 0; i < n; ++i)
                avg[k][i] = 0.5 * (avg[k + 1][2 * i] + avg[k + 1][2 * i + 1]);
        } else {
            index_t n2 = n * 2;
            for (index_t i0 = 0; i0 < n; ++i0)
                for (index_t i1 = 0; i1 < n; ++i1)
                    avg[k][i0 * n + i1] =
                        0.25 * (avg[k + 1][(2 * i0) * n2 + 2 * i1] +
                                avg[k + 1][(2 * i0) * n2 + 2 * i1 + 1] +
                                avg[k + 1][(2 * i0 + 1) * n2 + 2 * i1] +
                                avg[k + 1][(2 * i0 + 1) * n2 + 2 * i1 + 1]);
        }
    }
    return avg;
}

double average(const ScalarField& f, const Cube& q) {
    check_cube(f.grid, q);
    double sum = 0.0;
    auto cells = cells_of_cube(f.grid, q);
    for (index_t c : cells) sum += f.values[c];
    return sum / static_cast<double>(cells.size());
}

std::vector<double> average(const VectorField& f, const Cube& q) {
    check_cube(f.grid, q);
    std::vector<double> sum(static_cast<std::size_t>(f.d), 0.0);
    auto cells = cells_of_cube(f.grid, q);
    for (index_t c : cells)
        for (int j = 0; j < f.d; ++j) sum[j] += f.at(c)[j];
    for (int j = 0; j < f.d; ++j) sum[j] /= static_cast<double>(cells.size());
    return sum;
}

double lp_norm(const ScalarField& f, double p, const ScalarField* weight) {
    if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
    if (weight && weight->grid != f.grid)
        throw std::domain_error("lp_norm: weight grid mismatch");
    double meas = f.grid.cell_measure();
    double sum = 0.0;
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        double w = weight ? weight->values[c] : 1.0;
        if (weight && !(w > 0.0))
            throw std::domain_error("lp_norm: weight not positive at cell " + std::to_string(c));
        sum += std::pow(std::fabs(f.values[c]), p) * w * meas;
    }
    return std::pow(sum, 1.0 / p);
}

ScalarField with_offset(const ScalarField& f, index_t offset) {
    ScalarField out = f;
    out.grid = DyadicGrid(f.grid.dim, f.grid.depth, offset);
    return out;
}

ScalarField refine(const ScalarField& f) {
    const DyadicGrid& g = f.grid;
    ScalarField out(DyadicGrid(g.dim, g.depth + 1, 0));
    index_t s = g.side();
    if (g.dim == 1) {
        for (index_t i = 0; i < s; ++i) {
            out.values[2 * i] = f.values[i];
            out.values[2 * i + 1] = f.values[i];
        }
    } else {
        index_t s2 = s * 2;
        for (index_t i0 = 0; i0 < s; ++i0)
            for (index_t i1 = 0; i1 < s; ++i1) {
                double v = f.values[i0 * s + i1];
                out.values[(2 * i0) * s2 + 2 * i1] = v;
                out.values[(2 * i0) * s2 + 2 * i1 + 1] = v;
                out.values[(2 * i0 + 1) * s2 + 2 * i1] = v;
                out.values[(2 * i0 + 1) * s2 + 2 * i1 + 1] = v;
            }
    }
    return out;
}

} // namespace weightlab

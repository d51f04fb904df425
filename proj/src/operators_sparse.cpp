#include "weightlab/operators.hpp"
#include "weightlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weightlab {

namespace {

std::vector<index_t> cells_minus(const std::vector<index_t>& a, const std::vector<index_t>& b) {
    std::vector<index_t> sa = a, sb = b, out;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
    return out;
}

} // namespace

SparseFamily sparse_nested_halves(const DyadicGrid& g) {
    SparseFamily s;
    s.grid = g;
    for (int k = 0; k < g.depth; ++k) {
        Cube q(k, 0, 0);
        Cube next(k + 1, 0, 0);
        s.members.push_back(q);
        s.witness.push_back(cells_minus(cells_of_cube(g, q), cells_of_cube(g, next)));
    }
    return s;
}

SparseFamily sparse_random(const DyadicGrid& g, std::uint64_t seed, int level_stride) {
    if (level_stride < 1) throw std::domain_error("sparse_random: stride must be >= 1");
    std::vector<int> levels;
    for (int k = 0; k <= g.depth; k += level_stride) levels.push_back(k);
    double incl = 1.0 / static_cast<double>(levels.size());
    const int kRetries = 50;
    for (int attempt = 0; attempt < kRetries; ++attempt) {
        Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(attempt));
        SparseFamily s;
        s.grid = g;
        std::vector<Cube> chosen;
        for (int k : levels) {
            index_t count = g.cubes_at_level(k);
            for (index_t i = 0; i < count; ++i) {
                if (rng.uniform() < incl) {
                    index_t n = index_t(1) << k;
                    chosen.push_back(g.dim == 1 ? Cube(k, i) : Cube(k, i / n, i % n));
                }
            }
        }
        if (chosen.empty()) chosen.push_back(Cube(0, 0, 0));
        // greedy witness assignment from the deepest cubes up
        std::sort(chosen.begin(), chosen.end(), [&](const Cube& a, const Cube& b) {
            if (a.level != b.level) return a.level > b.level;
            if (a.index[0] != b.index[0]) return a.index[0] < b.index[0];
            return a.index[1] < b.index[1];
        });
        std::vector<char> used(static_cast<std::size_t>(g.cell_count()), 0);
        bool ok = true;
        SparseFamily out;
        out.grid = g;
        for (const Cube& q : chosen) {
            auto cells = cells_of_cube(g, q);
            std::vector<index_t> free_cells;
            for (index_t c : cells)
                if (!used[static_cast<std::size_t>(c)]) free_cells.push_back(c);
            std::size_t need = (cells.size() + 1) / 2;
            if (free_cells.size() < need) {
                ok = false;
                break;
            }
            free_cells.resize(need);
            for (index_t c : free_cells) used[static_cast<std::size_t>(c)] = 1;
            out.members.push_back(q);
            out.witness.push_back(std::move(free_cells));
        }
        if (ok && is_sparse(out)) return out;
    }
    throw std::runtime_error("sparse_random: witness construction failed after retries");
}

SparseFamily sparse_stopping_time(const ScalarField& f, double threshold) {
    if (!(threshold >= 2.0)) throw std::domain_error("sparse_stopping_time: threshold must be >= 2");
    const DyadicGrid& g = f.grid;
    ScalarField af = f;
    for (double& v : af.values) v = std::fabs(v);
    auto avg = level_averages(af);
    auto avg_of = [&](const Cube& q) {
        index_t n = index_t(1) << q.level;
        index_t lin = g.dim == 1 ? q.index[0] : q.index[0] * n + q.index[1];
        return avg[static_cast<std::size_t>(q.level)][static_cast<std::size_t>(lin)];
    };
    auto children = [&](const Cube& q) {
        std::vector<Cube> out;
        if (q.level >= g.depth) return out;
        if (g.dim == 1) {
            out.push_back(Cube(q.level + 1, 2 * q.index[0]));
            out.push_back(Cube(q.level + 1, 2 * q.index[0] + 1));
        } else {
            for (index_t a = 0; a < 2; ++a)
                for (index_t b = 0; b < 2; ++b)
                    out.push_back(Cube(q.level + 1, 2 * q.index[0] + a, 2 * q.index[1] + b));
        }
        return out;
    };
    SparseFamily s;
    s.grid = g;
    std::vector<Cube> generation{Cube(0, 0, 0)};
    while (!generation.empty()) {
        std::vector<Cube> next_generation;
        for (const Cube& sel : generation) {
            double base = avg_of(sel);
            // maximal descendants whose average exceeds threshold * base
            std::vector<Cube> stack = children(sel);
            std::vector<Cube> stopped;
            while (!stack.empty()) {
                Cube q = stack.back();
                stack.pop_back();
                if (base > 0.0 && avg_of(q) > threshold * base) {
                    stopped.push_back(q);
                } else {
                    for (const Cube& ch : children(q)) stack.push_back(ch);
                }
            }
            std::sort(stopped.begin(), stopped.end(), [](const Cube& a, const Cube& b) {
                if (a.level != b.level) return a.level < b.level;
                if (a.index[0] != b.index[0]) return a.index[0] < b.index[0];
                return a.index[1] < b.index[1];
            });
            auto e_cells = cells_of_cube(g, sel);
            for (const Cube& q : stopped) e_cells = cells_minus(e_cells, cells_of_cube(g, q));
            s.members.push_back(sel);
            s.witness.push_back(std::move(e_cells));
            for (const Cube& q : stopped) next_generation.push_back(q);
        }
        generation = std::move(next_generation);
    }
    return s;
}

bool is_sparse(const SparseFamily& s) {
    if (s.members.size() != s.witness.size()) return false;
    std::vector<char> seen(static_cast<std::size_t>(s.grid.cell_count()), 0);
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        auto cells = cells_of_cube(s.grid, s.members[i]);
        std::sort(cells.begin(), cells.end());
        // E(Q) inside Q
        for (index_t c : s.witness[i])
            if (!std::binary_search(cells.begin(), cells.end(), c)) return false;
        // pairwise disjoint
        for (index_t c : s.witness[i]) {
            if (seen[static_cast<std::size_t>(c)]) return false;
            seen[static_cast<std::size_t>(c)] = 1;
        }
        // |Q| <= 2 |E(Q)|
        if (cells.size() > 2 * s.witness[i].size()) return false;
    }
    return true;
}

ScalarField sparse_scalar(const SparseFamily& s, const ScalarField& f) {
    if (s.grid != f.grid) throw std::domain_error("sparse_scalar: grid mismatch");
    ScalarField out(f.grid, 0.0);
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        double a = average(f, s.members[i]);
        for (index_t c : cells_of_cube(s.grid, s.members[i]))
            out.values[static_cast<std::size_t>(c)] += a;
    }
    return out;
}

ConvexBody convex_average(const VectorField& f, const Cube& q, DirsPtr dirs) {
    check_cube(f.grid, q);
    DirsPtr ds = dirs ? std::move(dirs) : DirectionSet::canonical(f.d);
    auto cells = cells_of_cube(f.grid, q);
    // constant integrand collapses to a segment
    bool constant = true;
    for (index_t c : cells) {
        for (int i = 0; i < f.d; ++i)
            if (f.at(c)[i] != f.at(cells.front())[i]) {
                constant = false;
                break;
            }
        if (!constant) break;
    }
    if (constant) {
        std::vector<double> v(f.at(cells.front()), f.at(cells.front()) + f.d);
        return ConvexBody::segment(std::move(v), ds);
    }
    std::vector<double> h(static_cast<std::size_t>(ds->count()), 0.0);
    for (int j = 0; j < ds->count(); ++j) {
        double s = 0.0;
        for (index_t c : cells) {
            double dp = 0.0;
            for (int i = 0; i < f.d; ++i) dp += f.at(c)[i] * ds->dir(j)[i];
            s += std::fabs(dp);
        }
        h[static_cast<std::size_t>(j)] = s / static_cast<double>(cells.size());
    }
    return ConvexBody::sampled(std::move(h), ds);
}

BodyField convex_sparse(const SparseFamily& s, const VectorField& f, DirsPtr dirs) {
    if (s.grid != f.grid) throw std::domain_error("convex_sparse: grid mismatch");
    DirsPtr ds = dirs ? std::move(dirs) : DirectionSet::canonical(f.d);
    std::vector<ConvexBody> avgs;
    avgs.reserve(s.members.size());
    for (const Cube& q : s.members) avgs.push_back(convex_average(f, q, ds));
    BodyField out(f.grid, f.d, ds);
    for (std::size_t i = 0; i < s.members.size(); ++i)
        for (index_t c : cells_of_cube(s.grid, s.members[i]))
            out.values[static_cast<std::size_t>(c)] =
                minkowski_sum(out.values[static_cast<std::size_t>(c)], avgs[i]);
    return out;
}

} // namespace weightlab

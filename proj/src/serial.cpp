#include "weightlab/serial.hpp"

#include <cmath>

namespace weightlab::serial {

namespace {

// every dyadic cube containing the given cell, finest first
std::vector<Cube> cubes_containing(const DyadicGrid& g, index_t cell) {
    std::vector<Cube> out;
    for (int k = g.depth; k >= 0; --k) out.push_back(ancestor_of_cell(g, cell, k));
    return out;
}

CharacteristicReport report_max(const DyadicGrid& g, const char* variant, double p,
                                const std::vector<double>& vals) {
    CharacteristicReport rep;
    rep.variant = variant;
    rep.p = p;
    rep.value = -1.0;
    for (index_t id = 0; id < g.cube_count(); ++id)
        if (vals[static_cast<std::size_t>(id)] > rep.value) {
            rep.value = vals[static_cast<std::size_t>(id)];
            rep.argmax_cube = cube_from_id(g, id);
        }
    return rep;
}

} // namespace

double average(const ScalarField& f, const Cube& q) {
    double s = 0.0;
    auto cells = cells_of_cube(f.grid, q);
    for (index_t c : cells) s += f.values[static_cast<std::size_t>(c)];
    return s / static_cast<double>(cells.size());
}

ScalarField maximal_scalar(const ScalarField& f) {
    ScalarField out(f.grid, 0.0);
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        double best = 0.0;
        for (const Cube& q : cubes_containing(f.grid, c)) {
            double s = 0.0;
            auto cells = cells_of_cube(f.grid, q);
            for (index_t y : cells) s += std::fabs(f.values[static_cast<std::size_t>(y)]);
            best = std::max(best, s / static_cast<double>(cells.size()));
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

ScalarField maximal_weighted_universal(const ScalarField& f, const ScalarField& w) {
    ScalarField out(f.grid, 0.0);
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        double best = 0.0;
        for (const Cube& q : cubes_containing(f.grid, c)) {
            double num = 0.0, den = 0.0;
            for (index_t y : cells_of_cube(f.grid, q)) {
                num += std::fabs(f.values[static_cast<std::size_t>(y)]) * w.values[static_cast<std::size_t>(y)];
                den += w.values[static_cast<std::size_t>(y)];
            }
            best = std::max(best, num / den);
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

ScalarField christ_goldberg(const MatrixField& w, const VectorField& f, double r) {
    ScalarField out(f.grid, 0.0);
    double tmp[kMaxDim];
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        SpdMatrix wx = w.values[static_cast<std::size_t>(c)].power_clamped(1.0 / r);
        double best = 0.0;
        for (const Cube& q : cubes_containing(f.grid, c)) {
            double s = 0.0;
            auto cells = cells_of_cube(f.grid, q);
            for (index_t y : cells) {
                SpdMatrix wy = w.values[static_cast<std::size_t>(y)].power_clamped(-1.0 / r);
                double v[kMaxDim];
                wy.apply(f.at(y), v);
                wx.apply(v, tmp);
                s += euclidean_norm(tmp, f.d);
            }
            best = std::max(best, s / static_cast<double>(cells.size()));
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

CharacteristicReport scalar_ap(const ScalarField& w, double p) {
    const DyadicGrid& g = w.grid;
    double pp = p / (p - 1.0);
    std::vector<double> vals(static_cast<std::size_t>(g.cube_count()));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        auto cells = cells_of_cube(g, cube_from_id(g, id));
        double aw = 0.0, as = 0.0;
        for (index_t c : cells) {
            aw += w.values[static_cast<std::size_t>(c)];
            as += std::pow(w.values[static_cast<std::size_t>(c)], 1.0 - pp);
        }
        aw /= static_cast<double>(cells.size());
        as /= static_cast<double>(cells.size());
        vals[static_cast<std::size_t>(id)] = aw * std::pow(as, p - 1.0);
    }
    return report_max(g, "scalar-ap", p, vals);
}

CharacteristicReport scalar_a1(const ScalarField& w) {
    const DyadicGrid& g = w.grid;
    std::vector<double> vals(static_cast<std::size_t>(g.cube_count()));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        auto cells = cells_of_cube(g, cube_from_id(g, id));
        double aw = 0.0, mn = w.values[static_cast<std::size_t>(cells.front())];
        for (index_t c : cells) {
            aw += w.values[static_cast<std::size_t>(c)];
            mn = std::min(mn, w.values[static_cast<std::size_t>(c)]);
        }
        vals[static_cast<std::size_t>(id)] = aw / static_cast<double>(cells.size()) / mn;
    }
    return report_max(g, "scalar-a1", 1.0, vals);
}

CharacteristicReport matrix_ap_roudenko(const MatrixField& w, double p) {
    const DyadicGrid& g = w.grid;
    double pp = p / (p - 1.0);
    std::vector<double> vals(static_cast<std::size_t>(g.cube_count()));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        auto cells = cells_of_cube(g, cube_from_id(g, id));
        double outer = 0.0;
        for (index_t x : cells) {
            SpdMatrix wx = w.values[static_cast<std::size_t>(x)].power_clamped(1.0 / p);
            double inner = 0.0;
            for (index_t y : cells) {
                SpdMatrix wy = w.values[static_cast<std::size_t>(y)].power_clamped(-1.0 / p);
                inner += std::pow(op_norm(mat_mul(wx, wy)), pp);
            }
            outer += std::pow(inner / static_cast<double>(cells.size()), p / pp);
        }
        vals[static_cast<std::size_t>(id)] = outer / static_cast<double>(cells.size());
    }
    return report_max(g, "matrix-ap-roudenko", p, vals);
}

CharacteristicReport matrix_a1(const MatrixField& w) {
    const DyadicGrid& g = w.grid;
    std::vector<double> vals(static_cast<std::size_t>(g.cube_count()));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        auto cells = cells_of_cube(g, cube_from_id(g, id));
        double best = 0.0;
        for (index_t x : cells) {
            SpdMatrix wx = w.values[static_cast<std::size_t>(x)].power_clamped(-1.0);
            double s = 0.0;
            for (index_t y : cells)
                s += op_norm(mat_mul(wx, w.values[static_cast<std::size_t>(y)]));
            best = std::max(best, s / static_cast<double>(cells.size()));
        }
        vals[static_cast<std::size_t>(id)] = best;
    }
    return report_max(g, "matrix-a1", 1.0, vals);
}

CharacteristicReport matrix_a2_tv(const MatrixField& w) {
    const DyadicGrid& g = w.grid;
    int d = w.d;
    std::vector<double> vals(static_cast<std::size_t>(g.cube_count()));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        auto cells = cells_of_cube(g, cube_from_id(g, id));
        SpdMatrix aw = SpdMatrix::identity(d) * 0.0;
        SpdMatrix ai = SpdMatrix::identity(d) * 0.0;
        for (index_t c : cells) {
            aw = aw + w.values[static_cast<std::size_t>(c)];
            ai = ai + w.values[static_cast<std::size_t>(c)].power_clamped(-1.0);
        }
        double n = static_cast<double>(cells.size());
        vals[static_cast<std::size_t>(id)] =
            op_norm(mat_mul((aw * (1.0 / n)).power_clamped(0.5), (ai * (1.0 / n)).power_clamped(0.5)));
    }
    return report_max(g, "matrix-a2-tv", 2.0, vals);
}

BodyField convex_maximal(const BodyField& f) {
    // direct sup over containing cubes of the Aumann-average support values
    const DyadicGrid& g = f.grid;
    DirsPtr dirs = f.values.front().dirs();
    int m = dirs->count();
    BodyField out(g, f.d, dirs);
    for (index_t c = 0; c < g.cell_count(); ++c) {
        std::vector<double> h(static_cast<std::size_t>(m), 0.0);
        for (const Cube& q : cubes_containing(g, c)) {
            auto cells = cells_of_cube(g, q);
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (index_t y : cells)
                    s += f.values[static_cast<std::size_t>(y)].support_sample(j);
                h[static_cast<std::size_t>(j)] =
                    std::max(h[static_cast<std::size_t>(j)], s / static_cast<double>(cells.size()));
            }
        }
        out.values[static_cast<std::size_t>(c)] = ConvexBody::sampled(std::move(h), dirs);
    }
    return out;
}

ScalarField hilbert_maximal(const ScalarField& f) {
    // sup over the boundary-distance eps set, each T_eps by direct integration
    const DyadicGrid& g = f.grid;
    index_t s = g.side();
    double hcell = 1.0 / static_cast<double>(s);
    ScalarField out(g, 0.0);
    for (index_t c = 0; c < s; ++c) {
        double x = (static_cast<double>(c) + 0.5) * hcell;
        double best = 0.0;
        for (index_t j = 0; j <= s; ++j) {
            double eps = std::fabs(x - static_cast<double>(j) * hcell);
            if (eps <= 0.0) continue;
            best = std::max(best, std::fabs(hilbert_truncated_at(f, x, eps)));
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

} // namespace weightlab::serial

#include "weightlab/weights.hpp"
#include "weightlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace weightlab {

namespace {

void require_positive(const ScalarField& w, const char* who) {
    for (std::size_t c = 0; c < w.values.size(); ++c)
        if (!(w.values[c] > 0.0))
            throw std::domain_error(std::string(who) + ": weight not positive at cell " +
                                     std::to_string(c));
}

ScalarField cellwise_pow(const ScalarField& w, double e) {
    ScalarField out = w;
    for (double& v : out.values) v = std::pow(v, e);
    return out;
}

// argmax over per-level cube values; scan order is deterministic
CharacteristicReport sup_over_cubes(const DyadicGrid& g,
                                    const std::vector<std::vector<double>>& per_level) {
    CharacteristicReport rep;
    rep.value = -1.0;
    for (int k = 0; k <= g.depth; ++k) {
        const auto& vals = per_level[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] > rep.value) {
                rep.value = vals[i];
                index_t n = index_t(1) << k;
                rep.argmax_cube = g.dim == 1 ? Cube(k, static_cast<index_t>(i))
                                             : Cube(k, static_cast<index_t>(i) / n,
                                                    static_cast<index_t>(i) % n);
            }
        }
    }
    return rep;
}

std::vector<std::vector<double>> per_level_buffers(const DyadicGrid& g) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(g.depth) + 1);
    for (int k = 0; k <= g.depth; ++k)
        out[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(g.cubes_at_level(k)));
    return out;
}

} // namespace

CharacteristicReport scalar_ap(const ScalarField& w, double p) {
    if (!(p > 1.0)) throw std::domain_error("scalar_ap: p must be > 1");
    require_positive(w, "scalar_ap");
    double pp = p / (p - 1.0);
    auto avg_w = level_averages(w);
    auto avg_sigma = level_averages(cellwise_pow(w, 1.0 - pp));
    auto vals = per_level_buffers(w.grid);
    for (int k = 0; k <= w.grid.depth; ++k) {
        auto& lv = vals[static_cast<std::size_t>(k)];
        const auto& aw = avg_w[static_cast<std::size_t>(k)];
        const auto& as = avg_sigma[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lv.size()); ++i)
            lv[static_cast<std::size_t>(i)] =
                aw[static_cast<std::size_t>(i)] *
                std::pow(as[static_cast<std::size_t>(i)], p - 1.0);
    }
    CharacteristicReport rep = sup_over_cubes(w.grid, vals);
    rep.variant = "scalar-ap";
    rep.p = p;
    return rep;
}

CharacteristicReport scalar_a1(const ScalarField& w) {
    require_positive(w, "scalar_a1");
    auto avg_w = level_averages(w);
    // per-level minima share the tower structure of the averages
    std::vector<std::vector<double>> min_w(static_cast<std::size_t>(w.grid.depth) + 1);
    min_w[static_cast<std::size_t>(w.grid.depth)] = avg_w[static_cast<std::size_t>(w.grid.depth)];
    const DyadicGrid& g = w.grid;
    for (int k = g.depth - 1; k >= 0; --k) {
        index_t n = index_t(1) << k;
        auto& cur = min_w[static_cast<std::size_t>(k)];
        const auto& fine = min_w[static_cast<std::size_t>(k) + 1];
        cur.resize(static_cast<std::size_t>(g.cubes_at_level(k)));
        if (g.dim == 1) {
            for (index_t i = 0; i < n; ++i)
                cur[static_cast<std::size_t>(i)] = std::min(fine[static_cast<std::size_t>(2 * i)],
                                                            fine[static_cast<std::size_t>(2 * i + 1)]);
        } else {
            index_t n2 = n * 2;
            for (index_t i0 = 0; i0 < n; ++i0)
                for (index_t i1 = 0; i1 < n; ++i1)
                    cur[static_cast<std::size_t>(i0 * n + i1)] =
                        std::min(std::min(fine[static_cast<std::size_t>((2 * i0) * n2 + 2 * i1)],
                                          fine[static_cast<std::size_t>((2 * i0) * n2 + 2 * i1 + 1)]),
                                 std::min(fine[static_cast<std::size_t>((2 * i0 + 1) * n2 + 2 * i1)],
                                          fine[static_cast<std::size_t>((2 * i0 + 1) * n2 + 2 * i1 + 1)]));
        }
    }
    auto vals = per_level_buffers(g);
    for (int k = 0; k <= g.depth; ++k)
        for (std::size_t i = 0; i < vals[static_cast<std::size_t>(k)].size(); ++i)
            vals[static_cast<std::size_t>(k)][i] =
                avg_w[static_cast<std::size_t>(k)][i] / min_w[static_cast<std::size_t>(k)][i];
    CharacteristicReport rep = sup_over_cubes(g, vals);
    rep.variant = "scalar-a1";
    rep.p = 1.0;
    return rep;
}

ScalarField dual_weight(const ScalarField& w, double p) {
    if (!(p > 1.0)) throw std::domain_error("dual_weight: p must be > 1");
    require_positive(w, "dual_weight");
    return cellwise_pow(w, 1.0 - p / (p - 1.0));
}

ScalarField reverse_factorization_scalar(const ScalarField& w0, const ScalarField& w1, double p) {
    if (!(p > 1.0)) throw std::domain_error("reverse_factorization_scalar: p must be > 1");
    if (w0.grid != w1.grid)
        throw std::domain_error("reverse_factorization_scalar: grid mismatch");
    require_positive(w0, "reverse_factorization_scalar");
    require_positive(w1, "reverse_factorization_scalar");
    ScalarField out = w0;
    for (std::size_t c = 0; c < out.values.size(); ++c)
        out.values[c] = w0.values[c] * std::pow(w1.values[c], 1.0 - p);
    return out;
}

CharacteristicReport matrix_a2_tv(const MatrixField& w) {
    bool clamped = false;
    MatrixField winv = power_field(w, -1.0, &clamped);
    auto avg_w = level_averages_matrix(w);
    auto avg_winv = level_averages_matrix(winv);
    auto vals = per_level_buffers(w.grid);
    for (int k = 0; k <= w.grid.depth; ++k) {
        auto& lv = vals[static_cast<std::size_t>(k)];
        const auto& aw = avg_w[static_cast<std::size_t>(k)];
        const auto& ai = avg_winv[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lv.size()); ++i) {
            SpdMatrix a = aw[static_cast<std::size_t>(i)].power_clamped(0.5);
            SpdMatrix b = ai[static_cast<std::size_t>(i)].power_clamped(0.5);
            lv[static_cast<std::size_t>(i)] = op_norm(mat_mul(a, b));
        }
    }
    CharacteristicReport rep = sup_over_cubes(w.grid, vals);
    rep.variant = "matrix-a2-tv";
    rep.p = 2.0;
    rep.clamped = clamped;
    return rep;
}

CharacteristicReport matrix_ap_roudenko(const MatrixField& w, double p) {
    if (!(p > 1.0)) throw std::domain_error("matrix_ap_roudenko: p must be > 1");
    double pp = p / (p - 1.0);
    bool cl_pos = false, cl_neg = false;
    MatrixField wp = power_field(w, 1.0 / p, &cl_pos);
    MatrixField wm = power_field(w, -1.0 / p, &cl_neg);
    const DyadicGrid& g = w.grid;
    auto vals = per_level_buffers(g);
    for (int k = 0; k <= g.depth; ++k) {
        auto& lv = vals[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lv.size()); ++i) {
            Cube q = g.dim == 1 ? Cube(k, static_cast<index_t>(i))
                                : Cube(k, static_cast<index_t>(i) / (index_t(1) << k),
                                       static_cast<index_t>(i) % (index_t(1) << k));
            auto cells = cells_of_cube(g, q);
            double outer = 0.0;
            for (index_t x : cells) {
                double inner = 0.0;
                for (index_t y : cells)
                    inner += std::pow(op_norm(mat_mul(wp.values[static_cast<std::size_t>(x)],
                                                      wm.values[static_cast<std::size_t>(y)])),
                                      pp);
                inner /= static_cast<double>(cells.size());
                outer += std::pow(inner, p / pp);
            }
            lv[static_cast<std::size_t>(i)] = outer / static_cast<double>(cells.size());
        }
    }
    CharacteristicReport rep = sup_over_cubes(g, vals);
    rep.variant = "matrix-ap-roudenko";
    rep.p = p;
    rep.clamped = cl_pos || cl_neg;
    return rep;
}

CharacteristicReport matrix_a1(const MatrixField& w) {
    bool clamped = false;
    MatrixField winv = power_field(w, -1.0, &clamped);
    const DyadicGrid& g = w.grid;
    auto vals = per_level_buffers(g);
    for (int k = 0; k <= g.depth; ++k) {
        auto& lv = vals[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lv.size()); ++i) {
            Cube q = g.dim == 1 ? Cube(k, static_cast<index_t>(i))
                                : Cube(k, static_cast<index_t>(i) / (index_t(1) << k),
                                       static_cast<index_t>(i) % (index_t(1) << k));
            auto cells = cells_of_cube(g, q);
            double best = 0.0;
            for (index_t x : cells) {
                double s = 0.0;
                for (index_t y : cells)
                    s += op_norm(mat_mul(winv.values[static_cast<std::size_t>(x)],
                                         w.values[static_cast<std::size_t>(y)]));
                best = std::max(best, s / static_cast<double>(cells.size()));
            }
            lv[static_cast<std::size_t>(i)] = best;
        }
    }
    CharacteristicReport rep = sup_over_cubes(g, vals);
    rep.variant = "matrix-a1";
    rep.p = 1.0;
    rep.clamped = clamped;
    return rep;
}

double tv_norm_ap_constant(const NormFunction& rho, double p,
                           const std::vector<std::vector<double>>& test_vectors) {
    if (!(p > 1.0)) throw std::domain_error("tv_norm_ap_constant: p must be > 1");
    double pp = p / (p - 1.0);
    const DyadicGrid& g = rho.grid();
    const DirectionSet& dirs = *rho.dirs();
    double best = 0.0;
    // at p = 2 a matrix-backed averaged norm is induced by (avg W^2)^{1/2},
    // so its dual is exact; otherwise the sampled-sup formula applies up to
    // the direction resolution
    bool exact_p2 = rho.matrix_backed() && p == 2.0;
    for (index_t id = 0; id < g.cube_count(); ++id) {
        Cube q = cube_from_id(g, id);
        auto cells = cells_of_cube(g, q);
        SpdMatrix dual_matrix = SpdMatrix::identity(rho.dim());
        std::vector<double> avg_on_dirs;
        if (exact_p2) {
            SpdMatrix gsum = SpdMatrix::identity(rho.dim()) * 0.0;
            for (index_t c : cells) {
                const SpdMatrix& wc = rho.matrix_field().values[static_cast<std::size_t>(c)];
                Mat w2 = mat_mul(wc, wc);
                for (int i = 0; i < rho.dim(); ++i)
                    for (int j = 0; j < rho.dim(); ++j) gsum.at(i, j) += w2.at(i, j);
            }
            dual_matrix = (gsum * (1.0 / static_cast<double>(cells.size()))).power_clamped(-0.5);
        } else {
            avg_on_dirs.resize(static_cast<std::size_t>(dirs.count()));
            for (int j = 0; j < dirs.count(); ++j) {
                double v = p_average_norm(rho, q, p, dirs.dir(j));
                if (!(v > 0.0))
                    throw std::runtime_error(
                        "tv_norm_ap_constant: degenerate averaged norm in direction " +
                        std::to_string(j));
                avg_on_dirs[static_cast<std::size_t>(j)] = v;
            }
        }
        for (const auto& v : test_vectors) {
            // <rho*>_{p',Q}(v)
            double s = 0.0;
            for (index_t c : cells) s += std::pow(rho.dual(c, v.data()), pp);
            double lhs = std::pow(s / static_cast<double>(cells.size()), 1.0 / pp);
            double rhs = 0.0;
            if (exact_p2) {
                double tmp[kMaxDim];
                dual_matrix.apply(v.data(), tmp);
                rhs = euclidean_norm(tmp, rho.dim());
            } else {
                for (int j = 0; j < dirs.count(); ++j) {
                    double num = 0.0;
                    for (int i = 0; i < rho.dim(); ++i)
                        num += v[static_cast<std::size_t>(i)] * dirs.dir(j)[i];
                    rhs = std::max(rhs, std::fabs(num) / avg_on_dirs[static_cast<std::size_t>(j)]);
                }
            }
            if (rhs > 0.0) best = std::max(best, lhs / rhs);
        }
    }
    return best;
}

CharacteristicReport a1k_characteristic(const BodyField& f) {
    const DyadicGrid& g = f.grid;
    const DirectionSet& dirs = *f.values.front().dirs();
    for (index_t c = 0; c < g.cell_count(); ++c) {
        const ConvexBody& b = f.values[static_cast<std::size_t>(c)];
        if (!b.is_absorbing(1e-12 * magnitude(b)))
            throw std::domain_error("a1k_characteristic: body not absorbing at cell " +
                                     std::to_string(c));
    }
    BodyField mf = convex_maximal(f);
    CharacteristicReport rep;
    rep.variant = "a1k";
    rep.p = 1.0;
    rep.value = 0.0;
    for (index_t c = 0; c < g.cell_count(); ++c) {
        for (int j = 0; j < dirs.count(); ++j) {
            double hf = f.values[static_cast<std::size_t>(c)].support_sample(j);
            double hm = mf.values[static_cast<std::size_t>(c)].support_sample(j);
            if (hm / hf > rep.value) {
                rep.value = hm / hf;
                rep.argmax_cube = ancestor_of_cell(g, c, g.depth);
            }
        }
    }
    return rep;
}

} // namespace weightlab

#include "weightlab/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weightlab {

void apply_thread_env_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("WEIGHTLAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < omp_get_max_threads()) omp_set_num_threads(cap);
    }
#endif
}

namespace {

ScalarField abs_field(const ScalarField& f) {
    ScalarField out = f;
    for (double& v : out.values) v = std::fabs(v);
    return out;
}

} // namespace

ScalarField maximal_scalar(const ScalarField& f) {
    const DyadicGrid& g = f.grid;
    auto avg = level_averages(abs_field(f));
    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(g.cell_count()); ++c) {
        double best = 0.0;
        for (int k = 0; k <= g.depth; ++k) {
            Cube q = ancestor_of_cell(g, c, k);
            index_t n = index_t(1) << k;
            index_t lin = g.dim == 1 ? q.index[0] : q.index[0] * n + q.index[1];
            best = std::max(best, avg[static_cast<std::size_t>(k)][static_cast<std::size_t>(lin)]);
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

ScalarField maximal_weighted_universal(const ScalarField& f, const ScalarField& w) {
    const DyadicGrid& g = f.grid;
    if (w.grid != g) throw std::domain_error("maximal_weighted_universal: grid mismatch");
    for (std::size_t c = 0; c < w.values.size(); ++c)
        if (!(w.values[c] > 0.0))
            throw std::domain_error("maximal_weighted_universal: weight not positive at cell " +
                                     std::to_string(c));
    ScalarField fw = abs_field(f);
    for (std::size_t c = 0; c < fw.values.size(); ++c) fw.values[c] *= w.values[c];
    auto avg_fw = level_averages(fw);
    auto avg_w = level_averages(w);
    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(g.cell_count()); ++c) {
        double best = 0.0;
        for (int k = 0; k <= g.depth; ++k) {
            Cube q = ancestor_of_cell(g, c, k);
            index_t n = index_t(1) << k;
            index_t lin = g.dim == 1 ? q.index[0] : q.index[0] * n + q.index[1];
            best = std::max(best, avg_fw[static_cast<std::size_t>(k)][static_cast<std::size_t>(lin)] /
                                      avg_w[static_cast<std::size_t>(k)][static_cast<std::size_t>(lin)]);
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

ScalarField christ_goldberg(const MatrixField& w, const VectorField& f, double r, bool* clamped) {
    const DyadicGrid& g = f.grid;
    if (w.grid != g || w.d != f.d) throw std::domain_error("christ_goldberg: field mismatch");
    if (!(r >= 1.0)) throw std::domain_error("christ_goldberg: r must be >= 1");
    bool cl_pos = false, cl_neg = false;
    MatrixField wp = power_field(w, 1.0 / r, &cl_pos);
    MatrixField wm = power_field(w, -1.0 / r, &cl_neg);
    if (clamped) *clamped = cl_pos || cl_neg;
    // g_y = W(y)^{-1/r} f(y), precomputed once
    VectorField gv(g, f.d);
    for (index_t c = 0; c < g.cell_count(); ++c)
        wm.values[static_cast<std::size_t>(c)].apply(f.at(c), gv.at(c));
    ScalarField out(g);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(g.cell_count()); ++c) {
        const SpdMatrix& a = wp.values[static_cast<std::size_t>(c)];
        double tmp[kMaxDim];
        double best = 0.0;
        for (int k = 0; k <= g.depth; ++k) {
            Cube q = ancestor_of_cell(g, c, k);
            auto cells = cells_of_cube(g, q);
            double s = 0.0;
            for (index_t y : cells) {
                a.apply(gv.at(y), tmp);
                s += euclidean_norm(tmp, f.d);
            }
            best = std::max(best, s / static_cast<double>(cells.size()));
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

ScalarField christ_goldberg_aux(const MatrixField& w, const VectorField& f, double p, bool* clamped) {
    const DyadicGrid& g = f.grid;
    if (w.grid != g || w.d != f.d) throw std::domain_error("christ_goldberg_aux: field mismatch");
    bool cl = false;
    MatrixField winv = power_field(w, -1.0, &cl);
    if (clamped) *clamped = cl;
    VectorField gv(g, f.d);
    for (index_t c = 0; c < g.cell_count(); ++c)
        winv.values[static_cast<std::size_t>(c)].apply(f.at(c), gv.at(c));
    // the integrand is constant per cube: one pass over cubes, then a max
    // over ancestors per cell
    std::vector<std::vector<double>> per_level(static_cast<std::size_t>(g.depth) + 1);
    for (int k = 0; k <= g.depth; ++k) {
        auto& lv = per_level[static_cast<std::size_t>(k)];
        lv.resize(static_cast<std::size_t>(g.cubes_at_level(k)));
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lv.size()); ++i) {
            index_t n = index_t(1) << k;
            Cube q = g.dim == 1 ? Cube(k, static_cast<index_t>(i))
                                : Cube(k, static_cast<index_t>(i) / n, static_cast<index_t>(i) % n);
            SpdMatrix red = reducing_matrix(w, q, p);
            auto cells = cells_of_cube(g, q);
            double tmp[kMaxDim];
            double s = 0.0;
            for (index_t y : cells) {
                red.apply(gv.at(y), tmp);
                s += euclidean_norm(tmp, f.d);
            }
            lv[static_cast<std::size_t>(i)] = s / static_cast<double>(cells.size());
        }
    }
    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(g.cell_count()); ++c) {
        double best = 0.0;
        for (int k = 0; k <= g.depth; ++k) {
            Cube q = ancestor_of_cell(g, c, k);
            index_t n = index_t(1) << k;
            index_t lin = g.dim == 1 ? q.index[0] : q.index[0] * n + q.index[1];
            best = std::max(best, per_level[static_cast<std::size_t>(k)][static_cast<std::size_t>(lin)]);
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

BodyField convex_maximal(const BodyField& f) {
    const DyadicGrid& g = f.grid;
    const DirsPtr dirs = f.values.front().dirs();
    int m = dirs->count();
    index_t cells = g.cell_count();
    // direction-wise: h_{MF(x)}(u) is the scalar dyadic maximal of h_{F(.)}(u)
    std::vector<std::vector<double>> h_out(static_cast<std::size_t>(cells),
                                           std::vector<double>(static_cast<std::size_t>(m)));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(m); ++j) {
        ScalarField hj(g);
        for (index_t c = 0; c < cells; ++c)
            hj.values[static_cast<std::size_t>(c)] =
                f.values[static_cast<std::size_t>(c)].support_sample(static_cast<int>(j));
        ScalarField mj = maximal_scalar(hj);
        for (index_t c = 0; c < cells; ++c)
            h_out[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] =
                mj.values[static_cast<std::size_t>(c)];
    }
    BodyField out(g, f.d, dirs);
    for (index_t c = 0; c < cells; ++c)
        out.values[static_cast<std::size_t>(c)] =
            ConvexBody::sampled(std::move(h_out[static_cast<std::size_t>(c)]), dirs);
    return out;
}

double lp_norm_bodyfield(const BodyField& f, double p, const MatrixField* w) {
    if (p < 1.0) throw std::domain_error("lp_norm_bodyfield: p must be >= 1");
    if (w && (w->grid != f.grid || w->d != f.d))
        throw std::domain_error("lp_norm_bodyfield: weight mismatch");
    double meas = f.grid.cell_measure();
    double sum = 0.0;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        double mag;
        if (w) {
            SpdMatrix wp = w->values[static_cast<std::size_t>(c)].power_clamped(1.0 / p);
            mag = magnitude(apply_matrix(wp, f.values[static_cast<std::size_t>(c)]));
        } else {
            mag = magnitude(f.values[static_cast<std::size_t>(c)]);
        }
        sum += std::pow(mag, p) * meas;
    }
    return std::pow(sum, 1.0 / p);
}

} // namespace weightlab

#include "weightlab/operators.hpp"
#include "weightlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace weightlab {

namespace {

ScalarField random_positive_field(const DyadicGrid& g, Rng& rng, double roughness) {
    ScalarField f(g);
    for (double& v : f.values) v = std::exp(roughness * rng.normal());
    return f;
}

BodyField random_body_field(const DyadicGrid& g, int d, Rng& rng, DirsPtr dirs) {
    BodyField f(g, d, dirs);
    int what = static_cast<int>(rng.index(3));
    for (auto& body : f.values) {
        if (what == 0) {
            std::vector<double> v(static_cast<std::size_t>(d));
            for (double& x : v) x = rng.normal();
            double sc = std::exp(0.5 * rng.normal());
            for (double& x : v) x *= sc;
            body = ConvexBody::segment(std::move(v), dirs);
        } else if (what == 1) {
            std::vector<double> diag(static_cast<std::size_t>(d));
            for (double& x : diag) x = std::exp(0.6 * rng.normal());
            body = ConvexBody::ellipsoid(SpdMatrix::diagonal(diag), dirs);
        } else {
            body = scale(std::exp(0.5 * rng.normal()), ConvexBody::unit_ball(d, dirs));
        }
    }
    return f;
}

} // namespace

OpNormEstimate operator_norm_estimate_scalar(const ScalarOp& op, const DyadicGrid& g, double p,
                                             const ScalarField* w, int trials, std::uint64_t seed,
                                             int orbit) {
    if (trials < 1) throw std::domain_error("operator_norm_estimate: trials must be >= 1");
    OpNormEstimate est;
    est.trials = trials;
    est.seed = seed;
    auto probe = [&](ScalarField f) {
        for (int t = 0; t < orbit; ++t) {
            double in = lp_norm(f, p, w);
            if (!(in > 0.0)) return; // degenerate trial, skipped
            ScalarField out = op(f);
            double ratio = lp_norm(out, p, w) / in;
            est.estimate = std::max(est.estimate, ratio);
            f = std::move(out);
        }
    };
    probe(ScalarField(g, 1.0));
    for (index_t id = 0; id < g.cube_count(); ++id) {
        ScalarField chi(g, 0.0);
        for (index_t c : cells_of_cube(g, cube_from_id(g, id)))
            chi.values[static_cast<std::size_t>(c)] = 1.0;
        probe(std::move(chi));
    }
    // localized dual-weight profiles w^{1-p'} chi_Q: the classical extremal
    // shape for weighted maximal bounds
    if (w) {
        double expo = 1.0 - p / (p - 1.0);
        for (int k = 0; k <= g.depth; ++k) {
            index_t n = index_t(1) << k;
            index_t picks[3] = {0, n / 2, n - 1};
            for (index_t i : picks) {
                ScalarField cand(g, 0.0);
                for (index_t c : cells_of_cube(g, g.dim == 1 ? Cube(k, i) : Cube(k, i, i)))
                    cand.values[static_cast<std::size_t>(c)] =
                        std::pow(w->values[static_cast<std::size_t>(c)], expo);
                probe(std::move(cand));
                if (n == 1) break;
            }
        }
    }
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Rng r = rng.fork(static_cast<std::uint64_t>(t));
        double roughness = 0.25 + 2.0 * t / std::max(1, trials - 1);
        probe(random_positive_field(g, r, roughness));
    }
    return est;
}

OpNormEstimate operator_norm_estimate_convex(const BodyOp& op, const DyadicGrid& g, int d, double p,
                                             const MatrixField* w, int trials, std::uint64_t seed,
                                             int orbit) {
    if (trials < 1) throw std::domain_error("operator_norm_estimate: trials must be >= 1");
    DirsPtr dirs = DirectionSet::canonical(d);
    OpNormEstimate est;
    est.trials = trials;
    est.seed = seed;
    auto probe = [&](BodyField f) {
        for (int t = 0; t < orbit; ++t) {
            double in = lp_norm_bodyfield(f, p, w);
            if (!(in > 0.0)) return;
            BodyField out = op(f);
            double ratio = lp_norm_bodyfield(out, p, w) / in;
            est.estimate = std::max(est.estimate, ratio);
            f = std::move(out);
        }
    };
    BodyField ball(g, d, dirs);
    for (auto& b : ball.values) b = ConvexBody::unit_ball(d, dirs);
    probe(std::move(ball));
    // ball localized on one cube per level, zero elsewhere
    for (int k = 0; k <= g.depth; ++k) {
        Cube q(k, 0, 0);
        BodyField loc(g, d, dirs);
        for (index_t c : cells_of_cube(g, q))
            loc.values[static_cast<std::size_t>(c)] = ConvexBody::unit_ball(d, dirs);
        probe(std::move(loc));
    }
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Rng r = rng.fork(static_cast<std::uint64_t>(t));
        probe(random_body_field(g, d, r, dirs));
    }
    return est;
}

RubioScalarResult rubio_iteration_scalar(const ScalarField& h, const ScalarField& w, double p,
                                         int truncation, const RubioOptions& opts) {
    if (truncation < 1) throw std::domain_error("rubio_iteration_scalar: truncation must be >= 1");
    for (double v : h.values)
        if (v < 0.0) throw std::domain_error("rubio_iteration_scalar: input must be nonnegative");
    double a0;
    if (opts.norm_estimate) {
        a0 = *opts.norm_estimate;
    } else {
        a0 = operator_norm_estimate_scalar([](const ScalarField& f) { return maximal_scalar(f); },
                                           h.grid, p, &w, opts.trials, opts.seed)
                 .estimate;
    }
    if (!(a0 > 0.0)) throw std::domain_error("rubio_iteration_scalar: operator norm estimate not positive");
    // first pass: the orbit M^k h and its realized norm ratios; the
    // normalization must dominate those ratios for the series bounds to hold
    std::vector<ScalarField> orbit;
    orbit.reserve(static_cast<std::size_t>(truncation) + 1);
    orbit.push_back(h);
    std::vector<double> norms{lp_norm(h, p, &w)};
    double a = a0;
    for (int k = 1; k <= truncation; ++k) {
        orbit.push_back(maximal_scalar(orbit.back()));
        norms.push_back(lp_norm(orbit.back(), p, &w));
        if (norms[static_cast<std::size_t>(k) - 1] > 0.0)
            a = std::max(a, norms[static_cast<std::size_t>(k)] / norms[static_cast<std::size_t>(k) - 1]);
    }
    RubioScalarResult res;
    res.norm_used = a;
    res.tail_bound = std::ldexp(norms[0], -truncation);
    res.field = ScalarField(h.grid, 0.0);
    double coef = 1.0;
    for (int k = 0; k <= truncation; ++k) {
        const auto& it = orbit[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < res.field.values.size(); ++c)
            res.field.values[c] += coef * it.values[c];
        coef /= (2.0 * a);
    }
    return res;
}

RubioConvexResult rubio_iteration_convex(const BodyField& f, const MatrixField& w, double p,
                                         int truncation, const RubioOptions& opts) {
    if (truncation < 1) throw std::domain_error("rubio_iteration_convex: truncation must be >= 1");
    double a0;
    if (opts.norm_estimate) {
        a0 = *opts.norm_estimate;
    } else {
        a0 = operator_norm_estimate_convex([](const BodyField& g) { return convex_maximal(g); },
                                           f.grid, f.d, p, &w, opts.trials, opts.seed)
                 .estimate;
    }
    if (!(a0 > 0.0)) throw std::domain_error("rubio_iteration_convex: operator norm estimate not positive");
    std::vector<BodyField> orbit;
    orbit.reserve(static_cast<std::size_t>(truncation) + 1);
    orbit.push_back(f);
    std::vector<double> norms{lp_norm_bodyfield(f, p, &w)};
    double a = a0;
    for (int k = 1; k <= truncation; ++k) {
        orbit.push_back(convex_maximal(orbit.back()));
        norms.push_back(lp_norm_bodyfield(orbit.back(), p, &w));
        if (norms[static_cast<std::size_t>(k) - 1] > 0.0)
            a = std::max(a, norms[static_cast<std::size_t>(k)] / norms[static_cast<std::size_t>(k) - 1]);
    }
    // direction-wise the series is a scalar geometric sum of support values
    DirsPtr dirs = f.values.front().dirs();
    int m = dirs->count();
    index_t cells = f.grid.cell_count();
    RubioConvexResult res;
    res.norm_used = a;
    res.tail_bound = std::ldexp(norms[0], -truncation);
    std::vector<std::vector<double>> h(static_cast<std::size_t>(cells),
                                       std::vector<double>(static_cast<std::size_t>(m), 0.0));
    double coef = 1.0;
    for (int k = 0; k <= truncation; ++k) {
        const auto& it = orbit[static_cast<std::size_t>(k)];
        for (index_t c = 0; c < cells; ++c)
            for (int j = 0; j < m; ++j)
                h[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] +=
                    coef * it.values[static_cast<std::size_t>(c)].support_sample(j);
        coef /= (2.0 * a);
    }
    res.field = BodyField(f.grid, f.d, dirs);
    for (index_t c = 0; c < cells; ++c)
        res.field.values[static_cast<std::size_t>(c)] =
            ConvexBody::sampled(std::move(h[static_cast<std::size_t>(c)]), dirs);
    return res;
}

} // namespace weightlab

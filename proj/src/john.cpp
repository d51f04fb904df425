#include "weightlab/john.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace weightlab {

namespace {

// analytic inverse for d <= 3, deterministic
void small_inverse(const double* m, int d, double* out) {
    if (d == 1) {
        if (m[0] == 0.0) throw std::runtime_error("john: singular moment matrix");
        out[0] = 1.0 / m[0];
        return;
    }
    if (d == 2) {
        double det = m[0] * m[3] - m[1] * m[2];
        if (det == 0.0) throw std::runtime_error("john: singular moment matrix");
        out[0] = m[3] / det;
        out[1] = -m[1] / det;
        out[2] = -m[2] / det;
        out[3] = m[0] / det;
        return;
    }
    double a = m[0], b = m[1], c = m[2], e = m[4], f = m[5], i = m[8];
    double det = a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c);
    if (det == 0.0) throw std::runtime_error("john: singular moment matrix");
    out[0] = (e * i - f * f) / det;
    out[1] = (c * f - b * i) / det;
    out[2] = (b * f - c * e) / det;
    out[3] = out[1];
    out[4] = (a * i - c * c) / det;
    out[5] = (c * b - a * f) / det;
    out[6] = out[2];
    out[7] = out[5];
    out[8] = (a * e - b * b) / det;
}

double small_det(const double* m, int d) {
    if (d == 1) return m[0];
    if (d == 2) return m[0] * m[3] - m[1] * m[2];
    double a = m[0], b = m[1], c = m[2], e = m[4], f = m[5], i = m[8];
    return a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c);
}

// Compensated (double-double) evaluation of 1 - q^T X q. The active slacks
// shrink to ~mu, far below the rounding of the plain quad form, and the dual
// certificate is only as good as these digits.
struct DD {
    double hi, lo;
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

double one_minus_quad_form(const double* m, const double* v, int d) {
    DD acc{0.0, 0.0};
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            DD t1 = two_prod(v[r], m[r * d + c]);
            DD t2 = two_prod(t1.hi, v[c]);
            double tlo = std::fma(t1.lo, v[c], t2.lo);
            DD s1 = two_sum(acc.hi, t2.hi);
            acc = {s1.hi, acc.lo + s1.lo + tlo};
        }
    DD r = two_sum(1.0, -acc.hi);
    return r.hi + (r.lo - acc.lo);
}

} // namespace

SpdMatrix john_ellipsoid(const ConvexBody& k, const JohnOptions& opts) {
    int d = k.dim();
    if (k.kind() == BodyKind::ellipsoid) {
        if (k.ellipsoid_matrix().min_eigenvalue() <= 0.0)
            throw std::domain_error("john_ellipsoid: body is not absorbing");
        return k.ellipsoid_matrix();
    }
    if (k.kind() == BodyKind::segment) {
        if (d == 1) {
            double h = std::fabs(k.segment_vector()[0]);
            if (h <= 0.0) throw std::domain_error("john_ellipsoid: body is not absorbing");
            return SpdMatrix::scalar(1, h);
        }
        throw std::domain_error("john_ellipsoid: segment is not absorbing for d > 1");
    }
    const DirectionSet& dirs = *k.dirs();
    int m = dirs.count();
    std::vector<double> h = k.support_samples();
    double hmax = 0.0;
    for (double v : h) hmax = std::max(hmax, v);
    for (int j = 0; j < m; ++j)
        if (!(h[static_cast<std::size_t>(j)] > 1e-14 * hmax))
            throw std::domain_error("john_ellipsoid: body is not absorbing in direction " +
                                     std::to_string(j));
    if (d == 1) return SpdMatrix::scalar(1, h[0]);

    // Maximize log det X over { X : q_j^T X q_j <= 1 }, q_j = u_j / h_j, with
    // a log-barrier Newton path-following scheme in the d(d+1)/2 symmetric
    // coordinates of X; the optimal A is X^{1/2}. The barrier multipliers
    // w_j = mu / slack_j certify both containments at the end.
    std::vector<double> q(static_cast<std::size_t>(m) * d);
    double min_h2 = 1e300;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < d; ++i)
            q[static_cast<std::size_t>(j) * d + i] = dirs.dir(j)[i] / h[static_cast<std::size_t>(j)];
        min_h2 = std::min(min_h2, h[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(j)]);
    }
    // symmetric coordinate basis
    int nv = d * (d + 1) / 2;
    std::vector<std::array<int, 2>> basis;
    for (int i = 0; i < d; ++i) basis.push_back({i, i});
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) basis.push_back({i, j});

    double X[kMaxDim * kMaxDim] = {0};
    for (int i = 0; i < d; ++i) X[i * d + i] = 0.99 * min_h2; // strictly feasible start
    std::vector<double> slack(static_cast<std::size_t>(m));
    auto refresh_slacks = [&](const double* Xc) {
        double worst = 1e300;
        for (int j = 0; j < m; ++j) {
            slack[static_cast<std::size_t>(j)] =
                one_minus_quad_form(Xc, q.data() + static_cast<std::size_t>(j) * d, d);
            worst = std::min(worst, slack[static_cast<std::size_t>(j)]);
        }
        return worst;
    };
    refresh_slacks(X);

    // the certified residual at the central point is m mu / d
    double mu = 1.0;
    const double mu_final = 1e-7 * d / m;
    int iters_used = 0;
    double Xinv[kMaxDim * kMaxDim];
    // damped Newton to the central point at the given mu
    auto newton_center = [&](double mu) {
        for (int step = 0; step < 64; ++step) {
            if (++iters_used > opts.max_iters)
                throw std::runtime_error("john_ellipsoid: no convergence, residual unknown (iteration cap)");
            small_inverse(X, d, Xinv);
            // gradient of -log det X - mu sum log slack, in basis coordinates
            double grad[kMaxDim * (kMaxDim + 1) / 2] = {0};
            double hess[(kMaxDim * (kMaxDim + 1) / 2) * (kMaxDim * (kMaxDim + 1) / 2)] = {0};
            std::vector<double> qb(static_cast<std::size_t>(m) * nv);
            for (int j = 0; j < m; ++j) {
                const double* qj = q.data() + static_cast<std::size_t>(j) * d;
                for (int kb = 0; kb < nv; ++kb) {
                    auto [a, b] = basis[static_cast<std::size_t>(kb)];
                    qb[static_cast<std::size_t>(j) * nv + kb] =
                        (a == b) ? qj[a] * qj[a] : 2.0 * qj[a] * qj[b];
                }
            }
            for (int kb = 0; kb < nv; ++kb) {
                auto [a, b] = basis[static_cast<std::size_t>(kb)];
                grad[kb] = -((a == b) ? Xinv[a * d + b] : 2.0 * Xinv[a * d + b]);
            }
            for (int j = 0; j < m; ++j) {
                double inv_s = mu / slack[static_cast<std::size_t>(j)];
                for (int kb = 0; kb < nv; ++kb)
                    grad[kb] += inv_s * qb[static_cast<std::size_t>(j) * nv + kb];
            }
            for (int kb = 0; kb < nv; ++kb) {
                auto [a, b] = basis[static_cast<std::size_t>(kb)];
                for (int lb = kb; lb < nv; ++lb) {
                    auto [c, e] = basis[static_cast<std::size_t>(lb)];
                    // tr(X^-1 B_k X^-1 B_l) for the symmetrized basis
                    double t;
                    if (a == b && c == e) t = Xinv[a * d + c] * Xinv[c * d + a];
                    else if (a == b) t = 2.0 * Xinv[a * d + c] * Xinv[e * d + a];
                    else if (c == e) t = 2.0 * Xinv[c * d + a] * Xinv[b * d + c];
                    else
                        t = 2.0 * (Xinv[a * d + c] * Xinv[e * d + b] + Xinv[a * d + e] * Xinv[c * d + b]);
                    hess[kb * nv + lb] = t;
                }
            }
            for (int j = 0; j < m; ++j) {
                double inv_s2 = mu / (slack[static_cast<std::size_t>(j)] * slack[static_cast<std::size_t>(j)]);
                for (int kb = 0; kb < nv; ++kb)
                    for (int lb = kb; lb < nv; ++lb)
                        hess[kb * nv + lb] += inv_s2 * qb[static_cast<std::size_t>(j) * nv + kb] *
                                              qb[static_cast<std::size_t>(j) * nv + lb];
            }
            for (int kb = 0; kb < nv; ++kb)
                for (int lb = 0; lb < kb; ++lb) hess[kb * nv + lb] = hess[lb * nv + kb];
            // solve hess * delta = -grad (Gaussian elimination, partial pivot)
            double aug[(kMaxDim * (kMaxDim + 1) / 2) * ((kMaxDim * (kMaxDim + 1) / 2) + 1)];
            for (int r = 0; r < nv; ++r) {
                for (int c = 0; c < nv; ++c) aug[r * (nv + 1) + c] = hess[r * nv + c];
                aug[r * (nv + 1) + nv] = -grad[r];
            }
            bool singular = false;
            for (int col = 0; col < nv && !singular; ++col) {
                int piv = col;
                for (int r = col + 1; r < nv; ++r)
                    if (std::fabs(aug[r * (nv + 1) + col]) > std::fabs(aug[piv * (nv + 1) + col]))
                        piv = r;
                if (aug[piv * (nv + 1) + col] == 0.0) {
                    singular = true; // numerically flat: keep the current center
                    break;
                }
                if (piv != col)
                    for (int c = col; c <= nv; ++c)
                        std::swap(aug[piv * (nv + 1) + c], aug[col * (nv + 1) + c]);
                for (int r = col + 1; r < nv; ++r) {
                    double f = aug[r * (nv + 1) + col] / aug[col * (nv + 1) + col];
                    for (int c = col; c <= nv; ++c) aug[r * (nv + 1) + c] -= f * aug[col * (nv + 1) + c];
                }
            }
            if (singular) break;
            double delta[kMaxDim * (kMaxDim + 1) / 2];
            for (int r = nv - 1; r >= 0; --r) {
                double s = aug[r * (nv + 1) + nv];
                for (int c = r + 1; c < nv; ++c) s -= aug[r * (nv + 1) + c] * delta[c];
                delta[r] = s / aug[r * (nv + 1) + r];
            }
            double lambda2 = 0.0;
            for (int kb = 0; kb < nv; ++kb) lambda2 += -grad[kb] * delta[kb];
            lambda2 = std::max(lambda2, 0.0);
            if (lambda2 <= 1e-20) break;
            double t = 1.0 / (1.0 + std::sqrt(lambda2));
            double Xtrial[kMaxDim * kMaxDim];
            for (int bt = 0; bt < 60; ++bt) {
                for (int i = 0; i < d * d; ++i) Xtrial[i] = X[i];
                for (int kb = 0; kb < nv; ++kb) {
                    auto [a, b] = basis[static_cast<std::size_t>(kb)];
                    Xtrial[a * d + b] += t * delta[kb];
                    if (a != b) Xtrial[b * d + a] += t * delta[kb];
                }
                bool pd = small_det(Xtrial, d) > 0.0 && Xtrial[0] > 0.0;
                if (d == 3) pd = pd && (Xtrial[0] * Xtrial[4] - Xtrial[1] * Xtrial[3]) > 0.0;
                if (pd && refresh_slacks(Xtrial) > 0.0) break;
                t *= 0.5;
            }
            for (int i = 0; i < d * d; ++i) X[i] = Xtrial[i];
            refresh_slacks(X);
        }
    };
    while (true) {
        newton_center(mu);
        if (mu <= mu_final) break;
        mu = std::max(mu * 0.2, mu_final);
    }

    // A = X^{1/2}, rescaled so the tight constraint is met with equality:
    // ellipsoid(A) inside the body holds exactly by construction, and the
    // outer factor max_j h_j / |A u_j| must come out <= sqrt(d) within the
    // residual tolerance (it tends to sqrt(d) at the true optimum).
    SpdMatrix xm = SpdMatrix::identity(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) xm.at(i, j) = X[i * d + j];
    SpdMatrix a0 = xm.power(0.5);
    double tmp[kMaxDim];
    double scale_in = 0.0, factor = 0.0;
    std::vector<double> ratio(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        a0.apply(dirs.dir(j), tmp);
        double v = euclidean_norm(tmp, d);
        ratio[static_cast<std::size_t>(j)] = v / h[static_cast<std::size_t>(j)];
        scale_in = std::max(scale_in, ratio[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < m; ++j)
        factor = std::max(factor, scale_in / ratio[static_cast<std::size_t>(j)]);
    double residual = factor / std::sqrt(static_cast<double>(d)) - 1.0;
    if (!(residual < opts.residual_tol))
        throw std::runtime_error("john_ellipsoid: no convergence, residual " + std::to_string(residual));
    return a0 * (1.0 / scale_in);
}

SpdMatrix reducing_matrix(const MatrixField& w, const Cube& q, double p, const JohnOptions& opts) {
    if (p < 1.0) throw std::domain_error("reducing_matrix: p must be >= 1");
    check_cube(w.grid, q);
    auto cells = cells_of_cube(w.grid, q);
    int d = w.d;
    for (index_t c : cells)
        if (w.values[static_cast<std::size_t>(c)].min_eigenvalue() <= 0.0)
            throw std::runtime_error("reducing_matrix: weight not positive definite at cell " +
                                      std::to_string(c));
    if (d == 1) {
        double s = 0.0;
        for (index_t c : cells) s += std::pow(w.values[static_cast<std::size_t>(c)].at(0, 0), p);
        return SpdMatrix::scalar(1, std::pow(s / static_cast<double>(cells.size()), -1.0 / p));
    }
    if (p == 2.0) {
        // <rho_W>_{2,Q}(v)^2 = v^T avg(W^2) v, so the unit ball is exactly
        // the ellipsoid of (avg W^2)^{-1/2}
        SpdMatrix g = SpdMatrix::identity(d) * 0.0;
        for (index_t c : cells) {
            const SpdMatrix& wc = w.values[static_cast<std::size_t>(c)];
            Mat w2 = mat_mul(wc, wc);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g.at(i, j) += w2.at(i, j);
        }
        g = g * (1.0 / static_cast<double>(cells.size()));
        return g.power(-0.5);
    }
    DirsPtr dirs = DirectionSet::canonical(d);
    int m = dirs->count();
    // boundary points u_j / N(u_j) of the unit ball, then their hull's
    // support samples (inner approximation of the ball)
    std::vector<std::vector<double>> pts;
    pts.reserve(static_cast<std::size_t>(m));
    double tmp[kMaxDim];
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (index_t c : cells) {
            w.values[static_cast<std::size_t>(c)].apply(dirs->dir(j), tmp);
            s += std::pow(euclidean_norm(tmp, d), p);
        }
        double n = std::pow(s / static_cast<double>(cells.size()), 1.0 / p);
        std::vector<double> b(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) b[static_cast<std::size_t>(i)] = dirs->dir(j)[i] / n;
        pts.push_back(std::move(b));
    }
    std::vector<double> h(static_cast<std::size_t>(m), 0.0);
    for (int jj = 0; jj < m; ++jj)
        for (const auto& b : pts) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += b[static_cast<std::size_t>(i)] * dirs->dir(jj)[i];
            h[static_cast<std::size_t>(jj)] = std::max(h[static_cast<std::size_t>(jj)], std::fabs(s));
        }
    return john_ellipsoid(ConvexBody::sampled(std::move(h), dirs), opts);
}

} // namespace weightlab

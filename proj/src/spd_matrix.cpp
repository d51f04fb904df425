#include "weightlab/spd_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace weightlab {

namespace {

constexpr double kJacobiTol = 1e-13;
constexpr int kJacobiMaxSweeps = 64;
constexpr double kEigenFloorRel = 1e-10;
constexpr double kSymTol = 1e-12;

double frobenius(const double* a, int d) {
    double s = 0.0;
    for (int i = 0; i < d * d; ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

// Cyclic Jacobi on a symmetric matrix; A is overwritten with the rotated
// matrix, V accumulates eigenvectors as columns. Sweep order (p,q) is fixed.
void jacobi(double* A, double* V, int d) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) V[i * d + j] = (i == j) ? 1.0 : 0.0;
    double scale = frobenius(A, d);
    if (scale == 0.0) return;
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += 2.0 * A[p * d + q] * A[p * d + q];
        if (std::sqrt(off) <= kJacobiTol * scale) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                double apq = A[p * d + q];
                if (apq == 0.0) continue;
                double app = A[p * d + p], aqq = A[q * d + q];
                double theta = 0.5 * (aqq - app) / apq;
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < d; ++k) {
                    double akp = A[k * d + p], akq = A[k * d + q];
                    A[k * d + p] = c * akp - s * akq;
                    A[k * d + q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    double apk = A[p * d + k], aqk = A[q * d + k];
                    A[p * d + k] = c * apk - s * aqk;
                    A[q * d + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    double vkp = V[k * d + p], vkq = V[k * d + q];
                    V[k * d + p] = c * vkp - s * vkq;
                    V[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    // deterministic ascending order by eigenvalue (selection sort on columns)
    for (int i = 0; i < d - 1; ++i) {
        int m = i;
        for (int j = i + 1; j < d; ++j)
            if (A[j * d + j] < A[m * d + m]) m = j;
        if (m != i) {
            std::swap(A[i * d + i], A[m * d + m]);
            for (int k = 0; k < d; ++k) std::swap(V[k * d + i], V[k * d + m]);
        }
    }
}

} // namespace

SpdMatrix::SpdMatrix(int d, const double* entries) : d_(d) {
    if (d < 1 || d > kMaxDim) throw std::domain_error("SpdMatrix: dim must be 1..4");
    double scale = 0.0;
    for (int i = 0; i < d * d; ++i) scale = std::max(scale, std::fabs(entries[i]));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double sym = 0.5 * (entries[i * d + j] + entries[j * d + i]);
            if (std::fabs(entries[i * d + j] - entries[j * d + i]) > kSymTol * std::max(1.0, scale))
                throw std::domain_error("SpdMatrix: input not symmetric");
            a_[i * d + j] = sym;
        }
}

SpdMatrix SpdMatrix::identity(int d) {
    SpdMatrix m;
    m.d_ = d;
    for (int i = 0; i < d; ++i) m.a_[i * d + i] = 1.0;
    return m;
}

SpdMatrix SpdMatrix::diagonal(const std::vector<double>& diag) {
    SpdMatrix m;
    m.d_ = static_cast<int>(diag.size());
    if (m.d_ < 1 || m.d_ > kMaxDim) throw std::domain_error("SpdMatrix: dim must be 1..4");
    for (int i = 0; i < m.d_; ++i) m.a_[i * m.d_ + i] = diag[static_cast<std::size_t>(i)];
    return m;
}

SpdMatrix SpdMatrix::scalar(int d, double c) {
    SpdMatrix m = identity(d);
    for (int i = 0; i < d; ++i) m.a_[i * d + i] = c;
    return m;
}

void SpdMatrix::spectral(std::array<double, kMaxDim>& lambda,
                         std::array<double, kMaxDim * kMaxDim>& U) const {
    std::array<double, kMaxDim * kMaxDim> A = a_;
    jacobi(A.data(), U.data(), d_);
    for (int i = 0; i < d_; ++i) lambda[static_cast<std::size_t>(i)] = A[i * d_ + i];
}

namespace {

SpdMatrix power_impl(const SpdMatrix& m, double t, bool clamp, bool* clamped) {
    int d = m.dim();
    std::array<double, kMaxDim> lam;
    std::array<double, kMaxDim * kMaxDim> U;
    m.spectral(lam, U);
    double lmax = 0.0;
    for (int i = 0; i < d; ++i) lmax = std::max(lmax, std::fabs(lam[i]));
    double floor = kEigenFloorRel * std::max(lmax, 1e-300);
    for (int i = 0; i < d; ++i) {
        if (lam[i] < -kSymTol * std::max(lmax, 1.0))
            throw std::domain_error("SpdMatrix::power: matrix not positive semi-definite (eigenvalue " +
                                     std::to_string(lam[i]) + ")");
        if (lam[i] < 0.0) lam[i] = 0.0;
    }
    std::array<double, kMaxDim> plam;
    for (int i = 0; i < d; ++i) {
        double l = lam[i];
        bool needs_positive = (t < 0.0) || (t != std::floor(t));
        if (l < floor && t < 0.0) {
            if (!clamp)
                throw std::domain_error("SpdMatrix::power: eigenvalue " + std::to_string(l) +
                                         " below regularization floor for negative exponent");
            l = floor;
            if (clamped) *clamped = true;
        } else if (l <= 0.0 && needs_positive && t > 0.0) {
            l = 0.0; // 0^t = 0 for t > 0
        }
        plam[i] = (t == 0.0) ? 1.0 : std::pow(l, t);
    }
    SpdMatrix out = SpdMatrix::identity(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += U[i * d + k] * plam[k] * U[j * d + k];
            out.at(i, j) = s;
        }
    // re-symmetrize against rounding
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            double s = 0.5 * (out.at(i, j) + out.at(j, i));
            out.at(i, j) = s;
            out.at(j, i) = s;
        }
    return out;
}

} // namespace

SpdMatrix SpdMatrix::power(double t) const { return power_impl(*this, t, false, nullptr); }

SpdMatrix SpdMatrix::power_clamped(double t, bool* clamped) const {
    return power_impl(*this, t, true, clamped);
}

double SpdMatrix::op_norm() const {
    std::array<double, kMaxDim> lam;
    std::array<double, kMaxDim * kMaxDim> U;
    spectral(lam, U);
    double m = 0.0;
    for (int i = 0; i < d_; ++i) m = std::max(m, std::fabs(lam[i]));
    return m;
}

double SpdMatrix::min_eigenvalue() const {
    std::array<double, kMaxDim> lam;
    std::array<double, kMaxDim * kMaxDim> U;
    spectral(lam, U);
    return lam[0];
}

double SpdMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += at(i, i);
    return s;
}

SpdMatrix SpdMatrix::operator+(const SpdMatrix& o) const {
    SpdMatrix out = *this;
    for (int i = 0; i < d_ * d_; ++i) out.a_[i] += o.a_[i];
    return out;
}

SpdMatrix SpdMatrix::operator*(double c) const {
    SpdMatrix out = *this;
    for (int i = 0; i < d_ * d_; ++i) out.a_[i] *= c;
    return out;
}

void SpdMatrix::apply(const double* v, double* out) const {
    for (int i = 0; i < d_; ++i) {
        double s = 0.0;
        for (int j = 0; j < d_; ++j) s += at(i, j) * v[j];
        out[i] = s;
    }
}

Mat to_mat(const SpdMatrix& s) {
    Mat m;
    m.d = s.dim();
    for (int i = 0; i < m.d * m.d; ++i) m.a[i] = s.data()[i];
    return m;
}

Mat mat_mul(const Mat& x, const Mat& y) {
    Mat out;
    out.d = x.d;
    for (int i = 0; i < x.d; ++i)
        for (int j = 0; j < x.d; ++j) {
            double s = 0.0;
            for (int k = 0; k < x.d; ++k) s += x.at(i, k) * y.at(k, j);
            out.at(i, j) = s;
        }
    return out;
}

Mat mat_mul(const SpdMatrix& x, const SpdMatrix& y) { return mat_mul(to_mat(x), to_mat(y)); }

double op_norm(const Mat& a) {
    // largest eigenvalue of A^T A, then sqrt
    int d = a.d;
    std::array<double, kMaxDim * kMaxDim> ata{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += a.at(k, i) * a.at(k, j);
            ata[i * d + j] = s;
        }
    std::array<double, kMaxDim * kMaxDim> V;
    jacobi(ata.data(), V.data(), d);
    double m = 0.0;
    for (int i = 0; i < d; ++i) m = std::max(m, ata[i * d + i]);
    return std::sqrt(std::max(0.0, m));
}

bool commuting(const SpdMatrix& a, const SpdMatrix& b, double tol) {
    Mat ab = mat_mul(a, b);
    Mat ba = mat_mul(b, a);
    Mat diff;
    diff.d = a.dim();
    for (int i = 0; i < diff.d * diff.d; ++i) diff.a[i] = ab.a[i] - ba.a[i];
    return op_norm(diff) <= tol * a.op_norm() * b.op_norm();
}

std::vector<std::vector<SpdMatrix>> level_averages_matrix(const MatrixField& f) {
    const DyadicGrid& g = f.grid;
    std::vector<std::vector<SpdMatrix>> avg(static_cast<std::size_t>(g.depth) + 1);
    index_t s = g.side();
    avg[g.depth].resize(static_cast<std::size_t>(g.cell_count()), SpdMatrix::identity(f.d));
    if (g.dim == 1) {
        for (index_t i = 0; i < s; ++i) avg[g.depth][i] = f.values[(i + g.offset) % s];
    } else {
        for (index_t i0 = 0; i0 < s; ++i0)
            for (index_t i1 = 0; i1 < s; ++i1)
                avg[g.depth][i0 * s + i1] =
                    f.values[((i0 + g.offset) % s) * s + ((i1 + g.offset) % s)];
    }
    for (int k = g.depth - 1; k >= 0; --k) {
        index_t n = index_t(1) << k;
        avg[k].resize(static_cast<std::size_t>(g.cubes_at_level(k)), SpdMatrix::identity(f.d));
        if (g.dim == 1) {
            for (index_t i = 0; i < n; ++i)
                avg[k][i] = (avg[k + 1][2 * i] + avg[k + 1][2 * i + 1]) * 0.5;
        } else {
            index_t n2 = n * 2;
            for (index_t i0 = 0; i0 < n; ++i0)
                for (index_t i1 = 0; i1 < n; ++i1)
                    avg[k][i0 * n + i1] =
                        (avg[k + 1][(2 * i0) * n2 + 2 * i1] + avg[k + 1][(2 * i0) * n2 + 2 * i1 + 1] +
                         avg[k + 1][(2 * i0 + 1) * n2 + 2 * i1] +
                         avg[k + 1][(2 * i0 + 1) * n2 + 2 * i1 + 1]) *
                        0.25;
        }
    }
    return avg;
}

MatrixField power_field(const MatrixField& f, double t, bool* any_clamped) {
    MatrixField out(f.grid, f.d);
    bool fired = false;
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        bool cl = false;
        out.values[c] = f.values[c].power_clamped(t, &cl);
        fired = fired || cl;
    }
    if (any_clamped) *any_clamped = fired;
    return out;
}

double euclidean_norm(const double* v, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

double lp_norm(const VectorField& f, double p, const MatrixField* weight) {
    if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
    if (weight && weight->grid != f.grid)
        throw std::domain_error("lp_norm: weight grid mismatch");
    double meas = f.grid.cell_measure();
    double sum = 0.0;
    double tmp[kMaxDim];
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        double nv;
        if (weight) {
            const SpdMatrix& w = weight->values[static_cast<std::size_t>(c)];
            if (w.min_eigenvalue() <= 0.0)
                throw std::runtime_error("lp_norm: singular matrix weight at cell " + std::to_string(c));
            SpdMatrix wp = w.power(1.0 / p);
            wp.apply(f.at(c), tmp);
            nv = euclidean_norm(tmp, f.d);
        } else {
            nv = euclidean_norm(f.at(c), f.d);
        }
        sum += std::pow(nv, p) * meas;
    }
    return std::pow(sum, 1.0 / p);
}

double lp_norm(const VectorField& f, double p, const ScalarField* weight) {
    if (!weight) return lp_norm(f, p, static_cast<const MatrixField*>(nullptr));
    if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
    if (weight->grid != f.grid) throw std::domain_error("lp_norm: weight grid mismatch");
    double meas = f.grid.cell_measure();
    double sum = 0.0;
    for (index_t c = 0; c < f.grid.cell_count(); ++c) {
        double w = weight->values[static_cast<std::size_t>(c)];
        if (!(w > 0.0))
            throw std::domain_error("lp_norm: weight not positive at cell " + std::to_string(c));
        sum += std::pow(euclidean_norm(f.at(c), f.d), p) * w * meas;
    }
    return std::pow(sum, 1.0 / p);
}

} // namespace weightlab

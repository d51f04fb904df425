#pragma once

#include "weightlab/grid.hpp"

#include <array>
#include <vector>

namespace weightlab {

constexpr int kMaxDim = 4;

// Symmetric positive semi-definite d x d matrix, 1 <= d <= 4. Spectral
// calculus uses cyclic Jacobi sweeps (deterministic order, off-diagonal mass
// driven below 1e-13 relative) so results are reproducible across platforms.
class SpdMatrix {
public:
    SpdMatrix() = default;
    SpdMatrix(int d, const double* entries); // row-major, symmetrized on input
    static SpdMatrix identity(int d);
    static SpdMatrix diagonal(const std::vector<double>& diag);
    static SpdMatrix scalar(int d, double c);

    int dim() const { return d_; }
    double at(int i, int j) const { return a_[i * d_ + j]; }
    double& at(int i, int j) { return a_[i * d_ + j]; }
    const double* data() const { return a_.data(); }

    // U diag(lambda_i^t) U^T. Throws if an eigenvalue is negative beyond
    // tolerance, or if t < 0 meets an eigenvalue below the regularization
    // floor (1e-10 * lambda_max).
    SpdMatrix power(double t) const;

    // Same, but eigenvalues below the floor are clamped up to it instead of
    // throwing; *clamped is set when that fires.
    SpdMatrix power_clamped(double t, bool* clamped = nullptr) const;

    double op_norm() const;   // largest |eigenvalue|
    double min_eigenvalue() const;
    double trace() const;

    // eigenvalues ascending, eigenvectors as columns of U (row-major)
    void spectral(std::array<double, kMaxDim>& lambda,
                  std::array<double, kMaxDim * kMaxDim>& U) const;

    SpdMatrix operator+(const SpdMatrix& o) const;
    SpdMatrix operator*(double c) const;

    void apply(const double* v, double* out) const; // out = A v

    bool operator==(const SpdMatrix&) const = default;

private:
    int d_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

// General (not necessarily symmetric) small dense helpers.
struct Mat {
    int d = 0;
    std::array<double, kMaxDim * kMaxDim> a{};
    double at(int i, int j) const { return a[i * d + j]; }
    double& at(int i, int j) { return a[i * d + j]; }
};

Mat to_mat(const SpdMatrix& s);
Mat mat_mul(const Mat& x, const Mat& y);
Mat mat_mul(const SpdMatrix& x, const SpdMatrix& y);

// Largest singular value (via Jacobi on A^T A).
double op_norm(const Mat& a);

// |AB - BA|_op <= tol * |A|_op * |B|_op
bool commuting(const SpdMatrix& a, const SpdMatrix& b, double tol = 1e-12);

struct MatrixField {
    DyadicGrid grid;
    int d = 1;
    std::vector<SpdMatrix> values; // one per cell

    MatrixField() = default;
    MatrixField(const DyadicGrid& g, int dd)
        : grid(g), d(dd), values(static_cast<std::size_t>(g.cell_count()), SpdMatrix::identity(dd)) {}
};

// Cubewise averages of a matrix field, same layout as level_averages.
std::vector<std::vector<SpdMatrix>> level_averages_matrix(const MatrixField& f);

// Cellwise W^t with clamping; any_clamped reports whether the floor fired.
MatrixField power_field(const MatrixField& f, double t, bool* any_clamped = nullptr);

// (sum |W(x)^{1/p} f(x)|^p |cell|)^{1/p}; weight may be null, scalar, or matrix.
double lp_norm(const VectorField& f, double p, const ScalarField* weight);
double lp_norm(const VectorField& f, double p, const MatrixField* weight = nullptr);

double euclidean_norm(const double* v, int d);

} // namespace weightlab

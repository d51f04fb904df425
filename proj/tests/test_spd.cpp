#include "weightlab/rng.hpp"
#include "weightlab/spd_matrix.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace weightlab;

namespace {

SpdMatrix random_spd(Rng& rng, int d, double spread = 1.0) {
    // A^T A + eps I from a random square matrix
    double a[kMaxDim * kMaxDim];
    for (int i = 0; i < d * d; ++i) a[i] = spread * rng.normal();
    double ata[kMaxDim * kMaxDim];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = (i == j) ? 1e-3 : 0.0;
            for (int k = 0; k < d; ++k) s += a[k * d + i] * a[k * d + j];
            ata[i * d + j] = s;
        }
    return SpdMatrix(d, ata);
}

// oracle: power iteration on A^T A for the largest singular value
double power_iteration_opnorm(const Mat& m) {
    int d = m.d;
    double v[kMaxDim];
    for (int i = 0; i < d; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(d));
    double lam = 0.0;
    for (int it = 0; it < 2000; ++it) {
        double av[kMaxDim] = {0, 0, 0, 0};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) av[i] += m.at(i, j) * v[j];
        double atav[kMaxDim] = {0, 0, 0, 0};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) atav[i] += m.at(j, i) * av[j];
        double n = euclidean_norm(atav, d);
        if (n == 0.0) return 0.0;
        lam = n;
        for (int i = 0; i < d; ++i) v[i] = atav[i] / n;
    }
    return std::sqrt(lam);
}

} // namespace

TEST_CASE("power examples") {
    SUBCASE("identity square root") {
        SpdMatrix i2 = SpdMatrix::identity(2);
        SpdMatrix r = i2.power(0.5);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(r.at(i, j) == doctest::Approx(i2.at(i, j)));
    }
    SUBCASE("diagonal spectral calculus") {
        SpdMatrix d = SpdMatrix::diagonal({4.0, 9.0});
        SpdMatrix r = d.power(0.5);
        CHECK(r.at(0, 0) == doctest::Approx(2.0));
        CHECK(r.at(1, 1) == doctest::Approx(3.0));
        CHECK(r.at(0, 1) == doctest::Approx(0.0));
    }
    SUBCASE("inverse multiplies back to the identity") {
        double e[4] = {2.0, 1.0, 1.0, 2.0};
        SpdMatrix w(2, e);
        SpdMatrix winv = w.power(-1.0);
        Mat prod = mat_mul(w, winv);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(prod.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    SUBCASE("power(1) and power(0)") {
        Rng rng(3);
        SpdMatrix w = random_spd(rng, 3);
        SpdMatrix p1 = w.power(1.0);
        SpdMatrix p0 = w.power(0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(p1.at(i, j) == doctest::Approx(w.at(i, j)).epsilon(1e-11));
                CHECK(p0.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-11));
            }
    }
    SUBCASE("not PSD rejected") {
        double e[4] = {1.0, 0.0, 0.0, -1.0};
        SpdMatrix w(2, e);
        CHECK_THROWS_AS(w.power(0.5), std::domain_error);
    }
    SUBCASE("singular inverse rejected but clampable") {
        SpdMatrix w = SpdMatrix::diagonal({1.0, 0.0});
        CHECK_THROWS_AS(w.power(-1.0), std::domain_error);
        bool clamped = false;
        SpdMatrix r = w.power_clamped(-1.0, &clamped);
        CHECK(clamped);
        CHECK(r.at(0, 0) == doctest::Approx(1.0));
        CHECK(r.at(1, 1) > 0.0);
    }
    SUBCASE("asymmetric input rejected") {
        double e[4] = {1.0, 0.5, 0.0, 1.0};
        CHECK_THROWS_AS(SpdMatrix(2, e), std::domain_error);
    }
}

TEST_CASE("op_norm examples") {
    CHECK(SpdMatrix::identity(3).op_norm() == doctest::Approx(1.0));
    CHECK(op_norm(to_mat(SpdMatrix::diagonal({3.0, -5.0}))) == doctest::Approx(5.0));
    Mat nilpotent;
    nilpotent.d = 2;
    nilpotent.a = {0.0, 2.0, 0.0, 0.0};
    CHECK(op_norm(nilpotent) == doctest::Approx(2.0));
    CHECK(op_norm(nilpotent) == doctest::Approx(power_iteration_opnorm(nilpotent)).epsilon(1e-9));
}

TEST_CASE("commuting examples") {
    Rng rng(5);
    SpdMatrix b = random_spd(rng, 2);
    CHECK(commuting(SpdMatrix::identity(2), b));
    CHECK(commuting(SpdMatrix::diagonal({1.0, 2.0}), SpdMatrix::diagonal({3.0, 4.0})));
    double e[4] = {2.0, 1.0, 1.0, 2.0};
    CHECK_FALSE(commuting(SpdMatrix(2, e), SpdMatrix::diagonal({1.0, 3.0})));
}

TEST_CASE("power law and op_norm relations") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int d = 2 + static_cast<int>(rng.index(3));
        SpdMatrix w = random_spd(rng, d);
        double s = rng.uniform(-1.0, 1.5), t = rng.uniform(0.0, 1.5);
        Mat lhs = mat_mul(w.power(s), w.power(t));
        SpdMatrix rhs = w.power(s + t);
        double scale = std::max(1.0, rhs.op_norm());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                CHECK(lhs.at(i, j) == doctest::Approx(rhs.at(i, j)).epsilon(1e-10).scale(scale));
        // |W^t|_op from the extreme eigenvalues
        std::array<double, kMaxDim> lam;
        std::array<double, kMaxDim * kMaxDim> u;
        w.spectral(lam, u);
        CHECK(w.power(t).op_norm() ==
              doctest::Approx(std::pow(lam[static_cast<std::size_t>(d - 1)], t)).epsilon(1e-9));
        CHECK(w.power(-t).op_norm() == doctest::Approx(std::pow(lam[0], -t)).epsilon(1e-9));
    }
}

TEST_CASE("op_norm is submultiplicative") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 2 + static_cast<int>(rng.index(3));
        Mat a, b;
        a.d = b.d = d;
        for (int i = 0; i < d * d; ++i) {
            a.a[static_cast<std::size_t>(i)] = rng.normal();
            b.a[static_cast<std::size_t>(i)] = rng.normal();
        }
        CHECK(op_norm(mat_mul(a, b)) <= op_norm(a) * op_norm(b) * (1.0 + 1e-12));
    }
}

TEST_CASE("matrix lp norms collapse to scalar") {
    DyadicGrid g(1, 3);
    Rng rng(11);
    VectorField f(g, 2);
    ScalarField mag(g);
    ScalarField w(g);
    MatrixField wm(g, 2);
    for (index_t c = 0; c < g.cell_count(); ++c) {
        f.at(c)[0] = rng.normal();
        f.at(c)[1] = rng.normal();
        mag.values[static_cast<std::size_t>(c)] = euclidean_norm(f.at(c), 2);
        double wv = std::exp(rng.normal());
        w.values[static_cast<std::size_t>(c)] = wv;
        wm.values[static_cast<std::size_t>(c)] = SpdMatrix::scalar(2, wv);
    }
    for (double p : {1.0, 2.0, 3.5}) {
        CHECK(lp_norm(f, p, &wm) == doctest::Approx(lp_norm(mag, p, &w)).epsilon(1e-12));
        CHECK(lp_norm(f, p, &w) == doctest::Approx(lp_norm(mag, p, &w)).epsilon(1e-12));
    }
    // constant vector with the identity weight has norm |v|
    VectorField cv(g, 2);
    for (index_t c = 0; c < g.cell_count(); ++c) {
        cv.at(c)[0] = 3.0;
        cv.at(c)[1] = 4.0;
    }
    MatrixField id(g, 2);
    CHECK(lp_norm(cv, 2.5, &id) == doctest::Approx(5.0));
}

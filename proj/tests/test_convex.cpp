#include "weightlab/field_io.hpp"
#include "weightlab/john.hpp"
#include "weightlab/norm_function.hpp"
#include "weightlab/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

using namespace weightlab;

namespace {

DirsPtr dirs2() { return DirectionSet::canonical(2); }

ConvexBody square2() {
    // [-1,1]^2 as the zonotope of the two axis segments
    return ConvexBody::zonotope({{1.0, 0.0}, {0.0, 1.0}}, dirs2());
}

ConvexBody diamond2() {
    // unit cross-polytope: hull of the axis segments
    return hull_union(ConvexBody::segment({1.0, 0.0}, dirs2()),
                      ConvexBody::segment({0.0, 1.0}, dirs2()));
}

ConvexBody random_absorbing_body(Rng& rng, int d) {
    DirsPtr ds = DirectionSet::canonical(d);
    int gens = 2 + static_cast<int>(rng.index(5));
    std::vector<std::vector<double>> v(static_cast<std::size_t>(gens));
    for (auto& gv : v) {
        gv.resize(static_cast<std::size_t>(d));
        for (double& x : gv) x = rng.normal();
    }
    return minkowski_sum(ConvexBody::zonotope(v, ds),
                         scale(0.05 + 0.5 * rng.uniform(), ConvexBody::unit_ball(d, ds)));
}

} // namespace

TEST_CASE("direction sets") {
    for (int d : {1, 2, 3}) {
        DirsPtr ds = DirectionSet::canonical(d);
        for (int j = 0; j < ds->count(); ++j)
            CHECK(euclidean_norm(ds->dir(j), d) == doctest::Approx(1.0).epsilon(1e-14));
        // no equal or antipodal pairs
        for (int i = 0; i < ds->count(); ++i)
            for (int j = i + 1; j < ds->count(); ++j) {
                double dot = 0.0;
                for (int k = 0; k < d; ++k) dot += ds->dir(i)[k] * ds->dir(j)[k];
                CHECK(std::fabs(std::fabs(dot) - 1.0) > 1e-9);
            }
    }
}

TEST_CASE("support examples") {
    double e1[2] = {1.0, 0.0};
    double e2[2] = {0.0, 1.0};
    CHECK(ConvexBody::segment({1.0, 0.0}, dirs2()).support(e1) == doctest::Approx(1.0));
    CHECK(ConvexBody::ellipsoid(SpdMatrix::diagonal({2.0, 3.0}), dirs2()).support(e2) ==
          doctest::Approx(3.0));
    double diag[2] = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
    CHECK(ConvexBody::segment({1.0, 1.0}, dirs2()).support(diag) ==
          doctest::Approx(0.0).epsilon(1e-14));
    double bad[2] = {2.0, 0.0};
    CHECK_THROWS_AS(square2().support(bad), std::domain_error);
}

TEST_CASE("support calculus") {
    Rng rng(21);
    ConvexBody k = random_absorbing_body(rng, 2);
    ConvexBody l = random_absorbing_body(rng, 2);
    SUBCASE("zero body is the Minkowski identity") {
        ConvexBody sum = minkowski_sum(k, ConvexBody::zero(2, dirs2()));
        for (int j = 0; j < dirs2()->count(); ++j)
            CHECK(sum.support_sample(j) == doctest::Approx(k.support_sample(j)));
    }
    SUBCASE("hull is idempotent, sum/scale/hull laws hold per sample") {
        ConvexBody hull_kk = hull_union(k, k);
        ConvexBody sum = minkowski_sum(k, l);
        ConvexBody hull = hull_union(k, l);
        ConvexBody sc = scale(1.5, k);
        for (int j = 0; j < dirs2()->count(); ++j) {
            CHECK(hull_kk.support_sample(j) == doctest::Approx(k.support_sample(j)));
            CHECK(sum.support_sample(j) ==
                  doctest::Approx(k.support_sample(j) + l.support_sample(j)));
            CHECK(hull.support_sample(j) ==
                  doctest::Approx(std::max(k.support_sample(j), l.support_sample(j))));
            CHECK(sc.support_sample(j) == doctest::Approx(1.5 * k.support_sample(j)));
        }
    }
    SUBCASE("segment sum along a line stays a segment") {
        ConvexBody a = ConvexBody::segment({1.0, 0.0}, dirs2());
        ConvexBody b = ConvexBody::segment({-2.0, 0.0}, dirs2());
        ConvexBody sum = minkowski_sum(a, b);
        CHECK(sum.kind() == BodyKind::segment);
        CHECK(magnitude(sum) == doctest::Approx(3.0));
    }
    SUBCASE("axis segments sum to the square") {
        ConvexBody sum = minkowski_sum(ConvexBody::segment({1.0, 0.0}, dirs2()),
                                       ConvexBody::segment({0.0, 1.0}, dirs2()));
        for (int j = 0; j < dirs2()->count(); ++j) {
            const double* u = dirs2()->dir(j);
            CHECK(sum.support_sample(j) == doctest::Approx(std::fabs(u[0]) + std::fabs(u[1])));
        }
        CHECK(sum.convexity_check());
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(minkowski_sum(k, ConvexBody::zero(3)), std::domain_error);
    }
}

TEST_CASE("contains examples") {
    Rng rng(23);
    ConvexBody k = random_absorbing_body(rng, 2);
    CHECK(contains(k, scale(0.5, k), 0.0));
    CHECK_FALSE(contains(ConvexBody::unit_ball(2, dirs2()),
                         ConvexBody::ellipsoid(SpdMatrix::diagonal({1.0, 2.0}), dirs2()), 0.0));
    CHECK(contains(square2(), ConvexBody::unit_ball(2, dirs2()), 1e-9));
}

TEST_CASE("magnitude examples") {
    CHECK(magnitude(ConvexBody::ellipsoid(SpdMatrix::diagonal({2.0, 3.0}), dirs2())) ==
          doctest::Approx(3.0));
    CHECK(magnitude(ConvexBody::segment({3.0, 4.0}, dirs2())) == doctest::Approx(5.0));
    // farthest vertex of the square: the 45-degree sample hits it exactly
    CHECK(magnitude(square2()) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("apply_matrix examples") {
    Rng rng(25);
    ConvexBody k = random_absorbing_body(rng, 2);
    SUBCASE("identity") {
        ConvexBody a = apply_matrix(SpdMatrix::identity(2), k);
        for (int j = 0; j < dirs2()->count(); ++j)
            CHECK(a.support_sample(j) == doctest::Approx(k.support_sample(j)).epsilon(1e-9));
    }
    SUBCASE("diagonal stretch of the ball") {
        ConvexBody e = apply_matrix(SpdMatrix::diagonal({2.0, 1.0}), ConvexBody::unit_ball(2, dirs2()));
        CHECK(e.kind() == BodyKind::ellipsoid);
        CHECK(e.ellipsoid_matrix().at(0, 0) == doctest::Approx(2.0));
        CHECK(e.ellipsoid_matrix().at(1, 1) == doctest::Approx(1.0));
    }
    SUBCASE("matrix-vector oracle on a segment") {
        double e[4] = {2.0, 1.0, 1.0, 2.0};
        ConvexBody s = apply_matrix(SpdMatrix(2, e), ConvexBody::segment({1.0, 0.0}, dirs2()));
        CHECK(s.kind() == BodyKind::segment);
        CHECK(s.segment_vector()[0] == doctest::Approx(2.0));
        CHECK(s.segment_vector()[1] == doctest::Approx(1.0));
    }
    SUBCASE("distributes over Minkowski sums (exact kinds)") {
        double e[4] = {1.5, 0.4, 0.4, 0.8};
        SpdMatrix a(2, e);
        ConvexBody s1 = ConvexBody::segment({0.7, -0.2}, dirs2());
        ConvexBody s2 = ConvexBody::segment({1.4, -0.4}, dirs2()); // collinear: sum stays exact
        ConvexBody lhs = apply_matrix(a, minkowski_sum(s1, s2));
        ConvexBody rhs = minkowski_sum(apply_matrix(a, s1), apply_matrix(a, s2));
        for (int j = 0; j < dirs2()->count(); ++j)
            CHECK(lhs.support_sample(j) == doctest::Approx(rhs.support_sample(j)).epsilon(1e-12));
    }
    SUBCASE("distributes over Minkowski sums (sampled, resolution-limited)") {
        ConvexBody l = random_absorbing_body(rng, 2);
        double e[4] = {1.5, 0.4, 0.4, 0.8};
        SpdMatrix a(2, e);
        ConvexBody lhs = apply_matrix(a, minkowski_sum(k, l));
        ConvexBody rhs = minkowski_sum(apply_matrix(a, k), apply_matrix(a, l));
        for (int j = 0; j < dirs2()->count(); ++j)
            CHECK(lhs.support_sample(j) == doctest::Approx(rhs.support_sample(j)).epsilon(5e-3));
    }
}

TEST_CASE("norm functions and duals") {
    DyadicGrid g(1, 2);
    SUBCASE("euclidean is self-dual") {
        auto w = std::make_shared<MatrixField>(g, 2);
        NormFunction rho = NormFunction::from_matrix_weight(w);
        double v[2] = {3.0, 4.0};
        CHECK(rho.eval(0, v) == doctest::Approx(5.0));
        CHECK(rho.dual(0, v) == doctest::Approx(5.0));
        CHECK(rho.dual_sampled(0, v) == doctest::Approx(5.0).epsilon(1e-3));
    }
    SUBCASE("diagonal dual fast path") {
        auto w = std::make_shared<MatrixField>(g, 2);
        for (auto& m : w->values) m = SpdMatrix::diagonal({2.0, 1.0});
        NormFunction rho = NormFunction::from_matrix_weight(w);
        double e1[2] = {1.0, 0.0};
        CHECK(rho.dual(0, e1) == doctest::Approx(0.5));
    }
    SUBCASE("gauge of the cross-polytope dualizes to the max norm") {
        auto f = std::make_shared<BodyField>(g, 2, dirs2());
        for (auto& b : f->values) b = diamond2();
        NormFunction rho = NormFunction::from_body_field(f);
        double v[2] = {1.0, 1.0};
        CHECK(rho.eval(0, v) == doctest::Approx(2.0));       // l1 gauge
        CHECK(rho.dual(0, v) == doctest::Approx(1.0));       // support = max norm
        CHECK(rho.dual_sampled(0, v) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("norm axioms on random vectors") {
        auto w = std::make_shared<MatrixField>(g, 2);
        Rng rng(31);
        for (auto& m : w->values) {
            double a = std::exp(rng.normal()), b = std::exp(rng.normal());
            m = SpdMatrix::diagonal({a, b});
        }
        NormFunction rho = NormFunction::from_matrix_weight(w);
        for (int t = 0; t < 50; ++t) {
            double u[2] = {rng.normal(), rng.normal()};
            double v[2] = {rng.normal(), rng.normal()};
            double s[2] = {u[0] + v[0], u[1] + v[1]};
            index_t cell = static_cast<index_t>(rng.index(4));
            CHECK(rho.eval(cell, s) <= rho.eval(cell, u) + rho.eval(cell, v) + 1e-12);
            double alpha = rng.uniform(-2.0, 2.0);
            double av[2] = {alpha * v[0], alpha * v[1]};
            CHECK(rho.eval(cell, av) ==
                  doctest::Approx(std::fabs(alpha) * rho.eval(cell, v)).epsilon(1e-12));
        }
        // duality involution on matrix norms
        auto winv = std::make_shared<MatrixField>(g, 2);
        for (std::size_t c = 0; c < w->values.size(); ++c)
            winv->values[c] = w->values[c].power(-1.0);
        NormFunction rho_dual = NormFunction::from_matrix_weight(winv);
        for (int t = 0; t < 20; ++t) {
            double v[2] = {rng.normal(), rng.normal()};
            index_t cell = static_cast<index_t>(rng.index(4));
            CHECK(rho_dual.dual(cell, v) == doctest::Approx(rho.eval(cell, v)).epsilon(1e-8));
        }
    }
}

TEST_CASE("p-average of a norm") {
    DyadicGrid g(1, 1);
    auto w = std::make_shared<MatrixField>(g, 1);
    w->values[0] = SpdMatrix::scalar(1, 2.0);
    w->values[1] = SpdMatrix::scalar(1, 1.0);
    NormFunction rho = NormFunction::from_matrix_weight(w);
    double one[1] = {1.0};
    CHECK(p_average_norm(rho, Cube(0, 0), 2.0, one) == doctest::Approx(std::sqrt(2.5)));
    double zero[1] = {0.0};
    CHECK(p_average_norm(rho, Cube(0, 0), 2.0, zero) == doctest::Approx(0.0));
    CHECK_THROWS_AS(p_average_norm(rho, Cube(0, 0), 0.5, one), std::domain_error);
    // constant norm: any p returns the norm itself
    auto wc = std::make_shared<MatrixField>(g, 2);
    for (auto& m : wc->values) m = SpdMatrix::diagonal({3.0, 0.5});
    NormFunction rc = NormFunction::from_matrix_weight(wc);
    double v[2] = {0.3, -1.1};
    CHECK(p_average_norm(rc, Cube(1, 1), 3.0, v) == doctest::Approx(rc.eval(0, v)).epsilon(1e-13));
    // triangle inequality in v for fixed Q
    Rng rng(33);
    for (int t = 0; t < 30; ++t) {
        double u2[2] = {rng.normal(), rng.normal()};
        double v2[2] = {rng.normal(), rng.normal()};
        double s2[2] = {u2[0] + v2[0], u2[1] + v2[1]};
        CHECK(p_average_norm(rc, Cube(0, 0), 2.5, s2) <=
              p_average_norm(rc, Cube(0, 0), 2.5, u2) + p_average_norm(rc, Cube(0, 0), 2.5, v2) + 1e-12);
    }
}

TEST_CASE("john ellipsoid") {
    SUBCASE("idempotent on ellipsoids") {
        double e[4] = {2.0, 0.5, 0.5, 1.0};
        SpdMatrix a(2, e);
        SpdMatrix j = john_ellipsoid(ConvexBody::ellipsoid(a, dirs2()));
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) CHECK(j.at(i, k) == doctest::Approx(a.at(i, k)));
    }
    SUBCASE("square gives the unit disc") {
        SpdMatrix j = john_ellipsoid(square2());
        CHECK(j.at(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(j.at(1, 1) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(j.at(0, 1) == doctest::Approx(0.0).epsilon(1e-5).scale(1.0));
        CHECK(contains(scale(std::sqrt(2.0), ConvexBody::ellipsoid(j, dirs2())), square2(), 1e-6));
    }
    SUBCASE("segment is not absorbing in 2D") {
        CHECK_THROWS_AS(john_ellipsoid(ConvexBody::segment({1.0, 0.0}, dirs2())), std::domain_error);
    }
    SUBCASE("random sandwich certified by the containment oracle") {
        Rng rng(41);
        for (int d : {2, 3}) {
            double sqrt_d = std::sqrt(static_cast<double>(d));
            for (int t = 0; t < 8; ++t) {
                ConvexBody k = random_absorbing_body(rng, d);
                SpdMatrix a = john_ellipsoid(k);
                ConvexBody e = ConvexBody::ellipsoid(a, k.dirs());
                CHECK(contains(k, e, 1e-6));
                CHECK(contains(scale(sqrt_d, e), k, 1e-6));
            }
        }
    }
    SUBCASE("d=1 interval") {
        DirsPtr d1 = DirectionSet::canonical(1);
        SpdMatrix j = john_ellipsoid(ConvexBody::segment({0.75}, d1));
        CHECK(j.at(0, 0) == doctest::Approx(0.75));
    }
}

TEST_CASE("reducing matrix") {
    SUBCASE("constant scalar weight") {
        DyadicGrid g(1, 2);
        MatrixField w(g, 2);
        for (auto& m : w.values) m = SpdMatrix::scalar(2, 3.0);
        for (double p : {1.0, 2.0, 3.0}) {
            SpdMatrix r = reducing_matrix(w, Cube(0, 0), p);
            CHECK(r.at(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
            CHECK(r.at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
        }
    }
    SUBCASE("d=1 is the p-average") {
        DyadicGrid g(1, 1);
        MatrixField w(g, 1);
        w.values[0] = SpdMatrix::scalar(1, 2.0);
        w.values[1] = SpdMatrix::scalar(1, 1.0);
        double p = 3.0;
        double expect = std::pow((std::pow(2.0, p) + 1.0) / 2.0, -1.0 / p);
        CHECK(reducing_matrix(w, Cube(0, 0), p).at(0, 0) == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("p=2 exact path vs the sampled-john route on a diagonal field") {
        DyadicGrid g(1, 2);
        MatrixField w(g, 2);
        Rng rng(43);
        for (auto& m : w.values)
            m = SpdMatrix::diagonal({std::exp(0.4 * rng.normal()), std::exp(0.4 * rng.normal())});
        Cube q(0, 0);
        SpdMatrix fast = reducing_matrix(w, q, 2.0);
        // oracle: diagonal entries are the inverse rms of each component
        double s0 = 0.0, s1 = 0.0;
        for (const auto& m : w.values) {
            s0 += m.at(0, 0) * m.at(0, 0);
            s1 += m.at(1, 1) * m.at(1, 1);
        }
        s0 = std::pow(s0 / 4.0, -0.5);
        s1 = std::pow(s1 / 4.0, -0.5);
        CHECK(fast.at(0, 0) == doctest::Approx(s0).epsilon(1e-10));
        CHECK(fast.at(1, 1) == doctest::Approx(s1).epsilon(1e-10));
        // the generic boundary-point construction agrees to sampling accuracy
        DirsPtr ds = dirs2();
        auto wshared = std::make_shared<MatrixField>(w);
        NormFunction rho = NormFunction::from_matrix_weight(wshared);
        std::vector<std::vector<double>> pts;
        for (int j = 0; j < ds->count(); ++j) {
            double n = p_average_norm(rho, q, 2.0, ds->dir(j));
            pts.push_back({ds->dir(j)[0] / n, ds->dir(j)[1] / n});
        }
        std::vector<double> h(static_cast<std::size_t>(ds->count()), 0.0);
        for (int j = 0; j < ds->count(); ++j)
            for (const auto& b : pts)
                h[static_cast<std::size_t>(j)] =
                    std::max(h[static_cast<std::size_t>(j)],
                             std::fabs(b[0] * ds->dir(j)[0] + b[1] * ds->dir(j)[1]));
        SpdMatrix viaJohn = john_ellipsoid(ConvexBody::sampled(h, ds));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(viaJohn.at(i, j) == doctest::Approx(fast.at(i, j)).epsilon(1e-4).scale(1.0));
    }
    SUBCASE("singular weight rejected") {
        DyadicGrid g(1, 1);
        MatrixField w(g, 2);
        w.values[0] = SpdMatrix::diagonal({1.0, 0.0});
        CHECK_THROWS(reducing_matrix(w, Cube(0, 0), 2.0));
    }
}

TEST_CASE("body fields round-trip through files") {
    DirsPtr dirs = DirectionSet::canonical(2);
    DyadicGrid g(1, 2);
    BodyField f(g, 2, dirs);
    Rng rng(71);
    f.values[0] = ConvexBody::segment({1.5, -0.25}, dirs);
    f.values[1] = ConvexBody::ellipsoid(SpdMatrix::diagonal({2.0, 0.5}), dirs);
    f.values[2] = random_absorbing_body(rng, 2);
    f.values[3] = ConvexBody::zero(2, dirs);
    write_field("body_rt.field", f);
    BodyField back = read_body_field("body_rt.field");
    for (index_t c = 0; c < g.cell_count(); ++c)
        for (int j = 0; j < dirs->count(); ++j)
            CHECK(back.values[static_cast<std::size_t>(c)].support_sample(j) ==
                  doctest::Approx(f.values[static_cast<std::size_t>(c)].support_sample(j)));
    std::remove("body_rt.field");
}

TEST_CASE("singular matrix weight is reported with the cell") {
    DyadicGrid g(1, 1);
    VectorField f(g, 2, 1.0);
    MatrixField w(g, 2);
    w.values[1] = SpdMatrix::diagonal({1.0, 0.0});
    CHECK_THROWS_WITH_AS(lp_norm(f, 2.0, &w), "lp_norm: singular matrix weight at cell 1",
                         std::runtime_error);
}

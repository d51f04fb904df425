#include "weightlab/config.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/serial.hpp"
#include "weightlab/weights.hpp"

#include "doctest.h"

#include <cmath>

using namespace weightlab;

// The OpenMP kernels against the single-threaded direct-summation reference,
// and repeatability of the parallel path itself.

TEST_CASE("parallel kernels match the serial reference") {
    DyadicGrid g(1, 6);
    ScalarField w = make_random_positive(g, 101, 0.9);
    ScalarField f = make_random_positive(g, 102, 0.8);

    SUBCASE("maximal") {
        ScalarField a = maximal_scalar(f);
        ScalarField b = serial::maximal_scalar(f);
        for (std::size_t c = 0; c < a.values.size(); ++c)
            CHECK(a.values[c] == doctest::Approx(b.values[c]).epsilon(1e-13));
    }
    SUBCASE("universal maximal") {
        ScalarField a = maximal_weighted_universal(f, w);
        ScalarField b = serial::maximal_weighted_universal(f, w);
        for (std::size_t c = 0; c < a.values.size(); ++c)
            CHECK(a.values[c] == doctest::Approx(b.values[c]).epsilon(1e-12));
    }
    SUBCASE("scalar characteristics") {
        CHECK(scalar_ap(w, 2.0).value == doctest::Approx(serial::scalar_ap(w, 2.0).value).epsilon(1e-12));
        CHECK(scalar_a1(w).value == doctest::Approx(serial::scalar_a1(w).value).epsilon(1e-12));
        CHECK(cube_id(g, scalar_ap(w, 2.0).argmax_cube) ==
              cube_id(g, serial::scalar_ap(w, 2.0).argmax_cube));
    }
    SUBCASE("2D grids too") {
        DyadicGrid g2(2, 3);
        ScalarField w2 = make_random_positive(g2, 103, 0.8);
        CHECK(scalar_ap(w2, 1.5).value ==
              doctest::Approx(serial::scalar_ap(w2, 1.5).value).epsilon(1e-12));
        ScalarField a = maximal_scalar(w2);
        ScalarField b = serial::maximal_scalar(w2);
        for (std::size_t c = 0; c < a.values.size(); ++c)
            CHECK(a.values[c] == doctest::Approx(b.values[c]).epsilon(1e-13));
    }
}

TEST_CASE("parallel path is self-consistent across reruns") {
    DyadicGrid g(1, 7);
    ScalarField w = make_random_positive(g, 201, 1.0);
    CharacteristicReport r1 = scalar_ap(w, 2.0);
    CharacteristicReport r2 = scalar_ap(w, 2.0);
    CHECK(r1.value == r2.value); // bit-identical
    ScalarField m1 = maximal_scalar(w);
    ScalarField m2 = maximal_scalar(w);
    for (std::size_t c = 0; c < m1.values.size(); ++c) CHECK(m1.values[c] == m2.values[c]);
}

TEST_CASE("matrix kernels match the serial reference") {
    DyadicGrid g(1, 4);
    MatrixField w = make_matrix_weight(g, 2, WeightSpec::parse("random(7,0.5)"));
    CHECK(matrix_ap_roudenko(w, 2.0).value ==
          doctest::Approx(serial::matrix_ap_roudenko(w, 2.0).value).epsilon(1e-11));
    CHECK(matrix_a1(w).value == doctest::Approx(serial::matrix_a1(w).value).epsilon(1e-11));
    CHECK(matrix_a2_tv(w).value == doctest::Approx(serial::matrix_a2_tv(w).value).epsilon(1e-11));
}

#include "weightlab/config.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/serial.hpp"
#include "weightlab/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

// Times the OpenMP kernels against the serial direct-summation reference and
// checks that they agree.

namespace {

using namespace weightlab;

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class F> double time_ms(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t c = 0; c < a.values.size(); ++c)
        m = std::max(m, std::fabs(a.values[c] - b.values[c]));
    return m;
}

void row(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-24s %10.2f ms %10.2f ms %8.2fx   max|diff| %.3e\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, diff);
}

} // namespace

int main() {
    apply_thread_env_cap();
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        DyadicGrid g(1, 9);
        ScalarField f = make_random_positive(g, 42, 0.8);
        ScalarField r_serial, r_par;
        double ts = time_ms([&] { r_serial = serial::maximal_scalar(f); });
        double tp = time_ms([&] { r_par = maximal_scalar(f); });
        row("maximal_scalar", ts, tp, max_abs_diff(r_serial, r_par));
    }
    {
        DyadicGrid g(1, 9);
        ScalarField w = make_random_positive(g, 43, 0.8);
        CharacteristicReport a, b;
        double ts = time_ms([&] { a = serial::scalar_ap(w, 2.0); });
        double tp = time_ms([&] { b = scalar_ap(w, 2.0); });
        row("scalar_ap", ts, tp, std::fabs(a.value - b.value));
    }
    {
        DyadicGrid g(1, 6);
        MatrixField w = make_matrix_weight(g, 2, WeightSpec::parse("random(7,0.5)"));
        CharacteristicReport a, b;
        double ts = time_ms([&] { a = serial::matrix_ap_roudenko(w, 2.0); }, 1);
        double tp = time_ms([&] { b = matrix_ap_roudenko(w, 2.0); }, 1);
        row("matrix_ap_roudenko", ts, tp, std::fabs(a.value - b.value));
    }
    {
        DyadicGrid g(1, 6);
        MatrixField w = make_matrix_weight(g, 2, WeightSpec::parse("random(9,0.4)"));
        VectorField f = make_random_vector_field(g, 2, 11);
        ScalarField r_serial, r_par;
        double ts = time_ms([&] { r_serial = serial::christ_goldberg(w, f, 1.0); });
        double tp = time_ms([&] { r_par = christ_goldberg(w, f, 1.0); });
        row("christ_goldberg", ts, tp, max_abs_diff(r_serial, r_par));
    }
    {
        DyadicGrid g(1, 5);
        BodyField f = make_random_body_field(g, 2, 13);
        BodyField a, b;
        double ts = time_ms([&] { a = serial::convex_maximal(f); }, 1);
        double tp = time_ms([&] { b = convex_maximal(f); }, 1);
        double diff = 0.0;
        for (index_t c = 0; c < g.cell_count(); ++c)
            for (int j = 0; j < a.values.front().dirs()->count(); ++j)
                diff = std::max(diff, std::fabs(a.values[static_cast<std::size_t>(c)].support_sample(j) -
                                                b.values[static_cast<std::size_t>(c)].support_sample(j)));
        row("convex_maximal", ts, tp, diff);
    }
    {
        DyadicGrid g(1, 9);
        ScalarField f = make_random_positive(g, 17, 0.8);
        ScalarField r_serial, r_par;
        double ts = time_ms([&] { r_serial = serial::hilbert_maximal(f); }, 1);
        double tp = time_ms([&] { r_par = hilbert_maximal(f); }, 1);
        row("hilbert_maximal", ts, tp, max_abs_diff(r_serial, r_par));
    }
    return 0;
}

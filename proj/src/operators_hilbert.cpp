#include "weightlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace weightlab {

namespace {

void require_1d(const ScalarField& f, const char* who) {
    if (f.grid.dim != 1) throw std::domain_error(std::string(who) + ": needs a 1D grid");
}

// int_a^b dy/(x-y) for x outside (a,b)
double kernel_integral(double x, double a, double b) {
    return std::log(std::fabs(x - a)) - std::log(std::fabs(x - b));
}

} // namespace

double hilbert_truncated_at(const ScalarField& f, double x, double eps) {
    require_1d(f, "hilbert_truncated_at");
    if (!(eps > 0.0)) throw std::domain_error("hilbert_truncated_at: eps must be positive");
    index_t s = f.grid.side();
    double hcell = 1.0 / static_cast<double>(s);
    double sum = 0.0;
    for (index_t c = 0; c < s; ++c) {
        double a = static_cast<double>(c) * hcell, b = static_cast<double>(c + 1) * hcell;
        double v = f.values[static_cast<std::size_t>(c)];
        if (v == 0.0) continue;
        // piece left of the truncation window, then piece right of it
        double lo = a, hi = std::min(b, x - eps);
        if (hi > lo) sum += v * kernel_integral(x, lo, hi);
        lo = std::max(a, x + eps);
        hi = b;
        if (hi > lo) sum += v * kernel_integral(x, lo, hi);
    }
    return sum;
}

double hilbert_truncated(const ScalarField& f, index_t cell, double eps) {
    require_1d(f, "hilbert_truncated");
    double hcell = 1.0 / static_cast<double>(f.grid.side());
    return hilbert_truncated_at(f, (static_cast<double>(cell) + 0.5) * hcell, eps);
}

ScalarField hilbert_maximal(const ScalarField& f) {
    require_1d(f, "hilbert_maximal");
    index_t s = f.grid.side();
    ScalarField out(f.grid, 0.0);
    // From the center of a cell, cell boundaries sit at distances (k+1/2)h.
    // T_eps is monotone in eps between consecutive boundary distances, so the
    // sup over eps > 0 is attained on that finite set; accumulating annuli
    // from the far side inward visits them all in O(cells) per point. The
    // annulus between distances (k+1/2)h and (k+3/2)h is one whole cell per
    // side with exact kernel mass log((k+3/2)/(k+1/2)); the own cell cancels
    // by symmetry.
    std::vector<double> step_table(static_cast<std::size_t>(s));
    for (index_t k = 0; k < s; ++k)
        step_table[static_cast<std::size_t>(k)] =
            std::log((static_cast<double>(k) + 1.5) / (static_cast<double>(k) + 0.5));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(s); ++c) {
        double t = 0.0;
        double best = 0.0;
        std::ptrdiff_t kmax = std::max(c, static_cast<std::ptrdiff_t>(s) - 1 - c);
        for (std::ptrdiff_t k = kmax; k-- > 0;) {
            double step = step_table[static_cast<std::size_t>(k)];
            double fl = (c - k - 1 >= 0) ? f.values[static_cast<std::size_t>(c - k - 1)] : 0.0;
            double fr = (c + k + 1 < static_cast<std::ptrdiff_t>(s))
                            ? f.values[static_cast<std::size_t>(c + k + 1)]
                            : 0.0;
            t += (fl - fr) * step;
            best = std::max(best, std::fabs(t));
        }
        out.values[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

} // namespace weightlab

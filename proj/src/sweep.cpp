#include "weightlab/chains.hpp"
#include "weightlab/field_io.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace weightlab {

namespace {

// least squares slope of log(ratio) vs log(characteristic) over the top half
// of the characteristic range (the asymptotic regime); returns slope and its
// standard error
bool fit_slope(const std::vector<std::pair<double, double>>& char_ratio, double* slope,
               double* stderr_out) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& cr : char_ratio)
        if (cr.first > 1.0 + 1e-12 && cr.second > 0.0)
            pts.push_back({std::log(cr.first), std::log(cr.second)});
    if (pts.size() < 2) return false;
    double xmax = -1e300, xmin = 1e300;
    for (const auto& p : pts) {
        xmax = std::max(xmax, p.first);
        xmin = std::min(xmin, p.first);
    }
    double cut = 0.5 * (xmin + xmax);
    std::vector<std::pair<double, double>> top;
    for (const auto& p : pts)
        if (p.first >= cut) top.push_back(p);
    if (top.size() < 2) top = pts;
    double n = static_cast<double>(top.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : top) {
        sx += p.first;
        sy += p.second;
        sxx += p.first * p.first;
        sxy += p.first * p.second;
    }
    double den = n * sxx - sx * sx;
    if (std::fabs(den) < 1e-30) return false;
    double b = (n * sxy - sx * sy) / den;
    double a = (sy - b * sx) / n;
    double ss = 0.0;
    for (const auto& p : top) {
        double r = p.second - (a + b * p.first);
        ss += r * r;
    }
    double se = top.size() > 2 ? std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n)) : 0.0;
    *slope = b;
    *stderr_out = se;
    return true;
}

} // namespace

SweepResult sweep_sharp_constants(const ExperimentConfig& cfg) {
    if (cfg.dim != 1) throw std::invalid_argument("sweep_sharp_constants: 1D sweep");
    DyadicGrid g(1, cfg.depth);
    SweepResult res;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::vector<double> exponents;
    for (int i = 0; i <= 9; ++i) exponents.push_back(0.1 * i);

    SparseFamily fam = sparse_nested_halves(g);
    for (double a : exponents) {
        ScalarField w = make_power_weight(g, a);
        CharacteristicReport ap = scalar_ap(w, cfg.p > 1.0 ? cfg.p : 2.0);
        double p = cfg.p > 1.0 ? cfg.p : 2.0;

        auto push_row = [&](const std::string& op, double characteristic, double ratio) {
            SweepRow row;
            row.a = a;
            row.characteristic = characteristic;
            row.op = op;
            row.ratio = ratio;
            series[op].push_back({characteristic, ratio});
            double slope = 0.0, se = 0.0;
            if (fit_slope(series[op], &slope, &se)) {
                row.slope = slope;
                row.slope_stderr = se;
            } else {
                row.slope = std::nan("");
                row.slope_stderr = std::nan("");
            }
            res.rows.push_back(row);
        };

        OpNormEstimate em = operator_norm_estimate_scalar(
            [](const ScalarField& h) { return maximal_scalar(h); }, g, p, &w, cfg.trials, cfg.seed);
        push_row("maximal", ap.value, em.estimate);

        OpNormEstimate es = operator_norm_estimate_scalar(
            [&](const ScalarField& h) { return sparse_scalar(fam, h); }, g, p, &w, cfg.trials,
            cfg.seed);
        push_row("sparse", ap.value, es.estimate);

        // empirical constant of the maximal-singular vs maximal comparison:
        // sup over trials of ||T* h||_{L^p(w)} / ||M h||_{L^p(w)}
        double tm = 0.0;
        Rng rng(cfg.seed);
        for (int t = 0; t < cfg.trials; ++t) {
            Rng r = rng.fork(static_cast<std::uint64_t>(t));
            ScalarField h = make_random_positive(g, r.next_u64(), 0.8);
            double num = lp_norm(hilbert_maximal(h), p, &w);
            double den = lp_norm(maximal_scalar(h), p, &w);
            if (den > 0.0) tm = std::max(tm, num / den);
        }
        push_row("hilbert-vs-maximal", ap.value, tm);

        // matrix variant: rotated diagonal of power weights (a, -a/(p-1));
        // ratio = ||M_W v||_{L^p} / ||v||_{L^p} over a vector battery
        WeightSpec mspec;
        mspec.kind = WeightSpec::Kind::rotated_diagonal;
        mspec.seed = cfg.seed + 3;
        mspec.exponents = {a, -a / (p - 1.0)};
        MatrixField wm = make_matrix_weight(g, 2, mspec);
        CharacteristicReport mchar = matrix_ap_roudenko(wm, p);
        double ecg = 0.0;
        auto cg_probe = [&](const VectorField& vf) {
            double in = lp_norm(vf, p, static_cast<const ScalarField*>(nullptr));
            if (!(in > 0.0)) return;
            double out = lp_norm(christ_goldberg(wm, vf, p), p, nullptr);
            ecg = std::max(ecg, out / in);
        };
        for (int axis = 0; axis < 2; ++axis)
            for (int k = 0; k <= g.depth; ++k) {
                // leftmost cube per level: the weight singularity sits at 0
                VectorField chi(g, 2);
                for (index_t c : cells_of_cube(g, Cube(k, 0)))
                    chi.at(c)[axis] = 1.0;
                cg_probe(chi);
            }
        Rng mrng(cfg.seed + 5);
        for (int t = 0; t < cfg.trials; ++t)
            cg_probe(make_random_vector_field(g, 2, mrng.next_u64()));
        push_row("christ-goldberg", mchar.value, ecg);
    }
    for (auto& kv : series) {
        double slope = 0.0, se = 0.0;
        if (fit_slope(kv.second, &slope, &se)) {
            res.final_slopes[kv.first] = slope;
            res.final_stderr[kv.first] = se;
        }
    }
    return res;
}

std::string SweepResult::to_csv() const {
    std::ostringstream ss;
    ss << "a,characteristic,operator,ratio,slope,slope_stderr\r\n";
    for (const auto& r : rows) {
        ss << format_double(r.a) << "," << format_double(r.characteristic) << "," << r.op << ","
           << format_double(r.ratio) << ",";
        if (!std::isnan(r.slope)) ss << format_double(r.slope);
        ss << ",";
        if (!std::isnan(r.slope_stderr)) ss << format_double(r.slope_stderr);
        ss << "\r\n";
    }
    return ss.str();
}

} // namespace weightlab

// Acceptance suite: one line per criterion, exit code = number of failures.
#include "weightlab/chains.hpp"
#include "weightlab/experiments.hpp"
#include "weightlab/john.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/serial.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

using namespace weightlab;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const char* name, bool ok, const std::string& detail, double secs,
            double budget) {
    bool in_budget = secs <= budget;
    if (!ok || !in_budget) ++g_failures;
    std::printf("criterion %2d %-4s %-22s %s [%.2f s <= %.0f s]\n", idx,
                ok && in_budget ? "PASS" : "FAIL", name, detail.c_str(), secs, budget);
    std::fflush(stdout);
}

std::string fmt(const char* pre, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%.3e", pre, v);
    return buf;
}

void criterion_duality() {
    Timer t;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
        ExperimentConfig cfg;
        cfg.experiment = "duality";
        cfg.depth = 8;
        cfg.p = p;
        cfg.trials = 100;
        cfg.seed = 1001 + static_cast<std::uint64_t>(10 * p);
        ExperimentResult res = run_experiment(cfg);
        worst = std::max(worst, res.metrics.at("max_rel_error"));
    }
    report(1, "duality-identity", worst <= 1e-10, fmt("max rel err ", worst), t.seconds(), 10);
}

void criterion_collapse() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "collapse";
    cfg.depth = 7;
    cfg.p = 2.5;
    cfg.trials = 50;
    cfg.seed = 2002;
    ExperimentResult res = run_experiment(cfg);
    report(2, "d1-collapse", res.passed, fmt("max rel err ", res.metrics.at("max_rel_error")),
           t.seconds(), 10);
}

void criterion_reverse_factorization() {
    Timer t;
    bool ok = true;
    int violations = 0;
    for (double p : {2.0, 3.0}) {
        ExperimentConfig cfg;
        cfg.experiment = "reverse-factorization";
        cfg.depth = 6;
        cfg.p = p;
        cfg.trials = 50;
        cfg.seed = 3003 + static_cast<std::uint64_t>(p);
        ExperimentResult res = run_experiment(cfg);
        ok = ok && res.passed;
        violations += static_cast<int>(res.metrics.at("violations"));
    }
    report(3, "reverse-factorization", ok && violations == 0,
           "violations " + std::to_string(violations) + " / 100 pairs", t.seconds(), 30);
}

void criterion_sparse_a2() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "sparse-a2";
    cfg.depth = 8;
    cfg.p = 2.0;
    cfg.trials = 50;
    cfg.seed = 4004;
    cfg.weight = WeightSpec::parse("random(404,0.8)");
    cfg.sparse_family = "random";
    ChainReport rep = verify_sparse_a2_chain(cfg);
    double ratio = rep.metrics.at("max_ratio_over_characteristic");
    report(4, "sparse-a2-chain", rep.passed() && ratio <= 8.0,
           fmt("max ratio/[w] ", ratio) + " <= 8", t.seconds(), 60);
}

void criterion_john() {
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (int d : {2, 3}) {
        ExperimentConfig cfg;
        cfg.experiment = "john";
        cfg.d = d;
        cfg.trials = d == 2 ? 50 : 20;
        cfg.seed = 5005 + static_cast<std::uint64_t>(d);
        ExperimentResult res = run_experiment(cfg);
        ok = ok && res.passed;
        worst = std::max(worst, res.metrics.at("worst_residual"));
    }
    report(5, "john-sandwich", ok, fmt("worst containment excess ", worst), t.seconds(), 60);
}

void criterion_convex_maximal() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "convex-maximal";
    cfg.depth = 5;
    cfg.d = 2;
    cfg.trials = 20;
    cfg.seed = 6006;
    ExperimentResult res = run_experiment(cfg);
    report(6, "convex-maximal", res.passed,
           fmt("identity err ", res.metrics.at("max_identity_error")) +
               fmt(", property err ", res.metrics.at("worst_property_violation")),
           t.seconds(), 30);
}

void criterion_iteration() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "iteration";
    cfg.depth = 8;
    cfg.p = 2.0;
    cfg.trials = 50;
    cfg.truncation = 40;
    cfg.seed = 7007;
    ExperimentResult res = run_experiment(cfg);
    report(7, "iteration-operators", res.passed,
           fmt("norm excess ", res.metrics.at("worst_norm_excess")) +
               fmt(", containment excess ", res.metrics.at("worst_containment_excess")),
           t.seconds(), 60);
}

void criterion_buckley() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "sweep";
    cfg.depth = 10;
    cfg.p = 2.0;
    cfg.trials = 12;
    cfg.seed = 8008;
    ExperimentResult res = run_experiment(cfg);
    double slope = res.metrics.at("maximal_slope");
    report(8, "buckley-growth", res.passed, fmt("fitted maximal slope ", slope) + " <= 1.15",
           t.seconds(), 120);
}

void criterion_hilbert() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "hilbert";
    cfg.depth = 10;
    cfg.seed = 9009;
    ExperimentResult res = run_experiment(cfg);
    report(9, "hilbert-closed-form", res.passed, fmt("abs err ", res.metrics.at("abs_error")),
           t.seconds(), 5);
}

void criterion_convex_w2() {
    Timer t;
    ExperimentConfig cfg;
    cfg.experiment = "convex-w2";
    cfg.depth = 6;
    cfg.d = 2;
    cfg.p = 2.0;
    cfg.trials = 20;
    cfg.seed = 10010;
    cfg.weight = WeightSpec::parse("rotated-diagonal(1010)");
    ChainReport rep = verify_convex_sparse_w2_chain(cfg);
    double cmax = rep.metrics.at("max_end_constant");
    bool bounded = std::isfinite(cmax) && cmax < 1e6;
    report(10, "convex-w2-chain", rep.passed() && bounded,
           fmt("end constant <= ", cmax) + " across 20 trials", t.seconds(), 120);
}

void criterion_determinism() {
    Timer t;
    bool ok = true;
    for (const char* name : {"duality", "sparse-a2"}) {
        ExperimentConfig cfg;
        cfg.experiment = name;
        cfg.depth = 5;
        cfg.trials = 3;
        cfg.seed = 11011;
        ExperimentResult a = run_experiment(cfg);
        ExperimentResult b = run_experiment(cfg);
        ok = ok && a.json == b.json && !a.json.empty();
    }
    {
        ExperimentConfig cfg;
        cfg.experiment = "sweep";
        cfg.depth = 5;
        cfg.trials = 3;
        cfg.seed = 11012;
        ExperimentResult a = run_experiment(cfg);
        ExperimentResult b = run_experiment(cfg);
        ok = ok && a.csv == b.csv && !a.csv.empty();
    }
    report(11, "determinism", ok, ok ? "artifacts byte-identical" : "artifact drift", t.seconds(),
           60);
}

} // namespace

int main() {
    apply_thread_env_cap();
    Timer total;
    criterion_duality();
    criterion_collapse();
    criterion_reverse_factorization();
    criterion_sparse_a2();
    criterion_john();
    criterion_convex_maximal();
    criterion_iteration();
    criterion_buckley();
    criterion_hilbert();
    criterion_convex_w2();
    criterion_determinism();
    std::printf("%d/11 criteria passed in %.1f s\n", 11 - g_failures, total.seconds());
    return g_failures;
}

// Acceptance harness.  Each criterion prints exactly one [PASS]/[FAIL] line;
// the exit code is nonzero if any requested criterion fails.  With no
// arguments all nine run in order; arguments pick criteria by number.
#include "uscr/errors.hpp"
#include "uscr/report_io.hpp"
#include "uscr/score.hpp"
#include "uscr/screen.hpp"
#include "uscr/simulate.hpp"

#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace uscr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ColumnMoments moments_of(std::span<const double> x) {
    double s = 0.0, q = 0.0;
    for (double v : x) {
        s += v;
        q += v * v;
    }
    const double n = double(x.size());
    return {s, q, s / n,
            x.size() > 1 ? (q - s * s / n) / (n - 1.0) : 0.0};
}

// Null draws with mildly varied parameters so the oracle sweep sees more
// than one regime per family.
std::vector<double> draw_null(Family fam, Rng& rng, std::size_t n, int rep) {
    std::vector<double> y(n);
    const double t = 0.5 + 0.1 * double(rep % 5);
    switch (fam) {
    case Family::Logistic:
        for (double& v : y) v = rng.bernoulli(0.2 + 0.1 * double(rep % 6));
        break;
    case Family::Poisson:
        for (double& v : y) v = rng.poisson(1.0 + 2.0 * t);
        break;
    case Family::Gamma:
        for (double& v : y) v = rng.gamma(1.0 + 4.0 * t, 2.0 * t);
        break;
    case Family::NegBin:
        for (double& v : y) v = rng.negbin(2.0 + 2.0 * t, 4.0 + 4.0 * t);
        break;
    case Family::Beta:
        for (double& v : y) v = rng.beta(0.5 + 2.0 * t, 0.5 + 4.0 * t);
        break;
    case Family::Weibull:
        for (double& v : y) v = rng.weibull(0.8 + t, 1.0 + t);
        break;
    }
    return y;
}

SimDesign design(Family fam, std::vector<double> params, std::size_t n,
                 std::size_t d, std::size_t reps, std::uint64_t seed) {
    SimDesign ds;
    ds.family = fam;
    ds.null_params = std::move(params);
    ds.n = n;
    ds.d = d;
    ds.replications = reps;
    ds.seed = seed;
    return ds;
}

bool report(int crit, bool ok, const std::string& what,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s: %s\n", ok ? "PASS" : "FAIL", crit,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::string fmt(double v) { return format_double(v); }

// 1. Score statistics match an independent finite-difference likelihood
//    derivative on every family, 50 datasets each at n = 200, within 1e-4,
//    in under a minute.
bool criterion1() {
    const auto t0 = Clock::now();
    Rng rng(201);
    double worst = 0.0;
    for (Family fam : kAllFamilies) {
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t n = 200;
            ResponseVector y{draw_null(fam, rng, n, rep), required_kind(fam)};
            std::vector<double> x(n);
            for (double& v : x) v = rng.normal() + 0.5;
            const NullFit nf = fit_null(y, fam);
            const TestOutcome out = score_statistic(y, nf, x, moments_of(x));
            const double s_fd = oracle::fd_score(fam, y, x, nf);
            worst = std::fmax(worst, std::fabs(out.statistic - s_fd));
        }
    }
    const double elapsed = seconds_since(t0);
    return report(1, worst <= 1e-4 && elapsed < 60.0,
                  "score matches finite-difference oracle (6 families x 50)",
                  "worst |S - S_fd| = " + fmt(worst) + ", " + fmt(elapsed) +
                      "s");
}

// 2. Logistic type I error at alpha = 0.05: score and LLR rates inside
//    [0.04, 0.06] and equal within 0.002 at p in {0.1, 0.5}.
bool criterion2() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (double p : {0.1, 0.5}) {
        const MetricsTable t = run_experiment(
            design(Family::Logistic, {p}, 20000, 200, 10, 3002),
            {TestKind::Score, TestKind::Llr}, 1);
        const double rs = t.per_test[0].type_i_error;
        const double rl = t.per_test[1].type_i_error;
        ok = ok && rs >= 0.04 && rs <= 0.06 && rl >= 0.04 && rl <= 0.06 &&
             std::fabs(rs - rl) <= 0.002;
        if (!detail.empty()) detail += "; ";
        detail += "p=" + fmt(p) + " score=" + fmt(rs) + " llr=" + fmt(rl);
    }
    const double elapsed = seconds_since(t0);
    return report(2, ok && elapsed < 600.0,
                  "logistic type I error in [0.04, 0.06], tests within 0.002",
                  detail + ", " + fmt(elapsed) + "s");
}

// 3. Same logistic setup: score vs LLR p-value correlation and agreement
//    both >= 0.999; Welch vs LLR agreement >= 0.998.
bool criterion3() {
    bool ok = true;
    std::string detail;
    for (double p : {0.1, 0.5}) {
        const MetricsTable t = run_experiment(
            design(Family::Logistic, {p}, 20000, 200, 10, 1003),
            {TestKind::Llr, TestKind::Score, TestKind::WelchT}, 1);
        const PairSummary& score = t.pairs[0];
        const PairSummary& welch = t.pairs[1];
        ok = ok && score.pvalue_correlation >= 0.999 &&
             score.agreement >= 0.999 && welch.agreement >= 0.998;
        if (!detail.empty()) detail += "; ";
        detail += "p=" + fmt(p) + " corr=" + fmt(score.pvalue_correlation) +
                  " agree=" + fmt(score.agreement) +
                  " welch_agree=" + fmt(welch.agreement);
    }
    return report(3, ok, "score/welch track llr p-values on logistic nulls",
                  detail);
}

// 4. Gamma(5,5) at n = 5x10^4: score vs LLR correlation and agreement both
//    >= 0.999.
bool criterion4() {
    const MetricsTable t = run_experiment(
        design(Family::Gamma, {5.0, 5.0}, 50000, 100, 10, 2004),
        {TestKind::Llr, TestKind::Score}, 1);
    const PairSummary& pair = t.pairs[0];
    const bool ok =
        pair.pvalue_correlation >= 0.999 && pair.agreement >= 0.999;
    return report(4, ok, "gamma score tracks llr at n = 50000",
                  "corr=" + fmt(pair.pvalue_correlation) +
                      " agree=" + fmt(pair.agreement));
}

// 5. Beta small samples: score type I error in [0.035, 0.075] at n = 100
//    for both (0.5, 0.5) and (5, 10) nulls.
bool criterion5() {
    bool ok = true;
    std::string detail;
    const std::vector<std::vector<double>> settings{{0.5, 0.5}, {5.0, 10.0}};
    for (const auto& params : settings) {
        const MetricsTable t = run_experiment(
            design(Family::Beta, params, 100, 100, 10, 1005),
            {TestKind::Score}, 1);
        const double rate = t.per_test[0].type_i_error;
        ok = ok && rate >= 0.035 && rate <= 0.075;
        if (!detail.empty()) detail += "; ";
        detail += "(" + fmt(params[0]) + "," + fmt(params[1]) +
                  ") rate=" + fmt(rate);
    }
    return report(5, ok, "beta score type I error at n = 100 in [0.035, 0.075]",
                  detail);
}

// 6. Planted-column detection over the three beta nulls: perfect first-rank
//    at n = 500 for score and pearson; at n = 100 score leads pearson by at
//    least 0.10 pooled across the nulls.
bool criterion6() {
    const std::vector<std::vector<double>> triples{
        {5.0, 10.0}, {0.5, 0.5}, {10.0, 5.0}};
    bool ok = true;
    double sum100_score = 0.0, sum100_pearson = 0.0;
    std::string detail;
    for (const auto& params : triples) {
        const DetectionMetrics big = run_planted_experiment(
            design(Family::Beta, params, 500, 100, 20, 42),
            {TestKind::Score, TestKind::PearsonZ}, 1);
        ok = ok && big.first_rank_rate[0] == 1.0 &&
             big.first_rank_rate[1] == 1.0;
        const DetectionMetrics small = run_planted_experiment(
            design(Family::Beta, params, 100, 100, 20, 42),
            {TestKind::Score, TestKind::PearsonZ}, 1);
        sum100_score += small.first_rank_rate[0];
        sum100_pearson += small.first_rank_rate[1];
        if (!detail.empty()) detail += "; ";
        detail += "(" + fmt(params[0]) + "," + fmt(params[1]) + ") n500=" +
                  fmt(big.first_rank_rate[0]) + "/" +
                  fmt(big.first_rank_rate[1]) + " n100=" +
                  fmt(small.first_rank_rate[0]) + "/" +
                  fmt(small.first_rank_rate[1]);
    }
    const double gap = (sum100_score - sum100_pearson) / double(triples.size());
    ok = ok && gap >= 0.10;
    return report(6, ok, "planted detection: certain at n = 500, score leads "
                         "pearson by >= 0.10 at n = 100",
                  detail + "; gap=" + fmt(gap));
}

// 7. Speed: logistic score sweep at n = 10^5, d = 500 at least 10x faster
//    than the LLR sweep.  The beta ratio is reported alongside, ungated.
bool criterion7() {
    ScreeningConfig cfg;
    cfg.tests = {TestKind::Score, TestKind::Llr};
    cfg.threads = 1;

    cfg.family = Family::Logistic;
    const Dataset lg = generate_null_dataset(
        design(Family::Logistic, {0.3}, 100000, 500, 1, 1007), 0);
    const ScreeningReport lg_rep = screen(lg, cfg);
    const double lg_ratio = lg_rep.test_seconds[1] / lg_rep.test_seconds[0];

    cfg.family = Family::Beta;
    const Dataset bt = generate_null_dataset(
        design(Family::Beta, {5.0, 10.0}, 100000, 500, 1, 1007), 0);
    const ScreeningReport bt_rep = screen(bt, cfg);
    const double bt_ratio = bt_rep.test_seconds[1] / bt_rep.test_seconds[0];

    return report(7, lg_ratio >= 10.0,
                  "score sweep >= 10x faster than llr at n = 100000, d = 500",
                  "logistic " + fmt(lg_ratio) + "x (gated), beta " +
                      fmt(bt_ratio) + "x (reported)");
}

// 8. Null calibration: for every family, 2000 pooled null p-values per test
//    pass KS uniformity at level 0.01, and LLR flooring never sees a raw
//    statistic below -1e-8.
bool criterion8() {
    bool ok = true;
    double worst_margin = 0.0; // max D / critical over all (family, test)
    double min_raw = 0.0;
    std::string detail;
    for (Family fam : kAllFamilies) {
        std::vector<TestKind> tests{TestKind::Score, TestKind::Llr};
        if (fam == Family::Logistic) tests.push_back(TestKind::WelchT);
        const SimDesign ds =
            design(fam, {}, 10000, 100, 20, 1008 + std::uint64_t(fam));
        ScreeningConfig cfg;
        cfg.family = fam;
        cfg.tests = tests;
        cfg.rule = SelectionRule::Threshold;
        cfg.threads = 1;
        std::vector<std::vector<double>> pooled(tests.size());
        for (std::size_t rep = 0; rep < ds.replications; ++rep) {
            const ScreeningReport rp =
                screen(generate_null_dataset(ds, rep), cfg);
            for (std::size_t ti = 0; ti < tests.size(); ++ti)
                for (const ColumnResult& col : rp.columns)
                    if (col.cells[ti].ok())
                        pooled[ti].push_back(col.cells[ti].outcome.pvalue);
            min_raw = std::min(min_raw, rp.min_raw_llr);
        }
        for (std::size_t ti = 0; ti < tests.size(); ++ti) {
            const double dist = ks_uniform_distance(pooled[ti]);
            const double crit = ks_uniform_critical(pooled[ti].size(), 0.01);
            ok = ok && pooled[ti].size() == 2000 && dist < crit;
            worst_margin = std::fmax(worst_margin, dist / crit);
            if (pooled[ti].size() != 2000) {
                detail += " [" + family_name(fam) + "/" +
                          test_kind_name(tests[ti]) + " n=" +
                          std::to_string(pooled[ti].size()) + "]";
            }
        }
        if (!detail.empty()) detail += " ";
        detail += family_name(fam);
    }
    ok = ok && min_raw >= -1e-8;
    return report(8, ok, "pooled null p-values uniform per family and test",
                  "families: " + detail + "; worst D/crit=" +
                      fmt(worst_margin) + ", min raw llr=" + fmt(min_raw));
}

// 9. Determinism: screening and metrics outputs are byte-identical across
//    thread counts and across repeated runs with the same seed.
bool criterion9() {
    const Dataset ds = generate_null_dataset(
        design(Family::Poisson, {5.0}, 3000, 64, 1, 1009), 0);
    ScreeningConfig cfg;
    cfg.family = Family::Poisson;
    cfg.tests = {TestKind::Score, TestKind::Llr};
    cfg.threads = 1;
    ScreeningConfig cfg8 = cfg;
    cfg8.threads = 8;
    const std::string s1 = screening_report_csv(screen(ds, cfg), {}, false);
    const std::string s8 = screening_report_csv(screen(ds, cfg8), {}, false);
    const std::string s1b = screening_report_csv(screen(ds, cfg), {}, false);
    const std::string j1 = screening_report_json(screen(ds, cfg), {}, false);
    const std::string j8 = screening_report_json(screen(ds, cfg8), {}, false);
    // cfg8 carries a different thread count; equal bytes also prove the
    // header never leaks the execution resource.
    bool ok = s1 == s8 && s1 == s1b && j1 == j8;

    const SimDesign md = design(Family::Logistic, {0.3}, 1000, 30, 3, 1009);
    const std::vector<TestKind> tests{TestKind::Score, TestKind::Llr};
    const std::string m1 =
        metrics_table_csv(run_experiment(md, tests, 1), {}, false);
    const std::string m8 =
        metrics_table_csv(run_experiment(md, tests, 8), {}, false);
    const std::string m1b =
        metrics_table_csv(run_experiment(md, tests, 1), {}, false);
    const std::string mj1 =
        metrics_table_json(run_experiment(md, tests, 1), {}, false);
    const std::string mj8 =
        metrics_table_json(run_experiment(md, tests, 8), {}, false);
    ok = ok && m1 == m8 && m1 == m1b && mj1 == mj8;

    return report(9, ok,
                  "identical report bytes for threads in {1, 8} and reruns",
                  std::string("screening csv+json ") +
                      (s1 == s8 && j1 == j8 ? "equal" : "DIFFER") +
                      ", metrics csv+json " +
                      (m1 == m8 && mj1 == mj8 ? "equal" : "DIFFER"));
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (c < 1 || c > 9) {
            std::fprintf(stderr, "usage: acceptance [criterion 1..9]...\n");
            return 64;
        }
        which.push_back(c);
    }
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    bool all_ok = true;
    for (int c : which) {
        bool ok = false;
        switch (c) {
            case 1: ok = criterion1(); break;
            case 2: ok = criterion2(); break;
            case 3: ok = criterion3(); break;
            case 4: ok = criterion4(); break;
            case 5: ok = criterion5(); break;
            case 6: ok = criterion6(); break;
            case 7: ok = criterion7(); break;
            case 8: ok = criterion8(); break;
            case 9: ok = criterion9(); break;
        }
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}

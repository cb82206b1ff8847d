#include "uscr/screen.hpp"
#include "uscr/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace uscr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool uses_null_fit(TestKind t) {
    return t == TestKind::Score || t == TestKind::Llr;
}

void check_applicable(const ResponseVector& y, Family family, TestKind t) {
    switch (t) {
        case TestKind::Score:
        case TestKind::Llr:
            validate_for_family(y, family);
            break;
        case TestKind::WelchT:
            if (y.kind != ResponseKind::Binary)
                throw ValidationError(
                    "welch test needs a binary response, got " +
                    response_kind_name(y.kind));
            break;
        case TestKind::PearsonZ:
            break;
    }
}

struct RankEntry {
    double p;
    double abs_stat;
    std::size_t index;
};

bool rank_less(const RankEntry& a, const RankEntry& b) {
    if (a.p != b.p) return a.p < b.p;
    if (a.abs_stat != b.abs_stat) return a.abs_stat > b.abs_stat;
    return a.index < b.index;
}

} // namespace

std::string selection_rule_name(SelectionRule r) {
    return r == SelectionRule::Threshold ? "threshold" : "topk";
}

ScreeningReport screen(const Dataset& ds, const ScreeningConfig& config) {
    if (config.tests.empty())
        throw ValidationError("screening needs at least one test");
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        throw ValidationError("alpha must lie in (0, 1)");
    const std::size_t n = ds.predictors.rows();
    const std::size_t d = ds.predictors.cols();
    if (ds.response.values.size() != n)
        throw ValidationError("response length does not match predictor rows");
    for (TestKind t : config.tests)
        check_applicable(ds.response, config.family, t);

    ScreeningReport rep;
    rep.config = config;
    rep.n = n;
    rep.d = d;
    if (rep.config.rule == SelectionRule::TopK && rep.config.k == 0) {
        const std::size_t auto_k =
            std::size_t(std::floor(double(n) / std::log(double(n))));
        rep.config.k = std::clamp<std::size_t>(auto_k, 1, std::max<std::size_t>(d, 1));
    }

    const bool needs_null =
        std::any_of(config.tests.begin(), config.tests.end(), uses_null_fit);
    if (needs_null) {
        const auto t0 = Clock::now();
        rep.null_fit = fit_null(ds.response, config.family);
        rep.null_fit_seconds = seconds_since(t0);
        rep.null_fit_count = 1;
    }

    rep.columns.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        rep.columns[j].index = j;
        rep.columns[j].name = ds.predictors.names()[j];
        rep.columns[j].cells.resize(config.tests.size());
    }

    unsigned threads = config.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(d, 1)));

    rep.test_seconds.resize(config.tests.size(), 0.0);
    for (std::size_t ti = 0; ti < config.tests.size(); ++ti) {
        const TestKind test = config.tests[ti];
        const auto t0 = Clock::now();

        std::optional<ScorePlan> score_plan;
        std::optional<LlrPlan> llr_plan;
        if (test == TestKind::Score)
            score_plan.emplace(ds.response, *rep.null_fit);
        else if (test == TestKind::Llr)
            llr_plan.emplace(ds.response, *rep.null_fit);

        std::vector<double> worker_min_raw(threads, 0.0);
        std::vector<std::size_t> worker_h1(threads, 0);
        std::exception_ptr first_failure;
        std::mutex failure_mutex;

        auto sweep = [&](unsigned w, std::size_t lo, std::size_t hi) {
            try {
                for (std::size_t j = lo; j < hi; ++j) {
                    CellResult& cell = rep.columns[j].cells[ti];
                    try {
                        switch (test) {
                            case TestKind::Score:
                                cell.outcome = score_plan->column(
                                    ds.predictors.column(j),
                                    ds.predictors.moments(j));
                                break;
                            case TestKind::Llr: {
                                double raw = 0.0;
                                cell.outcome = llr_plan->column(
                                    ds.predictors.column(j),
                                    ds.predictors.moments(j), &raw);
                                worker_h1[w] += 1;
                                worker_min_raw[w] =
                                    std::min(worker_min_raw[w], raw);
                                break;
                            }
                            case TestKind::PearsonZ:
                                cell.outcome = pearson_z(
                                    ds.response.values, ds.predictors.column(j));
                                break;
                            case TestKind::WelchT:
                                cell.outcome = welch_t(
                                    ds.response, ds.predictors.column(j));
                                break;
                        }
                    } catch (const Error& e) {
                        cell.error = e.what();
                    }
                }
            } catch (...) {
                const std::scoped_lock lock(failure_mutex);
                if (!first_failure) first_failure = std::current_exception();
            }
        };

        if (threads <= 1) {
            sweep(0, 0, d);
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (unsigned w = 0; w < threads; ++w) {
                const std::size_t lo = d * w / threads;
                const std::size_t hi = d * (w + 1) / threads;
                pool.emplace_back(sweep, w, lo, hi);
            }
            pool.clear(); // join
        }
        if (first_failure) std::rethrow_exception(first_failure);

        for (unsigned w = 0; w < threads; ++w) {
            rep.h1_fit_count += worker_h1[w];
            rep.min_raw_llr = std::min(rep.min_raw_llr, worker_min_raw[w]);
        }
        rep.test_seconds[ti] = seconds_since(t0) +
                               (uses_null_fit(test) ? rep.null_fit_seconds : 0.0);
    }

    // Selection follows the first configured test.
    std::vector<RankEntry> ranked;
    ranked.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        const CellResult& cell = rep.columns[j].cells[0];
        if (!cell.ok()) continue;
        ranked.push_back({cell.outcome.pvalue,
                          std::fabs(cell.outcome.statistic), j});
    }
    std::sort(ranked.begin(), ranked.end(), rank_less);
    if (rep.config.rule == SelectionRule::Threshold) {
        for (const RankEntry& e : ranked)
            if (e.p <= rep.config.alpha) rep.selected.push_back(e.index);
    } else {
        const std::size_t k = std::min(rep.config.k, ranked.size());
        for (std::size_t i = 0; i < k; ++i)
            rep.selected.push_back(ranked[i].index);
    }
    for (std::size_t j : rep.selected) rep.columns[j].selected = true;
    return rep;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n == 0)
        throw ValidationError("correlation needs two equal-length vectors");
    if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double denom = std::sqrt(saa * sbb);
    if (!(denom > 0.0))
        throw DegenerateError("correlation undefined for a constant vector");
    return std::clamp(sab / denom, -1.0, 1.0);
}

AgreementReport compare_tests(const Dataset& ds, const ScreeningConfig& config) {
    if (config.tests.size() < 2)
        throw ValidationError("comparison needs at least two tests");
    AgreementReport out;
    out.screening = screen(ds, config);
    const ScreeningReport& rep = out.screening;
    const double alpha = rep.config.alpha;
    for (std::size_t ti = 1; ti < rep.config.tests.size(); ++ti) {
        PairAgreement pair;
        pair.baseline = rep.config.tests[0];
        pair.other = rep.config.tests[ti];
        std::vector<double> pb, po;
        std::size_t same_call = 0;
        for (const ColumnResult& col : rep.columns) {
            const CellResult& cb = col.cells[0];
            const CellResult& co = col.cells[ti];
            if (!cb.ok() || !co.ok()) continue;
            pb.push_back(cb.outcome.pvalue);
            po.push_back(co.outcome.pvalue);
            if ((cb.outcome.pvalue <= alpha) == (co.outcome.pvalue <= alpha))
                ++same_call;
        }
        pair.common = pb.size();
        pair.excluded = rep.d - pair.common;
        if (pair.common >= 2)
            pair.pvalue_correlation = pearson_correlation(pb, po);
        else if (pair.common == 1)
            pair.pvalue_correlation = 1.0;
        pair.agreement_fraction =
            pair.common ? double(same_call) / double(pair.common) : 0.0;
        const double tb = rep.test_seconds[0];
        const double to = rep.test_seconds[ti];
        const double slow = std::max(tb, to), fast = std::min(tb, to);
        pair.speedup = fast > 0.0 ? slow / fast : 1.0;
        out.pairs.push_back(pair);
    }
    return out;
}

} // namespace uscr

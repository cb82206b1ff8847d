#pragma once

#include "uscr/data.hpp"
#include "uscr/llr.hpp"
#include "uscr/null_fit.hpp"
#include "uscr/score.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uscr {

enum class SelectionRule { Threshold, TopK };

std::string selection_rule_name(SelectionRule r);

// One screen: a shared null fit (when a test needs it) and a per-column
// sweep of every requested test.  The first test drives selection.
struct ScreeningConfig {
    Family family = Family::Logistic;
    std::vector<TestKind> tests = {TestKind::Score};
    SelectionRule rule = SelectionRule::TopK;
    double alpha = 0.05;
    // TopK size; 0 means floor(n / ln n), clamped to [1, d].
    std::size_t k = 0;
    // Worker count for the column sweep; 0 means hardware concurrency.
    unsigned threads = 0;
};

// Outcome of one (column, test) cell; `error` empty on success.
struct CellResult {
    TestOutcome outcome{};
    std::string error;
    bool ok() const { return error.empty(); }
};

struct ColumnResult {
    std::size_t index = 0;
    std::string name;
    std::vector<CellResult> cells; // parallel to ScreeningConfig::tests
    bool selected = false;
};

struct ScreeningReport {
    ScreeningConfig config;
    std::size_t n = 0;
    std::size_t d = 0;
    std::optional<NullFit> null_fit; // present when a test required it
    std::vector<ColumnResult> columns;
    // Selected column indices in rank order (p ascending, ties by larger
    // |statistic| then lower index).
    std::vector<std::size_t> selected;
    // Operation counters; the shared null model is fitted at most once.
    std::size_t null_fit_count = 0;
    std::size_t h1_fit_count = 0;
    // Most negative raw likelihood ratio seen across LLR cells (0 if none);
    // values below -1e-8 raise instead of being floored.
    double min_raw_llr = 0.0;
    // Wall seconds per test, parallel to config.tests.  Tests that use the
    // null fit include its (shared, once-measured) cost.
    std::vector<double> test_seconds;
    double null_fit_seconds = 0.0;
};

// Fits the null once, sweeps every configured test over all columns, and
// selects by the first test's p-values.  Per-column failures become report
// entries; a null-fit failure aborts the whole screen.
ScreeningReport screen(const Dataset& ds, const ScreeningConfig& config);

// Agreement metrics of one test against the baseline (first configured) test
// over the columns where both succeeded.
struct PairAgreement {
    TestKind baseline = TestKind::Score;
    TestKind other = TestKind::Score;
    double pvalue_correlation = 0.0;
    double agreement_fraction = 0.0;
    // Wall-time ratio, slower over faster (>= 1).
    double speedup = 0.0;
    std::size_t common = 0;   // columns where both tests succeeded
    std::size_t excluded = 0; // columns dropped from this pair
};

struct AgreementReport {
    ScreeningReport screening;
    std::vector<PairAgreement> pairs; // one per non-baseline test
};

// Runs one screen with all configured tests (>= 2) and compares each later
// test against the first.
AgreementReport compare_tests(const Dataset& ds, const ScreeningConfig& config);

// Plain Pearson correlation of two equal-length vectors; exactly 1 when the
// vectors are bitwise identical (covers the degenerate constant case).
double pearson_correlation(std::span<const double> a, std::span<const double> b);

} // namespace uscr

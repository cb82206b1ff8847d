#pragma once

#include "uscr/data.hpp"
#include "uscr/null_fit.hpp"

#include <optional>
#include <span>
#include <vector>

namespace uscr {

enum class TestKind { Score, Llr, PearsonZ, WelchT };

std::string test_kind_name(TestKind t);
TestKind test_kind_from_name(const std::string& name);

struct TestOutcome {
    TestKind test;
    // Score: the signed standardized score S, p = chi2_sf_1df(S^2).
    // Llr: the deviance statistic, p = chi2_sf_1df(statistic).
    // PearsonZ: the z-transformed correlation, p = 2 * normal_sf(|Z|).
    // WelchT: the t statistic, p = 2 * student_t_sf(|T|, df).
    double statistic;
    double pvalue;
    std::optional<double> df; // WelchT only
};

// Per-response work shared by every column of a score sweep: null-fit
// scalars plus, for Beta and Weibull, a transformed copy of the response.
// Building the plan is O(n) once; each column() call is then a single fused
// kernel pass over the predictor.
//
// The predictor enters every family's statistic centered, so the statistic
// is exactly invariant under x -> x + c and scales out of x -> a*x (the sign
// follows a).  Columns with zero variance raise DegenerateError.
class ScorePlan {
public:
    ScorePlan(const ResponseVector& y, const NullFit& fit);

    TestOutcome column(std::span<const double> x, const ColumnMoments& m) const;

private:
    std::size_t n_;
    double num_scale_ = 1.0;  // multiplies the centered cross sum
    double var_unit_ = 1.0;   // per-unit-of-sum(xc^2) variance of the score
    std::span<const double> y_;
    std::vector<double> w_;   // transformed response (Beta, Weibull)
    double sum_w_ = 0.0;
};

// One-column convenience wrapper around ScorePlan.
TestOutcome score_statistic(const ResponseVector& y, const NullFit& fit,
                            std::span<const double> x, const ColumnMoments& m);

// Correlation test: single-pass Pearson r, z-transformed with the 1/(n-3)
// variance.  Needs n > 3; |r| is clamped to 1 - 1e-12 before the transform.
TestOutcome pearson_z(std::span<const double> y, std::span<const double> x);

// Two-sample t test with unequal variances and its approximate df; group 1
// is y == 1, group 2 is y == 0.  Each group needs at least 2 observations
// and one group must have positive variance.
TestOutcome welch_t(const ResponseVector& y, std::span<const double> x);

// Kernel-level Welch entry for sweeps: takes the precomputed group-1 count
// and the column's fused sums instead of rescanning y.
TestOutcome welch_t_from_sums(double n1, double n, double sum_x, double sumsq_x,
                              double sum_xy, double sum_xxy);

} // namespace uscr

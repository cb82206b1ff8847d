#pragma once

#include "uscr/data.hpp"
#include "uscr/null_fit.hpp"
#include "uscr/score.hpp"

#include <memory>
#include <optional>
#include <span>

namespace uscr {

// Exact single-predictor fit: intercept a, slope b on the family's link
// scale, and the family's free nuisance parameter when it has one (Gamma
// shape, NegBin dispersion, Beta precision, Weibull shape; fixed 1 for
// Logistic and Poisson).  All parameters are re-estimated jointly.
struct UnivariateFit {
    Family family;
    double intercept;
    double slope;
    double aux;
    double loglik1;
    int iterations;
    bool converged;
};

struct WarmStart {
    double intercept;
    double aux;
};

// Newton ascent with step halving (at most 30 halvings per step), at most
// 100 iterations; converged means the last improvement fell below 1e-10 with
// gradient infinity-norm below 1e-8.  Non-convergence raises
// ConvergenceError.  A Logistic slope passing |b| > 30 while the likelihood
// still improves raises SeparationError.  Without a warm start the fit
// starts from the link-transformed response mean and a unit nuisance.
UnivariateFit fit_univariate(const ResponseVector& y, Family family,
                             std::span<const double> x,
                             std::optional<WarmStart> warm = std::nullopt);

// Per-response state for LLR sweeps: warm start from the null fit plus
// response transforms that columns share (logs, count histogram).
class LlrPlan {
public:
    LlrPlan(const ResponseVector& y, const NullFit& fit);

    // Fits the column and returns the deviance outcome.  The raw deviance
    // before flooring is written to *raw if given; raw values below -1e-8
    // raise NumericError, values in [-1e-8, 0) are reported as 0.
    TestOutcome column(std::span<const double> x, const ColumnMoments& m,
                       double* raw = nullptr, int* iterations = nullptr) const;

private:
    struct CachesHolder;
    const ResponseVector* y_;
    const NullFit* fit_;
    WarmStart warm_;
    std::shared_ptr<CachesHolder> caches_;
};

// One-column convenience wrapper around LlrPlan.
TestOutcome llr_statistic(const ResponseVector& y, const NullFit& fit,
                          std::span<const double> x);

} // namespace uscr

#pragma once

#include "uscr/data.hpp"
#include "uscr/family.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace uscr {

// Intercept-only maximum-likelihood fits.  These are the only per-response
// fits the score sweep needs; a screen computes exactly one.

struct LogisticNull { double p; };                // success probability
struct PoissonNull  { double lambda; };           // mean
struct GammaNull    { double shape, rate; };      // mean = shape / rate
struct NegBinNull   { double r, p; };             // p = r / (r + mean)
struct BetaNull     { double alpha, beta; };
struct WeibullNull  { double shape, scale; };

using NullParams = std::variant<LogisticNull, PoissonNull, GammaNull,
                                NegBinNull, BetaNull, WeibullNull>;

struct NullFit {
    Family family = Family::Logistic;
    NullParams params;
    double loglik0 = 0.0;
    std::size_t n = 0;

    // Sufficient statistics of y cached for reuse by score and LLR sweeps.
    double sum_y = 0.0;
    double mean_y = 0.0;
    double sum_log_y = 0.0;      // Gamma, Beta, Weibull
    double sum_log1m_y = 0.0;    // Beta
    double sum_lgamma_y1 = 0.0;  // sum log Gamma(y_i + 1); Poisson, NegBin
    // Count responses with bounded support: count_hist[k] = #{i : y_i = k}.
    // Lets r-dependent sums run over distinct values instead of observations.
    std::vector<double> count_hist;
};

// Newton solvers stop when every parameter moves by less than 1e-9 relative;
// more than 200 iterations raises ConvergenceError.  A response with zero
// sample variance raises DegenerateError before any solve.  NegBin requires
// overdispersion (sample variance > mean) and otherwise raises
// ValidationError suggesting the Poisson family.
NullFit fit_null(const ResponseVector& y, Family family);

} // namespace uscr

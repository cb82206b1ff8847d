#pragma once

#include <string>

namespace uscr {

// Response distributions for which the engine provides a score test and the
// matching exact likelihood-ratio test.
enum class Family {
    Logistic, // Bernoulli response, logit mean link
    Poisson,  // count response, log mean link
    Gamma,    // positive response, log mean link, free shape
    NegBin,   // overdispersed count response, log mean link, free dispersion
    Beta,     // response in (0,1), logit mean link, free precision
    Weibull,  // positive response, log scale link, free shape
};

inline constexpr Family kAllFamilies[] = {
    Family::Logistic, Family::Poisson, Family::Gamma,
    Family::NegBin,   Family::Beta,    Family::Weibull,
};

std::string family_name(Family f);

// Parses the names used by the CLI ("logistic", "poisson", "gamma", "negbin",
// "beta", "weibull"); throws ValidationError on anything else.
Family family_from_name(const std::string& name);

} // namespace uscr

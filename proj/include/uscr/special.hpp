#pragma once

// Self-contained special functions sized for the statistics in this library.
// Accuracy targets (checked by tests/test_special.cpp against independent
// series and quadrature oracles):
//   log_gamma  relative error <= 1e-12 on [1e-6, 1e8]
//   digamma    absolute error <= 1e-10
//   trigamma   relative error <= 1e-8
// All functions require x > 0 (or the stated domain) and throw DomainError
// otherwise.  Survival functions clamp underflow to exactly 0.

namespace uscr::special {

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// a > 0, x >= 0.  Series for x < a+1, continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b), a,b > 0, x in [0,1].
double beta_inc(double a, double b, double x);

// P(chi^2_1 > s) for s >= 0.
double chi2_sf_1df(double s);

// P(N(0,1) > z), any finite z.
double normal_sf(double z);

// P(T_nu > t) for nu > 0, any finite t.
double student_t_sf(double t, double nu);

} // namespace uscr::special

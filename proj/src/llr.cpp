#include "uscr/llr.hpp"
#include "uscr/errors.hpp"
#include "uscr/simd_kernels.hpp"
#include "uscr/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

namespace uscr {

namespace {

using special::digamma;
using special::log_gamma;
using special::trigamma;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxIter = 100;
constexpr int kMaxHalvings = 30;
constexpr double kLlTol = 1e-10;
constexpr double kGradTol = 1e-8;
// Link-scale barrier: evaluations outside are reported as -inf so the line
// search retreats instead of overflowing exp().
constexpr double kEtaCap = 300.0;

struct EvalOut {
    double ll;
    double g[3];
    double h[3][3];
};

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double t) {
    if (t > 35.0) return t;
    if (t < -35.0) return std::exp(t);
    return std::log1p(std::exp(t));
}

// Solves (-H + ridge I) d = g by Cholesky; false when not positive definite.
bool chol_solve(int dim, const double h[3][3], double ridge, const double g[3],
                double d[3]) {
    double a[3][3];
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            a[i][j] = -h[i][j] + (i == j ? ridge : 0.0);
    double l[3][3] = {};
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    double z[3];
    for (int i = 0; i < dim; ++i) {
        double s = g[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * z[k];
        z[i] = s / l[i][i];
    }
    for (int i = dim - 1; i >= 0; --i) {
        double s = z[i];
        for (int k = i + 1; k < dim; ++k) s -= l[k][i] * d[k];
        d[i] = s / l[i][i];
    }
    return true;
}

double max_abs(const double* v, int dim) {
    double m = 0.0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

struct MaxOut {
    double theta[3];
    double ll;
    int iters;
};

// Ascent with ridge-safeguarded Newton directions and step halving.
// check_separation guards the Logistic slope (theta[1]).
template <class EvalFn>
MaxOut newton_maximize(int dim, const double* start, EvalFn&& eval,
                       bool check_separation, const char* what) {
    MaxOut out{};
    std::memcpy(out.theta, start, sizeof(double) * std::size_t(dim));
    EvalOut cur;
    eval(out.theta, cur);
    if (!std::isfinite(cur.ll))
        throw ConvergenceError(std::string(what) +
                               ": log-likelihood not finite at start");

    for (int iter = 1; iter <= kMaxIter; ++iter) {
        out.iters = iter;
        if (max_abs(cur.g, dim) < kGradTol) {
            out.ll = cur.ll;
            out.iters = iter - 1;
            return out;
        }

        double dscale = 0.0;
        for (int i = 0; i < dim; ++i) dscale = std::max(dscale, std::fabs(cur.h[i][i]));
        if (dscale == 0.0) dscale = 1.0;
        double d[3];
        double gd = 0.0;
        bool have_dir = false;
        for (double ridge = 0.0;;) {
            if (chol_solve(dim, cur.h, ridge, cur.g, d)) {
                gd = 0.0;
                for (int i = 0; i < dim; ++i) gd += cur.g[i] * d[i];
                if (gd > 0.0) {
                    have_dir = true;
                    break;
                }
            }
            ridge = ridge == 0.0 ? 1e-10 * dscale : ridge * 100.0;
            if (ridge > 1e4 * dscale) break;
        }
        if (!have_dir)
            throw ConvergenceError(std::string(what) +
                                   ": could not find an ascent direction");

        double trial[3];
        EvalOut cand;
        bool accepted = false;
        // Endgame: once the predicted gain 0.5 g'd is below the improvement
        // tolerance it is also below the rounding noise of evaluating ll, so
        // a likelihood-guided line search cannot make progress.  Take full
        // Newton steps (tolerating noise-level dips, far inside the 1e-8
        // nesting slack) and let the gradient criterion rule alone; each
        // step still contracts the gradient quadratically.
        if (0.5 * gd < kLlTol) {
            for (int i = 0; i < dim; ++i) trial[i] = out.theta[i] + d[i];
            eval(trial, cand);
            accepted = cand.ll >= cur.ll - 1e-8;
        } else {
            double tfac = 1.0;
            for (int h = 0; h < kMaxHalvings; ++h, tfac *= 0.5) {
                for (int i = 0; i < dim; ++i)
                    trial[i] = out.theta[i] + tfac * d[i];
                eval(trial, cand);
                if (cand.ll > cur.ll) {
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            if (max_abs(cur.g, dim) < kGradTol) {
                out.ll = cur.ll;
                return out;
            }
            // The ll evaluation noise grows with n, so a predicted gain can
            // sit above kLlTol yet below what a comparison of two sums can
            // resolve; every halving then measures no progress.  While the
            // gain stays inside the flooring slack, take the full Newton
            // step under the endgame acceptance instead of giving up.
            if (0.5 * gd <= 1e-8) {
                for (int i = 0; i < dim; ++i) trial[i] = out.theta[i] + d[i];
                eval(trial, cand);
                accepted = cand.ll >= cur.ll - 1e-8;
            }
            if (!accepted)
                throw ConvergenceError(
                    std::string(what) +
                    ": step halving stalled before convergence");
        }

        const double improvement = cand.ll - cur.ll;
        std::memcpy(out.theta, trial, sizeof(double) * std::size_t(dim));
        cur = cand;
        if (check_separation && std::fabs(out.theta[1]) > 30.0)
            throw SeparationError(
                "predictor separates the binary response; slope diverges");
        if (improvement < kLlTol && max_abs(cur.g, dim) < kGradTol) {
            out.ll = cur.ll;
            return out;
        }
    }
    if (max_abs(cur.g, dim) < kGradTol) {
        out.ll = cur.ll;
        return out;
    }
    throw ConvergenceError(std::string(what) + ": no convergence in " +
                           std::to_string(kMaxIter) + " iterations");
}

// Shared response-side transforms, built once per response for sweeps.
struct ResponseCaches {
    double sum_log_y = 0.0;
    double sum_log1m_y = 0.0;
    double sum_lgamma_y1 = 0.0;
    std::vector<double> log_y;
    std::vector<double> log1m_y;
    std::vector<double> hist; // counts by value (NegBin), may be empty
};

ResponseCaches build_caches(std::span<const double> y, Family family) {
    ResponseCaches c;
    switch (family) {
        case Family::Logistic:
            break;
        case Family::Poisson:
            for (double v : y) c.sum_lgamma_y1 += log_gamma(v + 1.0);
            break;
        case Family::Gamma:
            for (double v : y) c.sum_log_y += std::log(v);
            break;
        case Family::NegBin: {
            double maxv = 0.0;
            for (double v : y) {
                c.sum_lgamma_y1 += log_gamma(v + 1.0);
                maxv = std::max(maxv, v);
            }
            if (maxv <= 65536.0) {
                c.hist.assign(std::size_t(maxv) + 1, 0.0);
                for (double v : y) c.hist[std::size_t(v)] += 1.0;
            }
            break;
        }
        case Family::Beta: {
            c.log_y.resize(y.size());
            c.log1m_y.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                c.log_y[i] = std::log(y[i]);
                c.log1m_y[i] = std::log1p(-y[i]);
                c.sum_log_y += c.log_y[i];
                c.sum_log1m_y += c.log1m_y[i];
            }
            break;
        }
        case Family::Weibull: {
            c.log_y.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                c.log_y[i] = std::log(y[i]);
                c.sum_log_y += c.log_y[i];
            }
            break;
        }
    }
    return c;
}

// ----- family evaluators (theta = [a, b] or [a, b, log aux], x centered) ---

struct LogisticEval {
    std::span<const double> y, x;
    double xbar;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1];
        double ll = 0, ga = 0, gb = 0, waa = 0, wab = 0, wbb = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            const double p = sigmoid(eta);
            ll += y[i] * eta - softplus(eta);
            const double r = y[i] - p;
            ga += r;
            gb += xc * r;
            const double w = p * (1.0 - p);
            waa += w;
            wab += xc * w;
            wbb += xc * xc * w;
        }
        o.ll = ll;
        o.g[0] = ga;
        o.g[1] = gb;
        o.h[0][0] = -waa;
        o.h[0][1] = o.h[1][0] = -wab;
        o.h[1][1] = -wbb;
    }
};

struct PoissonEval {
    std::span<const double> y, x;
    double xbar;
    double sum_lgamma_y1;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1];
        double ll = 0, ga = 0, gb = 0, waa = 0, wab = 0, wbb = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            if (eta > kEtaCap) {
                o.ll = kNegInf;
                return;
            }
            const double mu = std::exp(eta);
            ll += y[i] * eta - mu;
            const double r = y[i] - mu;
            ga += r;
            gb += xc * r;
            waa += mu;
            wab += xc * mu;
            wbb += xc * xc * mu;
        }
        o.ll = ll - sum_lgamma_y1;
        o.g[0] = ga;
        o.g[1] = gb;
        o.h[0][0] = -waa;
        o.h[0][1] = o.h[1][0] = -wab;
        o.h[1][1] = -wbb;
    }
};

struct GammaEval {
    std::span<const double> y, x;
    double xbar;
    double sum_log_y;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1], alpha = std::exp(th[2]);
        const double n = double(y.size());
        double s0 = 0, s1 = 0, s2 = 0, cxs = 0, cxs1 = 0, hsum = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            if (std::fabs(eta) > kEtaCap) {
                o.ll = kNegInf;
                return;
            }
            const double ye = y[i] * std::exp(-eta);
            s0 += ye;
            s1 += xc * ye;
            s2 += xc * xc * ye;
            cxs += xc;
            cxs1 += xc * xc;
            hsum += -eta - ye;
        }
        const double la = th[2];
        o.ll = n * alpha * la - n * log_gamma(alpha) +
               (alpha - 1.0) * sum_log_y + alpha * hsum;
        const double a0 = s0 - n;
        const double a1 = s1 - cxs;
        o.g[0] = alpha * a0;
        o.g[1] = alpha * a1;
        const double galpha = n * la + n - n * digamma(alpha) + sum_log_y + hsum;
        o.g[2] = alpha * galpha;
        o.h[0][0] = -alpha * s0;
        o.h[0][1] = o.h[1][0] = -alpha * s1;
        o.h[1][1] = -alpha * s2;
        o.h[0][2] = o.h[2][0] = alpha * a0;
        o.h[1][2] = o.h[2][1] = alpha * a1;
        o.h[2][2] = alpha * galpha +
                    alpha * alpha * (n / alpha - n * trigamma(alpha));
        (void)cxs1;
    }
};

struct WeibullEval {
    std::span<const double> y, x;
    double xbar;
    std::span<const double> log_y;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1], kappa = std::exp(th[2]);
        const double n = double(y.size());
        double u0 = 0, u1 = 0, u2 = 0, z0 = 0, z1 = 0, zz = 0;
        double sz = 0, cxs = 0, seta = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            const double z = log_y[i] - eta;
            const double kz = kappa * z;
            if (kz > kEtaCap || std::fabs(eta) > kEtaCap) {
                o.ll = kNegInf;
                return;
            }
            const double u = std::exp(kz);
            u0 += u;
            u1 += xc * u;
            u2 += xc * xc * u;
            z0 += z * u;
            z1 += xc * z * u;
            zz += z * z * u;
            sz += z;
            cxs += xc;
            seta += eta;
        }
        o.ll = n * th[2] - seta + (kappa - 1.0) * sz - u0;
        o.g[0] = kappa * (u0 - n);
        o.g[1] = kappa * (u1 - cxs);
        o.g[2] = n + kappa * (sz - z0);
        o.h[0][0] = -kappa * kappa * u0;
        o.h[0][1] = o.h[1][0] = -kappa * kappa * u1;
        o.h[1][1] = -kappa * kappa * u2;
        o.h[0][2] = o.h[2][0] = kappa * ((u0 - n) + kappa * z0);
        o.h[1][2] = o.h[2][1] = kappa * ((u1 - cxs) + kappa * z1);
        o.h[2][2] = kappa * (sz - z0) - kappa * kappa * zz;
    }
};

struct NegBinEval {
    std::span<const double> y, x;
    double xbar;
    const ResponseCaches* caches;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1], r = std::exp(th[2]);
        const double n = double(y.size());
        double p0 = 0, p1 = 0, m0 = 0, m1 = 0, m2 = 0, c0 = 0, c1 = 0;
        double lsum = 0, tsum = 0, q1s = 0, q2s = 0, syeta = 0, sylnq = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            if (eta > kEtaCap) {
                o.ll = kNegInf;
                return;
            }
            const double mu = std::exp(eta);
            const double q = r + mu;
            const double lq = std::log(q);
            const double res = y[i] - mu;
            p0 += res / q;
            p1 += xc * res / q;
            const double wm = mu * (r + y[i]) / (q * q);
            m0 += wm;
            m1 += xc * wm;
            m2 += xc * xc * wm;
            const double wc = res * mu / (q * q);
            c0 += wc;
            c1 += xc * wc;
            lsum += lq;
            tsum += (r + y[i]) / q;
            q1s += 1.0 / q;
            q2s += (r + y[i]) / (q * q);
            syeta += y[i] * eta;
            sylnq += y[i] * lq;
        }
        // r-dependent sums over distinct counts when the histogram exists.
        double slgr = 0, sdg = 0, stg = 0;
        if (!caches->hist.empty()) {
            const auto& h = caches->hist;
            for (std::size_t k = 0; k < h.size(); ++k)
                if (h[k] > 0.0) {
                    const double kr = double(k) + r;
                    slgr += h[k] * log_gamma(kr);
                    sdg += h[k] * digamma(kr);
                    stg += h[k] * trigamma(kr);
                }
        } else {
            for (double v : y) {
                slgr += log_gamma(v + r);
                sdg += digamma(v + r);
                stg += trigamma(v + r);
            }
        }
        const double lr = th[2];
        o.ll = slgr - n * log_gamma(r) - caches->sum_lgamma_y1 +
               r * (n * lr - lsum) + syeta - sylnq;
        o.g[0] = r * p0;
        o.g[1] = r * p1;
        const double gr = sdg - n * digamma(r) + n * lr + n - lsum - tsum;
        o.g[2] = r * gr;
        o.h[0][0] = -r * m0;
        o.h[0][1] = o.h[1][0] = -r * m1;
        o.h[1][1] = -r * m2;
        o.h[0][2] = o.h[2][0] = r * c0;
        o.h[1][2] = o.h[2][1] = r * c1;
        const double hrr =
            stg - n * trigamma(r) + n / r - 2.0 * q1s + q2s;
        o.h[2][2] = r * gr + r * r * hrr;
    }
};

struct BetaEval {
    std::span<const double> y, x;
    double xbar;
    const ResponseCaches* caches;
    void operator()(const double* th, EvalOut& o) const {
        const double a = th[0], b = th[1], phi = std::exp(th[2]);
        const double n = double(y.size());
        const double lgphi = log_gamma(phi);
        const double dgphi = digamma(phi);
        const double tgphi = trigamma(phi);
        const auto& ly = caches->log_y;
        const auto& l1y = caches->log1m_y;
        double ll = 0, ga = 0, gb = 0, gphi = 0;
        double iaa = 0, iab = 0, ibb = 0, iap = 0, ibp = 0, ipp = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double xc = x[i] - xbar;
            const double eta = a + b * xc;
            const double mu = sigmoid(eta);
            if (mu < 1e-14 || mu > 1.0 - 1e-14) {
                o.ll = kNegInf;
                return;
            }
            const double v = mu * (1.0 - mu);
            const double al = mu * phi;
            const double be = (1.0 - mu) * phi;
            const double dga = digamma(al);
            const double dgb = digamma(be);
            const double tga = trigamma(al);
            const double tgb = trigamma(be);
            ll += lgphi - log_gamma(al) - log_gamma(be) +
                  (al - 1.0) * ly[i] + (be - 1.0) * l1y[i];
            const double score_eta = phi * v * ((ly[i] - l1y[i]) - (dga - dgb));
            ga += score_eta;
            gb += xc * score_eta;
            gphi += mu * (ly[i] - dga) + (1.0 - mu) * (l1y[i] - dgb) + dgphi;
            const double lam = tga + tgb;
            const double wee = phi * phi * v * v * lam;
            iaa += wee;
            iab += xc * wee;
            ibb += xc * xc * wee;
            const double wep = phi * v * (mu * tga - (1.0 - mu) * tgb);
            iap += wep;
            ibp += xc * wep;
            ipp += mu * mu * tga + (1.0 - mu) * (1.0 - mu) * tgb;
        }
        ipp -= n * tgphi;
        o.ll = ll;
        o.g[0] = ga;
        o.g[1] = gb;
        o.g[2] = phi * gphi;
        // Expected information (Fisher scoring step); convergence is judged
        // on the exact gradient above.
        o.h[0][0] = -iaa;
        o.h[0][1] = o.h[1][0] = -iab;
        o.h[1][1] = -ibb;
        o.h[0][2] = o.h[2][0] = -phi * iap;
        o.h[1][2] = o.h[2][1] = -phi * ibp;
        o.h[2][2] = -phi * phi * ipp;
    }
};

int family_dim(Family f) {
    return (f == Family::Logistic || f == Family::Poisson) ? 2 : 3;
}

UnivariateFit fit_with_caches(const ResponseVector& y, Family family,
                              std::span<const double> x, double xbar,
                              const ResponseCaches& caches, WarmStart warm) {
    const std::span<const double> yv = y.values;
    const int dim = family_dim(family);
    double start[3] = {warm.intercept, 0.0,
                       dim == 3 ? std::log(warm.aux) : 0.0};
    const char* what = "univariate fit";
    MaxOut m{};
    switch (family) {
        case Family::Logistic:
            m = newton_maximize(dim, start, LogisticEval{yv, x, xbar}, true, what);
            break;
        case Family::Poisson:
            m = newton_maximize(
                dim, start,
                PoissonEval{yv, x, xbar, caches.sum_lgamma_y1}, false, what);
            break;
        case Family::Gamma:
            m = newton_maximize(dim, start,
                                GammaEval{yv, x, xbar, caches.sum_log_y},
                                false, what);
            break;
        case Family::NegBin:
            m = newton_maximize(dim, start, NegBinEval{yv, x, xbar, &caches},
                                false, what);
            break;
        case Family::Beta:
            m = newton_maximize(dim, start, BetaEval{yv, x, xbar, &caches},
                                false, what);
            break;
        case Family::Weibull:
            m = newton_maximize(dim, start,
                                WeibullEval{yv, x, xbar, caches.log_y},
                                false, what);
            break;
    }
    UnivariateFit fit;
    fit.family = family;
    // Internally x is centered; report the intercept on the raw x scale.
    fit.intercept = m.theta[0] - m.theta[1] * xbar;
    fit.slope = m.theta[1];
    fit.aux = dim == 3 ? std::exp(m.theta[2]) : 1.0;
    fit.loglik1 = m.ll;
    fit.iterations = m.iters;
    fit.converged = true;
    return fit;
}

WarmStart cold_start(const ResponseVector& y, Family family) {
    double mean = 0.0;
    for (double v : y.values) mean += v;
    mean /= double(y.values.size());
    WarmStart w{0.0, 1.0};
    switch (family) {
        case Family::Logistic:
        case Family::Beta: {
            const double p = std::clamp(mean, 1e-6, 1.0 - 1e-6);
            w.intercept = std::log(p) - std::log1p(-p);
            break;
        }
        case Family::Poisson:
        case Family::Gamma:
        case Family::NegBin:
        case Family::Weibull:
            w.intercept = std::log(std::max(mean, 1e-12));
            break;
    }
    return w;
}

WarmStart warm_from_null(const NullFit& fit) {
    WarmStart w{0.0, 1.0};
    switch (fit.family) {
        case Family::Logistic: {
            const double p = std::get<LogisticNull>(fit.params).p;
            w.intercept = std::log(p) - std::log1p(-p);
            break;
        }
        case Family::Poisson:
            w.intercept = std::log(std::get<PoissonNull>(fit.params).lambda);
            break;
        case Family::Gamma: {
            const auto& g = std::get<GammaNull>(fit.params);
            w.intercept = std::log(g.shape / g.rate);
            w.aux = g.shape;
            break;
        }
        case Family::NegBin: {
            const auto& nb = std::get<NegBinNull>(fit.params);
            w.intercept = std::log(fit.mean_y);
            w.aux = nb.r;
            break;
        }
        case Family::Beta: {
            const auto& be = std::get<BetaNull>(fit.params);
            const double mu = be.alpha / (be.alpha + be.beta);
            w.intercept = std::log(mu) - std::log1p(-mu);
            w.aux = be.alpha + be.beta;
            break;
        }
        case Family::Weibull: {
            const auto& wb = std::get<WeibullNull>(fit.params);
            w.intercept = std::log(wb.scale);
            w.aux = wb.shape;
            break;
        }
    }
    return w;
}

} // namespace

UnivariateFit fit_univariate(const ResponseVector& y, Family family,
                             std::span<const double> x,
                             std::optional<WarmStart> warm) {
    validate_for_family(y, family);
    if (x.size() != y.values.size())
        throw ValidationError("predictor length does not match the response");
    const auto ms = simd::moment_sums(x);
    const double xbar = ms.sum / double(x.size());
    const ResponseCaches caches = build_caches(y.values, family);
    return fit_with_caches(y, family, x, xbar, caches,
                           warm ? *warm : cold_start(y, family));
}

struct LlrPlan::CachesHolder {
    ResponseCaches c;
};

LlrPlan::LlrPlan(const ResponseVector& y, const NullFit& fit)
    : y_(&y), fit_(&fit), warm_(warm_from_null(fit)) {
    validate_for_family(y, fit.family);
    if (fit.n != y.values.size())
        throw ValidationError("null fit was computed for a different n");
    caches_ = std::make_shared<CachesHolder>();
    caches_->c = build_caches(y.values, fit.family);
}

TestOutcome LlrPlan::column(std::span<const double> x, const ColumnMoments& m,
                            double* raw, int* iterations) const {
    if (!(m.variance > 0.0))
        throw DegenerateError("predictor has zero variance");
    const UnivariateFit f =
        fit_with_caches(*y_, fit_->family, x, m.mean, caches_->c, warm_);
    if (iterations) *iterations = f.iterations;
    const double lambda_raw = 2.0 * (f.loglik1 - fit_->loglik0);
    if (raw) *raw = lambda_raw;
    if (lambda_raw < -1e-8)
        throw NumericError(
            "likelihood ratio fell below the null by more than 1e-8");
    const double lambda = std::max(lambda_raw, 0.0);
    return {TestKind::Llr, lambda, special::chi2_sf_1df(lambda), std::nullopt};
}

TestOutcome llr_statistic(const ResponseVector& y, const NullFit& fit,
                          std::span<const double> x) {
    const auto ms = simd::moment_sums(x);
    ColumnMoments m;
    m.sum = ms.sum;
    m.sumsq = ms.sumsq;
    m.mean = ms.sum / double(x.size());
    m.variance = x.size() > 1
        ? (ms.sumsq - ms.sum * ms.sum / double(x.size())) / double(x.size() - 1)
        : 0.0;
    return LlrPlan(y, fit).column(x, m);
}

} // namespace uscr

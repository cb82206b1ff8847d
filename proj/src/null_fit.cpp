#include "uscr/null_fit.hpp"
#include "uscr/errors.hpp"
#include "uscr/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace uscr {

namespace {

using special::digamma;
using special::log_gamma;
using special::trigamma;

constexpr int kMaxIter = 200;
constexpr double kRelStep = 1e-9;

struct YStats {
    std::size_t n;
    double sum, mean, variance; // sample variance, n-1 denominator
};

YStats y_stats(std::span<const double> y) {
    double s = 0.0, q = 0.0;
    for (double v : y) {
        s += v;
        q += v * v;
    }
    const double n = double(y.size());
    return {y.size(), s, s / n, (q - s * s / n) / (n - 1.0)};
}

std::vector<double> count_histogram(std::span<const double> y) {
    double maxv = 0.0;
    for (double v : y) maxv = std::max(maxv, v);
    if (maxv > 65536.0) return {};
    std::vector<double> hist(std::size_t(maxv) + 1, 0.0);
    for (double v : y) hist[std::size_t(v)] += 1.0;
    return hist;
}

bool small_step(double step, double value) {
    return std::fabs(step) <= kRelStep * std::max(1.0, std::fabs(value));
}

// Root of a strictly decreasing function on (0, inf): expand a bracket from
// the start value, then Newton with bisection whenever a step leaves the
// bracket.
double decreasing_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& fprime,
                       double start, const char* what) {
    double lo = 0.0, hi = 0.0;
    double r = start;
    double fr = f(r);
    if (fr > 0.0) {
        for (int guard = 0; fr > 0.0; ++guard) {
            lo = r;
            if (guard > 40)
                throw ConvergenceError(std::string(what) +
                                       ": no finite root above " +
                                       std::to_string(lo));
            r *= 8.0;
            fr = f(r);
        }
        hi = r;
    } else if (fr < 0.0) {
        for (int guard = 0; fr < 0.0; ++guard) {
            hi = r;
            if (guard > 40)
                throw ConvergenceError(std::string(what) + ": no root below " +
                                       std::to_string(hi));
            r /= 8.0;
            fr = f(r);
        }
        lo = r;
    }
    if (fr == 0.0) return r;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double fp = fprime(r);
        double next = fp < 0.0 ? r - fr / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - r;
        r = next;
        if (small_step(step, r)) return r;
        fr = f(r);
        if (fr == 0.0) return r;
        if (fr > 0.0) lo = r; else hi = r;
    }
    throw ConvergenceError(std::string(what) + ": Newton did not converge in " +
                           std::to_string(kMaxIter) + " iterations");
}

NullFit fit_logistic(const YStats& st) {
    const double p = st.mean;
    const double n1 = st.sum;
    const double n0 = double(st.n) - n1;
    NullFit fit;
    fit.family = Family::Logistic;
    fit.params = LogisticNull{p};
    fit.loglik0 = n1 * std::log(p) + n0 * std::log1p(-p);
    return fit;
}

NullFit fit_poisson(std::span<const double> y, const YStats& st) {
    const double lambda = st.mean;
    double slg = 0.0;
    for (double v : y) slg += log_gamma(v + 1.0);
    NullFit fit;
    fit.family = Family::Poisson;
    fit.params = PoissonNull{lambda};
    fit.sum_lgamma_y1 = slg;
    fit.loglik0 = st.sum * std::log(lambda) - double(st.n) * lambda - slg;
    return fit;
}

NullFit fit_gamma(std::span<const double> y, const YStats& st) {
    double sly = 0.0;
    for (double v : y) sly += std::log(v);
    const double n = double(st.n);
    // s > 0 by Jensen unless y is constant (rejected earlier).
    const double s = std::log(st.mean) - sly / n;
    const double shape = decreasing_root(
        [&](double a) { return std::log(a) - digamma(a) - s; },
        [&](double a) { return 1.0 / a - trigamma(a); },
        0.5 / s, "gamma null fit");
    const double rate = shape / st.mean;
    NullFit fit;
    fit.family = Family::Gamma;
    fit.params = GammaNull{shape, rate};
    fit.sum_log_y = sly;
    fit.loglik0 = n * shape * std::log(rate) + (shape - 1.0) * sly -
                  rate * st.sum - n * log_gamma(shape);
    return fit;
}

NullFit fit_negbin(std::span<const double> y, const YStats& st) {
    if (st.variance <= st.mean)
        throw ValidationError(
            "response is not overdispersed (variance <= mean); "
            "the poisson family fits this data");
    const double n = double(st.n);
    const double mu = st.mean;
    auto hist = count_histogram(y);

    const auto sum_digamma = [&](double r) {
        double acc = 0.0;
        if (!hist.empty()) {
            for (std::size_t k = 0; k < hist.size(); ++k)
                if (hist[k] > 0.0) acc += hist[k] * digamma(double(k) + r);
        } else {
            for (double v : y) acc += digamma(v + r);
        }
        return acc;
    };
    const auto sum_trigamma = [&](double r) {
        double acc = 0.0;
        if (!hist.empty()) {
            for (std::size_t k = 0; k < hist.size(); ++k)
                if (hist[k] > 0.0) acc += hist[k] * trigamma(double(k) + r);
        } else {
            for (double v : y) acc += trigamma(v + r);
        }
        return acc;
    };

    // Profile score in r with the mean fixed at its MLE.
    const auto f = [&](double r) {
        return sum_digamma(r) - n * digamma(r) + n * std::log(r / (r + mu));
    };
    const auto fp = [&](double r) {
        return sum_trigamma(r) - n * trigamma(r) +
               n * (1.0 / r - 1.0 / (r + mu));
    };
    const double start =
        std::clamp(mu * mu / (st.variance - mu), 1e-3, 1e6);
    const double r = decreasing_root(f, fp, start, "negbin null fit");
    const double p = r / (r + mu);

    double slgy1 = 0.0, slgyr = 0.0;
    if (!hist.empty()) {
        for (std::size_t k = 0; k < hist.size(); ++k)
            if (hist[k] > 0.0) {
                slgy1 += hist[k] * log_gamma(double(k) + 1.0);
                slgyr += hist[k] * log_gamma(double(k) + r);
            }
    } else {
        for (double v : y) {
            slgy1 += log_gamma(v + 1.0);
            slgyr += log_gamma(v + r);
        }
    }

    NullFit fit;
    fit.family = Family::NegBin;
    fit.params = NegBinNull{r, p};
    fit.sum_lgamma_y1 = slgy1;
    fit.count_hist = std::move(hist);
    fit.loglik0 = slgyr - n * log_gamma(r) - slgy1 + n * r * std::log(p) +
                  st.sum * std::log1p(-p);
    return fit;
}

NullFit fit_beta(std::span<const double> y, const YStats& st) {
    double sly = 0.0, sl1y = 0.0;
    for (double v : y) {
        sly += std::log(v);
        sl1y += std::log1p(-v);
    }
    const double n = double(st.n);

    // Method-of-moments start, clamped away from the boundary.
    const double m = st.mean;
    const double t = std::max(m * (1.0 - m) / st.variance - 1.0, 0.02);
    double a = std::max(m * t, 0.01);
    double b = std::max((1.0 - m) * t, 0.01);

    const auto grad = [&](double al, double be, double& ga, double& gb) {
        const double ds = digamma(al + be);
        ga = n * (ds - digamma(al)) + sly;
        gb = n * (ds - digamma(be)) + sl1y;
    };

    double ga, gb;
    grad(a, b, ga, gb);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double ts = trigamma(a + b);
        const double haa = n * (ts - trigamma(a));
        const double hbb = n * (ts - trigamma(b));
        const double hab = n * ts;
        const double det = haa * hbb - hab * hab;
        if (det == 0.0 || !std::isfinite(det))
            throw ConvergenceError("beta null fit: singular Hessian");
        double da = -(hbb * ga - hab * gb) / det;
        double db = -(haa * gb - hab * ga) / det;
        // Halve the step while it would leave the positive quadrant or grow
        // the gradient norm.
        const double gnorm = std::fabs(ga) + std::fabs(gb);
        int halvings = 0;
        for (; halvings < 30; ++halvings) {
            const double na = a + da, nb = b + db;
            if (na > 0.0 && nb > 0.0) {
                double nga, ngb;
                grad(na, nb, nga, ngb);
                if (std::fabs(nga) + std::fabs(ngb) <= gnorm ||
                    (small_step(da, na) && small_step(db, nb))) {
                    a = na;
                    b = nb;
                    ga = nga;
                    gb = ngb;
                    break;
                }
            }
            da *= 0.5;
            db *= 0.5;
        }
        if (halvings == 30)
            throw ConvergenceError("beta null fit: step halving exhausted");
        if (small_step(da, a) && small_step(db, b)) {
            NullFit fit;
            fit.family = Family::Beta;
            fit.params = BetaNull{a, b};
            fit.sum_log_y = sly;
            fit.sum_log1m_y = sl1y;
            fit.loglik0 = n * (log_gamma(a + b) - log_gamma(a) - log_gamma(b)) +
                          (a - 1.0) * sly + (b - 1.0) * sl1y;
            return fit;
        }
    }
    throw ConvergenceError("beta null fit: Newton did not converge in " +
                           std::to_string(kMaxIter) + " iterations");
}

NullFit fit_weibull(std::span<const double> y, const YStats& st) {
    const std::size_t n = st.n;
    std::vector<double> ly(n);
    double sly = 0.0, lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        ly[i] = std::log(y[i]);
        sly += ly[i];
        lmax = std::max(lmax, ly[i]);
    }
    const double mean_ly = sly / double(n);

    // Profile score in the shape; sums are shifted by the largest exponent so
    // y^kappa never overflows.
    struct Sums { double a, a1, a2; };
    const auto sums = [&](double kappa) {
        Sums s{0.0, 0.0, 0.0};
        const double shift = kappa * lmax;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = std::exp(kappa * ly[i] - shift);
            s.a += u;
            s.a1 += u * ly[i];
            s.a2 += u * ly[i] * ly[i];
        }
        return s;
    };
    const auto f = [&](double kappa) {
        const Sums s = sums(kappa);
        return 1.0 / kappa + mean_ly - s.a1 / s.a;
    };
    const auto fp = [&](double kappa) {
        const Sums s = sums(kappa);
        return -1.0 / (kappa * kappa) - (s.a2 * s.a - s.a1 * s.a1) / (s.a * s.a);
    };
    const double shape = decreasing_root(f, fp, 1.0, "weibull null fit");

    const Sums s = sums(shape);
    const double log_scale =
        (shape * lmax + std::log(s.a / double(n))) / shape;
    NullFit fit;
    fit.family = Family::Weibull;
    fit.params = WeibullNull{shape, std::exp(log_scale)};
    fit.sum_log_y = sly;
    // The scaled residual sum equals n at the profile maximum.
    fit.loglik0 = double(n) * std::log(shape) + (shape - 1.0) * sly -
                  double(n) * shape * log_scale - double(n);
    return fit;
}

} // namespace

NullFit fit_null(const ResponseVector& y, Family family) {
    validate_for_family(y, family);
    const YStats st = y_stats(y.values);
    if (!(st.variance > 0.0))
        throw DegenerateError("response has zero sample variance");

    NullFit fit;
    switch (family) {
        case Family::Logistic: fit = fit_logistic(st); break;
        case Family::Poisson: fit = fit_poisson(y.values, st); break;
        case Family::Gamma: fit = fit_gamma(y.values, st); break;
        case Family::NegBin: fit = fit_negbin(y.values, st); break;
        case Family::Beta: fit = fit_beta(y.values, st); break;
        case Family::Weibull: fit = fit_weibull(y.values, st); break;
        default: throw ValidationError("unknown family");
    }
    fit.n = st.n;
    fit.sum_y = st.sum;
    fit.mean_y = st.mean;
    if (y.kind == ResponseKind::Count && fit.count_hist.empty())
        fit.count_hist = count_histogram(y.values);
    return fit;
}

} // namespace uscr

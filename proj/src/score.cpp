#include "uscr/score.hpp"
#include "uscr/errors.hpp"
#include "uscr/simd_kernels.hpp"
#include "uscr/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uscr {

std::string test_kind_name(TestKind t) {
    switch (t) {
        case TestKind::Score: return "score";
        case TestKind::Llr: return "llr";
        case TestKind::PearsonZ: return "pearson";
        case TestKind::WelchT: return "welch";
    }
    return "?";
}

TestKind test_kind_from_name(const std::string& name) {
    for (TestKind t : {TestKind::Score, TestKind::Llr, TestKind::PearsonZ,
                       TestKind::WelchT})
        if (test_kind_name(t) == name) return t;
    throw ValidationError("unknown test '" + name + "'");
}

ScorePlan::ScorePlan(const ResponseVector& y, const NullFit& fit)
    : n_(y.values.size()), y_(y.values) {
    if (fit.n != n_)
        throw ValidationError("null fit was computed for a different n");
    validate_for_family(y, fit.family);

    switch (fit.family) {
        case Family::Logistic: {
            const double p = std::get<LogisticNull>(fit.params).p;
            var_unit_ = p * (1.0 - p);
            sum_w_ = fit.sum_y;
            break;
        }
        case Family::Poisson: {
            var_unit_ = std::get<PoissonNull>(fit.params).lambda;
            sum_w_ = fit.sum_y;
            break;
        }
        case Family::Gamma: {
            const auto& g = std::get<GammaNull>(fit.params);
            num_scale_ = 1.0 / fit.mean_y;
            var_unit_ = 1.0 / g.shape;
            sum_w_ = fit.sum_y;
            break;
        }
        case Family::NegBin: {
            const auto& nb = std::get<NegBinNull>(fit.params);
            const double mu = fit.mean_y;
            var_unit_ = mu + mu * mu / nb.r;
            sum_w_ = fit.sum_y;
            break;
        }
        case Family::Beta: {
            const auto& be = std::get<BetaNull>(fit.params);
            var_unit_ = special::trigamma(be.alpha) + special::trigamma(be.beta);
            w_.resize(n_);
            double sw = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                w_[i] = std::log(y_[i]) - std::log1p(-y_[i]);
                sw += w_[i];
            }
            sum_w_ = sw;
            break;
        }
        case Family::Weibull: {
            const auto& wb = std::get<WeibullNull>(fit.params);
            const double log_scale = std::log(wb.scale);
            w_.resize(n_);
            double sw = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                w_[i] = std::exp(wb.shape * (std::log(y_[i]) - log_scale));
                sw += w_[i];
            }
            sum_w_ = sw;
            break;
        }
    }
}

TestOutcome ScorePlan::column(std::span<const double> x,
                              const ColumnMoments& m) const {
    if (x.size() != n_)
        throw ValidationError("predictor length does not match the response");
    if (!(m.variance > 0.0))
        throw DegenerateError("predictor has zero variance");
    const std::span<const double> w = w_.empty() ? y_ : std::span<const double>(w_);
    const double cross = simd::dot(x, w) - m.mean * sum_w_;
    const double sxx = m.sumsq - m.sum * m.sum / double(n_);
    const double s = num_scale_ * cross / std::sqrt(sxx * var_unit_);
    return {TestKind::Score, s, special::chi2_sf_1df(s * s), std::nullopt};
}

TestOutcome score_statistic(const ResponseVector& y, const NullFit& fit,
                            std::span<const double> x, const ColumnMoments& m) {
    return ScorePlan(y, fit).column(x, m);
}

TestOutcome pearson_z(std::span<const double> y, std::span<const double> x) {
    const std::size_t n = y.size();
    if (x.size() != n)
        throw ValidationError("pearson: vectors differ in length");
    if (n <= 3)
        throw ValidationError("pearson: needs more than 3 observations, got " +
                              std::to_string(n));
    const auto mx = simd::moment_sums(x);
    const auto my = simd::moment_sums(y);
    const double sxy = simd::dot(x, y);
    const double dn = double(n);
    const double vx = dn * mx.sumsq - mx.sum * mx.sum;
    const double vy = dn * my.sumsq - my.sum * my.sum;
    if (!(vx > 0.0) || !(vy > 0.0))
        throw DegenerateError("pearson: zero variance input");
    double r = (dn * sxy - mx.sum * my.sum) / (std::sqrt(vx) * std::sqrt(vy));
    const double cap = 1.0 - 1e-12;
    r = std::clamp(r, -cap, cap);
    const double z = std::atanh(r) * std::sqrt(dn - 3.0);
    return {TestKind::PearsonZ, z, 2.0 * special::normal_sf(std::fabs(z)),
            std::nullopt};
}

TestOutcome welch_t_from_sums(double n1, double n, double sum_x, double sumsq_x,
                              double sum_xy, double sum_xxy) {
    const double n0 = n - n1;
    if (n1 < 2.0 || n0 < 2.0)
        throw DegenerateError("welch: each group needs at least 2 observations");
    const double m1 = sum_xy / n1;
    const double m0 = (sum_x - sum_xy) / n0;
    // Sample variances; clamp the cancellation residue of a constant group.
    const double v1 = std::max((sum_xxy - n1 * m1 * m1) / (n1 - 1.0), 0.0);
    const double v0 =
        std::max(((sumsq_x - sum_xxy) - n0 * m0 * m0) / (n0 - 1.0), 0.0);
    const double se2 = v1 / n1 + v0 / n0;
    if (!(se2 > 0.0))
        throw DegenerateError("welch: zero variance in both groups");
    const double t = (m1 - m0) / std::sqrt(se2);
    const double df = se2 * se2 /
        (v1 * v1 / (n1 * n1 * (n1 - 1.0)) + v0 * v0 / (n0 * n0 * (n0 - 1.0)));
    return {TestKind::WelchT, t,
            2.0 * special::student_t_sf(std::fabs(t), df), df};
}

TestOutcome welch_t(const ResponseVector& y, std::span<const double> x) {
    if (y.kind != ResponseKind::Binary)
        throw ValidationError("welch: needs a binary response, got " +
                              response_kind_name(y.kind));
    if (x.size() != y.values.size())
        throw ValidationError("welch: vectors differ in length");
    double n1 = 0.0;
    for (double v : y.values) n1 += v;
    const auto mx = simd::moment_sums(x);
    const auto ws = simd::weighted_sums(x, y.values);
    return welch_t_from_sums(n1, double(y.values.size()), mx.sum, mx.sumsq,
                             ws.xw, ws.xxw);
}

} // namespace uscr

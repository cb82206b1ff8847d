#include "uscr/simulate.hpp"
#include "uscr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

namespace uscr {

namespace {

std::uint64_t splitmix64_step(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Keeps generated Beta responses strictly inside (0, 1).
double clamp_unit_open(double y) {
    return std::clamp(y, 1e-12, 1.0 - 1e-12);
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed + stream * 0x9e3779b97f4a7c15ULL;
    splitmix64_step(state);
    return splitmix64_step(state);
}

namespace {

// Distinct design cells sharing a master seed get independent streams: the
// whole design is absorbed into the state before the replication index.
std::uint64_t design_stream_seed(const SimDesign& ds, std::uint64_t rep) {
    std::uint64_t s = ds.seed;
    const auto absorb = [&s](std::uint64_t v) {
        s ^= v;
        splitmix64_step(s);
    };
    absorb(std::uint64_t(ds.family));
    for (double p : ds.null_params) {
        std::uint64_t bits;
        std::memcpy(&bits, &p, sizeof bits);
        absorb(bits);
    }
    absorb(ds.n);
    absorb(ds.d);
    absorb(rep);
    return splitmix64_step(s);
}

} // namespace

Rng::Rng(std::uint64_t seed) : eng_(seed) {}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return (double(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

double Rng::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("bernoulli needs p in [0, 1]");
    return uniform() < p ? 1.0 : 0.0;
}

double Rng::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("poisson needs lambda >= 0");
    double total = 0.0;
    // Additivity lets large means be drawn as independent chunks, keeping
    // the product-of-uniforms method inside exp() range.
    while (lambda > 30.0) {
        total += poisson(30.0);
        lambda -= 30.0;
    }
    const double limit = std::exp(-lambda);
    double prod = uniform_open();
    double k = 0.0;
    while (prod > limit) {
        prod *= uniform_open();
        k += 1.0;
    }
    return total + k;
}

double Rng::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw DomainError("gamma needs shape > 0 and rate > 0");
    // Marsaglia-Tsang squeeze; shapes below 1 use the boost
    // Ga(a) = Ga(a+1) U^{1/a}.
    double boost = 1.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::pow(uniform_open(), 1.0 / a);
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return boost * d * v / rate;
    }
}

double Rng::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("beta needs alpha > 0 and beta > 0");
    const double g1 = gamma(alpha, 1.0);
    const double g2 = gamma(beta, 1.0);
    return clamp_unit_open(g1 / (g1 + g2));
}

double Rng::weibull(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw DomainError("weibull needs shape > 0 and scale > 0");
    return scale * std::pow(-std::log(uniform_open()), 1.0 / shape);
}

double Rng::negbin(double r, double mu) {
    if (!(r > 0.0) || !(mu > 0.0))
        throw DomainError("negbin needs r > 0 and mu > 0");
    return poisson(gamma(r, r / mu));
}

SimDesign resolve_design(SimDesign design) {
    if (design.null_params.empty()) {
        switch (design.family) {
            case Family::Logistic: design.null_params = {0.3}; break;
            case Family::Poisson: design.null_params = {5.0}; break;
            case Family::Gamma: design.null_params = {5.0, 5.0}; break;
            case Family::NegBin: design.null_params = {5.0, 5.0}; break;
            case Family::Beta: design.null_params = {5.0, 10.0}; break;
            case Family::Weibull: design.null_params = {2.0, 1.0}; break;
        }
    }
    const std::size_t want =
        (design.family == Family::Logistic || design.family == Family::Poisson)
            ? 1 : 2;
    if (design.null_params.size() != want)
        throw ValidationError(family_name(design.family) + " null needs " +
                              std::to_string(want) + " parameter(s), got " +
                              std::to_string(design.null_params.size()));
    for (double v : design.null_params)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("null parameters must be positive and finite");
    if (design.family == Family::Logistic && design.null_params[0] >= 1.0)
        throw ValidationError("logistic null probability must lie in (0, 1)");
    if (design.n < 4) throw ValidationError("simulation needs n >= 4");
    if (design.d < 1) throw ValidationError("simulation needs d >= 1");
    if (design.replications < 1)
        throw ValidationError("simulation needs replications >= 1");
    return design;
}

namespace {

double draw_null(Rng& rng, const SimDesign& ds) {
    const auto& p = ds.null_params;
    switch (ds.family) {
        case Family::Logistic: return rng.bernoulli(p[0]);
        case Family::Poisson: return rng.poisson(p[0]);
        case Family::Gamma: return rng.gamma(p[0], p[1]);
        case Family::NegBin: return rng.negbin(p[0], p[1]);
        case Family::Beta: return rng.beta(p[0], p[1]);
        case Family::Weibull: return rng.weibull(p[0], p[1]);
    }
    throw DomainError("unknown family");
}

std::vector<double> draw_normal_matrix(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<double> x(n * d);
    for (double& v : x) v = rng.normal();
    return x;
}

} // namespace

Dataset generate_null_dataset(const SimDesign& design, std::size_t rep) {
    const SimDesign ds = resolve_design(design);
    Rng rng(design_stream_seed(ds, rep));
    std::vector<double> y(ds.n);
    for (double& v : y) v = draw_null(rng, ds);
    std::vector<double> x = draw_normal_matrix(rng, ds.n, ds.d);
    return {make_response(std::move(y), required_kind(ds.family)),
            PredictorMatrix(ds.n, ds.d, std::move(x))};
}

PlantedDataset generate_planted_dataset(const SimDesign& design,
                                        std::size_t rep) {
    const SimDesign ds = resolve_design(design);
    if (ds.family != Family::Beta)
        throw ValidationError("planted designs use the beta family");
    Rng rng(design_stream_seed(ds, rep));
    const std::size_t planted = std::size_t(rng.next_u64() % ds.d);
    std::vector<double> x = draw_normal_matrix(rng, ds.n, ds.d);
    std::vector<double> y(ds.n);
    const double* xp = x.data() + planted * ds.n;
    for (std::size_t i = 0; i < ds.n; ++i)
        y[i] = rng.beta(sigmoid(xp[i]), 1.0);
    return {{make_response(std::move(y), ResponseKind::UnitInterval),
             PredictorMatrix(ds.n, ds.d, std::move(x))},
            planted};
}

MetricsTable run_experiment(const SimDesign& design,
                            const std::vector<TestKind>& tests,
                            unsigned threads) {
    const SimDesign ds = resolve_design(design);
    if (tests.empty()) throw ValidationError("experiment needs tests");
    MetricsTable table;
    table.design = ds;
    table.tests = tests;
    table.per_test.resize(tests.size());
    for (std::size_t ti = 0; ti < tests.size(); ++ti)
        table.per_test[ti].test = tests[ti];
    table.pairs.resize(tests.size() > 1 ? tests.size() - 1 : 0);
    for (std::size_t pi = 0; pi < table.pairs.size(); ++pi) {
        table.pairs[pi].baseline = tests[0];
        table.pairs[pi].other = tests[pi + 1];
    }

    ScreeningConfig cfg;
    cfg.family = ds.family;
    cfg.tests = tests;
    cfg.rule = SelectionRule::Threshold;
    cfg.alpha = 0.05;
    cfg.threads = threads;

    for (std::size_t rep = 0; rep < ds.replications; ++rep) {
        ScreeningReport rp;
        try {
            rp = screen(generate_null_dataset(ds, rep), cfg);
        } catch (const Error& e) {
            throw NumericError("replication " + std::to_string(rep) +
                               " failed: " + e.what());
        }
        for (std::size_t ti = 0; ti < tests.size(); ++ti) {
            std::size_t ok = 0, rejected = 0;
            for (const ColumnResult& col : rp.columns) {
                const CellResult& cell = col.cells[ti];
                if (!cell.ok()) continue;
                ++ok;
                table.per_test[ti].pooled_pvalues.push_back(
                    cell.outcome.pvalue);
                if (cell.outcome.pvalue <= cfg.alpha) ++rejected;
            }
            if (ok)
                table.per_test[ti].type_i_error +=
                    double(rejected) / double(ok);
            table.per_test[ti].mean_seconds += rp.test_seconds[ti];
        }
        for (std::size_t pi = 0; pi < table.pairs.size(); ++pi) {
            std::vector<double> pb, po;
            std::size_t same = 0;
            for (const ColumnResult& col : rp.columns) {
                const CellResult& cb = col.cells[0];
                const CellResult& co = col.cells[pi + 1];
                if (!cb.ok() || !co.ok()) continue;
                pb.push_back(cb.outcome.pvalue);
                po.push_back(co.outcome.pvalue);
                if ((cb.outcome.pvalue <= cfg.alpha) ==
                    (co.outcome.pvalue <= cfg.alpha))
                    ++same;
            }
            if (pb.size() >= 2)
                table.pairs[pi].pvalue_correlation +=
                    pearson_correlation(pb, po);
            if (!pb.empty())
                table.pairs[pi].agreement += double(same) / double(pb.size());
        }
    }

    const double reps = double(ds.replications);
    for (TestMetrics& tm : table.per_test) {
        tm.type_i_error /= reps;
        tm.mean_seconds /= reps;
    }
    for (std::size_t pi = 0; pi < table.pairs.size(); ++pi) {
        table.pairs[pi].pvalue_correlation /= reps;
        table.pairs[pi].agreement /= reps;
        const double tb = table.per_test[0].mean_seconds;
        const double to = table.per_test[pi + 1].mean_seconds;
        const double slow = std::max(tb, to), fast = std::min(tb, to);
        table.pairs[pi].speedup = fast > 0.0 ? slow / fast : 1.0;
    }
    return table;
}

DetectionMetrics run_planted_experiment(const SimDesign& design,
                                        const std::vector<TestKind>& tests,
                                        unsigned threads) {
    const SimDesign ds = resolve_design(design);
    if (tests.empty()) throw ValidationError("experiment needs tests");
    DetectionMetrics dm;
    dm.design = ds;
    dm.tests = tests;
    dm.first_rank_rate.assign(tests.size(), 0.0);

    ScreeningConfig cfg;
    cfg.family = ds.family;
    cfg.tests = tests;
    cfg.rule = SelectionRule::TopK;
    cfg.k = 1;
    cfg.threads = threads;

    for (std::size_t rep = 0; rep < ds.replications; ++rep) {
        const PlantedDataset pd = generate_planted_dataset(ds, rep);
        const ScreeningReport rp = screen(pd.data, cfg);
        for (std::size_t ti = 0; ti < tests.size(); ++ti) {
            // Rank by the same order TopK uses, within this test's cells.
            double best_p = 2.0, best_stat = -1.0;
            std::size_t best_j = rp.d;
            for (const ColumnResult& col : rp.columns) {
                const CellResult& cell = col.cells[ti];
                if (!cell.ok()) continue;
                const double p = cell.outcome.pvalue;
                const double s = std::fabs(cell.outcome.statistic);
                if (p < best_p || (p == best_p && s > best_stat)) {
                    best_p = p;
                    best_stat = s;
                    best_j = col.index;
                }
            }
            if (best_j == pd.planted_index) dm.first_rank_rate[ti] += 1.0;
        }
    }
    for (double& r : dm.first_rank_rate) r /= double(ds.replications);
    return dm;
}

double ks_uniform_distance(std::span<const double> pvalues) {
    if (pvalues.empty()) throw ValidationError("KS needs at least one value");
    std::vector<double> v(pvalues.begin(), pvalues.end());
    std::sort(v.begin(), v.end());
    const double m = double(v.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        dist = std::max(dist, v[i] - double(i) / m);
        dist = std::max(dist, double(i + 1) / m - v[i]);
    }
    return dist;
}

double ks_uniform_critical(std::size_t m, double level) {
    double c;
    if (level == 0.01) c = 1.628;
    else if (level == 0.05) c = 1.358;
    else throw ValidationError("supported KS levels are 0.01 and 0.05");
    const double sm = std::sqrt(double(m));
    return c / (sm + 0.12 + 0.11 / sm);
}

} // namespace uscr

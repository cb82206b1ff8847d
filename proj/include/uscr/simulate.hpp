#pragma once

#include "uscr/data.hpp"
#include "uscr/screen.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace uscr {

// Seeded variate source.  The engine is std::mt19937_64 (bit-exact by the
// standard); every transform below is implemented here rather than through
// std::*_distribution so that draws are reproducible across standard
// libraries too.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();      // [0, 1)
    double uniform_open(); // (0, 1)
    double normal();       // standard normal, Box-Muller pair cache
    double bernoulli(double p);
    double poisson(double lambda);
    double gamma(double shape, double rate);
    double beta(double alpha, double beta);
    double weibull(double shape, double scale);
    // Gamma-Poisson mixture with mean mu and Var = mu + mu^2/r.
    double negbin(double r, double mu);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream-splitting helper: hashes (seed, stream) into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// One Monte Carlo design cell: a family null, a data shape, and a seed.
// null_params, by family: Logistic {p}; Poisson {lambda}; Gamma {shape,
// rate}; NegBin {r, mu}; Beta {alpha, beta}; Weibull {shape, scale}.
struct SimDesign {
    Family family = Family::Logistic;
    std::vector<double> null_params;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t replications = 10;
    std::uint64_t seed = 1;
};

// Fills in family defaults when null_params is empty and checks validity.
SimDesign resolve_design(SimDesign design);

// y i.i.d. from the family null, X i.i.d. standard normal, independent of y.
// Fully determined by (design, rep); distinct design cells sharing a master
// seed draw from independent streams.
Dataset generate_null_dataset(const SimDesign& design, std::size_t rep);

// One uniformly chosen column drives the response through a Beta link:
// y_i ~ Beta(sigmoid(x_planted_i), 1).  Beta family only.
struct PlantedDataset {
    Dataset data;
    std::size_t planted_index = 0;
};
PlantedDataset generate_planted_dataset(const SimDesign& design, std::size_t rep);

// Averaged null-calibration metrics for one test over all replications.
struct TestMetrics {
    TestKind test = TestKind::Score;
    double type_i_error = 0.0; // mean fraction of p <= 0.05
    double mean_seconds = 0.0; // mean per-replication sweep seconds
    std::vector<double> pooled_pvalues; // all reps, column order
};

struct PairSummary {
    TestKind baseline = TestKind::Score;
    TestKind other = TestKind::Score;
    double pvalue_correlation = 0.0; // mean per-replication correlation
    double agreement = 0.0;          // mean per-replication agreement
    double speedup = 0.0;            // ratio of mean seconds, slower/faster
};

struct MetricsTable {
    SimDesign design;
    std::vector<TestKind> tests;
    std::vector<TestMetrics> per_test;
    std::vector<PairSummary> pairs; // later tests vs the first
};

// Screens `replications` independent null datasets with every requested test
// and averages type I error, p-value correlation, agreement, and timings.
MetricsTable run_experiment(const SimDesign& design,
                            const std::vector<TestKind>& tests,
                            unsigned threads = 1);

// Planted-variable recovery: fraction of replications in which each test
// ranks the planted column first (smallest p, ties as in TopK).
struct DetectionMetrics {
    SimDesign design;
    std::vector<TestKind> tests;
    std::vector<double> first_rank_rate; // parallel to tests
};
DetectionMetrics run_planted_experiment(const SimDesign& design,
                                        const std::vector<TestKind>& tests,
                                        unsigned threads = 1);

// One-sample Kolmogorov-Smirnov distance against Uniform(0,1).
double ks_uniform_distance(std::span<const double> pvalues);

// Critical D at significance `level` (supported: 0.01, 0.05) for sample
// size m, via the standard asymptotic approximation.
double ks_uniform_critical(std::size_t m, double level);

} // namespace uscr

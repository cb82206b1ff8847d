#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uscr/simd_kernels.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

using namespace uscr::simd;

namespace {

// Restores the startup variant when a test forces another one.
struct IsaGuard {
    Isa saved = active_isa();
    ~IsaGuard() { set_isa(saved); }
};

std::vector<double> random_vec(std::mt19937_64& eng, std::size_t n,
                               double scale) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = g(eng);
    return v;
}

// Reassociation bound: each accumulation order errs by at most
// n * eps * sum |terms|, so two orders differ by twice that.
double reassoc_tol(double abs_term_sum, std::size_t n) {
    return 2.0 * double(n) * 2.220446049250313e-16 * abs_term_sum + 1e-300;
}

} // namespace

TEST_CASE("scalar kernels match hand values") {
    const double x[] = {1.0, 2.0, 3.0};
    const double y[] = {4.0, 5.0, 6.0};
    CHECK(scalar::dot(x, y, 3) == 32.0);
    const MomentSums m = scalar::moment_sums(x, 3);
    CHECK(m.sum == 6.0);
    CHECK(m.sumsq == 14.0);
    const double w[] = {2.0, 0.5, 1.0};
    const WeightedSums s = scalar::weighted_sums(x, w, 3);
    CHECK(s.xw == 6.0);
    CHECK(s.xxw == 13.0);
}

TEST_CASE("kernels handle empty and single-element input") {
    const double x[] = {2.5};
    CHECK(scalar::dot(nullptr, nullptr, 0) == 0.0);
    CHECK(scalar::moment_sums(nullptr, 0).sum == 0.0);
    CHECK(scalar::moment_sums(x, 1).sumsq == 6.25);
    CHECK(dot(std::span<const double>{}, std::span<const double>{}) == 0.0);
}

TEST_CASE("set_isa(Scalar) always succeeds and routes dispatch") {
    IsaGuard guard;
    REQUIRE(set_isa(Isa::Scalar));
    CHECK(active_isa() == Isa::Scalar);
    std::mt19937_64 eng(21);
    const auto x = random_vec(eng, 37, 1.0);
    const auto y = random_vec(eng, 37, 1.0);
    // Dispatched call must be bitwise the scalar reference.
    CHECK(dot(x, y) == scalar::dot(x.data(), y.data(), x.size()));
    const MomentSums a = moment_sums(x);
    const MomentSums b = scalar::moment_sums(x.data(), x.size());
    CHECK(a.sum == b.sum);
    CHECK(a.sumsq == b.sumsq);
}

#if defined(UNISCREEN_BUILD_AVX2)
TEST_CASE("avx2 kernels agree with scalar to reassociation roundoff") {
    IsaGuard guard;
    if (!set_isa(Isa::Avx2)) {
        MESSAGE("AVX2 unavailable on this CPU; variant equivalence skipped");
        return;
    }
    CHECK(active_isa() == Isa::Avx2);
    std::mt19937_64 eng(22);
    // Sizes straddle the vector width, the unroll boundary, and large n.
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u,
                          32u, 33u, 63u, 64u, 100u, 1000u, 4097u}) {
        for (double scale : {1.0, 1e6}) {
            const auto x = random_vec(eng, n, scale);
            const auto y = random_vec(eng, n, 1.0);

            double abs_xy = 0.0, abs_x = 0.0, abs_xx = 0.0, abs_xxy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                abs_xy += std::fabs(x[i] * y[i]);
                abs_x += std::fabs(x[i]);
                abs_xx += x[i] * x[i];
                abs_xxy += std::fabs(x[i] * x[i] * y[i]);
            }

            CHECK(std::fabs(avx2::dot(x.data(), y.data(), n) -
                            scalar::dot(x.data(), y.data(), n)) <=
                  reassoc_tol(abs_xy, n));

            const MomentSums ms = scalar::moment_sums(x.data(), n);
            const MomentSums mv = avx2::moment_sums(x.data(), n);
            CHECK(std::fabs(mv.sum - ms.sum) <= reassoc_tol(abs_x, n));
            CHECK(std::fabs(mv.sumsq - ms.sumsq) <= reassoc_tol(abs_xx, n));

            const WeightedSums ws = scalar::weighted_sums(x.data(), y.data(), n);
            const WeightedSums wv = avx2::weighted_sums(x.data(), y.data(), n);
            CHECK(std::fabs(wv.xw - ws.xw) <= reassoc_tol(abs_xy, n));
            CHECK(std::fabs(wv.xxw - ws.xxw) <= reassoc_tol(abs_xxy, n));
        }
    }
}

TEST_CASE("dispatched entry points route to the forced avx2 variant") {
    IsaGuard guard;
    if (!set_isa(Isa::Avx2)) return;
    std::mt19937_64 eng(23);
    const auto x = random_vec(eng, 129, 1.0);
    const auto y = random_vec(eng, 129, 1.0);
    CHECK(dot(x, y) == avx2::dot(x.data(), y.data(), x.size()));
    CHECK(moment_sums(x).sumsq == avx2::moment_sums(x.data(), x.size()).sumsq);
}
#endif

TEST_CASE("forcing a variant is repeatable and deterministic") {
    IsaGuard guard;
    std::mt19937_64 eng(24);
    const auto x = random_vec(eng, 257, 1.0);
    const auto w = random_vec(eng, 257, 1.0);
    set_isa(Isa::Scalar);
    const WeightedSums first = weighted_sums(x, w);
    for (int i = 0; i < 5; ++i) {
        const WeightedSums again = weighted_sums(x, w);
        CHECK(again.xw == first.xw);
        CHECK(again.xxw == first.xxw);
    }
}

#include "uscr/simd_kernels.hpp"

#include <atomic>

namespace uscr::simd {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

MomentSums moment_sums(const double* x, std::size_t n) {
    double s = 0.0, q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += x[i];
        q += x[i] * x[i];
    }
    return {s, q};
}

WeightedSums weighted_sums(const double* x, const double* w, std::size_t n) {
    double xw = 0.0, xxw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i] * w[i];
        xw += t;
        xxw += x[i] * t;
    }
    return {xw, xxw};
}

} // namespace scalar

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    MomentSums (*moment_sums)(const double*, std::size_t);
    WeightedSums (*weighted_sums)(const double*, const double*, std::size_t);
};

constexpr KernelTable kScalarTable = {
    &scalar::dot, &scalar::moment_sums, &scalar::weighted_sums};

#if defined(UNISCREEN_BUILD_AVX2)
constexpr KernelTable kAvx2Table = {
    &avx2::dot, &avx2::moment_sums, &avx2::weighted_sums};

bool cpu_has_avx2_fma() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

struct Dispatch {
    const KernelTable* table;
    Isa isa;
};

Dispatch detect() {
#if defined(UNISCREEN_BUILD_AVX2)
    if (cpu_has_avx2_fma()) return {&kAvx2Table, Isa::Avx2};
#endif
    return {&kScalarTable, Isa::Scalar};
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::Scalar};

const KernelTable* table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (t) return t;
    const Dispatch d = detect();
    g_isa.store(d.isa, std::memory_order_relaxed);
    g_table.store(d.table, std::memory_order_release);
    return d.table;
}

} // namespace

Isa active_isa() {
    table();
    return g_isa.load(std::memory_order_relaxed);
}

bool set_isa(Isa isa) {
    if (isa == Isa::Scalar) {
        g_isa.store(Isa::Scalar, std::memory_order_relaxed);
        g_table.store(&kScalarTable, std::memory_order_release);
        return true;
    }
#if defined(UNISCREEN_BUILD_AVX2)
    if (isa == Isa::Avx2 && cpu_has_avx2_fma()) {
        g_isa.store(Isa::Avx2, std::memory_order_relaxed);
        g_table.store(&kAvx2Table, std::memory_order_release);
        return true;
    }
#endif
    return false;
}

double dot(std::span<const double> x, std::span<const double> y) {
    return table()->dot(x.data(), y.data(), x.size());
}

MomentSums moment_sums(std::span<const double> x) {
    return table()->moment_sums(x.data(), x.size());
}

WeightedSums weighted_sums(std::span<const double> x, std::span<const double> w) {
    return table()->weighted_sums(x.data(), w.data(), x.size());
}

} // namespace uscr::simd

#pragma once

// Column-sweep reduction kernels.  Every per-column statistic in the engine
// reduces to one or two of these passes, so they carry nearly all of the
// screening runtime.  Each kernel exists as a plain scalar reference and, on
// x86-64 builds, an AVX2+FMA variant; the active variant is chosen once at
// startup from CPU features.  Variant selection never depends on thread
// count, so per-column results are identical for any parallel partition.
//
// SIMD variants accumulate in a different order than the scalar reference;
// results agree to roundoff (tests bound the difference by a condition-number
// style tolerance), not bit-for-bit.

#include <cstddef>
#include <span>

namespace uscr::simd {

struct MomentSums {
    double sum;    // sum x_i
    double sumsq;  // sum x_i^2
};

struct WeightedSums {
    double xw;   // sum x_i * w_i
    double xxw;  // sum x_i^2 * w_i
};

enum class Isa { Scalar, Avx2 };

// Variant active for the dispatched entry points below.
Isa active_isa();

// Forces a variant; returns false (and changes nothing) if unsupported on
// this CPU or absent from this build.  Intended for tests and benchmarks.
bool set_isa(Isa isa);

// Dispatched entry points.
double dot(std::span<const double> x, std::span<const double> y);
MomentSums moment_sums(std::span<const double> x);
WeightedSums weighted_sums(std::span<const double> x, std::span<const double> w);

// Scalar reference implementations, always available.
namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
MomentSums moment_sums(const double* x, std::size_t n);
WeightedSums weighted_sums(const double* x, const double* w, std::size_t n);
} // namespace scalar

#if defined(UNISCREEN_BUILD_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
MomentSums moment_sums(const double* x, std::size_t n);
WeightedSums weighted_sums(const double* x, const double* w, std::size_t n);
} // namespace avx2
#endif

} // namespace uscr::simd

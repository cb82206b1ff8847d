// AVX2+FMA kernel variants.  This translation unit is compiled with
// -mavx2 -mfma; callers reach it only through the dispatch table after a
// CPU feature check.  Loops run two 4-lane accumulators to hide FMA latency
// and finish with a scalar tail, so any n is accepted.

#include "uscr/simd_kernels.hpp"

#include <immintrin.h>

namespace uscr::simd::avx2 {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                               _mm256_loadu_pd(y + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

MomentSums moment_sums(const double* x, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    __m256d q0 = _mm256_setzero_pd();
    __m256d q1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        s0 = _mm256_add_pd(s0, a);
        s1 = _mm256_add_pd(s1, b);
        q0 = _mm256_fmadd_pd(a, a, q0);
        q1 = _mm256_fmadd_pd(b, b, q1);
    }
    if (i + 4 <= n) {
        const __m256d a = _mm256_loadu_pd(x + i);
        s0 = _mm256_add_pd(s0, a);
        q0 = _mm256_fmadd_pd(a, a, q0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    double q = hsum(_mm256_add_pd(q0, q1));
    for (; i < n; ++i) {
        s += x[i];
        q += x[i] * x[i];
    }
    return {s, q};
}

WeightedSums weighted_sums(const double* x, const double* w, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d b0 = _mm256_setzero_pd();
    __m256d b1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d xa = _mm256_loadu_pd(x + i);
        const __m256d xb = _mm256_loadu_pd(x + i + 4);
        const __m256d wa = _mm256_loadu_pd(w + i);
        const __m256d wb = _mm256_loadu_pd(w + i + 4);
        const __m256d ta = _mm256_mul_pd(xa, wa);
        const __m256d tb = _mm256_mul_pd(xb, wb);
        a0 = _mm256_add_pd(a0, ta);
        a1 = _mm256_add_pd(a1, tb);
        b0 = _mm256_fmadd_pd(xa, ta, b0);
        b1 = _mm256_fmadd_pd(xb, tb, b1);
    }
    if (i + 4 <= n) {
        const __m256d xa = _mm256_loadu_pd(x + i);
        const __m256d wa = _mm256_loadu_pd(w + i);
        const __m256d ta = _mm256_mul_pd(xa, wa);
        a0 = _mm256_add_pd(a0, ta);
        b0 = _mm256_fmadd_pd(xa, ta, b0);
        i += 4;
    }
    double xw = hsum(_mm256_add_pd(a0, a1));
    double xxw = hsum(_mm256_add_pd(b0, b1));
    for (; i < n; ++i) {
        const double t = x[i] * w[i];
        xw += t;
        xxw += x[i] * t;
    }
    return {xw, xxw};
}

} // namespace uscr::simd::avx2

// AVX2+FMA variants. Built with -mavx2 -mfma on x86-64 only; callers must
// gate on __builtin_cpu_supports("avx2") before dispatching here.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "sakr/kernels.hpp"

namespace sakr::kernels {

namespace {

// f32 lanes widened to f64 before the FMA so products are exact; two
// accumulators hide FMA latency.
double dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a0 = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
        __m256d a1 = _mm256_cvtps_pd(_mm_loadu_ps(a + i + 4));
        __m256d b0 = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
        __m256d b1 = _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4));
        acc0 = _mm256_fmadd_pd(a0, b0, acc0);
        acc1 = _mm256_fmadd_pd(a1, b1, acc1);
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d sum2 = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double squared_norm_avx2(const float* a, std::size_t n) {
    return dot_avx2(a, a, n);
}

void accumulate_avx2(double* acc, const float* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d cur = _mm256_loadu_pd(acc + i);
        __m256d add = _mm256_cvtps_pd(_mm_loadu_ps(v + i));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(cur, add));
    }
    for (; i < n; ++i) {
        acc[i] += static_cast<double>(v[i]);
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", dot_avx2, squared_norm_avx2,
                                   accumulate_avx2};
    return table;
}

}  // namespace sakr::kernels

#endif  // x86-64

// NEON variants for aarch64, where NEON is baseline and needs no runtime gate.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "sakr/kernels.hpp"

namespace sakr::kernels {

namespace {

double dot_neon(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t av = vld1q_f32(a + i);
        float32x4_t bv = vld1q_f32(b + i);
        float64x2_t alo = vcvt_f64_f32(vget_low_f32(av));
        float64x2_t ahi = vcvt_f64_f32(vget_high_f32(av));
        float64x2_t blo = vcvt_f64_f32(vget_low_f32(bv));
        float64x2_t bhi = vcvt_f64_f32(vget_high_f32(bv));
        acc0 = vfmaq_f64(acc0, alo, blo);
        acc1 = vfmaq_f64(acc1, ahi, bhi);
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double squared_norm_neon(const float* a, std::size_t n) {
    return dot_neon(a, a, n);
}

void accumulate_neon(double* acc, const float* v, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t vv = vld1q_f32(v + i);
        float64x2_t lo = vcvt_f64_f32(vget_low_f32(vv));
        float64x2_t hi = vcvt_f64_f32(vget_high_f32(vv));
        vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), lo));
        vst1q_f64(acc + i + 2, vaddq_f64(vld1q_f64(acc + i + 2), hi));
    }
    for (; i < n; ++i) {
        acc[i] += static_cast<double>(v[i]);
    }
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{"neon", dot_neon, squared_norm_neon,
                                   accumulate_neon};
    return table;
}

}  // namespace sakr::kernels

#endif  // aarch64

#include "sakr/kernels.hpp"

namespace sakr::kernels {

namespace {

double dot_scalar(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double squared_norm_scalar(const float* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    }
    return acc;
}

void accumulate_scalar(double* acc, const float* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += static_cast<double>(v[i]);
    }
}

}  // namespace

const KernelTable& scalar() {
    static const KernelTable table{"scalar", dot_scalar, squared_norm_scalar,
                                   accumulate_scalar};
    return table;
}

}  // namespace sakr::kernels

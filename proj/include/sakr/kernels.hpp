#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Vector arithmetic inner loops. Every kernel takes f32 data and accumulates
// in f64, so results agree with the scalar reference to reassociation error
// (~1e-13 at dim 256) and similarity scores keep enough headroom for the
// sqrt(2(1-cos)) distance identity.
//
// Variants are selected once at startup from CPU capabilities; SAKR_KERNEL
// (scalar|avx2|neon) forces one, which the equivalence tests use.

namespace sakr::kernels {

struct KernelTable {
    const char* name;
    double (*dot)(const float* a, const float* b, std::size_t n);
    double (*squared_norm)(const float* a, std::size_t n);
    // acc[i] += v[i]
    void (*accumulate)(double* acc, const float* v, std::size_t n);
};

// Portable reference implementation, always present.
const KernelTable& scalar();

// Every variant the current CPU can run, scalar first.
const std::vector<const KernelTable*>& available();

// The selected table. Defaults to the last entry of available() (the widest
// supported variant) unless SAKR_KERNEL names another.
const KernelTable& active();

// Force a table (tests). Throws sakr::Error for an unknown name.
void set_active(const std::string& name);

inline double dot(const float* a, const float* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double squared_norm(const float* a, std::size_t n) {
    return active().squared_norm(a, n);
}
inline void accumulate(double* acc, const float* v, std::size_t n) {
    active().accumulate(acc, v, n);
}

}  // namespace sakr::kernels

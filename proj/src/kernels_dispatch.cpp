#include <cstdlib>
#include <string>
#include <vector>

#include "sakr/errors.hpp"
#include "sakr/kernels.hpp"

namespace sakr::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

namespace {

std::vector<const KernelTable*> detect() {
    std::vector<const KernelTable*> tables{&scalar()};
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        tables.push_back(&avx2_table());
    }
#endif
#if defined(__aarch64__)
    tables.push_back(&neon_table());
#endif
    return tables;
}

const KernelTable* select_default() {
    const auto& tables = available();
    if (const char* forced = std::getenv("SAKR_KERNEL")) {
        for (const auto* t : tables) {
            if (forced == std::string(t->name)) return t;
        }
        // Unknown or unsupported name: fall through to the widest variant
        // rather than aborting library init.
    }
    return tables.back();
}

const KernelTable*& active_slot() {
    static const KernelTable* slot = select_default();
    return slot;
}

}  // namespace

const std::vector<const KernelTable*>& available() {
    static const std::vector<const KernelTable*> tables = detect();
    return tables;
}

const KernelTable& active() { return *active_slot(); }

void set_active(const std::string& name) {
    for (const auto* t : available()) {
        if (name == t->name) {
            active_slot() = t;
            return;
        }
    }
    throw Error("unknown or unsupported kernel variant: " + name);
}

}  // namespace sakr::kernels

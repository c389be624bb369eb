#include <atomic>
#include <cstdlib>
#include <string>

#include "grar/error.hpp"
#include "grar/simd/kernels.hpp"
#include "kernels_detail.hpp"

namespace grar::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(GRAR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* best_available() noexcept {
    if (const auto* k = neon_kernels()) return k;
    if (const auto* k = avx2_kernels()) return k;
    return &scalar_kernels();
}

const KernelTable* initial() noexcept {
    if (const char* env = std::getenv("GRAR_SIMD")) {
        if (const auto b = parse_backend(env)) {
            if (const auto* k = kernels_for(*b)) {
                return k;
            }
        }
    }
    return best_available();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial()};
    return table;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(GRAR_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(GRAR_HAVE_NEON)
    return &detail::neon_table();
#else
    return nullptr;
#endif
}

const KernelTable* kernels_for(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return &scalar_kernels();
        case Backend::avx2: return avx2_kernels();
        case Backend::neon: return neon_kernels();
    }
    return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

void use(Backend backend) {
    const auto* k = kernels_for(backend);
    if (k == nullptr) {
        throw ConfigError(std::string("SIMD backend '") + backend_name(backend) +
                          "' is not available on this machine");
    }
    current().store(k, std::memory_order_relaxed);
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (avx2_kernels()) out.push_back(Backend::avx2);
    if (neon_kernels()) out.push_back(Backend::neon);
    return out;
}

const char* backend_name(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "neon") return Backend::neon;
    return std::nullopt;
}

}  // namespace grar::simd

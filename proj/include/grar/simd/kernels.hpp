#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops used by clustering and the classifier.
//
// Every kernel has a scalar reference implementation; AVX2 (x86-64) and NEON
// (AArch64) variants are compiled when the toolchain targets them and are
// selected at startup by probing the CPU. Vector variants reassociate
// reductions, so results agree with the scalar reference to rounding, not
// bit for bit. Set GRAR_SIMD=scalar|avx2|neon to pin a backend.

namespace grar::simd {

enum class Backend { scalar, avx2, neon };

struct L1Sum {
    double sum = 0.0;     ///< sum of |a_i - b_i| over coordinates weighted in both
    double weight = 0.0;  ///< sum of wa_i * wb_i
};

struct KernelTable {
    Backend backend;

    /// sum_i |a_i - b_i| * wa_i * wb_i, and sum_i wa_i * wb_i.
    L1Sum (*masked_l1)(const double* a, const double* wa, const double* b, const double* wb,
                       std::size_t n);

    /// sum_i w_i * (x_i - c_i)^2
    double (*masked_sq_dist)(const double* x, const double* w, const double* c, std::size_t n);

    /// sum_i w_i * (x_i - m_i)^2 * inv_var_i
    double (*weighted_sq_dist)(const double* x, const double* w, const double* mean,
                               const double* inv_var, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y += alpha * x. Bitwise identical across backends (no fused multiply-add).
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the backend is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

const KernelTable& active() noexcept;

/// Switches every subsequent kernel call. Throws ConfigError if unavailable.
void use(Backend backend);

std::vector<Backend> available_backends();
const KernelTable* kernels_for(Backend backend) noexcept;

const char* backend_name(Backend backend) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace grar::simd

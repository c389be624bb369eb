// AArch64 only; Advanced SIMD is part of the base ISA there.

#include <arm_neon.h>

#include <cmath>

#include "grar/simd/kernels.hpp"
#include "kernels_detail.hpp"

namespace grar::simd {

namespace {

inline double hsum(float64x2_t v) { return vaddvq_f64(v); }

L1Sum masked_l1(const double* a, const double* wa, const double* b, const double* wb,
                std::size_t n) {
    float64x2_t sum = vdupq_n_f64(0.0);
    float64x2_t weight = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t w = vmulq_f64(vld1q_f64(wa + i), vld1q_f64(wb + i));
        const float64x2_t d = vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        sum = vfmaq_f64(sum, d, w);
        weight = vaddq_f64(weight, w);
    }
    L1Sum r{hsum(sum), hsum(weight)};
    for (; i < n; ++i) {
        const double w = wa[i] * wb[i];
        r.sum += std::fabs(a[i] - b[i]) * w;
        r.weight += w;
    }
    return r;
}

double masked_sq_dist(const double* x, const double* w, const double* c, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(c + i));
        acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), d), d);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - c[i];
        s += w[i] * d * d;
    }
    return s;
}

double weighted_sq_dist(const double* x, const double* w, const double* mean,
                        const double* inv_var, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i));
        const float64x2_t wdd = vmulq_f64(vmulq_f64(vld1q_f64(w + i), d), d);
        acc = vfmaq_f64(acc, wdd, vld1q_f64(inv_var + i));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - mean[i];
        s += w[i] * d * d * inv_var[i];
    }
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = hsum(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    }
    for (; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

constexpr KernelTable kNeon{
    Backend::neon, masked_l1, masked_sq_dist, weighted_sq_dist, dot, axpy,
};

}  // namespace

namespace detail {
const KernelTable& neon_table() noexcept { return kNeon; }
}  // namespace detail

}  // namespace grar::simd

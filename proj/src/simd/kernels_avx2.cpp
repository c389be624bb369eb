// Compiled with -mavx2 -mfma; only reached after a CPU probe succeeds.

#include <immintrin.h>

#include <cmath>

#include "grar/simd/kernels.hpp"
#include "kernels_detail.hpp"

namespace grar::simd {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

L1Sum masked_l1(const double* a, const double* wa, const double* b, const double* wb,
                std::size_t n) {
    __m256d sum = _mm256_setzero_pd();
    __m256d weight = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w = _mm256_mul_pd(_mm256_loadu_pd(wa + i), _mm256_loadu_pd(wb + i));
        const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        sum = _mm256_fmadd_pd(d, w, sum);
        weight = _mm256_add_pd(weight, w);
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
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(c + i));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, acc);
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
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
        const __m256d wd = _mm256_mul_pd(_mm256_loadu_pd(w + i), d);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wd, d), _mm256_loadu_pd(inv_var + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - mean[i];
        s += w[i] * d * d * inv_var[i];
    }
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

constexpr KernelTable kAvx2{
    Backend::avx2, masked_l1, masked_sq_dist, weighted_sq_dist, dot, axpy,
};

}  // namespace

namespace detail {
const KernelTable& avx2_table() noexcept { return kAvx2; }
}  // namespace detail

}  // namespace grar::simd

#include <cmath>

#include "grar/simd/kernels.hpp"

namespace grar::simd {

namespace {

L1Sum masked_l1(const double* a, const double* wa, const double* b, const double* wb,
                std::size_t n) {
    L1Sum r;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = wa[i] * wb[i];
        r.sum += std::fabs(a[i] - b[i]) * w;
        r.weight += w;
    }
    return r;
}

double masked_sq_dist(const double* x, const double* w, const double* c, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c[i];
        s += w[i] * d * d;
    }
    return s;
}

double weighted_sq_dist(const double* x, const double* w, const double* mean,
                        const double* inv_var, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean[i];
        s += w[i] * d * d * inv_var[i];
    }
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = y[i] + alpha * x[i];
    }
}

constexpr KernelTable kScalar{
    Backend::scalar, masked_l1, masked_sq_dist, weighted_sq_dist, dot, axpy,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace grar::simd

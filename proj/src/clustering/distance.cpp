#include <algorithm>
#include <limits>

#include "grar/clustering.hpp"
#include "grar/simd/kernels.hpp"

namespace grar {

namespace {

double rescale(simd::L1Sum s) noexcept {
    // weight counts both coordinates of each shared joint
    const double shared = s.weight / 2.0;
    if (shared <= 0.0) {
        return kNoOverlapDistance;
    }
    return s.sum * (static_cast<double>(kNumJoints) / shared);
}

}  // namespace

double masked_l1(const NormalizedPose& a, const NormalizedPose& b) noexcept {
    const auto wa = a.weights();
    const auto wb = b.weights();
    return rescale(simd::active().masked_l1(a.coords.data(), wa.data(), b.coords.data(),
                                            wb.data(), kPoseDims));
}

PoseMatrix::PoseMatrix(std::span<const NormalizedPose> poses)
    : rows_(poses.size()), coords_(poses.size() * kPoseDims), weights_(poses.size() * kPoseDims) {
    for (std::size_t i = 0; i < rows_; ++i) {
        std::copy(poses[i].coords.begin(), poses[i].coords.end(), &coords_[i * kPoseDims]);
        const auto w = poses[i].weights();
        std::copy(w.begin(), w.end(), &weights_[i * kPoseDims]);
    }
}

double PoseMatrix::masked_l1(std::size_t i, std::size_t j) const noexcept {
    return rescale(
        simd::active().masked_l1(coords(i), weights(i), coords(j), weights(j), kPoseDims));
}

DistanceMatrix::DistanceMatrix(const PoseMatrix& poses) : n_(poses.size()), d_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            const double v = poses.masked_l1(i, j);
            d_[i * n_ + j] = v;
            d_[j * n_ + i] = v;
        }
    }
}

double DistanceMatrix::assignment_cost(std::span<const std::size_t> medoids,
                                       std::vector<std::size_t>* slots) const {
    if (slots != nullptr) {
        slots->assign(n_, 0);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_slot = 0;
        for (std::size_t s = 0; s < medoids.size(); ++s) {
            const double d = (*this)(i, medoids[s]);
            if (d < best) {
                best = d;
                best_slot = s;
            }
        }
        total += best;
        if (slots != nullptr) {
            (*slots)[i] = best_slot;
        }
    }
    return total;
}

}  // namespace grar

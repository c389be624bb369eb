#pragma once

#include <algorithm>
#include <numeric>

#include "grar/clustering.hpp"
#include "grar/error.hpp"

namespace grar::detail {

inline void check_k(std::size_t k, std::size_t n) {
    if (n == 0) {
        throw ConfigError("cannot cluster an empty pose list");
    }
    if (k == 0 || k > n) {
        throw ConfigError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) +
                          "]");
    }
}

/// Orders medoids ascending, remaps cluster ids to match and recomputes the
/// L1 cost of the partition in point order.
inline KeyPoseSet finalize(std::span<const NormalizedPose> poses, const PoseMatrix& packed,
                           std::vector<std::size_t> medoids, std::vector<std::size_t> slots) {
    std::vector<std::size_t> order(medoids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return medoids[a] < medoids[b]; });
    std::vector<std::size_t> remap(medoids.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        remap[order[r]] = r;
    }

    KeyPoseSet out;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t m = medoids[order[r]];
        out.medoids.push_back(m);
        out.medoid_frame_indices.push_back(poses[m].frame_index);
        out.medoid_vectors.push_back(poses[m]);
    }
    out.assignments.resize(slots.size());
    out.frame_indices.resize(slots.size());
    double cost = 0.0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        out.assignments[i] = remap[slots[i]];
        out.frame_indices[i] = poses[i].frame_index;
        cost += packed.masked_l1(i, out.medoids[out.assignments[i]]);
    }
    out.total_cost = cost;
    return out;
}

}  // namespace grar::detail

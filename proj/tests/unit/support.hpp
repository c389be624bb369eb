#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "grar/normalize.hpp"
#include "grar/pose.hpp"
#include "grar/rng.hpp"

namespace grar::test {

inline Pose random_pose(Rng& rng, const BoundingBox& spread, double min_conf = 0.0) {
    Pose p;
    for (auto& j : p.joints) {
        j.x = rng.uniform(spread.x_min, spread.x_max);
        j.y = rng.uniform(spread.y_min, spread.y_max);
        j.confidence = rng.uniform(min_conf, 1.0);
    }
    return p;
}

inline NormalizedPose full_pose(double x, double y, long frame = 0) {
    NormalizedPose p;
    p.frame_index = frame;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        p.coords[2 * j] = x;
        p.coords[2 * j + 1] = y;
        p.mask[j] = true;
    }
    return p;
}

inline NormalizedPose random_normalized(Rng& rng, double mask_prob = 0.0, long frame = 0) {
    NormalizedPose p;
    p.frame_index = frame;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        p.mask[j] = rng.uniform() >= mask_prob;
        if (p.mask[j]) {
            p.coords[2 * j] = rng.uniform();
            p.coords[2 * j + 1] = rng.uniform();
        }
    }
    return p;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("grar_test_" + std::to_string(::getpid()) + "_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace grar::test

#pragma once

#include <array>
#include <vector>

#include "grar/pose.hpp"

namespace grar {

inline constexpr std::size_t kPoseDims = 2 * kNumJoints;

/// Box-relative joint coordinates: x' = (x - x_min) / width, y' likewise.
/// Joints below the confidence threshold are masked out and zeroed.
struct NormalizedPose {
    long frame_index = 0;
    std::array<double, kPoseDims> coords{};  ///< x0 y0 x1 y1 ...
    std::array<bool, kNumJoints> mask{};

    std::size_t valid_count() const noexcept;

    /// 1.0 for coordinates of valid joints, 0.0 otherwise; same layout as coords.
    std::array<double, kPoseDims> weights() const noexcept;

    friend bool operator==(const NormalizedPose&, const NormalizedPose&) = default;
};

/// Throws DegenerateBoxError when the box is narrower or shorter than 1 px.
NormalizedPose normalize_pose(const Pose& pose, const BoundingBox& box,
                              double conf_threshold = kLowConfidence, long frame_index = 0);

/// Normalizes every frame against its own box. Errors carry the frame index.
std::vector<NormalizedPose> normalize_sequence(const PoseSequence& seq,
                                               double conf_threshold = kLowConfidence);

}  // namespace grar

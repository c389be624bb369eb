#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "grar/image.hpp"

namespace grar {

inline constexpr std::size_t kNumJoints = 17;

/// Joints below this confidence are treated as not detected.
inline constexpr double kLowConfidence = 0.3;

/// COCO-17 keypoint order.
enum class Joint : std::size_t {
    nose = 0,
    left_eye,
    right_eye,
    left_ear,
    right_ear,
    left_shoulder,
    right_shoulder,
    left_elbow,
    right_elbow,
    left_wrist,
    right_wrist,
    left_hip,
    right_hip,
    left_knee,
    right_knee,
    left_ankle,
    right_ankle,
};

constexpr std::size_t index(Joint j) noexcept { return static_cast<std::size_t>(j); }

/// COCO skeleton, 19 limbs as (joint, joint) pairs.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 19> kSkeleton{{
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12},
    {5, 6},   {5, 7},   {6, 8},   {7, 9},   {8, 10},  {1, 2},  {0, 1},
    {0, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 6},
}};

const char* joint_name(std::size_t joint);

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;

    bool valid(double threshold = kLowConfidence) const noexcept { return confidence >= threshold; }

    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct Pose {
    std::array<Keypoint, kNumJoints> joints{};

    const Keypoint& operator[](std::size_t j) const noexcept { return joints[j]; }
    Keypoint& operator[](std::size_t j) noexcept { return joints[j]; }

    double mean_confidence() const noexcept;
    std::size_t valid_count(double threshold = kLowConfidence) const noexcept;

    friend bool operator==(const Pose&, const Pose&) = default;
};

struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }

    bool valid() const noexcept {
        return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
               std::isfinite(y_max) && x_min < x_max && y_min < y_max;
    }

    bool contains(double x, double y) const noexcept {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    /// Crop raster size: box extent rounded to whole pixels.
    int pixel_width() const noexcept { return static_cast<int>(std::lround(width())); }
    int pixel_height() const noexcept { return static_cast<int>(std::lround(height())); }

    /// Crop-local pixel holding the frame-space point (x, y).
    int local_px(double x) const noexcept { return static_cast<int>(std::floor(x - x_min)); }
    int local_py(double y) const noexcept { return static_cast<int>(std::floor(y - y_min)); }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct TrackFrame {
    long frame_index = 0;
    Pose pose;
    BoundingBox box;

    friend bool operator==(const TrackFrame&, const TrackFrame&) = default;
};

/// One person's tracklet: poses and boxes over time.
struct PoseSequence {
    std::string person_id;
    std::vector<TrackFrame> frames;

    std::size_t size() const noexcept { return frames.size(); }

    friend bool operator==(const PoseSequence&, const PoseSequence&) = default;
};

struct CropFrame {
    long frame_index = 0;
    RgbImage image;
    /// Source path relative to the track file; empty for in-memory crops.
    std::string relpath;

    friend bool operator==(const CropFrame&, const CropFrame&) = default;
};

/// RGB crops of the tracked boxes, aligned 1:1 with a PoseSequence.
struct TrackCrops {
    std::string person_id;
    std::vector<CropFrame> frames;

    /// Crop for `frame_index`, or nullptr.
    const CropFrame* find(long frame_index) const noexcept;

    friend bool operator==(const TrackCrops&, const TrackCrops&) = default;
};

struct Track {
    PoseSequence poses;
    TrackCrops crops;
};

}  // namespace grar

#include "grar/pose.hpp"

namespace grar {

namespace {

constexpr std::array<const char*, kNumJoints> kJointNames{
    "nose",       "left_eye",    "right_eye",      "left_ear",        "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
    "right_wrist", "left_hip",   "right_hip",      "left_knee",       "right_knee",
    "left_ankle",  "right_ankle",
};

}  // namespace

const char* joint_name(std::size_t joint) {
    return joint < kNumJoints ? kJointNames[joint] : "?";
}

double Pose::mean_confidence() const noexcept {
    double sum = 0.0;
    for (const auto& j : joints) {
        sum += j.confidence;
    }
    return sum / static_cast<double>(kNumJoints);
}

std::size_t Pose::valid_count(double threshold) const noexcept {
    std::size_t n = 0;
    for (const auto& j : joints) {
        n += j.valid(threshold) ? 1 : 0;
    }
    return n;
}

const CropFrame* TrackCrops::find(long frame_index) const noexcept {
    for (const auto& f : frames) {
        if (f.frame_index == frame_index) {
            return &f;
        }
    }
    return nullptr;
}

}  // namespace grar

#include "grar/normalize.hpp"

#include "grar/error.hpp"
#include "grar/track_io.hpp"

namespace grar {

std::size_t NormalizedPose::valid_count() const noexcept {
    std::size_t n = 0;
    for (bool m : mask) {
        n += m ? 1 : 0;
    }
    return n;
}

std::array<double, kPoseDims> NormalizedPose::weights() const noexcept {
    std::array<double, kPoseDims> w{};
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const double v = mask[j] ? 1.0 : 0.0;
        w[2 * j] = v;
        w[2 * j + 1] = v;
    }
    return w;
}

NormalizedPose normalize_pose(const Pose& pose, const BoundingBox& box, double conf_threshold,
                              long frame_index) {
    const double w = box.width();
    const double h = box.height();
    if (!(w >= 1.0) || !(h >= 1.0)) {
        throw DegenerateBoxError("bounding box " + format_number(w) + "x" + format_number(h) +
                                 " is too small to normalize against");
    }
    NormalizedPose out;
    out.frame_index = frame_index;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const Keypoint& kp = pose[j];
        if (!kp.valid(conf_threshold)) {
            continue;
        }
        out.mask[j] = true;
        out.coords[2 * j] = (kp.x - box.x_min) / w;
        out.coords[2 * j + 1] = (kp.y - box.y_min) / h;
    }
    return out;
}

std::vector<NormalizedPose> normalize_sequence(const PoseSequence& seq, double conf_threshold) {
    std::vector<NormalizedPose> out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) {
        try {
            out.push_back(normalize_pose(f.pose, f.box, conf_threshold, f.frame_index));
        } catch (const DegenerateBoxError& e) {
            throw DegenerateBoxError(seq.person_id + " frame " + std::to_string(f.frame_index) +
                                     ": " + e.what());
        }
    }
    return out;
}

}  // namespace grar

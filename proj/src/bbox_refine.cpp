#include "grar/bbox_refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grar/error.hpp"

namespace grar {

BoundingBox refine_box(const Pose& pose, const BoundingBox& box, double conf_threshold,
                       double margin) {
    double lo_x = std::numeric_limits<double>::infinity();
    double lo_y = std::numeric_limits<double>::infinity();
    double hi_x = -std::numeric_limits<double>::infinity();
    double hi_y = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& kp : pose.joints) {
        if (!kp.valid(conf_threshold)) {
            continue;
        }
        any = true;
        lo_x = std::min(lo_x, kp.x);
        lo_y = std::min(lo_y, kp.y);
        hi_x = std::max(hi_x, kp.x);
        hi_y = std::max(hi_y, kp.y);
    }
    if (!any) {
        return box;
    }
    BoundingBox out = box;
    if (lo_x < box.x_min) out.x_min = lo_x - margin;
    if (lo_y < box.y_min) out.y_min = lo_y - margin;
    if (hi_x > box.x_max) out.x_max = hi_x + margin;
    if (hi_y > box.y_max) out.y_max = hi_y + margin;
    return out;
}

PoseSequence refine_sequence(const PoseSequence& seq, double conf_threshold, double margin) {
    PoseSequence out = seq;
    for (auto& f : out.frames) {
        f.box = refine_box(f.pose, f.box, conf_threshold, margin);
    }
    return out;
}

TrackCrops refine_crops(const TrackCrops& crops, const PoseSequence& original,
                        const PoseSequence& refined, const FrameSource* source) {
    if (original.frames.size() != refined.frames.size() ||
        crops.frames.size() != original.frames.size()) {
        throw DimensionError("refine_crops: track " + crops.person_id +
                             " has mismatched frame counts");
    }
    TrackCrops out;
    out.person_id = crops.person_id;
    out.frames.reserve(crops.frames.size());
    for (std::size_t i = 0; i < crops.frames.size(); ++i) {
        const BoundingBox& old_box = original.frames[i].box;
        const BoundingBox& new_box = refined.frames[i].box;
        const CropFrame& old_crop = crops.frames[i];
        if (old_box == new_box) {
            out.frames.push_back(old_crop);
            continue;
        }
        CropFrame next{old_crop.frame_index, {}, {}};
        if (source != nullptr) {
            if (auto pixels = source->extract(crops.person_id, old_crop.frame_index, new_box)) {
                next.image = std::move(*pixels);
            }
        }
        if (next.image.empty()) {
            next.image = RgbImage(new_box.pixel_width(), new_box.pixel_height());
            const int dx = static_cast<int>(std::lround(old_box.x_min - new_box.x_min));
            const int dy = static_cast<int>(std::lround(old_box.y_min - new_box.y_min));
            next.image.blit(old_crop.image, dx, dy);
        }
        if (next.image.width() != new_box.pixel_width() ||
            next.image.height() != new_box.pixel_height()) {
            throw DimensionError("refine_crops: frame source returned a crop of the wrong size");
        }
        out.frames.push_back(std::move(next));
    }
    return out;
}

}  // namespace grar

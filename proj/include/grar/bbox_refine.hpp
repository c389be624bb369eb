#pragma once

#include <optional>
#include <string>

#include "grar/pose.hpp"

namespace grar {

inline constexpr double kRefineMarginPx = 2.0;

/// Grows `box` so that every joint with confidence >= conf_threshold lies
/// inside. A side that moves is placed `margin` pixels beyond the extreme
/// joint; sides that already enclose every joint stay put.
BoundingBox refine_box(const Pose& pose, const BoundingBox& box,
                       double conf_threshold = kLowConfidence,
                       double margin = kRefineMarginPx);

PoseSequence refine_sequence(const PoseSequence& seq, double conf_threshold = kLowConfidence,
                             double margin = kRefineMarginPx);

/// Provides full-frame pixels for re-cropping after refinement.
class FrameSource {
public:
    virtual ~FrameSource() = default;

    /// Pixels of `box` in frame `frame_index` of `person_id`'s video, or
    /// nullopt when the frame is unavailable.
    virtual std::optional<RgbImage> extract(const std::string& person_id, long frame_index,
                                            const BoundingBox& box) const = 0;
};

/// Crops matching `refined`. Frames whose box is unchanged keep their crop.
/// Otherwise the crop comes from `source` when it can supply the frame, and
/// is the old crop zero-padded out to the refined box when it cannot.
TrackCrops refine_crops(const TrackCrops& crops, const PoseSequence& original,
                        const PoseSequence& refined, const FrameSource* source = nullptr);

}  // namespace grar

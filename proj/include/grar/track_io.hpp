#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "grar/pose.hpp"

namespace grar {

/// Reads a pose-track file.
///
/// One frame per line, whitespace separated:
///
///     person_id frame_index x_min y_min x_max y_max crop_relpath j0x j0y j0c ... j16x j16y j16c
///
/// Blank lines and lines starting with '#' are skipped. Lines sharing a
/// person_id form one track, in order of first appearance. Crop paths are
/// resolved against the directory holding the file; each crop must measure
/// exactly BoundingBox::pixel_width() x pixel_height().
///
/// Throws ParseError (line/field), SchemaError (joint count, ranges),
/// IoError (unreadable file or crop) and DimensionError (crop size).
std::vector<Track> load_tracks(const std::filesystem::path& path);

/// Same as load_tracks but keeps crops empty (poses and boxes only).
std::vector<PoseSequence> load_sequences(const std::filesystem::path& path);

/// Writes `tracks` in the format above and stores every crop as a PNG next to
/// it. Crops without a relpath are written to crops/<person_id>/<frame>.png.
void write_tracks(const std::filesystem::path& path, const std::vector<Track>& tracks);

struct SequenceWarning {
    enum class Kind { low_confidence, non_monotone };

    Kind kind;
    std::size_t position;  ///< index into PoseSequence::frames
    long frame_index;
    std::string message;
};

/// Flags frames whose mean joint confidence is below `conf_threshold` and
/// frame indices that do not strictly increase. Never throws.
std::vector<SequenceWarning> validate_sequence(const PoseSequence& seq,
                                               double conf_threshold = kLowConfidence);

/// Decimal text that parses back to the identical double.
std::string format_number(double v);

}  // namespace grar

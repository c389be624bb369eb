#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grar/classifier.hpp"
#include "grar/clustering.hpp"
#include "grar/grid.hpp"
#include "grar/report.hpp"
#include "grar/synth.hpp"

namespace grar {

enum class Selection {
    key_poses,  ///< cluster medoids
    random,     ///< K distinct frames drawn with the run seed
};

struct PipelineConfig {
    ClusterConfig cluster;
    Selection selection = Selection::key_poses;
    bool bbox_refine = true;
    GridOptions grid;
    int feature_side = kDefaultFeatureSide;
    TrainConfig train;
    std::size_t jobs = 1;
};

/// Ablation rows: frame selection x cell content x box refinement x attention.
enum class Variant { random, key_pose, key_rgb, key_rgb_eb, key_rgb_eb_pa };

inline constexpr std::array<Variant, 5> kAllVariants{Variant::random, Variant::key_pose,
                                                     Variant::key_rgb, Variant::key_rgb_eb,
                                                     Variant::key_rgb_eb_pa};

const char* variant_name(Variant v) noexcept;  ///< "Random", "K-Pose", "K-RGB", ...
Variant parse_variant(std::string_view name);

/// `base` with selection, content, refinement and attention set for `v`.
PipelineConfig variant_config(Variant v, PipelineConfig base);

/// Sorted, distinct; all frames when the track is shorter than k.
std::vector<long> random_key_frames(const PoseSequence& seq, std::size_t k, std::uint64_t seed);

/// Refined boxes and zero-padded crops when cfg.bbox_refine, else a copy.
Track prepare_track(const Track& track, const PipelineConfig& cfg);

struct SelectedFrames {
    std::vector<long> frame_indices;
    double total_cost = 0.0;
    bool fallback = false;
};

/// Key frames of an already prepared track.
SelectedFrames select_frames(const Track& prepared, const PipelineConfig& cfg);

struct GriddedTrack {
    GridImage grid;
    SelectedFrames selection;
};

/// prepare_track, select_frames and build_grid.
GriddedTrack grid_track(const Track& track, const PipelineConfig& cfg);

/// grid_track over every track on cfg.jobs threads; output in input order.
std::vector<GriddedTrack> grid_tracks(std::span<const Track> tracks, const PipelineConfig& cfg);

EvalReport evaluate(const LinearSoftmaxModel& model, std::span<const Example> test);

struct ExperimentResult {
    EvalReport report;
    TrainResult training;
};

/// Tracks from a pose-track file joined by person_id with their manifest
/// records; manifest order. Throws SchemaError when a record has no track.
std::vector<LabeledTrack> load_corpus(const std::filesystem::path& tracks,
                                      const std::filesystem::path& manifest);

/// Grids every track, trains on the train split, evaluates on the test split.
ExperimentResult run_experiment(const std::vector<LabeledTrack>& corpus, const PipelineConfig& cfg);

}  // namespace grar

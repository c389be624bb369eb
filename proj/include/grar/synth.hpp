#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "grar/manifest.hpp"
#include "grar/pose.hpp"

namespace grar {

enum class Action { walk, run, jump, wave, idle };

inline constexpr std::array<Action, 5> kAllActions{Action::walk, Action::run, Action::jump,
                                                   Action::wave, Action::idle};

const char* action_name(Action a) noexcept;
/// Throws ConfigError for unknown names.
Action parse_action(std::string_view name);

/// Limb-angle amplitudes (radians, 0 = hanging straight down, positive =
/// towards the facing direction) and body offsets (fractions of body height).
struct MotionAmplitudes {
    double hip_swing = 0.0;       ///< thigh swing, legs in antiphase
    double knee_base = 0.0;       ///< resting knee bend
    double knee_flex = 0.0;       ///< extra bend while the leg swings forward
    double shoulder_swing = 0.0;  ///< upper-arm swing, opposite to the legs
    double elbow_bend = 0.0;
    double lean = 0.0;            ///< forward torso lean
    double bob = 0.0;             ///< vertical bounce
    double hop = 0.0;             ///< jump height
    double crouch = 0.0;          ///< hip/knee fold at take-off and landing
    double arm_raise = 0.0;       ///< arm lift (wave: right arm; jump: both, in flight)
    double wave = 0.0;            ///< forearm sway of a raised arm
    double speed = 0.0;           ///< forward travel per frame
};

struct ActionSpec {
    Action action = Action::walk;
    std::size_t period_frames = 24;
    MotionAmplitudes amplitudes;
    /// Pose-estimator noise, standard deviation as a fraction of body height.
    double noise_sigma = 0.01;

    static ActionSpec preset(Action a);
    /// Throws ConfigError: period < 4, angles beyond pi, offsets beyond 0.5.
    void validate() const;
};

struct CorruptionSpec {
    double outlier_rate = 0.0;
    double occlusion_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FrameTruth {
    bool outlier = false;
    bool occluded = false;
    std::array<bool, kNumJoints> occluded_joints{};
    /// Motion phase in [0, 1).
    double phase = 0.0;
};

struct SynthTrack {
    Track track;
    std::string label;
    std::vector<FrameTruth> truth;
};

/// Deterministic in (spec, frames, corruption, seed, person_id).
///
/// Corrupted frames are chosen by a quantile rule: every frame draws one
/// uniform number, and the llround(outlier_rate * frames) smallest become
/// outliers (joints uniform over the box, confidence 1, crop untouched).
/// A second draw picks llround(occlusion_rate * frames) of the remaining
/// frames as occluded: a gray rectangle is painted into the crop and joints
/// under it get confidence 0.05.
SynthTrack generate_track(const ActionSpec& spec, std::size_t frames,
                          const CorruptionSpec& corruption, std::uint64_t seed,
                          const std::string& person_id = "p0");

inline constexpr double kOccludedConfidence = 0.05;

struct CorpusSpec {
    std::size_t per_class = 30;
    std::vector<Action> classes{kAllActions.begin(), kAllActions.end()};
    std::size_t frames = 100;
    CorruptionSpec corruption;
    std::uint64_t seed = 0;
};

struct LabeledTrack {
    Track track;
    std::string label;
    Split split = Split::train;
    std::vector<FrameTruth> truth;
};

/// Tracks in class order; per class, 2/3 (rounded) go to train. Each track is
/// seeded from (seed, person_id), so `jobs` never changes the result.
std::vector<LabeledTrack> make_corpus(const CorpusSpec& spec, std::size_t jobs = 1);

/// Manifest records for the tracks, without grids.
DatasetManifest corpus_manifest(const std::vector<LabeledTrack>& tracks);

/// Writes out_dir/tracks.txt, out_dir/crops/... and out_dir/manifest.txt.
DatasetManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir,
                                std::size_t jobs = 1);

}  // namespace grar

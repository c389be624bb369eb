#include "grar/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "grar/bbox_refine.hpp"
#include "grar/error.hpp"
#include "grar/parallel.hpp"
#include "grar/rng.hpp"
#include "grar/track_io.hpp"

namespace grar {

const char* variant_name(Variant v) noexcept {
    switch (v) {
        case Variant::random: return "Random";
        case Variant::key_pose: return "K-Pose";
        case Variant::key_rgb: return "K-RGB";
        case Variant::key_rgb_eb: return "K-RGB+EB";
        case Variant::key_rgb_eb_pa: return "K-RGB+EB+PA";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    for (const Variant v : kAllVariants) {
        if (name == variant_name(v)) {
            return v;
        }
    }
    throw ConfigError("unknown variant '" + std::string(name) + "'");
}

PipelineConfig variant_config(Variant v, PipelineConfig base) {
    base.selection = v == Variant::random ? Selection::random : Selection::key_poses;
    base.grid.content = v == Variant::key_pose ? CellContent::pose_only : CellContent::rgb;
    base.bbox_refine = v == Variant::key_rgb_eb || v == Variant::key_rgb_eb_pa;
    base.grid.attention = v == Variant::key_rgb_eb_pa;
    return base;
}

std::vector<long> random_key_frames(const PoseSequence& seq, std::size_t k, std::uint64_t seed) {
    std::vector<long> all;
    all.reserve(seq.frames.size());
    for (const auto& f : seq.frames) {
        all.push_back(f.frame_index);
    }
    const std::size_t count = std::min(k, all.size());
    Rng rng(derive_seed(seed, "random:" + seq.person_id));
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(all.size() - i));
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
}

Track prepare_track(const Track& track, const PipelineConfig& cfg) {
    if (!cfg.bbox_refine) {
        return track;
    }
    Track out;
    out.poses = refine_sequence(track.poses, cfg.cluster.conf_threshold);
    out.crops = refine_crops(track.crops, track.poses, out.poses);
    return out;
}

SelectedFrames select_frames(const Track& prepared, const PipelineConfig& cfg) {
    SelectedFrames s;
    if (cfg.selection == Selection::random) {
        s.frame_indices = random_key_frames(prepared.poses, cfg.cluster.k, cfg.cluster.seed);
        return s;
    }
    const KeyPoseSet set = select_key_poses(prepared.poses, cfg.cluster);
    s.frame_indices = set.medoid_frame_indices;
    s.total_cost = set.total_cost;
    s.fallback = set.fallback;
    return s;
}

GriddedTrack grid_track(const Track& track, const PipelineConfig& cfg) {
    const Track prepared = prepare_track(track, cfg);
    GriddedTrack out;
    out.selection = select_frames(prepared, cfg);
    out.grid = build_grid(prepared.poses, prepared.crops, out.selection.frame_indices, cfg.grid);
    return out;
}

std::vector<GriddedTrack> grid_tracks(std::span<const Track> tracks, const PipelineConfig& cfg) {
    std::vector<GriddedTrack> out(tracks.size());
    parallel_for(tracks.size(), cfg.jobs,
                 [&](std::size_t i) { out[i] = grid_track(tracks[i], cfg); });
    return out;
}

EvalReport evaluate(const LinearSoftmaxModel& model, std::span<const Example> test) {
    EvalReport r = EvalReport::empty(model.classes);
    for (const auto& ex : test) {
        r.add(ex.label, predict(model, ex.features).label);
    }
    return r;
}

std::vector<LabeledTrack> load_corpus(const std::filesystem::path& tracks,
                                      const std::filesystem::path& manifest) {
    auto loaded = load_tracks(tracks);
    const DatasetManifest m = read_manifest(manifest);
    std::vector<LabeledTrack> out;
    out.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        const auto it = std::find_if(loaded.begin(), loaded.end(), [&](const Track& t) {
            return t.poses.person_id == e.person_id;
        });
        if (it == loaded.end()) {
            throw SchemaError(manifest.string() + ": person " + e.person_id + " is not in " +
                              tracks.string());
        }
        LabeledTrack lt;
        lt.track = std::move(*it);
        lt.label = e.label;
        lt.split = e.split;
        out.push_back(std::move(lt));
    }
    return out;
}

ExperimentResult run_experiment(const std::vector<LabeledTrack>& corpus, const PipelineConfig& cfg) {
    std::vector<Example> examples(corpus.size());
    parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
        examples[i].features = featurize(grid_track(corpus[i].track, cfg).grid, cfg.feature_side);
        examples[i].label = corpus[i].label;
    });
    std::vector<Example> train_set, test_set;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (corpus[i].split == Split::train ? train_set : test_set).push_back(std::move(examples[i]));
    }
    ExperimentResult out;
    out.training = train(train_set, cfg.train);
    out.report = evaluate(out.training.model, test_set);
    return out;
}

}  // namespace grar

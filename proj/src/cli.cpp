#include "grar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>

#include "grar/bbox_refine.hpp"
#include "grar/error.hpp"
#include "grar/parallel.hpp"
#include "grar/pipeline.hpp"
#include "grar/track_io.hpp"

namespace grar {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::size_t jobs = 1;

    // cluster
    std::size_t k = 4;
    std::string method = "pam";
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t max_iters = 100;
    double conf_threshold = kLowConfidence;
    bool bbox_refine = true;
    std::string selection = "keyposes";

    // grid
    int border = kDefaultBorderPx;
    bool attention = true;
    std::string content = "rgb";

    // train
    int feature_side = kDefaultFeatureSide;
    TrainConfig train;

    PipelineConfig pipeline() const {
        PipelineConfig c;
        c.cluster.k = k;
        c.cluster.method = parse_method(method);
        c.cluster.seed = seed;
        c.cluster.restarts = restarts;
        c.cluster.max_iters = max_iters;
        c.cluster.conf_threshold = conf_threshold;
        if (selection == "keyposes") {
            c.selection = Selection::key_poses;
        } else if (selection == "random") {
            c.selection = Selection::random;
        } else {
            throw ConfigError("unknown selection '" + selection + "' (expected keyposes or random)");
        }
        c.bbox_refine = bbox_refine;
        c.grid.border_px = border;
        c.grid.attention = attention;
        c.grid.style.conf_threshold = conf_threshold;
        if (content == "rgb") {
            c.grid.content = CellContent::rgb;
        } else if (content == "pose") {
            c.grid.content = CellContent::pose_only;
        } else {
            throw ConfigError("unknown cell content '" + content + "' (expected rgb or pose)");
        }
        c.feature_side = feature_side;
        c.train = train;
        c.jobs = jobs;
        return c;
    }
};

void add_cluster_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--k", o.k, "Key poses per track")->check(CLI::Range(1, 16));
    cmd->add_option("--method", o.method, "pam, kmeans or gmm");
    cmd->add_option("--seed", o.seed, "Clustering / random-selection seed");
    cmd->add_option("--restarts", o.restarts, "Seeded restarts")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", o.max_iters, "Iteration cap");
    cmd->add_option("--conf-threshold", o.conf_threshold, "Joint confidence threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--bbox-refine", o.bbox_refine, "Grow boxes to cover every joint (on|off)");
    cmd->add_option("--selection", o.selection, "keyposes or random");
}

void add_grid_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--border", o.border, "Border width in pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--attention", o.attention, "Draw the skeleton over each crop (on|off)");
    cmd->add_option("--content", o.content, "Cell content: rgb or pose");
}

void add_train_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--feature-side", o.feature_side, "Downsampled grid side")
        ->check(CLI::Range(8, 1024));
    cmd->add_option("--epochs", o.train.epochs, "Training epochs");
    cmd->add_option("--lr", o.train.learning_rate, "Initial learning rate");
    cmd->add_option("--batch-size", o.train.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
    cmd->add_option("--train-seed", o.train.seed, "Shuffle seed");
    cmd->add_option("--plateau-factor", o.train.plateau_factor, "Learning-rate decay on plateau");
    cmd->add_option("--plateau-patience", o.train.plateau_patience, "Epochs without improvement");
}

// ---- stages shared by the staged commands and `run` -----------------------

void stage_cluster(const fs::path& tracks, const fs::path& out, const PipelineConfig& cfg) {
    const auto seqs = load_sequences(tracks);
    std::vector<KeyPoseRecord> records(seqs.size());
    parallel_for(seqs.size(), cfg.jobs, [&](std::size_t i) {
        Track t;
        t.poses = cfg.bbox_refine ? refine_sequence(seqs[i], cfg.cluster.conf_threshold) : seqs[i];
        const SelectedFrames s = select_frames(t, cfg);
        records[i] = {seqs[i].person_id, s.frame_indices, s.total_cost};
    });
    write_keyposes(out, records);
}

DatasetManifest stage_grid(const fs::path& tracks, const fs::path& keyposes,
                           const fs::path& manifest_in, const fs::path& out_dir,
                           const PipelineConfig& cfg) {
    const auto loaded = load_tracks(tracks);
    std::map<std::string, const Track*> by_id;
    for (const auto& t : loaded) {
        by_id[t.poses.person_id] = &t;
    }
    std::map<std::string, KeyPoseRecord> keys;
    for (auto& r : read_keyposes(keyposes)) {
        keys[r.person_id] = std::move(r);
    }
    DatasetManifest m = read_manifest(manifest_in);
    fs::create_directories(out_dir / "grids");
    parallel_for(m.entries.size(), cfg.jobs, [&](std::size_t i) {
        ManifestEntry& e = m.entries[i];
        const auto t = by_id.find(e.person_id);
        const auto r = keys.find(e.person_id);
        if (t == by_id.end()) {
            throw SchemaError("person " + e.person_id + " is in the manifest but not in " +
                              tracks.string());
        }
        if (r == keys.end()) {
            throw SchemaError("person " + e.person_id + " has no key poses in " +
                              keyposes.string());
        }
        const Track prepared = prepare_track(*t->second, cfg);
        const GridImage g = build_grid(prepared.poses, prepared.crops,
                                       r->second.medoid_frame_indices, cfg.grid);
        e.grid_relpath = "grids/" + e.person_id + ".png";
        e.k = g.provenance.size();
        e.medoid_indices = g.provenance;
        write_png(out_dir / e.grid_relpath, g.raster);
    });
    write_manifest(out_dir / "manifest.txt", m);
    return m;
}

std::vector<Example> load_examples(const fs::path& manifest, Split split, int side,
                                   std::size_t jobs) {
    const DatasetManifest m = read_manifest(manifest);
    const auto entries = m.select(split);
    const fs::path base = manifest.parent_path();
    std::vector<Example> out(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        if (!entries[i].has_grid()) {
            throw SchemaError(manifest.string() + ": person " + entries[i].person_id +
                              " has no grid; run the grid command first");
        }
        out[i].features = featurize(read_png(base / entries[i].grid_relpath), side);
        out[i].label = entries[i].label;
    });
    return out;
}

TrainResult stage_train(const fs::path& manifest, const fs::path& model_out,
                        const PipelineConfig& cfg) {
    const auto data = load_examples(manifest, Split::train, cfg.feature_side, cfg.jobs);
    TrainResult r = train(data, cfg.train);
    save_model(model_out, r.model);
    return r;
}

EvalReport stage_eval(const fs::path& manifest, const fs::path& model_path, Split split,
                      std::size_t jobs) {
    const LinearSoftmaxModel model = load_model(model_path);
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(model.dim))));
    if (static_cast<std::size_t>(side) * static_cast<std::size_t>(side) != model.dim) {
        throw DimensionError("model dimension " + std::to_string(model.dim) +
                             " is not a square feature grid");
    }
    return evaluate(model, load_examples(manifest, split, side, jobs));
}

// ---- ablation ---------------------------------------------------------------

struct AblateOptions {
    std::string study = "table2";
    std::size_t seeds = 1;
    std::size_t per_class = 30;
    std::size_t frames = 100;
    std::optional<double> outlier_rate;
    std::optional<double> occlusion_rate;
    std::string tracks;
    std::string manifest;
};

void run_ablation(const AblateOptions& a, const Options& o, std::ostream& out) {
    struct Row {
        std::string name;
        PipelineConfig cfg;
    };
    const PipelineConfig base = o.pipeline();
    std::vector<Row> rows;
    if (a.study == "table1") {
        for (const auto m : {ClusterMethod::pam, ClusterMethod::kmeans, ClusterMethod::gmm}) {
            PipelineConfig c = variant_config(Variant::key_rgb_eb_pa, base);
            c.cluster.method = m;
            rows.push_back({method_name(m), c});
        }
    } else if (a.study == "table2") {
        for (const Variant v : kAllVariants) {
            rows.push_back({variant_name(v), variant_config(v, base)});
        }
    } else {
        throw ConfigError("unknown study '" + a.study + "' (expected table1 or table2)");
    }
    const bool from_disk = !a.tracks.empty();
    std::vector<LabeledTrack> disk;
    if (from_disk) {
        disk = load_corpus(a.tracks, a.manifest);
    }
    out << "ablation " << a.study << " seeds " << a.seeds << '\n';
    std::vector<double> sum(rows.size(), 0.0);
    for (std::size_t s = 0; s < a.seeds; ++s) {
        const std::uint64_t seed = o.seed + s;
        std::vector<LabeledTrack> generated;
        if (!from_disk) {
            CorpusSpec spec;
            spec.per_class = a.per_class;
            spec.frames = a.frames;
            spec.seed = seed;
            spec.corruption.seed = seed;
            spec.corruption.outlier_rate = a.outlier_rate.value_or(a.study == "table1" ? 0.1 : 0.0);
            spec.corruption.occlusion_rate =
                a.occlusion_rate.value_or(a.study == "table2" ? 0.2 : 0.0);
            generated = make_corpus(spec, o.jobs);
        }
        const auto& corpus = from_disk ? disk : generated;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            PipelineConfig c = rows[r].cfg;
            c.cluster.seed = seed;
            c.train.seed = seed;
            const double acc = run_experiment(corpus, c).report.accuracy();
            sum[r] += acc;
            out << "row " << rows[r].name << ' ' << seed << ' ' << format_number(acc) << '\n';
        }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << "mean " << rows[r].name << ' '
            << format_number(sum[r] / static_cast<double>(a.seeds)) << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Key-pose grid action recognition toolkit", "grar"};
    app.set_config("--config", "", "key = value configuration file; flags take precedence");
    app.require_subcommand(1);
    Options o;
    app.add_option("--jobs", o.jobs, "Worker threads; output does not depend on it")
        ->check(CLI::PositiveNumber);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic corpus");
    CorpusSpec spec;
    std::string synth_out;
    std::vector<std::string> classes;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--per-class", spec.per_class, "Tracks per class")->check(CLI::PositiveNumber);
    synth->add_option("--frames", spec.frames, "Frames per track")->check(CLI::Range(8, 100000));
    synth->add_option("--classes", classes, "Subset of walk,run,jump,wave,idle")->delimiter(',');
    synth->add_option("--outlier-rate", spec.corruption.outlier_rate)->check(CLI::Range(0.0, 1.0));
    synth->add_option("--occlusion-rate", spec.corruption.occlusion_rate)
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--seed", spec.seed, "Corpus seed");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Validate a pose-track file and its crops");
    std::string tracks_path;
    ingest->add_option("--tracks", tracks_path, "Pose-track file")->required();
    ingest->add_option("--conf-threshold", o.conf_threshold)->check(CLI::Range(0.0, 1.0));

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Select key frames for every track");
    std::string keyposes_path;
    cluster->add_option("--tracks", tracks_path, "Pose-track file")->required();
    cluster->add_option("--out", keyposes_path, "Key-pose file to write")->required();
    add_cluster_options(cluster, o);

    // grid
    auto* grid = app.add_subcommand("grid", "Compose grid images from key frames");
    std::string manifest_path, out_dir;
    grid->add_option("--tracks", tracks_path, "Pose-track file")->required();
    grid->add_option("--keyposes", keyposes_path, "Key-pose file")->required();
    grid->add_option("--manifest", manifest_path, "Input manifest (labels, splits)")->required();
    grid->add_option("--out-dir", out_dir, "Directory for grids/ and manifest.txt")->required();
    grid->add_option("--bbox-refine", o.bbox_refine, "Grow boxes to cover every joint (on|off)");
    grid->add_option("--conf-threshold", o.conf_threshold)->check(CLI::Range(0.0, 1.0));
    add_grid_options(grid, o);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the classifier on the train split");
    std::string model_path;
    train_cmd->add_option("--manifest", manifest_path, "Manifest with grids")->required();
    train_cmd->add_option("--out", model_path, "Model checkpoint to write")->required();
    add_train_options(train_cmd, o);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a model and write a report");
    std::string report_path, split_name_text = "test";
    eval->add_option("--manifest", manifest_path, "Manifest with grids")->required();
    eval->add_option("--model", model_path, "Model checkpoint")->required();
    eval->add_option("--split", split_name_text, "train or test");
    eval->add_option("--out", report_path, "Report file (default: stdout)");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Variant-vs-accuracy table");
    AblateOptions ab;
    ablate->add_option("--study", ab.study, "table1 (clustering) or table2 (modules)");
    ablate->add_option("--seeds", ab.seeds, "Number of seeds, starting at --seed")
        ->check(CLI::PositiveNumber);
    ablate->add_option("--per-class", ab.per_class)->check(CLI::PositiveNumber);
    ablate->add_option("--frames", ab.frames)->check(CLI::Range(8, 100000));
    ablate->add_option("--outlier-rate", ab.outlier_rate)->check(CLI::Range(0.0, 1.0));
    ablate->add_option("--occlusion-rate", ab.occlusion_rate)->check(CLI::Range(0.0, 1.0));
    ablate->add_option("--tracks", ab.tracks, "Use this corpus instead of generating one");
    ablate->add_option("--manifest", ab.manifest, "Manifest of --tracks");
    add_cluster_options(ablate, o);
    add_grid_options(ablate, o);
    add_train_options(ablate, o);

    // run
    auto* run = app.add_subcommand("run", "cluster, grid, train and eval in one go");
    run->add_option("--tracks", tracks_path, "Pose-track file")->required();
    run->add_option("--manifest", manifest_path, "Input manifest (labels, splits)")->required();
    run->add_option("--out-dir", out_dir, "Output directory")->required();
    add_cluster_options(run, o);
    add_grid_options(run, o);
    add_train_options(run, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (synth->parsed()) {
            if (!classes.empty()) {
                spec.classes.clear();
                for (const auto& c : classes) {
                    spec.classes.push_back(parse_action(c));
                }
            }
            spec.corruption.seed = spec.seed;
            const auto m = generate_corpus(spec, synth_out, o.jobs);
            out << "wrote " << m.entries.size() << " tracks to " << synth_out << '\n';
        } else if (ingest->parsed()) {
            const auto tracks = load_tracks(tracks_path);
            std::size_t frames = 0, warnings = 0;
            for (const auto& t : tracks) {
                const auto w = validate_sequence(t.poses, o.conf_threshold);
                for (const auto& x : w) {
                    err << "warning: " << t.poses.person_id << ": " << x.message << '\n';
                }
                out << "track " << t.poses.person_id << " frames " << t.poses.size()
                    << " warnings " << w.size() << '\n';
                frames += t.poses.size();
                warnings += w.size();
            }
            out << "tracks " << tracks.size() << " frames " << frames << " warnings " << warnings
                << '\n';
        } else if (cluster->parsed()) {
            stage_cluster(tracks_path, keyposes_path, o.pipeline());
        } else if (grid->parsed()) {
            stage_grid(tracks_path, keyposes_path, manifest_path, out_dir, o.pipeline());
        } else if (train_cmd->parsed()) {
            const auto r = stage_train(manifest_path, model_path, o.pipeline());
            out << "epochs " << r.epoch_loss.size() << " final_loss "
                << (r.epoch_loss.empty() ? std::string("-") : format_number(r.epoch_loss.back()))
                << '\n';
        } else if (eval->parsed()) {
            const EvalReport r =
                stage_eval(manifest_path, model_path, parse_split(split_name_text), o.jobs);
            if (report_path.empty()) {
                write_report(out, r);
            } else {
                write_report(fs::path(report_path), r);
            }
        } else if (ablate->parsed()) {
            if (ab.tracks.empty() != ab.manifest.empty()) {
                throw ConfigError("--tracks and --manifest go together");
            }
            run_ablation(ab, o, out);
        } else if (run->parsed()) {
            const PipelineConfig cfg = o.pipeline();
            const fs::path dir = out_dir;
            fs::create_directories(dir);
            stage_cluster(tracks_path, dir / "keyposes.txt", cfg);
            stage_grid(tracks_path, dir / "keyposes.txt", manifest_path, dir, cfg);
            stage_train(dir / "manifest.txt", dir / "model.txt", cfg);
            const EvalReport r = stage_eval(dir / "manifest.txt", dir / "model.txt", Split::test,
                                            cfg.jobs);
            write_report(dir / "report.txt", r);
            write_report(out, r);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace grar

// One PASS/FAIL line per headline criterion, with the measured values and
// wall time. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grar/bbox_refine.hpp"
#include "grar/classifier.hpp"
#include "grar/clustering.hpp"
#include "grar/grid.hpp"
#include "grar/normalize.hpp"
#include "grar/pipeline.hpp"
#include "grar/rng.hpp"
#include "grar/simd/kernels.hpp"
#include "grar/synth.hpp"

using namespace grar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream time;
    time.precision(2);
    time << std::fixed << secs << "s";
    if (secs >= budget_s) {
        o.pass = false;
        o.detail += "; over the " + std::to_string(static_cast<int>(budget_s)) + "s budget";
    }
    failures += !o.pass;
    std::printf("%s  %-26s %s [%s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                time.str().c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

// ---- oracles --------------------------------------------------------------

double oracle_l1(const NormalizedPose& a, const NormalizedPose& b) {
    double sum = 0.0;
    std::size_t shared = 0;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (a.mask[j] && b.mask[j]) {
            ++shared;
            sum += std::abs(a.coords[2 * j] - b.coords[2 * j]) +
                   std::abs(a.coords[2 * j + 1] - b.coords[2 * j + 1]);
        }
    }
    return shared == 0 ? 34.0 : sum * 17.0 / static_cast<double>(shared);
}

double exhaustive_cost(const std::vector<NormalizedPose>& x, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    const std::size_t n = x.size();
    for (;;) {
        double cost = 0.0;
        for (const auto& p : x) {
            double near = std::numeric_limits<double>::infinity();
            for (std::size_t m : s) near = std::min(near, oracle_l1(p, x[m]));
            cost += near;
        }
        best = std::min(best, cost);
        std::size_t i = k;
        while (i > 0 && s[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return best;
}

NormalizedPose random_normalized(Rng& rng) {
    NormalizedPose p;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        p.mask[j] = rng.uniform() >= 0.2;
        if (p.mask[j]) {
            p.coords[2 * j] = rng.uniform();
            p.coords[2 * j + 1] = rng.uniform();
        }
    }
    return p;
}

// Number of (slot, non-medoid) swaps that lower the cost.
std::size_t improving_swaps(const std::vector<NormalizedPose>& x, const KeyPoseSet& set) {
    const PoseMatrix packed(x);
    const DistanceMatrix d(packed);
    const double cost = d.assignment_cost(set.medoids);
    const std::set<std::size_t> medoids(set.medoids.begin(), set.medoids.end());
    std::size_t improving = 0;
    for (std::size_t slot = 0; slot < set.medoids.size(); ++slot) {
        for (std::size_t o = 0; o < x.size(); ++o) {
            if (medoids.count(o)) continue;
            auto swapped = set.medoids;
            swapped[slot] = o;
            improving += d.assignment_cost(swapped) < cost;
        }
    }
    return improving;
}

std::vector<LabeledTrack> corpus(std::uint64_t seed, double outlier_rate, double occlusion_rate) {
    CorpusSpec spec;
    spec.seed = seed;
    spec.corruption.seed = seed;
    spec.corruption.outlier_rate = outlier_rate;
    spec.corruption.occlusion_rate = occlusion_rate;
    return make_corpus(spec);
}

double accuracy_of(const std::vector<LabeledTrack>& data, PipelineConfig cfg, std::uint64_t seed) {
    cfg.cluster.seed = seed;
    cfg.train.seed = seed;
    return run_experiment(data, cfg).report.accuracy();
}

// ---- criteria ---------------------------------------------------------------

std::vector<std::vector<NormalizedPose>> small_instances;
std::vector<KeyPoseSet> small_results;

Outcome pam_oracle() {
    Rng rng(2024);
    int matched = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng.below(6);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(3, n));
        std::vector<NormalizedPose> x;
        for (std::size_t i = 0; i < n; ++i) x.push_back(random_normalized(rng));
        ClusterConfig cfg;
        cfg.k = k;
        cfg.restarts = 15;
        cfg.seed = static_cast<std::uint64_t>(t);
        const KeyPoseSet set = pam_cluster(x, cfg);
        const double best = exhaustive_cost(x, k);
        const double gap = (set.total_cost - best) / best;
        if (std::abs(set.total_cost - best) <= 1e-9 * (1.0 + best)) {
            ++matched;
        } else {
            worst_gap = std::max(worst_gap, gap);
        }
        small_instances.push_back(std::move(x));
        small_results.push_back(set);
    }
    return {matched >= 190 && worst_gap <= 0.05,
            "optimal in " + std::to_string(matched) + "/200 (need >= 190), worst gap " +
                fmt(100.0 * worst_gap) + "% (limit 5%)"};
}

Outcome pam_local_optimality() {
    std::size_t sets = 0, bad = 0;
    for (std::size_t i = 0; i < small_instances.size(); ++i) {
        bad += improving_swaps(small_instances[i], small_results[i]) > 0;
        ++sets;
    }
    for (const auto& t : corpus(0, 0.1, 0.0)) {
        for (const bool refine : {false, true}) {
            const PoseSequence seq = refine ? refine_sequence(t.track.poses) : t.track.poses;
            const KeyPoseSet set = select_key_poses(seq, ClusterConfig{});
            std::vector<NormalizedPose> usable;
            const auto all = normalize_sequence(seq);
            for (std::size_t f = 0; f < seq.size(); ++f)
                if (seq.frames[f].pose.mean_confidence() >= kLowConfidence) usable.push_back(all[f]);
            bad += improving_swaps(usable, set) > 0;
            ++sets;
        }
    }
    return {bad == 0, std::to_string(bad) + " of " + std::to_string(sets) +
                          " key-pose sets admit an improving swap"};
}

Outcome clustering_trend() {
    const PipelineConfig base = variant_config(Variant::key_rgb_eb_pa, PipelineConfig{});
    std::map<ClusterMethod, double> sum;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto data = corpus(seed, 0.1, 0.0);
        for (const auto m : {ClusterMethod::pam, ClusterMethod::kmeans, ClusterMethod::gmm}) {
            PipelineConfig cfg = base;
            cfg.cluster.method = m;
            sum[m] += accuracy_of(data, cfg, seed) / 5.0;
        }
    }
    const double pam = sum[ClusterMethod::pam], km = sum[ClusterMethod::kmeans],
                 gmm = sum[ClusterMethod::gmm];
    return {pam >= km && km >= gmm, "mean accuracy PAM " + fmt(pam) + ", K-means " + fmt(km) +
                                        ", GMM " + fmt(gmm) + " (need PAM >= K-means >= GMM)"};
}

Outcome feature_trend() {
    std::map<Variant, double> sum;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto data = corpus(seed, 0.0, 0.2);
        for (const Variant v : kAllVariants) {
            sum[v] += accuracy_of(data, variant_config(v, PipelineConfig{}), seed) / 5.0;
        }
    }
    const double rgb_vs_random = 100.0 * (sum[Variant::key_rgb] - sum[Variant::random]);
    const double pa_vs_eb = 100.0 * (sum[Variant::key_rgb_eb_pa] - sum[Variant::key_rgb_eb]);
    std::string detail;
    for (const Variant v : kAllVariants) detail += std::string(variant_name(v)) + " " + fmt(sum[v]) + ", ";
    detail += "K-RGB - Random " + fmt(rgb_vs_random, 3) + " pts (need >= 2), EB+PA - EB " +
              fmt(pa_vs_eb, 3) + " pts (need >= 1)";
    return {rgb_vs_random >= 2.0 - 1e-9 && pa_vs_eb >= 1.0 - 1e-9, detail};
}

Outcome geometry() {
    Rng rng(77);
    std::size_t contain = 0, idem = 0, invariance = 0;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double x = rng.uniform(-100, 600), y = rng.uniform(-100, 600);
        const BoundingBox box{x, y, x + rng.uniform(5, 250), y + rng.uniform(5, 250)};
        Pose p;
        for (auto& j : p.joints) {
            j = {rng.uniform(box.x_min - 50, box.x_max + 50),
                 rng.uniform(box.y_min - 50, box.y_max + 50), rng.uniform()};
        }
        const BoundingBox r = refine_box(p, box);
        for (const auto& j : p.joints)
            if (j.valid() && !r.contains(j.x, j.y)) ++contain;
        idem += !(refine_box(p, r) == r) || r.area() < box.area();

        const double s = rng.uniform(0.25, 8.0), tx = rng.uniform(-300, 300),
                     ty = rng.uniform(-300, 300);
        Pose q = p;
        for (auto& j : q.joints) {
            j.x = s * j.x + tx;
            j.y = s * j.y + ty;
        }
        const BoundingBox qb{s * r.x_min + tx, s * r.y_min + ty, s * r.x_max + tx,
                             s * r.y_max + ty};
        const auto a = normalize_pose(p, r), b = normalize_pose(q, qb);
        bool ok = a.mask == b.mask;
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            worst = std::max(worst, std::abs(a.coords[i] - b.coords[i]));
            ok = ok && std::abs(a.coords[i] - b.coords[i]) <= 1e-6;
        }
        invariance += !ok;
    }
    return {contain + idem + invariance == 0,
            "1000 fixtures: " + std::to_string(contain) + " escaped joints, " +
                std::to_string(idem) + " non-idempotent/shrunk boxes, " +
                std::to_string(invariance) + " invariance failures (max diff " + fmt(worst, 3) +
                ")"};
}

Outcome grid() {
    std::vector<std::string> problems;
    const std::vector<RgbImage> square(4, RgbImage(100, 100, {1, 2, 3}));
    const GridImage g4 = compose_grid(square, GridLayout::for_cells(4));
    if (g4.raster.width() != 209 || g4.raster.height() != 209) problems.push_back("K=4 canvas");

    CorpusSpec spec;
    spec.per_class = 4;
    spec.corruption.occlusion_rate = 0.2;
    const auto data = make_corpus(spec);
    std::vector<Track> tracks;
    for (const auto& t : data) tracks.push_back(t.track);

    PipelineConfig plain = variant_config(Variant::key_rgb_eb, PipelineConfig{});
    std::size_t border_bad = 0, cell_bad = 0;
    for (const auto& gt : grid_tracks(tracks, plain)) {
        const auto& g = gt.grid;
        std::vector<bool> in_cell(static_cast<std::size_t>(g.raster.width() * g.raster.height()));
        for (const auto& c : g.cells)
            for (int y = c.y; y < c.y + c.height; ++y)
                for (int x = c.x; x < c.x + c.width; ++x)
                    in_cell[static_cast<std::size_t>(y * g.raster.width() + x)] = true;
        for (int y = 0; y < g.raster.height(); ++y)
            for (int x = 0; x < g.raster.width(); ++x)
                if (!in_cell[static_cast<std::size_t>(y * g.raster.width() + x)] &&
                    g.raster.at(x, y) != Rgb{0, 0, 0})
                    ++border_bad;
        const auto it = std::find_if(tracks.begin(), tracks.end(), [&](const Track& t) {
            return t.poses.person_id == g.person_id;
        });
        const Track prepared = prepare_track(*it, plain);
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            const auto& c = g.cells[i];
            if (!(g.raster.crop(c.x, c.y, c.width, c.height) ==
                  prepared.crops.find(g.provenance[i])->image))
                ++cell_bad;
        }
    }
    if (border_bad) problems.push_back(std::to_string(border_bad) + " non-zero border pixels");
    if (cell_bad) problems.push_back(std::to_string(cell_bad) + " rescaled/altered cells");

    PipelineConfig full;
    const auto a = grid_tracks(tracks, full);
    const auto b = grid_tracks(tracks, full);
    full.jobs = 4;
    const auto c = grid_tracks(tracks, full);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        differ += !(a[i].grid.raster == b[i].grid.raster) || !(a[i].grid.raster == c[i].grid.raster);
    if (differ) problems.push_back(std::to_string(differ) + " grids differ across runs/jobs");

    std::string detail = "209x209 for K=4, borders zero, cells unscaled, identical for jobs 1/4 over " +
                         std::to_string(a.size()) + " tracks";
    if (!problems.empty()) {
        detail.clear();
        for (const auto& p : problems) detail += p + "; ";
    }
    return {problems.empty(), detail};
}

Outcome classifier_math() {
    Rng rng(5);
    std::vector<std::string> issues;
    const std::vector<std::string> classes{"idle", "jump", "run", "walk", "wave"};
    std::vector<Example> batch;
    for (int i = 0; i < 20; ++i) {
        FeatureVector f{std::vector<double>(64), 8};
        for (auto& v : f.values) v = rng.uniform();
        batch.push_back({f, classes[rng.below(5)]});
    }
    const auto zero = LinearSoftmaxModel::zeros(classes, 64);
    const bool ln_exact = cross_entropy_loss(zero, batch) == std::log(5.0);

    auto m = zero;
    for (auto& w : m.weights) w = rng.normal(0.0, 0.3);
    for (auto& b : m.bias) b = rng.normal(0.0, 0.3);
    const auto g = loss_gradient(m, batch);
    double worst = 0.0;
    const double h = 1e-4;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        auto p = m, q = m;
        p.weights[i] += h;
        q.weights[i] -= h;
        const double fd = (cross_entropy_loss(p, batch) - cross_entropy_loss(q, batch)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g.d_weights[i]));
    }
    for (std::size_t c = 0; c < m.bias.size(); ++c) {
        auto p = m, q = m;
        p.bias[c] += h;
        q.bias[c] -= h;
        const double fd = (cross_entropy_loss(p, batch) - cross_entropy_loss(q, batch)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g.d_bias[c]));
    }

    double worst_sum = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> z(2 + rng.below(9));
        for (auto& v : z) v = rng.uniform(-100.0, 100.0);
        double s = 0.0;
        for (double v : softmax(z)) s += v;
        worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }

    // Two classes: bright left half vs bright right half.
    std::vector<Example> sep;
    for (int i = 0; i < 40; ++i) {
        const bool left = i % 2 == 0;
        RgbImage img(32, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                const auto v = static_cast<std::uint8_t>(((x < 16) == left) ? 150 + rng.below(100)
                                                                            : rng.below(100));
                img.set(x, y, {v, v, v});
            }
        sep.push_back({featurize(img, 8), left ? "left" : "right"});
    }
    TrainConfig cfg;
    cfg.epochs = 50;
    const auto model = train(sep, cfg).model;
    std::size_t hit = 0;
    for (const auto& e : sep) hit += predict(model, e.features).label == e.label;

    const bool pass = ln_exact && worst < 1e-5 && worst_sum <= 1e-9 && hit == sep.size();
    return {pass, std::string("zero-model loss ") + (ln_exact ? "== ln 5" : "!= ln 5") +
                      ", gradient max diff " + fmt(worst, 3) + " (< 1e-5), softmax sum error " +
                      fmt(worst_sum, 3) + " (<= 1e-9), separable train accuracy " +
                      std::to_string(hit) + "/40 after 50 epochs"};
}

Outcome end_to_end() {
    PipelineConfig cfg;  // K = 4, PAM, refinement and attention on
    double sum = 0.0;
    std::string runs;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const double acc = accuracy_of(corpus(seed, 0.0, 0.0), cfg, seed);
        sum += acc;
        runs += (seed ? ", " : "") + fmt(acc);
    }
    const double mean = sum / 5.0;
    return {mean >= 0.90, "mean test accuracy " + fmt(mean) + " over seeds 0-4 (" + runs +
                              "), need >= 0.90"};
}

}  // namespace

int main() {
    std::printf("kernels: %s\n", simd::backend_name(simd::active().backend));
    criterion("pam-oracle", 10, pam_oracle);
    criterion("pam-local-optimality", 60, pam_local_optimality);
    criterion("clustering-trend", 300, clustering_trend);
    criterion("feature-trend", 600, feature_trend);
    criterion("geometry", 5, geometry);
    criterion("grid", 60, grid);
    criterion("classifier-math", 60, classifier_math);
    criterion("end-to-end", 300, end_to_end);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#include "grar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grar/error.hpp"
#include "grar/parallel.hpp"
#include "grar/rng.hpp"
#include "grar/track_io.hpp"

namespace grar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Segment lengths as fractions of body height.
constexpr double kThigh = 0.245;
constexpr double kShin = 0.245;
constexpr double kTorso = 0.30;
constexpr double kUpperArm = 0.17;
constexpr double kForearm = 0.16;
constexpr double kNeck = 0.13;
constexpr double kHeadRadius = 0.07;
constexpr double kDepthOffset = 0.025;

struct Vec {
    double x = 0.0;
    double y = 0.0;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator*(Vec a, double s) { return {a.x * s, a.y * s}; }

// [0] = left, [1] = right
struct LimbAngles {
    std::array<double, 2> hip{}, knee{}, shoulder{}, elbow{};
    double lean = 0.0;
    double dy = 0.0;
};

LimbAngles angles_at(const ActionSpec& spec, double phi) {
    const MotionAmplitudes& a = spec.amplitudes;
    const double s = std::sin(phi), c = std::cos(phi);
    LimbAngles g;
    switch (spec.action) {
        case Action::walk:
        case Action::run:
            g.hip = {a.hip_swing * s, -a.hip_swing * s};
            g.knee = {a.knee_base + a.knee_flex * std::max(0.0, c),
                      a.knee_base + a.knee_flex * std::max(0.0, -c)};
            g.shoulder = {-a.shoulder_swing * s, a.shoulder_swing * s};
            g.elbow = {a.elbow_bend, a.elbow_bend};
            g.lean = a.lean;
            g.dy = -a.bob * std::abs(c);
            break;
        case Action::jump: {
            const double flight = std::max(0.0, s), fold = std::max(0.0, -s);
            g.hip = {0.5 * a.crouch * fold, 0.5 * a.crouch * fold};
            g.knee = {a.knee_base + a.crouch * fold, a.knee_base + a.crouch * fold};
            const double arm = a.arm_raise * flight - a.shoulder_swing * fold;
            g.shoulder = {arm, arm};
            g.elbow = {a.elbow_bend, a.elbow_bend};
            g.lean = a.lean * fold;
            g.dy = -a.hop * flight;
            break;
        }
        case Action::wave:
            g.hip = {a.hip_swing, -a.hip_swing};
            g.knee = {a.knee_base, a.knee_base};
            g.shoulder = {a.shoulder_swing, a.arm_raise + 0.1 * s};
            g.elbow = {a.elbow_bend, a.wave * s};
            break;
        case Action::idle:
            g.hip = {a.hip_swing, -a.hip_swing};
            g.knee = {a.knee_base, a.knee_base};
            g.shoulder = {a.shoulder_swing + 0.03 * s, -a.shoulder_swing + 0.03 * s};
            g.elbow = {a.elbow_bend, a.elbow_bend};
            g.lean = a.lean * s;
            g.dy = -a.bob * 0.5 * (1.0 + s);
            break;
    }
    return g;
}

struct Figure {
    std::array<Vec, kNumJoints> joints{};
    Vec hip_center, shoulder_center, head;
};

// facing: +1 right, -1 left. Feet rest on ground_y unless hopping.
Figure pose_figure(const LimbAngles& g, double height, double facing, double x, double ground_y) {
    auto limb = [&](double angle, double length) {
        return Vec{facing * length * height * std::sin(angle), length * height * std::cos(angle)};
    };
    double reach = 0.0;
    for (int s = 0; s < 2; ++s) {
        reach = std::max(reach, kThigh * std::cos(g.hip[s]) + kShin * std::cos(g.hip[s] - g.knee[s]));
    }
    Figure f;
    f.hip_center = {x, ground_y - reach * height + g.dy * height};
    const Vec up{facing * std::sin(g.lean), -std::cos(g.lean)};
    f.shoulder_center = f.hip_center + up * (kTorso * height);
    f.head = f.shoulder_center + up * (kNeck * height);

    auto& j = f.joints;
    for (int s = 0; s < 2; ++s) {
        const double off = (s == 0 ? -0.5 : 0.5) * kDepthOffset * height;
        const std::size_t o = static_cast<std::size_t>(s);
        const Vec hip = f.hip_center + Vec{off, 0.0};
        const Vec knee = hip + limb(g.hip[o], kThigh);
        const Vec shoulder = f.shoulder_center + Vec{1.4 * off, 0.0};
        const Vec elbow = shoulder + limb(g.shoulder[o], kUpperArm);
        j[index(Joint::left_hip) + o] = hip;
        j[index(Joint::left_knee) + o] = knee;
        j[index(Joint::left_ankle) + o] = knee + limb(g.hip[o] - g.knee[o], kShin);
        j[index(Joint::left_shoulder) + o] = shoulder;
        j[index(Joint::left_elbow) + o] = elbow;
        j[index(Joint::left_wrist) + o] = elbow + limb(g.shoulder[o] + g.elbow[o], kForearm);
        j[index(Joint::left_eye) + o] =
            f.head + Vec{facing * 0.03 * height + 0.5 * off, -0.015 * height};
        j[index(Joint::left_ear) + o] =
            f.head + Vec{-facing * 0.01 * height + 1.6 * off, -0.005 * height};
    }
    j[index(Joint::nose)] = f.head + Vec{facing * 0.045 * height, 0.01 * height};
    return f;
}

struct Appearance {
    double height = 84.0;
    double facing = 1.0;
    double thickness = 2.5;
    int checker = 8;
    Rgb tone_a{}, tone_b{};
    int noise = 10;
    std::uint64_t noise_seed = 0;
    Rgb shirt{}, pants{}, skin{};
};

Rgb random_color(Rng& rng, int lo, int hi) {
    Rgb c;
    for (auto& v : c) {
        v = static_cast<std::uint8_t>(lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
    }
    return c;
}

Appearance draw_appearance(Rng& rng) {
    Appearance a;
    a.height = rng.uniform(76.0, 92.0);
    a.facing = rng.uniform() < 0.5 ? -1.0 : 1.0;
    a.thickness = std::max(1.5, rng.uniform(0.022, 0.035) * a.height);
    a.checker = 5 + static_cast<int>(rng.below(8));
    a.tone_a = random_color(rng, 30, 110);
    const int lift = 15 + static_cast<int>(rng.below(26));
    for (std::size_t ch = 0; ch < 3; ++ch) {
        a.tone_b[ch] = static_cast<std::uint8_t>(a.tone_a[ch] + lift);
    }
    a.noise = 10;
    a.noise_seed = rng.next();
    a.shirt = random_color(rng, 60, 220);
    a.pants = random_color(rng, 60, 220);
    a.skin = {static_cast<std::uint8_t>(150 + rng.below(81)),
              static_cast<std::uint8_t>(110 + rng.below(81)),
              static_cast<std::uint8_t>(80 + rng.below(81))};
    return a;
}

Rgb background_at(const Appearance& a, long x, long y) {
    const long cx = x >= 0 ? x / a.checker : (x - a.checker + 1) / a.checker;
    const long cy = y >= 0 ? y / a.checker : (y - a.checker + 1) / a.checker;
    const Rgb base = ((cx + cy) & 1) != 0 ? a.tone_a : a.tone_b;
    const std::uint64_t h = splitmix64(a.noise_seed ^ (static_cast<std::uint64_t>(x) * 0x9E3779B1ULL) ^
                                       (static_cast<std::uint64_t>(y) * 0x85EBCA77ULL << 1));
    const int n = static_cast<int>(h % static_cast<std::uint64_t>(2 * a.noise + 1)) - a.noise;
    Rgb out;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        out[ch] = static_cast<std::uint8_t>(std::clamp(base[ch] + n, 0, 255));
    }
    return out;
}

Rgb shade(Rgb c, double f) {
    return {static_cast<std::uint8_t>(c[0] * f), static_cast<std::uint8_t>(c[1] * f),
            static_cast<std::uint8_t>(c[2] * f)};
}

void paint_capsule(RgbImage& img, const BoundingBox& box, Vec a, Vec b, double radius, Rgb color) {
    const double x0 = std::min(a.x, b.x) - radius - box.x_min;
    const double x1 = std::max(a.x, b.x) + radius - box.x_min;
    const double y0 = std::min(a.y, b.y) - radius - box.y_min;
    const double y1 = std::max(a.y, b.y) + radius - box.y_min;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    for (int py = std::max(0, static_cast<int>(std::floor(y0)));
         py <= std::min(img.height() - 1, static_cast<int>(std::ceil(y1))); ++py) {
        for (int px = std::max(0, static_cast<int>(std::floor(x0)));
             px <= std::min(img.width() - 1, static_cast<int>(std::ceil(x1))); ++px) {
            const double wx = box.x_min + px + 0.5, wy = box.y_min + py + 0.5;
            double t = len2 > 0.0 ? ((wx - a.x) * dx + (wy - a.y) * dy) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double ex = wx - (a.x + t * dx), ey = wy - (a.y + t * dy);
            if (ex * ex + ey * ey <= radius * radius) {
                img.set(px, py, color);
            }
        }
    }
}

RgbImage render_crop(const Appearance& look, const Figure& fig, const BoundingBox& box) {
    RgbImage img(box.pixel_width(), box.pixel_height());
    const long ox = static_cast<long>(std::floor(box.x_min));
    const long oy = static_cast<long>(std::floor(box.y_min));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            img.set(x, y, background_at(look, ox + x, oy + y));
        }
    }
    const auto& j = fig.joints;
    const double t = look.thickness;
    auto side = [&](std::size_t o, double dim) {
        const Rgb pants = shade(look.pants, dim), shirt = shade(look.shirt, dim);
        paint_capsule(img, box, j[index(Joint::left_hip) + o], j[index(Joint::left_knee) + o], t, pants);
        paint_capsule(img, box, j[index(Joint::left_knee) + o], j[index(Joint::left_ankle) + o], t, pants);
        paint_capsule(img, box, j[index(Joint::left_shoulder) + o], j[index(Joint::left_elbow) + o],
                      0.9 * t, shirt);
        paint_capsule(img, box, j[index(Joint::left_elbow) + o], j[index(Joint::left_wrist) + o],
                      0.8 * t, shade(look.skin, dim));
    };
    // The arm and leg turned away from the camera are drawn first, darker.
    const std::size_t far = look.facing > 0 ? 0 : 1;
    side(far, 0.75);
    paint_capsule(img, box, fig.hip_center, fig.shoulder_center, 1.7 * t, look.shirt);
    paint_capsule(img, box, fig.shoulder_center, fig.head, 0.6 * t, look.skin);
    paint_capsule(img, box, fig.head, fig.head, kHeadRadius * look.height, look.skin);
    side(1 - far, 1.0);
    return img;
}

// Tight box around the figure, widened by a margin, then disturbed the way a
// tracker would: jittered edges, and sometimes one side cut into the body.
BoundingBox tracker_box(const Figure& fig, const Appearance& look, Rng& rng) {
    double x0 = fig.head.x, x1 = fig.head.x, y0 = fig.head.y, y1 = fig.head.y;
    const double r = kHeadRadius * look.height;
    x0 -= r; x1 += r; y0 -= r; y1 += r;
    for (const Vec& p : fig.joints) {
        x0 = std::min(x0, p.x - look.thickness);
        x1 = std::max(x1, p.x + look.thickness);
        y0 = std::min(y0, p.y - look.thickness);
        y1 = std::max(y1, p.y + look.thickness);
    }
    std::array<double, 4> edge{x0 - rng.uniform(2.0, 5.0), y0 - rng.uniform(2.0, 5.0),
                               x1 + rng.uniform(2.0, 5.0), y1 + rng.uniform(2.0, 5.0)};
    for (double& e : edge) {
        e += rng.normal(0.0, 0.015 * look.height);
    }
    if (rng.uniform() < 0.3) {
        const std::size_t s = static_cast<std::size_t>(rng.below(4));
        const double span = (s % 2 == 0) ? x1 - x0 : y1 - y0;
        const double cut = rng.uniform(0.1, 0.25) * span;
        edge[s] += s < 2 ? cut : -cut;
    }
    BoundingBox box{std::floor(edge[0]), std::floor(edge[1]), std::ceil(edge[2]), std::ceil(edge[3])};
    box.x_max = std::max(box.x_max, box.x_min + 8.0);
    box.y_max = std::max(box.y_max, box.y_min + 8.0);
    return box;
}

// The `count` frames with the smallest draws, ties to the earlier frame.
std::vector<std::size_t> lowest(const std::vector<double>& draws, const std::vector<char>& eligible,
                                std::size_t count) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        if (eligible[i]) {
            idx.push_back(i);
        }
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return draws[a] < draws[b]; });
    idx.resize(std::min(count, idx.size()));
    return idx;
}

std::size_t quantile_count(double rate, std::size_t frames) {
    return static_cast<std::size_t>(std::llround(rate * static_cast<double>(frames)));
}

}  // namespace

const char* action_name(Action a) noexcept {
    switch (a) {
        case Action::walk: return "walk";
        case Action::run: return "run";
        case Action::jump: return "jump";
        case Action::wave: return "wave";
        case Action::idle: return "idle";
    }
    return "?";
}

Action parse_action(std::string_view name) {
    for (const Action a : kAllActions) {
        if (name == action_name(a)) {
            return a;
        }
    }
    throw ConfigError("unknown action '" + std::string(name) +
                      "' (expected walk, run, jump, wave or idle)");
}

ActionSpec ActionSpec::preset(Action a) {
    ActionSpec s;
    s.action = a;
    MotionAmplitudes& m = s.amplitudes;
    switch (a) {
        case Action::walk:
            s.period_frames = 26;
            m.hip_swing = 0.42;
            m.knee_base = 0.08;
            m.knee_flex = 0.5;
            m.shoulder_swing = 0.35;
            m.elbow_bend = 0.25;
            m.lean = 0.04;
            m.bob = 0.015;
            m.speed = 0.012;
            break;
        case Action::run:
            s.period_frames = 16;
            m.hip_swing = 0.75;
            m.knee_base = 0.35;
            m.knee_flex = 1.1;
            m.shoulder_swing = 0.8;
            m.elbow_bend = 1.5;
            m.lean = 0.25;
            m.bob = 0.04;
            m.speed = 0.04;
            break;
        case Action::jump:
            s.period_frames = 22;
            m.knee_base = 0.05;
            m.crouch = 1.3;
            m.shoulder_swing = 0.5;
            m.arm_raise = 2.6;
            m.elbow_bend = 0.2;
            m.lean = 0.35;
            m.hop = 0.3;
            break;
        case Action::wave:
            s.period_frames = 18;
            m.hip_swing = 0.06;
            m.knee_base = 0.04;
            m.shoulder_swing = 0.08;
            m.elbow_bend = 0.1;
            m.arm_raise = 2.6;
            m.wave = 0.6;
            break;
        case Action::idle:
            s.period_frames = 44;
            m.hip_swing = 0.07;
            m.knee_base = 0.03;
            m.shoulder_swing = 0.1;
            m.elbow_bend = 0.15;
            m.lean = 0.03;
            m.bob = 0.006;
            break;
    }
    return s;
}

void ActionSpec::validate() const {
    if (period_frames < 4) {
        throw ConfigError("action period must be at least 4 frames");
    }
    const MotionAmplitudes& m = amplitudes;
    for (const double angle : {m.hip_swing, m.knee_base, m.knee_flex, m.shoulder_swing,
                               m.elbow_bend, m.lean, m.crouch, m.arm_raise, m.wave}) {
        if (!(std::abs(angle) <= kPi)) {
            throw ConfigError("limb amplitude beyond pi");
        }
    }
    for (const double off : {m.bob, m.hop, m.speed}) {
        if (!(std::abs(off) <= 0.5)) {
            throw ConfigError("body offset beyond half the body height");
        }
    }
    if (!(noise_sigma >= 0.0 && noise_sigma <= 0.1)) {
        throw ConfigError("noise_sigma must lie in [0, 0.1]");
    }
}

void CorruptionSpec::validate() const {
    if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0) ||
        !(occlusion_rate >= 0.0 && occlusion_rate <= 1.0)) {
        throw ConfigError("corruption rates must lie in [0, 1]");
    }
    if (outlier_rate + occlusion_rate > 1.0) {
        throw ConfigError("outlier and occlusion rates add up to more than 1");
    }
}

SynthTrack generate_track(const ActionSpec& spec, std::size_t frames,
                          const CorruptionSpec& corruption, std::uint64_t seed,
                          const std::string& person_id) {
    spec.validate();
    corruption.validate();
    if (frames < 8) {
        throw ConfigError("a synthetic track needs at least 8 frames");
    }
    const std::uint64_t base = derive_seed(seed, person_id);
    Rng look_rng(derive_seed(base, "appearance"));
    Rng motion_rng(derive_seed(base, "motion"));
    Rng box_rng(derive_seed(base, "box"));
    Rng corrupt_rng(derive_seed(base ^ corruption.seed, "corruption"));

    const Appearance look = draw_appearance(look_rng);
    const double period =
        static_cast<double>(spec.period_frames) * motion_rng.uniform(0.85, 1.15);
    const double phase0 = motion_rng.uniform();
    const double start_x = motion_rng.uniform(150.0, 250.0);
    const double ground_y = 200.0;

    std::vector<double> outlier_draw(frames), occlusion_draw(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        outlier_draw[t] = corrupt_rng.uniform();
        occlusion_draw[t] = corrupt_rng.uniform();
    }
    std::vector<char> eligible(frames, 1);
    const auto outliers = lowest(outlier_draw, eligible, quantile_count(corruption.outlier_rate, frames));
    for (const std::size_t t : outliers) {
        eligible[t] = 0;
    }
    const auto occluded =
        lowest(occlusion_draw, eligible, quantile_count(corruption.occlusion_rate, frames));

    SynthTrack out;
    out.label = action_name(spec.action);
    out.track.poses.person_id = person_id;
    out.track.crops.person_id = person_id;
    out.truth.resize(frames);
    for (const std::size_t t : outliers) out.truth[t].outlier = true;
    for (const std::size_t t : occluded) out.truth[t].occluded = true;

    for (std::size_t t = 0; t < frames; ++t) {
        const double cycles = phase0 + static_cast<double>(t) / period;
        const double phase = cycles - std::floor(cycles);
        const LimbAngles g = angles_at(spec, 2.0 * kPi * phase);
        const double x = start_x + look.facing * spec.amplitudes.speed * look.height *
                                       static_cast<double>(t);
        const Figure fig = pose_figure(g, look.height, look.facing, x, ground_y);

        TrackFrame frame;
        frame.frame_index = static_cast<long>(t);
        frame.box = tracker_box(fig, look, box_rng);
        RgbImage crop = render_crop(look, fig, frame.box);

        for (std::size_t j = 0; j < kNumJoints; ++j) {
            Keypoint& kp = frame.pose[j];
            kp.x = fig.joints[j].x + motion_rng.normal(0.0, spec.noise_sigma * look.height);
            kp.y = fig.joints[j].y + motion_rng.normal(0.0, spec.noise_sigma * look.height);
            kp.confidence = motion_rng.uniform(0.75, 1.0);
        }

        FrameTruth& truth = out.truth[t];
        truth.phase = phase;
        if (truth.outlier) {
            for (auto& kp : frame.pose.joints) {
                kp.x = corrupt_rng.uniform(frame.box.x_min, frame.box.x_max);
                kp.y = corrupt_rng.uniform(frame.box.y_min, frame.box.y_max);
                kp.confidence = 1.0;
            }
        } else if (truth.occluded) {
            const int w = crop.width(), h = crop.height();
            int rx = 0, ry = 0, rw = w, rh = h;
            switch (corrupt_rng.below(3)) {
                case 0:
                    rw = static_cast<int>(std::lround(corrupt_rng.uniform(0.45, 0.85) * w));
                    rx = static_cast<int>(corrupt_rng.below(static_cast<std::uint64_t>(w - rw + 1)));
                    break;
                case 1:
                    rh = static_cast<int>(std::lround(corrupt_rng.uniform(0.35, 0.6) * h));
                    break;
                default:
                    rh = static_cast<int>(std::lround(corrupt_rng.uniform(0.35, 0.6) * h));
                    ry = h - rh;
                    break;
            }
            crop.fill_rect(rx, ry, rw, rh, {128, 128, 128});
            for (std::size_t j = 0; j < kNumJoints; ++j) {
                const int px = frame.box.local_px(fig.joints[j].x);
                const int py = frame.box.local_py(fig.joints[j].y);
                if (px >= rx && px < rx + rw && py >= ry && py < ry + rh) {
                    truth.occluded_joints[j] = true;
                    frame.pose[j].confidence = kOccludedConfidence;
                }
            }
        }
        out.track.poses.frames.push_back(frame);
        out.track.crops.frames.push_back({frame.frame_index, std::move(crop), ""});
    }
    return out;
}

std::vector<LabeledTrack> make_corpus(const CorpusSpec& spec, std::size_t jobs) {
    if (spec.classes.empty() || spec.per_class == 0) {
        throw ConfigError("corpus needs at least one class and one track per class");
    }
    struct Job {
        Action action;
        std::size_t n;
    };
    std::vector<Job> work;
    for (const Action a : spec.classes) {
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            work.push_back({a, i});
        }
    }
    std::vector<LabeledTrack> out(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t w) {
        char id[64];
        std::snprintf(id, sizeof id, "%s_%03zu", action_name(work[w].action), work[w].n);
        SynthTrack t = generate_track(ActionSpec::preset(work[w].action), spec.frames,
                                      spec.corruption, spec.seed, id);
        out[w].track = std::move(t.track);
        out[w].label = std::move(t.label);
        out[w].truth = std::move(t.truth);
    });
    // Stratified split: a seeded shuffle per class, first two thirds train.
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(2.0 * static_cast<double>(spec.per_class) / 3.0));
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        std::vector<std::size_t> order(spec.per_class);
        std::iota(order.begin(), order.end(), c * spec.per_class);
        Rng rng(derive_seed(spec.seed, std::string("split:") + action_name(spec.classes[c])));
        rng.shuffle(order.begin(), order.end());
        for (std::size_t i = 0; i < order.size(); ++i) {
            out[order[i]].split = i < n_train ? Split::train : Split::test;
        }
    }
    return out;
}

DatasetManifest corpus_manifest(const std::vector<LabeledTrack>& tracks) {
    DatasetManifest m;
    for (const auto& t : tracks) {
        m.entries.push_back({"", t.track.poses.person_id, t.label, t.split, 0, {}});
    }
    return m;
}

DatasetManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir,
                                std::size_t jobs) {
    const auto corpus = make_corpus(spec, jobs);
    std::filesystem::create_directories(out_dir);
    std::vector<Track> tracks;
    tracks.reserve(corpus.size());
    for (const auto& t : corpus) {
        tracks.push_back(t.track);
    }
    write_tracks(out_dir / "tracks.txt", tracks);
    DatasetManifest m = corpus_manifest(corpus);
    write_manifest(out_dir / "manifest.txt", m);
    return m;
}

}  // namespace grar

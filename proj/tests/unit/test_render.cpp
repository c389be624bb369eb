#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "grar/error.hpp"
#include "grar/render.hpp"
#include "support.hpp"

using namespace grar;

namespace {

const BoundingBox kBox{40.0, 10.0, 100.0, 130.0};  // 60 x 120 crop

RgbImage textured(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.set(x, y, {static_cast<std::uint8_t>(20 + rng.below(200)),
                           static_cast<std::uint8_t>(20 + rng.below(200)),
                           static_cast<std::uint8_t>(20 + rng.below(200))});
    return img;
}

// Independent renderer: pixel point (px, py), limb segment between joint-pixel
// corners (cx + 0.5, cy + 0.5), distance <= 1; disc on integer centres.
double seg_dist2(double px, double py, double ax, double ay, double bx, double by) {
    const double ux = bx - ax, uy = by - ay;
    const double len2 = ux * ux + uy * uy;
    double t = len2 == 0.0 ? 0.0 : ((px - ax) * ux + (py - ay) * uy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * ux), dy = py - (ay + t * uy);
    return dx * dx + dy * dy;
}

// Expected colour per pixel, or nullopt when the skeleton leaves it alone.
std::vector<std::optional<Rgb>> oracle_paint(const Pose& pose, const BoundingBox& box, int w, int h,
                                             double tau = kLowConfidence) {
    std::vector<std::optional<Rgb>> out(static_cast<std::size_t>(w * h));
    auto cell = [&](const Keypoint& k) {
        return std::pair<int, int>{static_cast<int>(std::floor(k.x - box.x_min)),
                                   static_cast<int>(std::floor(k.y - box.y_min))};
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::optional<Rgb> c;
            for (std::size_t l = 0; l < kSkeleton.size(); ++l) {
                const auto& a = pose[kSkeleton[l].first];
                const auto& b = pose[kSkeleton[l].second];
                if (a.confidence < tau || b.confidence < tau) continue;
                const auto [ax, ay] = cell(a);
                const auto [bx, by] = cell(b);
                if (seg_dist2(x, y, ax + 0.5, ay + 0.5, bx + 0.5, by + 0.5) <= 1.0 + 1e-9) {
                    c = limb_palette()[l];
                }
            }
            for (const auto& j : pose.joints) {
                if (j.confidence < tau) continue;
                const auto [cx, cy] = cell(j);
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= 4) c = kJointColor;
            }
            out[static_cast<std::size_t>(y * w + x)] = c;
        }
    }
    return out;
}

Pose standing_pose() {
    // Rough upright figure inside kBox, a couple of joints past the edges.
    const double xy[17][2] = {{70, 20}, {72, 18}, {68, 18}, {75, 19}, {65, 19}, {80, 35},
                              {60, 35}, {88, 55}, {52, 55}, {92, 72}, {45, 75}, {77, 75},
                              {63, 75}, {80, 100}, {60, 100}, {82, 128}, {58, 131}};
    Pose p;
    for (std::size_t j = 0; j < kNumJoints; ++j) p[j] = {xy[j][0] + 0.3, xy[j][1] + 0.7, 0.9};
    p[index(Joint::left_ear)].confidence = 0.1;
    return p;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("disc of radius 2 covers 13 pixels") {
    int count = 0;
    for (int y = -3; y <= 3; ++y)
        for (int x = -3; x <= 3; ++x) count += in_joint_disc(x, y, 0, 0, 2);
    CHECK(count == 13);
}

TEST_CASE("axis-aligned limbs are two pixels wide") {
    // Horizontal limb from pixel (2, 5) to (10, 5): segment at y = 5.5.
    for (int x = 2; x <= 11; ++x) {
        CHECK(!on_limb(x, 4, 2, 5, 10, 5));
        CHECK(on_limb(x, 5, 2, 5, 10, 5));
        CHECK(on_limb(x, 6, 2, 5, 10, 5));
        CHECK(!on_limb(x, 7, 2, 5, 10, 5));
    }
    CHECK(!on_limb(13, 5, 2, 5, 10, 5));
}

TEST_CASE("pose with no valid joints leaves the crop alone") {
    Pose p = standing_pose();
    for (auto& j : p.joints) j.confidence = 0.2;
    const RgbImage crop = textured(60, 120, 1);
    CHECK(draw_pose_attention(crop, p, kBox) == crop);
}

TEST_CASE("single joint at the centre changes exactly the disc") {
    Pose p;
    p[0] = {70.0, 70.0, 1.0};
    const RgbImage crop(60, 120, {90, 90, 90});
    const RgbImage out = draw_pose_attention(crop, p, kBox);
    int changed = 0;
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 60; ++x)
            if (out.at(x, y) != crop.at(x, y)) {
                ++changed;
                CHECK(out.at(x, y) == kJointColor);
                CHECK((x - 30) * (x - 30) + (y - 60) * (y - 60) <= 4);
            }
    CHECK(changed == 13);
}

TEST_CASE("full pose matches the independent renderer") {
    const Pose p = standing_pose();
    const RgbImage crop = textured(60, 120, 2);
    const RgbImage out = draw_pose_attention(crop, p, kBox);
    const auto expect = oracle_paint(p, kBox, 60, 120);
    const auto mask = skeleton_mask(p, kBox, 60, 120);
    std::size_t painted = 0;
    for (int y = 0; y < 120; ++y) {
        for (int x = 0; x < 60; ++x) {
            const auto& e = expect[static_cast<std::size_t>(y * 60 + x)];
            REQUIRE(mask[static_cast<std::size_t>(y * 60 + x)] == e.has_value());
            REQUIRE(out.at(x, y) == e.value_or(crop.at(x, y)));
            painted += e.has_value();
        }
    }
    CHECK(painted > 300);
}

TEST_CASE("style switches") {
    const Pose p = standing_pose();
    const RgbImage crop = textured(60, 120, 3);
    AttentionStyle joints_only;
    joints_only.draw_limbs = false;
    AttentionStyle limbs_only;
    limbs_only.draw_joints = false;
    const auto mj = skeleton_mask(p, kBox, 60, 120, joints_only);
    const auto ml = skeleton_mask(p, kBox, 60, 120, limbs_only);
    const auto all = skeleton_mask(p, kBox, 60, 120);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == (mj[i] || ml[i]));
    AttentionStyle none;
    none.draw_limbs = none.draw_joints = false;
    CHECK(draw_pose_attention(crop, p, kBox, none) == crop);
}

TEST_CASE("pose-only cells are white on black") {
    const Pose p = standing_pose();
    const RgbImage img = render_pose_only(p, kBox);
    REQUIRE(img.width() == 60);
    REQUIRE(img.height() == 120);
    const auto expect = oracle_paint(p, kBox, 60, 120);
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 60; ++x)
            REQUIRE(img.at(x, y) == (expect[static_cast<std::size_t>(y * 60 + x)]
                                         ? Rgb{255, 255, 255}
                                         : Rgb{0, 0, 0}));
}

TEST_CASE("crop size must match the box") {
    CHECK_THROWS_AS(draw_pose_attention(RgbImage(59, 120), standing_pose(), kBox), DimensionError);
}

}

#include "grar/render.hpp"

#include <algorithm>
#include <cstdint>

#include "grar/error.hpp"

namespace grar {

namespace {

// Same order as kSkeleton: legs, hips, torso, arms, face.
constexpr std::array<Rgb, 19> kPalette{{
    {0, 255, 0},     {0, 255, 128},   {255, 128, 0},  {255, 200, 0},   {255, 0, 255},
    {0, 128, 255},   {255, 0, 128},   {255, 255, 0},  {0, 255, 255},   {255, 64, 64},
    {64, 255, 255},  {255, 96, 96},   {200, 200, 255}, {160, 160, 255}, {160, 160, 255},
    {128, 255, 128}, {255, 128, 128}, {128, 255, 255}, {255, 128, 255},
}};

struct PixelPoint {
    int x;
    int y;
};

PixelPoint to_pixel(const Keypoint& kp, const BoundingBox& box) noexcept {
    return {box.local_px(kp.x), box.local_py(kp.y)};
}

template <typename Paint>
void rasterize(const Pose& pose, const BoundingBox& box, int width, int height,
               const AttentionStyle& style, Paint&& paint) {
    if (style.draw_limbs) {
        for (std::size_t l = 0; l < kSkeleton.size(); ++l) {
            const auto [ja, jb] = kSkeleton[l];
            if (!pose[ja].valid(style.conf_threshold) || !pose[jb].valid(style.conf_threshold)) {
                continue;
            }
            const PixelPoint a = to_pixel(pose[ja], box);
            const PixelPoint b = to_pixel(pose[jb], box);
            const int x0 = std::max(std::min(a.x, b.x) - 1, 0);
            const int x1 = std::min(std::max(a.x, b.x) + 2, width - 1);
            const int y0 = std::max(std::min(a.y, b.y) - 1, 0);
            const int y1 = std::min(std::max(a.y, b.y) + 2, height - 1);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    if (on_limb(x, y, a.x, a.y, b.x, b.y)) {
                        paint(x, y, style.mono.value_or(kPalette[l]));
                    }
                }
            }
        }
    }
    if (style.draw_joints) {
        const int r = style.joint_radius;
        for (const auto& kp : pose.joints) {
            if (!kp.valid(style.conf_threshold)) {
                continue;
            }
            const PixelPoint c = to_pixel(kp, box);
            for (int y = std::max(c.y - r, 0); y <= std::min(c.y + r, height - 1); ++y) {
                for (int x = std::max(c.x - r, 0); x <= std::min(c.x + r, width - 1); ++x) {
                    if (in_joint_disc(x, y, c.x, c.y, r)) {
                        paint(x, y, style.mono.value_or(kJointColor));
                    }
                }
            }
        }
    }
}

}  // namespace

const std::array<Rgb, 19>& limb_palette() noexcept { return kPalette; }

bool in_joint_disc(int px, int py, int cx, int cy, int radius) noexcept {
    const long dx = px - cx;
    const long dy = py - cy;
    return dx * dx + dy * dy <= static_cast<long>(radius) * radius;
}

bool on_limb(int px, int py, int ax, int ay, int bx, int by) noexcept {
    // Doubled coordinates keep every quantity an exact integer.
    const std::int64_t p_x = 2 * std::int64_t{px}, p_y = 2 * std::int64_t{py};
    const std::int64_t a_x = 2 * std::int64_t{ax} + 1, a_y = 2 * std::int64_t{ay} + 1;
    const std::int64_t b_x = 2 * std::int64_t{bx} + 1, b_y = 2 * std::int64_t{by} + 1;
    const std::int64_t ux = b_x - a_x, uy = b_y - a_y;
    const std::int64_t vx = p_x - a_x, vy = p_y - a_y;
    const std::int64_t len2 = ux * ux + uy * uy;
    const std::int64_t t = ux * vx + uy * vy;
    // (2 * distance)^2 <= 4
    if (len2 == 0 || t <= 0) {
        return vx * vx + vy * vy <= 4;
    }
    if (t >= len2) {
        const std::int64_t wx = p_x - b_x, wy = p_y - b_y;
        return wx * wx + wy * wy <= 4;
    }
    const std::int64_t cross = ux * vy - uy * vx;
    return cross * cross <= 4 * len2;
}

std::vector<bool> skeleton_mask(const Pose& pose, const BoundingBox& box, int width, int height,
                                const AttentionStyle& style) {
    std::vector<bool> mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    rasterize(pose, box, width, height, style, [&](int x, int y, Rgb) {
        mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(x)] = true;
    });
    return mask;
}

RgbImage draw_pose_attention(const RgbImage& crop, const Pose& pose, const BoundingBox& box,
                             const AttentionStyle& style) {
    if (crop.width() != box.pixel_width() || crop.height() != box.pixel_height()) {
        throw DimensionError("crop " + std::to_string(crop.width()) + "x" +
                             std::to_string(crop.height()) + " does not match box " +
                             std::to_string(box.pixel_width()) + "x" +
                             std::to_string(box.pixel_height()));
    }
    RgbImage out = crop;
    rasterize(pose, box, out.width(), out.height(), style,
              [&](int x, int y, Rgb c) { out.set(x, y, c); });
    return out;
}

RgbImage render_pose_only(const Pose& pose, const BoundingBox& box, double conf_threshold) {
    AttentionStyle style;
    style.conf_threshold = conf_threshold;
    style.mono = Rgb{255, 255, 255};
    return draw_pose_attention(RgbImage(box.pixel_width(), box.pixel_height()), pose, box, style);
}

}  // namespace grar

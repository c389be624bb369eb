#pragma once

#include <array>
#include <optional>
#include <vector>

#include "grar/image.hpp"
#include "grar/pose.hpp"

namespace grar {

/// Pose-attention drawing style.
///
/// Rasterization rules (crop-local integer pixel coordinates, pixel (0,0) at
/// the box's top-left corner; a joint falls in pixel (floor(x - x_min),
/// floor(y - y_min))):
///
///  * joint disc: pixels (px, py) with (px-cx)^2 + (py-cy)^2 <= r^2, so r = 2
///    covers 13 pixels;
///  * limb: pixels whose distance to the segment joining the two joint pixels'
///    lower-right corners, (cx + 1/2, cy + 1/2), is at most 1. An axis-aligned
///    limb is therefore exactly 2 px wide with round caps.
///
/// Limbs are drawn first (skeleton order), joint discs on top. Only joints at
/// or above `conf_threshold` are drawn; a limb needs both ends valid.
struct AttentionStyle {
    int joint_radius = 2;
    bool draw_limbs = true;
    bool draw_joints = true;
    double conf_threshold = kLowConfidence;
    /// Paint everything in this colour instead of the palette.
    std::optional<Rgb> mono;
};

/// Limb colours, indexed like kSkeleton.
const std::array<Rgb, 19>& limb_palette() noexcept;
inline constexpr Rgb kJointColor{255, 255, 255};

bool in_joint_disc(int px, int py, int cx, int cy, int radius) noexcept;
bool on_limb(int px, int py, int ax, int ay, int bx, int by) noexcept;

/// Pixels the skeleton covers on a width x height crop, row-major.
std::vector<bool> skeleton_mask(const Pose& pose, const BoundingBox& box, int width, int height,
                                const AttentionStyle& style = {});

/// Draws the skeleton over `crop`; pixels off the skeleton are untouched.
/// Throws DimensionError unless crop matches the box's pixel size.
RgbImage draw_pose_attention(const RgbImage& crop, const Pose& pose, const BoundingBox& box,
                             const AttentionStyle& style = {});

/// Skeleton only: white on a black raster the size of the box.
RgbImage render_pose_only(const Pose& pose, const BoundingBox& box,
                          double conf_threshold = kLowConfidence);

}  // namespace grar

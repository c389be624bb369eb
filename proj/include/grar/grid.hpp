#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grar/image.hpp"
#include "grar/pose.hpp"
#include "grar/render.hpp"

namespace grar {

inline constexpr int kDefaultBorderPx = 3;
inline constexpr std::size_t kMaxGridCells = 16;
inline constexpr int kMaxCanvasSide = 1200;

/// Row-major, near-square arrangement of K cells.
struct GridLayout {
    std::size_t columns = 1;
    std::size_t rows = 1;
    int border_px = kDefaultBorderPx;
    int max_canvas_width = kMaxCanvasSide;
    int max_canvas_height = kMaxCanvasSide;

    /// columns = ceil(sqrt(k)), rows = ceil(k / columns).
    static GridLayout for_cells(std::size_t k, int border_px = kDefaultBorderPx);
};

struct CellRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const CellRect&, const CellRect&) = default;
};

struct GridImage {
    RgbImage raster;
    std::vector<CellRect> cells;
    std::optional<std::string> label;
    std::string person_id;
    /// Frame index of the key pose in each cell.
    std::vector<long> provenance;
};

/// Tiles `cells` at native resolution. Slots take the widest cell of their
/// column and the tallest of their row; cells sit at the slot's top-left.
/// Every pixel outside a cell is zero.
GridImage compose_grid(std::span<const RgbImage> cells, const GridLayout& layout);

/// What a cell shows.
enum class CellContent {
    rgb,        ///< the crop, with the skeleton drawn over it when attention is on
    pose_only,  ///< white skeleton on black, crop ignored
};

struct GridOptions {
    int border_px = kDefaultBorderPx;
    bool attention = true;
    CellContent content = CellContent::rgb;
    AttentionStyle style{};
    int max_canvas_width = kMaxCanvasSide;
    int max_canvas_height = kMaxCanvasSide;
};

/// One cell per key frame, in the order given. Throws ConfigError naming the
/// frame when its pose or crop is missing.
GridImage build_grid(const PoseSequence& seq, const TrackCrops& crops,
                     std::span<const long> key_frame_indices, const GridOptions& options = {});

}  // namespace grar

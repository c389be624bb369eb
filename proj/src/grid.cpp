#include "grar/grid.hpp"

#include <algorithm>

#include "grar/error.hpp"

namespace grar {

GridLayout GridLayout::for_cells(std::size_t k, int border_px) {
    GridLayout layout;
    layout.border_px = border_px;
    std::size_t c = 1;
    while (c * c < k) {
        ++c;
    }
    layout.columns = c;
    layout.rows = k == 0 ? 1 : (k + c - 1) / c;
    return layout;
}

GridImage compose_grid(std::span<const RgbImage> cells, const GridLayout& layout) {
    const std::size_t k = cells.size();
    if (k == 0 || k > kMaxGridCells) {
        throw ConfigError("grid needs between 1 and " + std::to_string(kMaxGridCells) +
                          " cells, got " + std::to_string(k));
    }
    if (layout.border_px < 1) {
        throw ConfigError("border must be at least 1 px");
    }
    if (layout.columns * layout.rows < k || layout.columns == 0) {
        throw ConfigError("layout " + std::to_string(layout.columns) + "x" +
                          std::to_string(layout.rows) + " cannot hold " + std::to_string(k) +
                          " cells");
    }
    std::vector<int> col_w(layout.columns, 0), row_h(layout.rows, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t r = i / layout.columns, c = i % layout.columns;
        col_w[c] = std::max(col_w[c], cells[i].width());
        row_h[r] = std::max(row_h[r], cells[i].height());
    }
    const int b = layout.border_px;
    std::vector<int> col_x(layout.columns), row_y(layout.rows);
    int width = b, height = b;
    for (std::size_t c = 0; c < layout.columns; ++c) {
        col_x[c] = width;
        width += col_w[c] + b;
    }
    for (std::size_t r = 0; r < layout.rows; ++r) {
        row_y[r] = height;
        height += row_h[r] + b;
    }
    if (width > layout.max_canvas_width || height > layout.max_canvas_height) {
        throw ConfigError("grid canvas " + std::to_string(width) + "x" + std::to_string(height) +
                          " exceeds " + std::to_string(layout.max_canvas_width) + "x" +
                          std::to_string(layout.max_canvas_height) +
                          "; use fewer key poses rather than shrinking cells");
    }

    GridImage grid;
    grid.raster = RgbImage(width, height);
    for (std::size_t i = 0; i < k; ++i) {
        const CellRect rect{col_x[i % layout.columns], row_y[i / layout.columns],
                            cells[i].width(), cells[i].height()};
        grid.raster.blit(cells[i], rect.x, rect.y);
        grid.cells.push_back(rect);
    }
    return grid;
}

GridImage build_grid(const PoseSequence& seq, const TrackCrops& crops,
                     std::span<const long> key_frame_indices, const GridOptions& options) {
    std::vector<RgbImage> cells;
    cells.reserve(key_frame_indices.size());
    for (const long f : key_frame_indices) {
        const auto it = std::find_if(seq.frames.begin(), seq.frames.end(),
                                     [f](const TrackFrame& t) { return t.frame_index == f; });
        if (it == seq.frames.end()) {
            throw ConfigError("track " + seq.person_id + " has no pose for key frame " +
                              std::to_string(f));
        }
        if (options.content == CellContent::pose_only) {
            cells.push_back(render_pose_only(it->pose, it->box, options.style.conf_threshold));
            continue;
        }
        const CropFrame* crop = crops.find(f);
        if (crop == nullptr) {
            throw ConfigError("track " + seq.person_id + " has no crop for key frame " +
                              std::to_string(f));
        }
        cells.push_back(options.attention
                            ? draw_pose_attention(crop->image, it->pose, it->box, options.style)
                            : crop->image);
    }
    GridLayout layout = GridLayout::for_cells(cells.size(), options.border_px);
    layout.max_canvas_width = options.max_canvas_width;
    layout.max_canvas_height = options.max_canvas_height;
    GridImage grid = compose_grid(cells, layout);
    grid.person_id = seq.person_id;
    grid.provenance.assign(key_frame_indices.begin(), key_frame_indices.end());
    return grid;
}

}  // namespace grar

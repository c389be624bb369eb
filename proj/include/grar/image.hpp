#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace grar {

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB raster, row-major, origin top-left.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {0, 0, 0});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    Rgb at(int x, int y) const noexcept {
        const std::uint8_t* p = &pixels_[index(x, y)];
        return {p[0], p[1], p[2]};
    }

    void set(int x, int y, Rgb c) noexcept {
        std::uint8_t* p = &pixels_[index(x, y)];
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }

    void fill_rect(int x0, int y0, int w, int h, Rgb c);

    /// Copies `src` with its top-left corner at (x, y); pixels falling outside are clipped.
    void blit(const RgbImage& src, int x, int y);

    /// Sub-raster [x, x+w) x [y, y+h); out-of-range pixels read as black.
    RgbImage crop(int x, int y, int w, int h) const;

    std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }
    std::span<std::uint8_t> bytes() noexcept { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Lossless PNG I/O (8-bit RGB). Throws IoError on failure.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace grar

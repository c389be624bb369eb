#include "grar/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <string>

#include "grar/error.hpp"

namespace grar {

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw DimensionError("negative image dimensions");
    }
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill[0];
        pixels_[i + 1] = fill[1];
        pixels_[i + 2] = fill[2];
    }
}

void RgbImage::fill_rect(int x0, int y0, int w, int h, Rgb c) {
    const int xa = std::max(x0, 0);
    const int ya = std::max(y0, 0);
    const int xb = std::min(x0 + w, width_);
    const int yb = std::min(y0 + h, height_);
    for (int y = ya; y < yb; ++y) {
        for (int x = xa; x < xb; ++x) {
            set(x, y, c);
        }
    }
}

void RgbImage::blit(const RgbImage& src, int x, int y) {
    const int xa = std::max(x, 0);
    const int ya = std::max(y, 0);
    const int xb = std::min(x + src.width(), width_);
    const int yb = std::min(y + src.height(), height_);
    if (xa >= xb) {
        return;
    }
    for (int row = ya; row < yb; ++row) {
        const std::uint8_t* from = &src.pixels_[src.index(xa - x, row - y)];
        std::copy(from, from + static_cast<std::size_t>(xb - xa) * 3, &pixels_[index(xa, row)]);
    }
}

RgbImage RgbImage::crop(int x, int y, int w, int h) const {
    RgbImage out(w, h);
    out.blit(*this, -x, -y);
    return out;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports through these instead of printing; the message ends up in
// the IoError.
thread_local std::string png_message;

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
    png_message = msg;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw IoError("cannot open image " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                             on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed");
    }
    RgbImage image;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG " + path.string() + ": " + png_message);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const auto color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) {
        png_set_strip_16(png);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (color & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    image = RgbImage(width, height);
    rows.resize(static_cast<std::size_t>(height));
    auto bytes = image.bytes();
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            bytes.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
    if (image.empty()) {
        throw DimensionError("refusing to write empty image " + path.string());
    }
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError("cannot create image " + path.string());
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error,
                                              on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing PNG " + path.string() + ": " + png_message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const auto bytes = image.bytes();
    for (int y = 0; y < image.height(); ++y) {
        png_write_row(png, const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) *
                                                                  static_cast<std::size_t>(image.width()) * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace grar

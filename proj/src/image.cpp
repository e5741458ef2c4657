#include "roomtex/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "roomtex/errors.hpp"

namespace roomtex {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image8 load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    Image8 img(static_cast<int>(w), static_cast<int>(h), channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = img.px.data() + static_cast<size_t>(y) * w * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const std::string& path, const Image8& img) {
    if (img.empty()) throw IoError("refusing to write empty image to " + path);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode " + path);
    }

    int color_type;
    switch (img.c) {
        case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
        case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
        case 3: color_type = PNG_COLOR_TYPE_RGB; break;
        case 4: color_type = PNG_COLOR_TYPE_RGBA; break;
        default: throw IoError("unsupported channel count");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.w, img.h, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.h);
    for (int y = 0; y < img.h; ++y)
        rows[y] = const_cast<png_bytep>(img.px.data() + static_cast<size_t>(y) * img.w * img.c);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image16 load_png16(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 16 || png_get_channels(png, info) != 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + " is not 16-bit grayscale");
    }
    png_set_swap(png);  // stored big-endian
    png_read_update_info(png, info);

    Image16 img(png_get_image_width(png, info), png_get_image_height(png, info));
    std::vector<png_bytep> rows(img.h);
    for (int y = 0; y < img.h; ++y)
        rows[y] = reinterpret_cast<png_bytep>(img.px.data() + static_cast<size_t>(y) * img.w);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png16(const std::string& path, const Image16& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.w, img.h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    std::vector<png_bytep> rows(img.h);
    for (int y = 0; y < img.h; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<uint16_t*>(img.px.data() + static_cast<size_t>(y) * img.w));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageF to_luma(const Image8& img) {
    ImageF out(img.w, img.h);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            if (img.c >= 3) {
                out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                               0.114 * img.at(x, y, 2);
            } else {
                out.at(x, y) = img.at(x, y, 0);
            }
        }
    return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable convolution with edge clamping, one channel of an interleaved buffer.
template <typename Get, typename Set>
void convolve_1d(int w, int h, const std::vector<double>& k, bool horizontal, Get get, Set set) {
    int radius = static_cast<int>(k.size() / 2);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int xx = horizontal ? std::clamp(x + i, 0, w - 1) : x;
                int yy = horizontal ? y : std::clamp(y + i, 0, h - 1);
                acc += k[i + radius] * get(xx, yy);
            }
            set(x, y, acc);
        }
}

}  // namespace

Image8 gaussian_blur(const Image8& img, double sigma) {
    if (sigma <= 0) return img;
    auto k = gaussian_kernel(sigma);
    Image8 out = img;
    std::vector<double> tmp(static_cast<size_t>(img.w) * img.h);
    for (int ch = 0; ch < img.c; ++ch) {
        convolve_1d(
            img.w, img.h, k, true, [&](int x, int y) { return double(img.at(x, y, ch)); },
            [&](int x, int y, double v) { tmp[static_cast<size_t>(y) * img.w + x] = v; });
        convolve_1d(
            img.w, img.h, k, false,
            [&](int x, int y) { return tmp[static_cast<size_t>(y) * img.w + x]; },
            [&](int x, int y, double v) {
                out.at(x, y, ch) = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            });
    }
    return out;
}

ImageF gaussian_blur(const ImageF& img, double sigma) {
    if (sigma <= 0) return img;
    auto k = gaussian_kernel(sigma);
    ImageF tmp(img.w, img.h), out(img.w, img.h);
    convolve_1d(
        img.w, img.h, k, true, [&](int x, int y) { return img.at(x, y); },
        [&](int x, int y, double v) { tmp.at(x, y) = v; });
    convolve_1d(
        img.w, img.h, k, false, [&](int x, int y) { return tmp.at(x, y); },
        [&](int x, int y, double v) { out.at(x, y) = v; });
    return out;
}

void sample_bilinear(const Image8& img, double x, double y, uint8_t* out) {
    double fx = x - 0.5, fy = y - 0.5;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    double ax = fx - x0, ay = fy - y0;
    // Snap near-integer weights so 1:1 resamplings are exact.
    if (ax < 1e-9) ax = 0; else if (ax > 1.0 - 1e-9) { ax = 0; x0 += 1; }
    if (ay < 1e-9) ay = 0; else if (ay > 1.0 - 1e-9) { ay = 0; y0 += 1; }
    int x1 = std::clamp(x0 + 1, 0, img.w - 1);
    int y1 = std::clamp(y0 + 1, 0, img.h - 1);
    x0 = std::clamp(x0, 0, img.w - 1);
    y0 = std::clamp(y0, 0, img.h - 1);
    for (int ch = 0; ch < img.c; ++ch) {
        double v = (1 - ax) * (1 - ay) * img.at(x0, y0, ch) + ax * (1 - ay) * img.at(x1, y0, ch) +
                   (1 - ax) * ay * img.at(x0, y1, ch) + ax * ay * img.at(x1, y1, ch);
        out[ch] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
}

Image8 dilate(const Image8& mask, int radius) {
    Image8 out(mask.w, mask.h, 1, 0);
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) {
            if (!mask.at(x, y)) continue;
            int x0 = std::max(0, x - radius), x1 = std::min(mask.w - 1, x + radius);
            int y0 = std::max(0, y - radius), y1 = std::min(mask.h - 1, y + radius);
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx) out.at(xx, yy) = 255;
        }
    return out;
}

bool images_equal(const Image8& a, const Image8& b) {
    return a.w == b.w && a.h == b.h && a.c == b.c && a.px == b.px;
}

}  // namespace roomtex

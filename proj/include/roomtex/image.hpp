#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roomtex {

// Interleaved 8-bit image, row-major, origin at the top-left.
struct Image8 {
    int w = 0, h = 0, c = 0;
    std::vector<uint8_t> px;

    Image8() = default;
    Image8(int w_, int h_, int c_, uint8_t fill = 0)
        : w(w_), h(h_), c(c_), px(static_cast<size_t>(w_) * h_ * c_, fill) {}

    uint8_t& at(int x, int y, int ch = 0) {
        return px[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    uint8_t at(int x, int y, int ch = 0) const {
        return px[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    bool empty() const { return px.empty(); }
    size_t size() const { return px.size(); }
};

// Single-channel 16-bit image (depth maps, millimeters).
struct Image16 {
    int w = 0, h = 0;
    std::vector<uint16_t> px;

    Image16() = default;
    Image16(int w_, int h_, uint16_t fill = 0)
        : w(w_), h(h_), px(static_cast<size_t>(w_) * h_, fill) {}

    uint16_t& at(int x, int y) { return px[static_cast<size_t>(y) * w + x]; }
    uint16_t at(int x, int y) const { return px[static_cast<size_t>(y) * w + x]; }
};

// Single-channel float image used by the metrics.
struct ImageF {
    int w = 0, h = 0;
    std::vector<double> px;

    ImageF() = default;
    ImageF(int w_, int h_, double fill = 0)
        : w(w_), h(h_), px(static_cast<size_t>(w_) * h_, fill) {}

    double& at(int x, int y) { return px[static_cast<size_t>(y) * w + x]; }
    double at(int x, int y) const { return px[static_cast<size_t>(y) * w + x]; }
};

Image8 load_png(const std::string& path);
void save_png(const std::string& path, const Image8& img);
Image16 load_png16(const std::string& path);
void save_png16(const std::string& path, const Image16& img);

// Rec.601 luma in [0,255].
ImageF to_luma(const Image8& img);

// Gaussian blur with kernel radius ceil(3*sigma); sigma <= 0 is a copy.
Image8 gaussian_blur(const Image8& img, double sigma);
ImageF gaussian_blur(const ImageF& img, double sigma);

// Bilinear sample with edge clamping; (x, y) in pixel coordinates where the
// center of pixel (i, j) is (i + 0.5, j + 0.5). Weights below 1e-9 are snapped
// to zero so identity resamplings reproduce texels exactly.
void sample_bilinear(const Image8& img, double x, double y, uint8_t* out);

// Chebyshev-disc dilation of a binary (0/255) mask.
Image8 dilate(const Image8& mask, int radius);

bool images_equal(const Image8& a, const Image8& b);

}  // namespace roomtex

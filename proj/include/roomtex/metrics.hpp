#pragma once

#include <array>
#include <string>
#include <vector>

#include "roomtex/frame.hpp"
#include "roomtex/image.hpp"
#include "roomtex/plane2image.hpp"
#include "roomtex/texturing.hpp"

namespace roomtex {

// Peak signal-to-noise ratio in dB over all RGB channels, capped at 60
// (identical images score exactly 60). Symmetric.
// Throws DimensionMismatch.
double psnr(const Image8& a, const Image8& b);

// Mean structural similarity on luma: 11x11 Gaussian window, sigma 1.5,
// K1=0.01, K2=0.03, L=255, averaged over fully-interior windows. Symmetric;
// ssim(a, a) == 1.
// Throws DimensionMismatch, TooSmall (min side < 11).
double ssim(const Image8& a, const Image8& b);

// No-reference blur in [0, 1], higher = blurrier: re-blurs luma with a 9-tap
// averaging kernel and measures how much neighboring-pixel variation the
// blur removes — already-blurry input loses almost none and scores near 1.
// Horizontal and vertical passes are scored separately; the worse one wins.
// A constant image scores 0.
// Throws TooSmall (min side < 16).
double blurriness(const Image8& img);

// Sharpest-of-each-4 frame selection: frames are taken in groups of four
// consecutive (the tail group may be smaller), the least blurry frame of
// each group is kept, and a discarded frame is kept anyway when its pose
// differs from its group's keeper by more than maxTransM meters or maxRotDeg
// degrees. Returns kept indices, ascending.
std::vector<int> sample_frame_indices(const std::vector<Frame>& frames, double maxTransM = 0.10,
                                      double maxRotDeg = 10.0);
std::vector<Frame> sample_frames(const std::vector<Frame>& frames, double maxTransM = 0.10,
                                 double maxRotDeg = 10.0);

struct EvalRow {
    std::string name;
    double psnr = 0, ssim = 0, blur = 0;
};

struct EvalStat {
    double mean = 0, stddev = 0;  // population stddev
};

struct EvalReport {
    std::vector<EvalRow> rows;
    EvalStat psnrStat, ssimStat, blurStat;
    int skipped = 0;  // comparisons dropped (empty masks)
};

EvalStat mean_stddev(const std::vector<double>& values);

// Renders the textured model at each ground-truth pose, blanks both images
// outside the frame's evaluation mask (nonzero mask = evaluate), and scores
// psnr/ssim on the pair plus blur on the masked render. Frames whose mask is
// empty or all zero are skipped and counted. masks[i] must match frame i's
// image size.
// Throws DimensionMismatch.
EvalReport local_eval(const TextureAtlas& model, const std::vector<Frame>& gtFrames,
                      const std::vector<Image8>& masks);

// A reference photo of one wall with its four corners clicked in the image,
// ordered top-left, top-right, bottom-right, bottom-left as seen on screen.
struct WallPhoto {
    Image8 photo;
    std::array<Vec2, 4> corners;
};

// Exact 4-point homography (row-major 3x3, h[8] = 1) mapping src points to
// dst points.
// Throws DegenerateCorners (any three points collinear, either set) and
// InvalidCornerOrder (the two orderings wind oppositely: mapping flips).
std::array<double, 9> homography_from_corners(const std::array<Vec2, 4>& src,
                                              const std::array<Vec2, 4>& dst);

// Warps the clicked quad onto an outW x outH rectangle (bilinear).
Image8 rectify_photo(const WallPhoto& gt, int outW, int outH);

// Rectifies each photo onto its plane image's pixel grid and scores the pair
// full-frame; photos pair with planes by index.
// Throws DimensionMismatch (count mismatch), DegenerateCorners,
// InvalidCornerOrder.
EvalReport global_eval(const std::vector<PlaneImage>& planes,
                       const std::vector<WallPhoto>& photos);

void save_eval_report(const EvalReport& report, const std::string& jsonPath);
void save_eval_csv(const EvalReport& report, const std::string& csvPath);

}  // namespace roomtex

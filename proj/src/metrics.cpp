#include "roomtex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "roomtex/errors.hpp"

namespace roomtex {

namespace {

void require_same_size(const Image8& a, const Image8& b) {
    if (a.w != b.w || a.h != b.h || a.c != b.c)
        throw DimensionMismatch("images differ in size or channel count");
}

// Horizontal then vertical convolution with a normalized 1D kernel, keeping
// only positions where the kernel fits entirely inside the image.
ImageF convolve_valid(const ImageF& img, const std::vector<double>& k) {
    int r = static_cast<int>(k.size()) / 2;
    ImageF mid(img.w - 2 * r, img.h);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < mid.w; ++x) {
            double s = 0;
            for (size_t i = 0; i < k.size(); ++i) s += k[i] * img.at(x + int(i), y);
            mid.at(x, y) = s;
        }
    ImageF out(mid.w, img.h - 2 * r);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            double s = 0;
            for (size_t i = 0; i < k.size(); ++i) s += k[i] * mid.at(x, y + int(i));
            out.at(x, y) = s;
        }
    return out;
}

ImageF multiply(const ImageF& a, const ImageF& b) {
    ImageF out(a.w, a.h);
    for (size_t i = 0; i < out.px.size(); ++i) out.px[i] = a.px[i] * b.px[i];
    return out;
}

// 9-tap moving average along one axis with clamped borders.
ImageF box9(const ImageF& img, bool horizontal) {
    ImageF out(img.w, img.h);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            double s = 0;
            for (int t = -4; t <= 4; ++t) {
                int sx = horizontal ? std::clamp(x + t, 0, img.w - 1) : x;
                int sy = horizontal ? y : std::clamp(y + t, 0, img.h - 1);
                s += img.at(sx, sy);
            }
            out.at(x, y) = s / 9.0;
        }
    return out;
}

// Variation lost to re-blurring along one axis: 0 = all lost (sharp input),
// 1 = nothing lost (input already blurred).
double blur_axis(const ImageF& f, bool horizontal) {
    ImageF blurred = box9(f, horizontal);
    int x0 = horizontal ? 1 : 0, y0 = horizontal ? 0 : 1;
    double sumF = 0, sumV = 0;
    for (int y = y0; y < f.h; ++y)
        for (int x = x0; x < f.w; ++x) {
            int px = x - (horizontal ? 1 : 0), py = y - (horizontal ? 0 : 1);
            double dF = std::abs(f.at(x, y) - f.at(px, py));
            double dB = std::abs(blurred.at(x, y) - blurred.at(px, py));
            sumF += dF;
            sumV += std::max(0.0, dF - dB);
        }
    if (sumF <= 0) return 0;
    return (sumF - sumV) / sumF;
}

Vec3 rotation_col(const Mat4& m, int col) { return {m[0][col], m[1][col], m[2][col]}; }

double rotation_angle_deg(const Mat4& a, const Mat4& b) {
    // trace(Ra^T Rb) = sum of dot products of matching columns.
    double tr = 0;
    for (int c = 0; c < 3; ++c) tr += dot(rotation_col(a, c), rotation_col(b, c));
    double cosAng = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(cosAng) * 180.0 / kPi;
}

Image8 masked_copy(const Image8& img, const Image8& mask) {
    Image8 out = img;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            if (mask.at(x, y)) continue;
            for (int ch = 0; ch < img.c; ++ch) out.at(x, y, ch) = 0;
        }
    return out;
}

void fill_stats(EvalReport& report) {
    std::vector<double> p, s, b;
    for (const EvalRow& row : report.rows) {
        p.push_back(row.psnr);
        s.push_back(row.ssim);
        b.push_back(row.blur);
    }
    report.psnrStat = mean_stddev(p);
    report.ssimStat = mean_stddev(s);
    report.blurStat = mean_stddev(b);
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

void require_nondegenerate(const std::array<Vec2, 4>& pts) {
    double scale = 0;
    for (const Vec2& p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    double eps = 1e-9 * std::max(1.0, scale * scale);
    for (int skip = 0; skip < 4; ++skip) {
        Vec2 tri[3];
        int n = 0;
        for (int i = 0; i < 4; ++i)
            if (i != skip) tri[n++] = pts[i];
        if (std::abs(cross2(tri[0], tri[1], tri[2])) <= eps)
            throw DegenerateCorners("three of the four corners are collinear");
    }
}

// Signed area of the quad as traversed; the two corner sets must agree in
// winding or the homography mirrors the image.
double quad_winding(const std::array<Vec2, 4>& pts) {
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % 4];
        s += a.x * b.y - b.x * a.y;
    }
    return s;
}

}  // namespace

double psnr(const Image8& a, const Image8& b) {
    require_same_size(a, b);
    double se = 0;
    for (size_t i = 0; i < a.px.size(); ++i) {
        double d = double(a.px[i]) - double(b.px[i]);
        se += d * d;
    }
    if (a.px.empty()) return 60.0;
    double mse = se / double(a.px.size());
    if (mse <= 0) return 60.0;
    return std::min(60.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const Image8& a, const Image8& b) {
    require_same_size(a, b);
    if (a.w < 11 || a.h < 11) throw TooSmall("ssim needs at least 11x11 images");
    ImageF fa = to_luma(a), fb = to_luma(b);

    std::vector<double> kernel(11);
    double ksum = 0;
    for (int i = 0; i < 11; ++i) {
        double d = i - 5;
        kernel[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        ksum += kernel[i];
    }
    for (double& k : kernel) k /= ksum;

    ImageF muA = convolve_valid(fa, kernel);
    ImageF muB = convolve_valid(fb, kernel);
    ImageF muAA = convolve_valid(multiply(fa, fa), kernel);
    ImageF muBB = convolve_valid(multiply(fb, fb), kernel);
    ImageF muAB = convolve_valid(multiply(fa, fb), kernel);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0;
    for (size_t i = 0; i < muA.px.size(); ++i) {
        double ma = muA.px[i], mb = muB.px[i];
        double va = muAA.px[i] - ma * ma;
        double vb = muBB.px[i] - mb * mb;
        double cov = muAB.px[i] - ma * mb;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / double(muA.px.size());
}

double blurriness(const Image8& img) {
    if (img.w < 16 || img.h < 16) throw TooSmall("blurriness needs at least 16x16 images");
    ImageF f = to_luma(img);
    return std::max(blur_axis(f, true), blur_axis(f, false));
}

std::vector<int> sample_frame_indices(const std::vector<Frame>& frames, double maxTransM,
                                      double maxRotDeg) {
    std::vector<double> blur(frames.size());
    for (size_t i = 0; i < frames.size(); ++i) blur[i] = blurriness(frames[i].rgb);

    std::vector<int> kept;
    for (size_t g = 0; g < frames.size(); g += 4) {
        size_t end = std::min(frames.size(), g + 4);
        size_t best = g;
        for (size_t i = g + 1; i < end; ++i)
            if (blur[i] < blur[best]) best = i;
        for (size_t i = g; i < end; ++i) {
            if (i == best) {
                kept.push_back(int(i));
                continue;
            }
            double trans = norm(camera_center(frames[i]) - camera_center(frames[best]));
            double rot = rotation_angle_deg(frames[i].camToWorld, frames[best].camToWorld);
            if (trans > maxTransM || rot > maxRotDeg) kept.push_back(int(i));
        }
    }
    return kept;
}

std::vector<Frame> sample_frames(const std::vector<Frame>& frames, double maxTransM,
                                 double maxRotDeg) {
    std::vector<Frame> out;
    for (int i : sample_frame_indices(frames, maxTransM, maxRotDeg)) out.push_back(frames[i]);
    return out;
}

EvalStat mean_stddev(const std::vector<double>& values) {
    EvalStat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= double(values.size());
    double var = 0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / double(values.size()));
    return s;
}

EvalReport local_eval(const TextureAtlas& model, const std::vector<Frame>& gtFrames,
                      const std::vector<Image8>& masks) {
    if (gtFrames.size() != masks.size())
        throw DimensionMismatch("one mask per ground-truth frame required");
    EvalReport report;
    for (size_t i = 0; i < gtFrames.size(); ++i) {
        const Frame& gt = gtFrames[i];
        const Image8& mask = masks[i];
        bool any = false;
        for (uint8_t v : mask.px) any |= v != 0;
        if (!any) {
            ++report.skipped;
            continue;
        }
        if (mask.w != gt.rgb.w || mask.h != gt.rgb.h)
            throw DimensionMismatch("evaluation mask does not match its frame");
        Image8 render = render_atlas_view(model, gt.K, gt.camToWorld);
        Image8 maskedRender = masked_copy(render, mask);
        Image8 maskedGt = masked_copy(gt.rgb, mask);
        EvalRow row;
        row.name = "frame_" + std::to_string(i);
        row.psnr = psnr(maskedRender, maskedGt);
        row.ssim = ssim(maskedRender, maskedGt);
        row.blur = blurriness(maskedRender);
        report.rows.push_back(std::move(row));
    }
    fill_stats(report);
    return report;
}

std::array<double, 9> homography_from_corners(const std::array<Vec2, 4>& src,
                                              const std::array<Vec2, 4>& dst) {
    require_nondegenerate(src);
    require_nondegenerate(dst);
    if (quad_winding(src) * quad_winding(dst) < 0)
        throw InvalidCornerOrder("corner orderings wind in opposite directions");

    // Direct linear transform with h33 fixed to 1: 8 equations, 8 unknowns.
    double m[8][9] = {};
    for (int i = 0; i < 4; ++i) {
        double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
        double rows[2][9] = {{x, y, 1, 0, 0, 0, -u * x, -u * y, u},
                             {0, 0, 0, x, y, 1, -v * x, -v * y, v}};
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 9; ++j) m[2 * i + r][j] = rows[r][j];
    }
    for (int col = 0; col < 8; ++col) {
        int piv = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-12)
            throw DegenerateCorners("corner configuration does not determine a homography");
        std::swap(m[col], m[piv]);
        for (int r = col + 1; r < 8; ++r) {
            double factor = m[r][col] / m[col][col];
            for (int j = col; j < 9; ++j) m[r][j] -= factor * m[col][j];
        }
    }
    std::array<double, 9> h{};
    for (int i = 7; i >= 0; --i) {
        double s = m[i][8];
        for (int j = i + 1; j < 8; ++j) s -= m[i][j] * h[j];
        h[i] = s / m[i][i];
    }
    h[8] = 1.0;
    return h;
}

Image8 rectify_photo(const WallPhoto& gt, int outW, int outH) {
    std::array<Vec2, 4> rect = {Vec2{0, 0}, Vec2{double(outW), 0},
                                Vec2{double(outW), double(outH)}, Vec2{0, double(outH)}};
    std::array<double, 9> h = homography_from_corners(rect, gt.corners);
    Image8 out(outW, outH, gt.photo.c);
    for (int y = 0; y < outH; ++y)
        for (int x = 0; x < outW; ++x) {
            double px = x + 0.5, py = y + 0.5;
            double w = h[6] * px + h[7] * py + h[8];
            double sx = (h[0] * px + h[1] * py + h[2]) / w;
            double sy = (h[3] * px + h[4] * py + h[5]) / w;
            uint8_t texel[4] = {0, 0, 0, 0};
            sample_bilinear(gt.photo, sx, sy, texel);
            for (int ch = 0; ch < out.c; ++ch) out.at(x, y, ch) = texel[ch];
        }
    return out;
}

EvalReport global_eval(const std::vector<PlaneImage>& planes,
                       const std::vector<WallPhoto>& photos) {
    if (planes.size() != photos.size())
        throw DimensionMismatch("one clicked photo per plane image required");
    EvalReport report;
    for (size_t i = 0; i < planes.size(); ++i) {
        Image8 rectified = rectify_photo(photos[i], planes[i].pixels.w, planes[i].pixels.h);
        EvalRow row;
        row.name = "plane_" + plane_name(planes[i].planeId);
        row.psnr = psnr(planes[i].pixels, rectified);
        row.ssim = ssim(planes[i].pixels, rectified);
        row.blur = blurriness(planes[i].pixels);
        report.rows.push_back(std::move(row));
    }
    fill_stats(report);
    return report;
}

namespace {

nlohmann::json stat_json(const EvalStat& s) {
    return {{"mean", s.mean}, {"stddev", s.stddev}};
}

}  // namespace

void save_eval_report(const EvalReport& report, const std::string& jsonPath) {
    nlohmann::json root;
    nlohmann::json rows = nlohmann::json::array();
    for (const EvalRow& r : report.rows)
        rows.push_back({{"name", r.name}, {"psnr", r.psnr}, {"ssim", r.ssim}, {"blur", r.blur}});
    root["rows"] = std::move(rows);
    root["aggregate"] = {{"psnr", stat_json(report.psnrStat)},
                         {"ssim", stat_json(report.ssimStat)},
                         {"blur", stat_json(report.blurStat)}};
    root["skipped"] = report.skipped;
    std::ofstream out(jsonPath);
    if (!out) throw IoError("cannot write " + jsonPath);
    out << root.dump(2) << "\n";
    if (!out.good()) throw IoError("write failed: " + jsonPath);
}

void save_eval_csv(const EvalReport& report, const std::string& csvPath) {
    std::ofstream out(csvPath);
    if (!out) throw IoError("cannot write " + csvPath);
    out << "name,psnr,ssim,blur\n";
    char line[256];
    for (const EvalRow& r : report.rows) {
        std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g\n", r.name.c_str(), r.psnr, r.ssim,
                      r.blur);
        out << line;
    }
    std::snprintf(line, sizeof line, "mean,%.9g,%.9g,%.9g\n", report.psnrStat.mean,
                  report.ssimStat.mean, report.blurStat.mean);
    out << line;
    std::snprintf(line, sizeof line, "stddev,%.9g,%.9g,%.9g\n", report.psnrStat.stddev,
                  report.ssimStat.stddev, report.blurStat.stddev);
    out << line;
    if (!out.good()) throw IoError("write failed: " + csvPath);
}

}  // namespace roomtex

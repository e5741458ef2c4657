#include "roomtex/post_texture.hpp"

#include <cmath>
#include <filesystem>

#include "roomtex/errors.hpp"
#include "roomtex/parallel.hpp"

namespace roomtex {

namespace {

std::array<uint8_t, 3> mean_color(const Image8& img) {
    double sum[3] = {0, 0, 0};
    size_t n = static_cast<size_t>(img.w) * img.h;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < 3; ++ch) sum[ch] += img.at(x, y, ch);
    std::array<uint8_t, 3> out{};
    for (int ch = 0; ch < 3; ++ch)
        out[ch] = static_cast<uint8_t>(std::lround(sum[ch] / std::max<size_t>(n, 1)));
    return out;
}

// In-image direction of the MBB align vector: the plane cameras point the
// floor image's +y (and the ceiling image's -y) along align; wall images have
// no align component, so their lattice anchors to the image x axis.
Vec2 align_in_image(int planeId) {
    if (planeId == kFloorPlaneId) return {0.0, 1.0};
    if (planeId == kCeilingPlaneId) return {0.0, -1.0};
    return {1.0, 0.0};
}

}  // namespace

PlaneImage sample_mode(const PlaneImage& target, const SampleSpec& spec, const MBB& mbb) {
    if (spec.sample.empty() || spec.sample.c < 3)
        throw MalformedData("sample_mode needs an RGB sample");
    if (spec.sampleWidth <= 0 || spec.sampleHeight <= 0 || spec.sampleOffset < 0)
        throw MalformedData("sample dimensions must be positive, offset non-negative");
    (void)mbb;  // orientation is already baked into the image by the plane camera

    double mpp = target.metersPerPixel;
    double halfW = spec.sampleWidth / mpp / 2.0;   // sample half extents, px
    double halfH = spec.sampleHeight / mpp / 2.0;
    double pitch0 = (spec.sampleWidth + spec.sampleOffset) / mpp;
    double pitch1 = (spec.sampleHeight + spec.sampleOffset) / mpp;

    double theta = spec.sampleAngle * kPi / 180.0;
    Vec2 base = align_in_image(target.planeId);
    Vec2 e0{base.x * std::cos(theta) - base.y * std::sin(theta),
            base.x * std::sin(theta) + base.y * std::cos(theta)};
    Vec2 e1{-e0.y, e0.x};

    std::array<uint8_t, 3> gutter = mean_color(spec.sample);
    double cx = target.pixels.w / 2.0, cy = target.pixels.h / 2.0;

    PlaneImage out;
    out.planeId = target.planeId;
    out.metersPerPixel = target.metersPerPixel;
    out.pixels = Image8(target.pixels.w, target.pixels.h, 3);
    out.mask = Image8(target.pixels.w, target.pixels.h, 1);
    parallel_for(static_cast<size_t>(out.pixels.h), [&](size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < out.pixels.w; ++x) {
            Vec2 d{x + 0.5 - cx, y + 0.5 - cy};
            double a = dot(d, e0), b = dot(d, e1);
            double ta = a - std::round(a / pitch0) * pitch0;
            double tb = b - std::round(b / pitch1) * pitch1;
            if (std::abs(ta) <= halfW && std::abs(tb) <= halfH) {
                double sx = (ta + halfW) / (2.0 * halfW) * spec.sample.w;
                double sy = (tb + halfH) / (2.0 * halfH) * spec.sample.h;
                uint8_t texel[4] = {0, 0, 0, 0};
                sample_bilinear(spec.sample, sx, sy, texel);
                for (int ch = 0; ch < 3; ++ch) out.pixels.at(x, y, ch) = texel[ch];
            } else {
                for (int ch = 0; ch < 3; ++ch) out.pixels.at(x, y, ch) = gutter[ch];
            }
        }
    });
    return out;
}

PlaneImage image_mode(const PlaneImage& target, const Image8& replacement) {
    if (replacement.empty() || replacement.c < 3)
        throw MalformedData("image_mode needs a non-empty RGB replacement");
    PlaneImage out;
    out.planeId = target.planeId;
    out.metersPerPixel = target.metersPerPixel;
    out.pixels = Image8(target.pixels.w, target.pixels.h, 3);
    out.mask = Image8(target.pixels.w, target.pixels.h, 1);
    double scaleX = double(replacement.w) / target.pixels.w;
    double scaleY = double(replacement.h) / target.pixels.h;
    parallel_for(static_cast<size_t>(out.pixels.h), [&](size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < out.pixels.w; ++x) {
            uint8_t texel[4] = {0, 0, 0, 0};
            sample_bilinear(replacement, (x + 0.5) * scaleX, (y + 0.5) * scaleY, texel);
            for (int ch = 0; ch < 3; ++ch) out.pixels.at(x, y, ch) = texel[ch];
        }
    });
    return out;
}

InpaintExport export_inpaint_job(const PlaneImage& plane, const std::string& jobsDir) {
    bool any = false;
    for (uint8_t v : plane.mask.px) any |= v != 0;
    if (!any) return InpaintExport::NoOp;
    std::string dir = jobsDir + "/" + plane_name(plane.planeId);
    std::filesystem::create_directories(dir);
    save_png(dir + "/image.png", plane.pixels);
    save_png(dir + "/mask.png", dilate(plane.mask, 2));
    return InpaintExport::Written;
}

PlaneImage import_inpaint_result(const PlaneImage& plane, const Image8& inpainted) {
    if (inpainted.w != plane.pixels.w || inpainted.h != plane.pixels.h ||
        inpainted.c != plane.pixels.c)
        throw DimensionMismatch("inpaint result does not match the plane image size");
    Image8 exported = dilate(plane.mask, 2);
    for (int y = 0; y < inpainted.h; ++y)
        for (int x = 0; x < inpainted.w; ++x) {
            if (exported.at(x, y)) continue;
            for (int ch = 0; ch < 3; ++ch) {
                int d = int(inpainted.at(x, y, ch)) - int(plane.pixels.at(x, y, ch));
                if (d < -1 || d > 1)
                    throw OutsideMaskModified("inpaint result changed pixels outside the mask");
            }
        }
    PlaneImage out;
    out.planeId = plane.planeId;
    out.metersPerPixel = plane.metersPerPixel;
    out.pixels = inpainted;
    out.mask = Image8(plane.pixels.w, plane.pixels.h, 1);
    return out;
}

}  // namespace roomtex

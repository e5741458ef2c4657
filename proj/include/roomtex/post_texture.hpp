#pragma once

#include <string>

#include "roomtex/image.hpp"
#include "roomtex/layout.hpp"
#include "roomtex/plane2image.hpp"

namespace roomtex {

// A texture swatch tiled over a plane image. Dimensions are metric so one
// spec works across planes of different pixel sizes.
struct SampleSpec {
    Image8 sample;             // RGB
    double sampleWidth = 0;    // m
    double sampleHeight = 0;   // m
    double sampleOffset = 0;   // m of gutter between consecutive samples
    double sampleAngle = 0;    // deg, lattice rotation about the image center
};

// Replaces the plane image with a lattice of the sample: pitch
// (sampleWidth + sampleOffset, sampleHeight + sampleOffset), one sample
// centered on the image center, hard tile edges, gutter pixels filled with
// the sample's mean color. At angle 0 the lattice's width axis follows the
// in-image direction of mbb.align for floor/ceiling targets (the plane
// camera orients those images along the MBB, so this is the direction the
// long room edge runs) and the image x axis for walls. Dimensions, plane id,
// and metersPerPixel are preserved; the untextured mask comes back cleared.
PlaneImage sample_mode(const PlaneImage& target, const SampleSpec& spec, const MBB& mbb);

// Replaces the plane image with `replacement` stretched (bilinear) to the
// plane's pixel dimensions; aspect mismatch stretches. A same-size
// replacement passes through bit-identically. Mask cleared.
PlaneImage image_mode(const PlaneImage& target, const Image8& replacement);

enum class InpaintExport {
    Written,  // job files created
    NoOp,     // mask empty, nothing to inpaint
};

// Writes jobsDir/<plane name>/image.png and mask.png for an external
// inpainting tool; the mask is the untextured mask dilated by 2 px, 255 =
// region to fill. An empty mask writes nothing.
InpaintExport export_inpaint_job(const PlaneImage& plane, const std::string& jobsDir);

// Accepts the tool's output for a previously exported plane. Pixels outside
// the exported (dilated) mask must match the original within 1 intensity
// level per channel; the returned image takes the result's pixels with the
// mask cleared.
// Throws DimensionMismatch, OutsideMaskModified.
PlaneImage import_inpaint_result(const PlaneImage& plane, const Image8& inpainted);

}  // namespace roomtex

#pragma once

#include "roomtex/camera.hpp"
#include "roomtex/image.hpp"
#include "roomtex/math.hpp"

namespace roomtex {

// One capture: an RGB image, its intrinsics, and the camera-to-world pose.
struct Frame {
    Image8 rgb;
    CameraIntrinsics K;
    Mat4 camToWorld = Mat4::identity();
};

inline Mat4 view_of(const Frame& f) { return rigid_inverse(f.camToWorld); }

inline Vec3 camera_center(const Frame& f) {
    return {f.camToWorld[0][3], f.camToWorld[1][3], f.camToWorld[2][3]};
}

}  // namespace roomtex

#pragma once

#include "roomtex/math.hpp"

namespace roomtex {

struct CameraIntrinsics {
    double fx = 0, fy = 0;  // focal lengths, px
    double cx = 0, cy = 0;  // principal point, px
    int width = 0, height = 0;
};

// Camera space: +x right, +y up, looking along -z (right-handed). Pixel space:
// origin top-left, +u right, +v down; a point at the optical axis lands on
// (cx, cy).
inline bool project_point(const CameraIntrinsics& K, const Mat4& viewFromWorld, const Vec3& p,
                          Vec2* px, double* depth = nullptr) {
    Vec3 c = viewFromWorld.transform_point(p);
    double zc = -c.z;
    if (zc <= 0) return false;
    px->x = K.cx + K.fx * c.x / zc;
    px->y = K.cy - K.fy * c.y / zc;
    if (depth) *depth = zc;
    return true;
}

}  // namespace roomtex

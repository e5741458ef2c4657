#pragma once

#include <memory>
#include <vector>

#include "roomtex/camera.hpp"
#include "roomtex/math.hpp"
#include "roomtex/mesh.hpp"

namespace roomtex {

// Axis-aligned BVH over mesh triangles for visibility queries. The ray test
// is the watertight shear-based construction, so a segment crossing a closed
// surface cannot slip between two triangles through their shared edge.
class TriangleBvh {
public:
    explicit TriangleBvh(const TriMesh& mesh);
    ~TriangleBvh();
    TriangleBvh(TriangleBvh&&) noexcept;
    TriangleBvh& operator=(TriangleBvh&&) noexcept;

    // True when any triangle other than skipFace intersects the segment
    // a + t*(b-a) with t in (tMin, tMax).
    bool segment_blocked(const Vec3& a, const Vec3& b, double tMin, double tMax,
                         int skipFace = -1) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// The fractional window keeps the ray from reporting its own endpoints: the
// face itself at t=0 and geometry touching the camera at t=1.
constexpr double kOcclusionTMin = 1e-4;
constexpr double kOcclusionTMax = 1.0 - 1e-4;

// True iff every vertex of the face projects strictly inside the image with
// positive depth and the segments from the vertices to the camera center are
// unobstructed by the rest of the mesh.
bool occlusion_test(const TriMesh& mesh, const TriangleBvh& bvh, int face,
                    const CameraIntrinsics& K, const Mat4& camToWorld);

}  // namespace roomtex

#pragma once

#include <cstdint>
#include <vector>

#include "roomtex/camera.hpp"
#include "roomtex/math.hpp"
#include "roomtex/mesh.hpp"

namespace roomtex {

// Per-pixel result of rasterization: which face owns the pixel, the
// perspective-correct texcoord there, and inverse view depth. Shading is a
// separate pass over this buffer, so atlas lookup, flat colors, and depth
// export all share one rasterization core.
struct GBuffer {
    int w = 0, h = 0;
    std::vector<int32_t> face;  // face index into the source mesh, -1 = background
    std::vector<double> u, v;   // interpolated texcoord (0 when the mesh has none)
    std::vector<double> invZ;   // 1 / view-space depth; 0 for background

    GBuffer() = default;
    GBuffer(int w_, int h_)
        : w(w_),
          h(h_),
          face(static_cast<size_t>(w_) * h_, -1),
          u(static_cast<size_t>(w_) * h_, 0.0),
          v(static_cast<size_t>(w_) * h_, 0.0),
          invZ(static_cast<size_t>(w_) * h_, 0.0) {}

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * w + x; }
};

struct RasterParams {
    double nearZ = 0.001;  // camera-space clip distance, m
    double farZ = 100.0;
    double depthEps = 1e-6;  // NDC units; within this, the earlier face keeps the pixel
};

// Edge-function rasterizer. Vertices are snapped to a 1/256-px subpixel grid
// and coverage is decided with exact integer arithmetic plus a top-left fill
// rule, so two triangles sharing an edge own each boundary pixel exactly once
// and identical inputs give bit-identical buffers. Triangles are clipped
// against the near plane and a wide guard band before snapping; faces are
// drawn in index order and a later fragment must beat the stored depth by
// more than depthEps (in NDC) to overwrite.
GBuffer rasterize_mesh(const TriMesh& mesh, const CameraIntrinsics& K, const Mat4& viewFromWorld,
                       const RasterParams& params = {});

}  // namespace roomtex

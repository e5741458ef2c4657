#include "roomtex/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roomtex {

namespace {

// 1/256-px snapping keeps every edge-function product within int64 as long as
// pixel coordinates stay below ~2^21; the guard band enforces that bound.
constexpr int kSubBits = 8;
constexpr double kSubScale = 1 << kSubBits;
// Clip |x|,|y| <= kGuardBand * depth: caps projected coordinates at
// fx * 400 + cx pixels regardless of how close a vertex sits to the camera.
constexpr double kGuardBand = 400.0;

struct ClipVert {
    Vec3 cam;     // camera-space position (z negative in front)
    double u, v;  // texcoord carried through clipping
};

// One clip plane: keep f(cam) >= 0. All planes used here are linear in the
// camera-space position, so attributes interpolate linearly at the crossing.
template <typename F>
int clip_polygon(const ClipVert* in, int n, ClipVert* out, F f) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const ClipVert& a = in[i];
        const ClipVert& b = in[(i + 1) % n];
        double fa = f(a.cam), fb = f(b.cam);
        if (fa >= 0) out[m++] = a;
        if ((fa >= 0) != (fb >= 0)) {
            double t = fa / (fa - fb);
            ClipVert x;
            x.cam = a.cam + (b.cam - a.cam) * t;
            x.u = a.u + (b.u - a.u) * t;
            x.v = a.v + (b.v - a.v) * t;
            out[m++] = x;
        }
    }
    return m;
}

struct ScreenVert {
    long long sx, sy;  // snapped to the subpixel grid
    double invZ;       // 1 / view depth
    double uoz, voz;   // texcoord / view depth
};

void raster_triangle(const ScreenVert& a, const ScreenVert& b, const ScreenVert& c, int faceId,
                     double ndcA, double ndcB, double depthEps, GBuffer* gb,
                     std::vector<double>* depth) {
    const ScreenVert* v0 = &a;
    const ScreenVert* v1 = &b;
    const ScreenVert* v2 = &c;
    long long area2 = (v1->sx - v0->sx) * (v2->sy - v0->sy) -
                      (v1->sy - v0->sy) * (v2->sx - v0->sx);
    if (area2 == 0) return;
    if (area2 < 0) {
        std::swap(v1, v2);
        area2 = -area2;
    }

    long long minX = std::min({v0->sx, v1->sx, v2->sx});
    long long maxX = std::max({v0->sx, v1->sx, v2->sx});
    long long minY = std::min({v0->sy, v1->sy, v2->sy});
    long long maxY = std::max({v0->sy, v1->sy, v2->sy});
    // Pixel centers sit at 256*i + 128 on the subpixel grid.
    int x0 = static_cast<int>(std::max<long long>(0, (minX - 128 + 255) >> kSubBits));
    int x1 = static_cast<int>(std::min<long long>(gb->w - 1, (maxX - 128) >> kSubBits));
    int y0 = static_cast<int>(std::max<long long>(0, (minY - 128 + 255) >> kSubBits));
    int y1 = static_cast<int>(std::min<long long>(gb->h - 1, (maxY - 128) >> kSubBits));
    if (x0 > x1 || y0 > y1) return;

    // Edge i runs from vertex i+1 to i+2; w_i > 0 puts the pixel strictly
    // inside that edge, w_i == 0 on it (top-left edges then count as inside).
    const ScreenVert* ev[3][2] = {{v1, v2}, {v2, v0}, {v0, v1}};
    long long w0[3], dx[3], dy[3];
    bool topLeft[3];
    for (int e = 0; e < 3; ++e) {
        long long ax = ev[e][0]->sx, ay = ev[e][0]->sy;
        long long bx = ev[e][1]->sx, by = ev[e][1]->sy;
        long long px = (static_cast<long long>(x0) << kSubBits) + 128;
        long long py = (static_cast<long long>(y0) << kSubBits) + 128;
        w0[e] = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        dx[e] = (ay - by) * (1LL << kSubBits);  // per +1 pixel in x
        dy[e] = (bx - ax) * (1LL << kSubBits);  // per +1 pixel in y
        topLeft[e] = by < ay || (by == ay && bx > ax);
    }

    double inv2A = 1.0 / static_cast<double>(area2);
    for (int y = y0; y <= y1; ++y) {
        long long w[3] = {w0[0], w0[1], w0[2]};
        for (int x = x0; x <= x1; ++x) {
            bool in = true;
            for (int e = 0; e < 3; ++e) {
                if (w[e] > 0) continue;
                if (w[e] < 0 || !topLeft[e]) {
                    in = false;
                    break;
                }
            }
            if (in) {
                double l0 = w[0] * inv2A, l1 = w[1] * inv2A, l2 = w[2] * inv2A;
                double iz = l0 * v0->invZ + l1 * v1->invZ + l2 * v2->invZ;
                if (iz > 0) {
                    double ndc = ndcA - ndcB * iz;
                    size_t i = gb->idx(x, y);
                    if (ndc <= 1.0 && ndc < (*depth)[i] - depthEps) {
                        (*depth)[i] = ndc;
                        gb->face[i] = faceId;
                        gb->invZ[i] = iz;
                        gb->u[i] = (l0 * v0->uoz + l1 * v1->uoz + l2 * v2->uoz) / iz;
                        gb->v[i] = (l0 * v0->voz + l1 * v1->voz + l2 * v2->voz) / iz;
                    }
                }
            }
            for (int e = 0; e < 3; ++e) w[e] += dx[e];
        }
        for (int e = 0; e < 3; ++e) w0[e] += dy[e];
    }
}

}  // namespace

GBuffer rasterize_mesh(const TriMesh& mesh, const CameraIntrinsics& K, const Mat4& viewFromWorld,
                       const RasterParams& params) {
    GBuffer gb(K.width, K.height);
    std::vector<double> depth(gb.face.size(), std::numeric_limits<double>::infinity());

    // ndc(z) = A - B / z for the standard perspective depth mapping.
    const double n = params.nearZ, f = params.farZ;
    const double ndcA = (f + n) / (f - n);
    const double ndcB = 2.0 * f * n / (f - n);

    const bool hasUv = !mesh.texcoords.empty();
    ClipVert poly[16], tmp[16];
    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& face = mesh.faces[fi];
        for (int k = 0; k < 3; ++k) {
            poly[k].cam = viewFromWorld.transform_point(mesh.vertices[face[k]]);
            poly[k].u = hasUv ? mesh.texcoords[face[k]].x : 0.0;
            poly[k].v = hasUv ? mesh.texcoords[face[k]].y : 0.0;
        }
        int count = 3;
        count = clip_polygon(poly, count, tmp, [&](const Vec3& c) { return -c.z - n; });
        count = clip_polygon(tmp, count, poly,
                             [](const Vec3& c) { return kGuardBand * -c.z - c.x; });
        count = clip_polygon(poly, count, tmp,
                             [](const Vec3& c) { return kGuardBand * -c.z + c.x; });
        count = clip_polygon(tmp, count, poly,
                             [](const Vec3& c) { return kGuardBand * -c.z - c.y; });
        count = clip_polygon(poly, count, tmp,
                             [](const Vec3& c) { return kGuardBand * -c.z + c.y; });
        if (count < 3) continue;

        ScreenVert sv[16];
        for (int k = 0; k < count; ++k) {
            double zc = -tmp[k].cam.z;
            double px = K.cx + K.fx * tmp[k].cam.x / zc;
            double py = K.cy - K.fy * tmp[k].cam.y / zc;
            sv[k].sx = std::llround(px * kSubScale);
            sv[k].sy = std::llround(py * kSubScale);
            sv[k].invZ = 1.0 / zc;
            sv[k].uoz = tmp[k].u * sv[k].invZ;
            sv[k].voz = tmp[k].v * sv[k].invZ;
        }
        for (int k = 1; k + 1 < count; ++k)
            raster_triangle(sv[0], sv[k], sv[k + 1], static_cast<int>(fi), ndcA, ndcB,
                            params.depthEps, &gb, &depth);
    }
    return gb;
}

}  // namespace roomtex

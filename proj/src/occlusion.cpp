#include "roomtex/occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roomtex {

namespace {

double comp(const Vec3& v, int k) { return k == 0 ? v.x : (k == 1 ? v.y : v.z); }

struct Box {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void grow(const Vec3& p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    void grow(const Box& b) {
        grow(b.lo);
        grow(b.hi);
    }
};

struct Node {
    Box box;
    int left = -1, right = -1;  // internal
    int start = 0, count = 0;   // leaf triangle range when count > 0
};

// Shear-based ray setup: the ray maps to the +z axis, triangles follow, and
// the 2D edge tests below become watertight (a segment crossing a shared
// edge registers on at least one of its triangles).
struct RayFrame {
    Vec3 org, dir;
    int kx, ky, kz;
    double sx, sy, sz;
};

RayFrame make_ray(const Vec3& a, const Vec3& b) {
    RayFrame r;
    r.org = a;
    r.dir = b - a;
    double ax = std::abs(r.dir.x), ay = std::abs(r.dir.y), az = std::abs(r.dir.z);
    r.kz = ax > ay ? (ax > az ? 0 : 2) : (ay > az ? 1 : 2);
    r.kx = (r.kz + 1) % 3;
    r.ky = (r.kx + 1) % 3;
    if (comp(r.dir, r.kz) < 0) std::swap(r.kx, r.ky);
    r.sx = comp(r.dir, r.kx) / comp(r.dir, r.kz);
    r.sy = comp(r.dir, r.ky) / comp(r.dir, r.kz);
    r.sz = 1.0 / comp(r.dir, r.kz);
    return r;
}

bool ray_hits_triangle(const RayFrame& r, const Vec3& p0, const Vec3& p1, const Vec3& p2,
                       double tMin, double tMax) {
    Vec3 A = p0 - r.org, B = p1 - r.org, C = p2 - r.org;
    double Az = comp(A, r.kz), Bz = comp(B, r.kz), Cz = comp(C, r.kz);
    double Ax = comp(A, r.kx) - r.sx * Az, Ay = comp(A, r.ky) - r.sy * Az;
    double Bx = comp(B, r.kx) - r.sx * Bz, By = comp(B, r.ky) - r.sy * Bz;
    double Cx = comp(C, r.kx) - r.sx * Cz, Cy = comp(C, r.ky) - r.sy * Cz;
    double U = Cx * By - Cy * Bx;
    double V = Ax * Cy - Ay * Cx;
    double W = Bx * Ay - By * Ax;
    if ((U < 0 || V < 0 || W < 0) && (U > 0 || V > 0 || W > 0)) return false;
    double det = U + V + W;
    if (det == 0) return false;
    double T = r.sz * (U * Az + V * Bz + W * Cz);
    if (det > 0) return T > tMin * det && T < tMax * det;
    return T < tMin * det && T > tMax * det;
}

bool segment_hits_box(const Vec3& a, const Vec3& dir, const Box& box, double tMin, double tMax) {
    for (int ax = 0; ax < 3; ++ax) {
        double o = comp(a, ax), d = comp(dir, ax);
        double lo = comp(box.lo, ax), hi = comp(box.hi, ax);
        if (d == 0) {
            if (o < lo || o > hi) return false;
            continue;
        }
        double t0 = (lo - o) / d;
        double t1 = (hi - o) / d;
        if (t0 > t1) std::swap(t0, t1);
        tMin = std::max(tMin, t0);
        tMax = std::min(tMax, t1);
        if (tMin > tMax) return false;
    }
    return true;
}

}  // namespace

struct TriangleBvh::Impl {
    const TriMesh* mesh;
    std::vector<int> order;  // triangle ids, leaf ranges index into this
    std::vector<Node> nodes;
    std::vector<Box> triBox;

    int build(int start, int count) {
        Node node;
        for (int i = 0; i < count; ++i) node.box.grow(triBox[order[start + i]]);
        int id = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (count <= 4) {
            nodes[id].start = start;
            nodes[id].count = count;
            return id;
        }
        Vec3 ext = node.box.hi - node.box.lo;
        int axis = ext.x > ext.y ? (ext.x > ext.z ? 0 : 2) : (ext.y > ext.z ? 1 : 2);
        int mid = count / 2;
        std::nth_element(order.begin() + start, order.begin() + start + mid,
                         order.begin() + start + count, [&](int ta, int tb) {
                             double ca = comp(triBox[ta].lo, axis) + comp(triBox[ta].hi, axis);
                             double cb = comp(triBox[tb].lo, axis) + comp(triBox[tb].hi, axis);
                             return ca < cb || (ca == cb && ta < tb);
                         });
        int l = build(start, mid);
        int r = build(start + mid, count - mid);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

TriangleBvh::TriangleBvh(const TriMesh& mesh) : impl_(new Impl) {
    impl_->mesh = &mesh;
    size_t n = mesh.faces.size();
    impl_->order.resize(n);
    impl_->triBox.resize(n);
    for (size_t i = 0; i < n; ++i) {
        impl_->order[i] = static_cast<int>(i);
        for (int k = 0; k < 3; ++k) impl_->triBox[i].grow(mesh.vertices[mesh.faces[i][k]]);
    }
    if (n > 0) impl_->build(0, static_cast<int>(n));
}

TriangleBvh::~TriangleBvh() = default;
TriangleBvh::TriangleBvh(TriangleBvh&&) noexcept = default;
TriangleBvh& TriangleBvh::operator=(TriangleBvh&&) noexcept = default;

bool TriangleBvh::segment_blocked(const Vec3& a, const Vec3& b, double tMin, double tMax,
                                  int skipFace) const {
    if (impl_->nodes.empty()) return false;
    RayFrame ray = make_ray(a, b);
    const TriMesh& mesh = *impl_->mesh;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = impl_->nodes[stack[--top]];
        if (!segment_hits_box(a, ray.dir, node.box, tMin, tMax)) continue;
        if (node.count > 0) {
            for (int i = 0; i < node.count; ++i) {
                int tri = impl_->order[node.start + i];
                if (tri == skipFace) continue;
                const auto& f = mesh.faces[tri];
                if (ray_hits_triangle(ray, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                      mesh.vertices[f[2]], tMin, tMax))
                    return true;
            }
        } else {
            stack[top++] = node.left;
            stack[top++] = node.right;
        }
    }
    return false;
}

bool occlusion_test(const TriMesh& mesh, const TriangleBvh& bvh, int face,
                    const CameraIntrinsics& K, const Mat4& camToWorld) {
    Mat4 view = rigid_inverse(camToWorld);
    Vec3 center{camToWorld[0][3], camToWorld[1][3], camToWorld[2][3]};
    for (int k = 0; k < 3; ++k) {
        const Vec3& vert = mesh.vertices[mesh.faces[face][k]];
        Vec2 px;
        if (!project_point(K, view, vert, &px)) return false;
        if (!(px.x > 0 && px.x < K.width && px.y > 0 && px.y < K.height)) return false;
        if (bvh.segment_blocked(vert, center, kOcclusionTMin, kOcclusionTMax, face)) return false;
    }
    return true;
}

}  // namespace roomtex

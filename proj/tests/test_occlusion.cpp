#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "roomtex/occlusion.hpp"
#include "roomtex/rng.hpp"

using namespace roomtex;

namespace {

CameraIntrinsics small_cam() { return {300, 300, 160, 120, 320, 240}; }

void add_tri(TriMesh& m, const Vec3& a, const Vec3& b, const Vec3& c) {
    int base = static_cast<int>(m.vertices.size());
    m.vertices.push_back(a);
    m.vertices.push_back(b);
    m.vertices.push_back(c);
    m.faces.push_back({base, base + 1, base + 2});
    m.faceLabels.push_back(kObjectLabel);
}

// Random cluster of free-floating triangles around the origin.
TriMesh random_scene(Rng& rng, int count) {
    TriMesh m;
    for (int i = 0; i < count; ++i) {
        Vec3 c{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3 v[3];
        for (auto& p : v)
            p = c + Vec3{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
        add_tri(m, v[0], v[1], v[2]);
    }
    return m;
}

Vec3 random_eye(Rng& rng) {
    for (;;) {
        Vec3 e{rng.uniform(-4, 4), rng.uniform(-2.5, 2.5), rng.uniform(-4, 4)};
        if (norm(e) >= 2.8 && std::hypot(e.x, e.z) > 0.5) return e;
    }
}

// Mirrors the visibility contract with brute force: every vertex lands
// strictly inside the frame at positive depth, and no other triangle cuts the
// vertex-to-camera segments.
bool oracle_visible(const TriMesh& m, int face, const CameraIntrinsics& K, const Vec3& eye,
                    const Mat4& view) {
    for (int k = 0; k < 3; ++k) {
        const Vec3& vert = m.vertices[m.faces[face][k]];
        Vec2 px;
        if (!project_point(K, view, vert, &px)) return false;
        if (!(px.x > 0 && px.x < K.width && px.y > 0 && px.y < K.height)) return false;
        for (size_t j = 0; j < m.faces.size(); ++j) {
            if (static_cast<int>(j) == face) continue;
            const auto& f = m.faces[j];
            if (oracle::segment_hits_triangle(vert, eye, m.vertices[f[0]], m.vertices[f[1]],
                                              m.vertices[f[2]], kOcclusionTMin, kOcclusionTMax))
                return false;
        }
    }
    return true;
}

bool oracle_blocked(const TriMesh& m, const Vec3& a, const Vec3& b, double tMin, double tMax,
                    int skipFace = -1) {
    for (size_t j = 0; j < m.faces.size(); ++j) {
        if (static_cast<int>(j) == skipFace) continue;
        const auto& f = m.faces[j];
        if (oracle::segment_hits_triangle(a, b, m.vertices[f[0]], m.vertices[f[1]],
                                          m.vertices[f[2]], tMin, tMax))
            return true;
    }
    return false;
}

// Closed unit cube, each quad fanned from its first corner so the face
// diagonals have exactly representable midpoints.
TriMesh cube_mesh() {
    TriMesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({static_cast<double>(i & 1), static_cast<double>((i >> 1) & 1),
                              static_cast<double>((i >> 2) & 1)});
    const int quads[6][4] = {{0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1},
                             {4, 5, 7, 6}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
        m.faceLabels.push_back(kObjectLabel);
        m.faceLabels.push_back(kObjectLabel);
    }
    return m;
}

}  // namespace

TEST_CASE("a lone triangle in front of the camera is fully visible") {
    TriMesh m;
    add_tri(m, {-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0, 0.5, 0});
    TriangleBvh bvh(m);
    Mat4 view = look_at({0, 0, 2}, {0, 0, 0}, {0, 1, 0});
    CHECK(occlusion_test(m, bvh, 0, small_cam(), rigid_inverse(view)));
}

TEST_CASE("an obstacle between the camera and the face hides it") {
    Mat4 view = look_at({0, 0, 2}, {0, 0, 0}, {0, 1, 0});
    Mat4 camToWorld = rigid_inverse(view);
    CameraIntrinsics K = small_cam();

    TriMesh m;
    add_tri(m, {-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0, 0.5, 0});
    // Halfway to the camera the vertex rays pass through (+-0.25, -0.25) and
    // (0, 0.25); this triangle covers all three while staying in frame.
    add_tri(m, {-0.45, -0.35, 1}, {0.45, -0.35, 1}, {0, 0.38, 1});
    {
        TriangleBvh bvh(m);
        CHECK_FALSE(occlusion_test(m, bvh, 0, K, camToWorld));
        // The blocker itself has a clear line to the camera.
        CHECK(occlusion_test(m, bvh, 1, K, camToWorld));
    }

    // Same obstacle behind the face instead: no effect.
    m.vertices[3] = {-2, -2, -1};
    m.vertices[4] = {2, -2, -1};
    m.vertices[5] = {0, 3, -1};
    {
        TriangleBvh bvh(m);
        CHECK(occlusion_test(m, bvh, 0, K, camToWorld));
    }

    // Or behind the camera: also no effect.
    m.vertices[3] = {-2, -2, 3};
    m.vertices[4] = {2, -2, 3};
    m.vertices[5] = {0, 3, 3};
    {
        TriangleBvh bvh(m);
        CHECK(occlusion_test(m, bvh, 0, K, camToWorld));
    }
}

TEST_CASE("faces that project off-frame or behind the camera are rejected") {
    TriMesh m;
    add_tri(m, {-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0, 0.5, 0});
    TriangleBvh bvh(m);
    CameraIntrinsics K = small_cam();

    // Looking away from the triangle: vertices have negative depth.
    Mat4 away = look_at({0, 0, 2}, {0, 0, 4}, {0, 1, 0});
    CHECK_FALSE(occlusion_test(m, bvh, 0, K, rigid_inverse(away)));

    // So close that the corners spill past the frame edges.
    Mat4 close = look_at({0, 0, 0.2}, {0, 0, 0}, {0, 1, 0});
    CHECK_FALSE(occlusion_test(m, bvh, 0, K, rigid_inverse(close)));

    // A vertex exactly on the image border also fails the strict bounds.
    CameraIntrinsics tight{300, 300, 160, 120, 320, 240};
    // Place the camera so the apex projects at py = cy - fy*0.5/2 = 45 (inside),
    // then shrink the frame height so it falls on the top edge.
    tight.height = 2 * (120 - 45);
    Mat4 view = look_at({0, 0, 2}, {0, 0, 0}, {0, 1, 0});
    tight.cy = tight.height / 2.0;
    // Apex now at py = cy - 75 = 0: exactly on the border.
    CHECK_FALSE(occlusion_test(m, bvh, 0, tight, rigid_inverse(view)));
}

TEST_CASE("random scenes match an exhaustive ray test") {
    Rng rng(0x0cc1u);
    int visible = 0, hidden = 0;
    for (int scene = 0; scene < 40; ++scene) {
        Rng sr = rng.fork(scene);
        TriMesh m = random_scene(sr, sr.uniform_int(1, 50));
        TriangleBvh bvh(m);
        Vec3 eye = random_eye(sr);
        Mat4 view = look_at(eye, {0, 0, 0}, {0, 1, 0});
        Mat4 camToWorld = rigid_inverse(view);
        CameraIntrinsics K = small_cam();
        for (size_t f = 0; f < m.faces.size(); ++f) {
            bool expect = oracle_visible(m, static_cast<int>(f), K, eye, view);
            bool got = occlusion_test(m, bvh, static_cast<int>(f), K, camToWorld);
            CHECK(got == expect);
            (expect ? visible : hidden)++;
        }
    }
    // Both outcomes must actually occur or the comparison proves nothing.
    CHECK(visible > 100);
    CHECK(hidden > 100);
}

TEST_CASE("segment queries agree with brute force over random scenes") {
    Rng rng(0xbeefu);
    int blockedCount = 0, clearCount = 0;
    for (int scene = 0; scene < 30; ++scene) {
        Rng sr = rng.fork(scene);
        TriMesh m = random_scene(sr, sr.uniform_int(5, 50));
        TriangleBvh bvh(m);
        for (int q = 0; q < 60; ++q) {
            Vec3 a{sr.uniform(-1.6, 1.6), sr.uniform(-1.6, 1.6), sr.uniform(-1.6, 1.6)};
            Vec3 b{sr.uniform(-1.6, 1.6), sr.uniform(-1.6, 1.6), sr.uniform(-1.6, 1.6)};
            bool expect = oracle_blocked(m, a, b, 0.0, 1.0);
            CHECK(bvh.segment_blocked(a, b, 0.0, 1.0) == expect);
            (expect ? blockedCount : clearCount)++;

            // Clipped window plus a skipped face, as the visibility test uses it.
            int skip = sr.uniform_int(0, static_cast<int>(m.faces.size()) - 1);
            bool expectSkip = oracle_blocked(m, a, b, kOcclusionTMin, kOcclusionTMax, skip);
            CHECK(bvh.segment_blocked(a, b, kOcclusionTMin, kOcclusionTMax, skip) == expectSkip);
        }
    }
    CHECK(blockedCount > 200);
    CHECK(clearCount > 200);
}

TEST_CASE("segments leaving a closed box are always caught") {
    TriMesh m = cube_mesh();
    TriangleBvh bvh(m);
    Vec3 center{0.5, 0.5, 0.5};

    // Aim exactly at every triangle-edge midpoint and every corner: the
    // crossing point sits on a shared edge or vertex, where per-triangle
    // tests could each claim a miss if they disagreed about the boundary.
    std::vector<Vec3> targets;
    for (const auto& f : m.faces)
        for (int e = 0; e < 3; ++e) {
            Vec3 mid = (m.vertices[f[e]] + m.vertices[f[(e + 1) % 3]]) * 0.5;
            targets.push_back(mid);
        }
    for (const auto& v : m.vertices) targets.push_back(v);

    for (const Vec3& t : targets) {
        if (t == center) continue;  // edge midpoints at the exact center, if any
        Vec3 b = t * 2.0 - center;  // crossing at exactly t = 0.5
        CHECK(bvh.segment_blocked(center, b, kOcclusionTMin, kOcclusionTMax));
        CHECK(bvh.segment_blocked(center, b, 0.0, 1.0));
    }

    // Random interior-to-exterior segments can't sneak out either.
    Rng rng(0xcafeu);
    for (int i = 0; i < 500; ++i) {
        Vec3 a{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        Vec3 b;
        do {
            b = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        } while (b.x >= 0 && b.x <= 1 && b.y >= 0 && b.y <= 1 && b.z >= 0 && b.z <= 1);
        CHECK(bvh.segment_blocked(a, b, 0.0, 1.0));
    }
}

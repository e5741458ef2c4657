#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "roomtex/raster.hpp"
#include "roomtex/rng.hpp"

using namespace roomtex;

namespace {

// A camera whose pixel coordinates equal world (x, -y) on the plane z = -1:
// fx = fy = 1, principal point at the origin. Lets tests author triangles
// directly in screen space.
CameraIntrinsics screen_cam(int w, int h) { return {1, 1, 0, 0, w, h}; }

TriMesh screen_mesh(const std::vector<std::array<Vec2, 3>>& tris) {
    TriMesh m;
    for (const auto& t : tris) {
        int base = static_cast<int>(m.vertices.size());
        for (const Vec2& p : t) m.vertices.push_back({p.x, -p.y, -1.0});
        m.faces.push_back({base, base + 1, base + 2});
        m.faceLabels.push_back(kObjectLabel);
    }
    return m;
}

// Owner map straight from the oracle: first triangle in draw order whose
// snapped coverage test passes (equal depths, so the earlier face keeps ties).
std::vector<int> oracle_owners(const std::vector<std::array<Vec2, 3>>& tris, int w, int h) {
    std::vector<int> own(static_cast<size_t>(w) * h, -1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            for (size_t t = 0; t < tris.size(); ++t) {
                oracle::SnappedTri st = oracle::snap_tri(tris[t][0], tris[t][1], tris[t][2]);
                if (oracle::covers_pixel(st, x, y)) {
                    own[static_cast<size_t>(y) * w + x] = static_cast<int>(t);
                    break;
                }
            }
        }
    return own;
}

double tri_area(const std::array<Vec2, 3>& t) {
    return std::abs(cross(t[1] - t[0], t[2] - t[0])) / 2;
}

double tri_perimeter(const std::array<Vec2, 3>& t) {
    return norm(t[1] - t[0]) + norm(t[2] - t[1]) + norm(t[0] - t[2]);
}

}  // namespace

TEST_CASE("pixel coverage matches the snapped edge-function definition") {
    const int W = 48, H = 48;
    Rng rng(2024);
    for (int iter = 0; iter < 150; ++iter) {
        std::vector<std::array<Vec2, 3>> tris;
        int n = rng.uniform_int(1, 4);
        for (int i = 0; i < n; ++i) {
            std::array<Vec2, 3> t;
            double scale = rng.uniform(2, 40);
            Vec2 c{rng.uniform(-8, W + 8), rng.uniform(-8, H + 8)};
            for (Vec2& p : t)
                p = {c.x + rng.uniform(-scale, scale), c.y + rng.uniform(-scale, scale)};
            tris.push_back(t);
        }
        GBuffer gb = rasterize_mesh(screen_mesh(tris), screen_cam(W, H), Mat4::identity());
        std::vector<int> expect = oracle_owners(tris, W, H);
        for (size_t i = 0; i < expect.size(); ++i) CHECK(gb.face[i] == expect[i]);
    }
}

TEST_CASE("triangles sharing an edge own boundary pixels exactly once") {
    const int W = 64, H = 64;
    Rng rng(77);
    for (int iter = 0; iter < 60; ++iter) {
        // Random quad split along its diagonal; vertices deliberately on
        // fractional coordinates so edges cross pixel centers obliquely. The
        // split is only a partition when b and d sit strictly on opposite
        // sides of the diagonal, so degenerate draws are rejected.
        Vec2 a, b, c, d;
        do {
            a = {rng.uniform(2, 30), rng.uniform(2, 30)};
            b = {rng.uniform(34, 62), rng.uniform(2, 30)};
            c = {rng.uniform(34, 62), rng.uniform(34, 62)};
            d = {rng.uniform(2, 30), rng.uniform(34, 62)};
        } while (cross(c - a, b - a) > -5.0 || cross(c - a, d - a) < 5.0);
        std::array<Vec2, 3> t0{a, b, c}, t1{a, c, d};

        GBuffer joint = rasterize_mesh(screen_mesh({t0, t1}), screen_cam(W, H), Mat4::identity());
        GBuffer lone0 = rasterize_mesh(screen_mesh({t0}), screen_cam(W, H), Mat4::identity());
        GBuffer lone1 = rasterize_mesh(screen_mesh({t1}), screen_cam(W, H), Mat4::identity());
        for (size_t i = 0; i < joint.face.size(); ++i) {
            bool in0 = lone0.face[i] == 0, in1 = lone1.face[i] == 0;
            CHECK(!(in0 && in1));  // diagonal pixels owned by exactly one side
            int expect = in0 ? 0 : in1 ? 1 : -1;
            CHECK(joint.face[i] == expect);
        }
    }
}

TEST_CASE("a triangle fan around a shared vertex covers its disc without holes") {
    const int W = 64, H = 64;
    Vec2 center{31.37, 32.61};
    const int spokes = 9;
    std::vector<Vec2> ring;
    for (int i = 0; i < spokes; ++i) {
        double ang = 2 * kPi * i / spokes + 0.31;
        ring.push_back({center.x + 27 * std::cos(ang), center.y + 27 * std::sin(ang)});
    }
    std::vector<std::array<Vec2, 3>> tris;
    for (int i = 0; i < spokes; ++i)
        tris.push_back({center, ring[i], ring[(i + 1) % spokes]});

    GBuffer gb = rasterize_mesh(screen_mesh(tris), screen_cam(W, H), Mat4::identity());
    int covered = 0;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            int count = 0;
            for (const auto& t : tris)
                if (oracle::covers_pixel(oracle::snap_tri(t[0], t[1], t[2]), x, y)) ++count;
            CHECK(count <= 1);  // spokes never double-own a pixel
            int face = gb.face[gb.idx(x, y)];
            CHECK((face >= 0) == (count == 1));
            if (face >= 0) {
                ++covered;
                CHECK(oracle::covers_pixel(
                          oracle::snap_tri(tris[face][0], tris[face][1], tris[face][2]), x, y));
            }
        }
    // The disc has radius 27: the fan interior must be solid, not just sparse.
    CHECK(covered > 2000);
}

TEST_CASE("covered pixel count tracks triangle area") {
    const int W = 96, H = 96;
    Rng rng(5150);
    for (int iter = 0; iter < 40; ++iter) {
        std::array<Vec2, 3> t;
        for (Vec2& p : t) p = {rng.uniform(4, 92), rng.uniform(4, 92)};
        GBuffer gb = rasterize_mesh(screen_mesh({t}), screen_cam(W, H), Mat4::identity());
        int covered = 0;
        for (int32_t f : gb.face) covered += f >= 0;
        double area = tri_area(t);
        CHECK(std::abs(covered - area) <= 1.5 * tri_perimeter(t) + 4);
    }
}

TEST_CASE("perspective-correct texcoords follow the plane homography") {
    // Planar quad tilted in depth; texcoords are a projective (not affine)
    // function of pixel position, which a homography captures exactly.
    TriMesh m;
    m.vertices = {{-1, -1, 0}, {1, -1, -0.8}, {1, 1, -0.8}, {-1, 1, 0}};
    m.texcoords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    m.faces = {{0, 1, 2}, {0, 2, 3}};
    m.faceLabels = {kObjectLabel, kObjectLabel};

    CameraIntrinsics K{300, 300, 160, 120, 320, 240};
    Mat4 view = look_at({0, 0, 3}, {0, 0, 0}, {0, 1, 0});
    GBuffer gb = rasterize_mesh(m, K, view);

    Vec2 src[4], dst[4];
    for (int i = 0; i < 4; ++i) {
        REQUIRE(project_point(K, view, m.vertices[i], &src[i]));
        dst[i] = m.texcoords[i];
    }
    oracle::Homography hom;
    REQUIRE(oracle::fit_homography(src, dst, &hom));

    int covered = 0;
    for (int y = 0; y < K.height; ++y)
        for (int x = 0; x < K.width; ++x) {
            size_t i = gb.idx(x, y);
            if (gb.face[i] < 0) continue;
            ++covered;
            Vec2 expect = hom.map({x + 0.5, y + 0.5});
            CHECK(gb.u[i] == doctest::Approx(expect.x).epsilon(1e-4));
            CHECK(gb.v[i] == doctest::Approx(expect.y).epsilon(1e-4));
        }
    CHECK(covered > 5000);
}

TEST_CASE("depth test keeps the nearer surface regardless of draw order") {
    auto quad = [](double z, double half) {
        std::vector<Vec3> v = {{-half, -half, z}, {half, -half, z}, {half, half, z},
                               {-half, half, z}};
        return v;
    };
    CameraIntrinsics K{100, 100, 32, 32, 64, 64};
    for (bool frontFirst : {false, true}) {
        TriMesh m;
        auto add = [&m](const std::vector<Vec3>& vs) {
            int b = static_cast<int>(m.vertices.size());
            m.vertices.insert(m.vertices.end(), vs.begin(), vs.end());
            m.faces.push_back({b, b + 1, b + 2});
            m.faces.push_back({b, b + 2, b + 3});
            m.faceLabels.insert(m.faceLabels.end(), 2, kObjectLabel);
        };
        if (frontFirst) {
            add(quad(-1, 0.1));   // near, small
            add(quad(-2, 0.45));  // far, large
        } else {
            add(quad(-2, 0.45));
            add(quad(-1, 0.1));
        }
        GBuffer gb = rasterize_mesh(m, K, Mat4::identity());
        int nearFaceLo = frontFirst ? 0 : 2;
        // Center pixel is inside both quads: the z=-1 quad must win.
        int centerFace = gb.face[gb.idx(32, 32)];
        CHECK(centerFace >= nearFaceLo);
        CHECK(centerFace < nearFaceLo + 2);
        CHECK(gb.invZ[gb.idx(32, 32)] == doctest::Approx(1.0).epsilon(1e-12));
        // A corner of the big quad is outside the small one: z=-2 shows.
        Vec2 px;
        REQUIRE(project_point(K, Mat4::identity(), {0.4, 0.4, -2}, &px));
        int fx = static_cast<int>(px.x), fy = static_cast<int>(px.y);
        CHECK(gb.invZ[gb.idx(fx, fy)] == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("NDC depth epsilon: ties keep the first face, real gaps overwrite") {
    // With near=0.001 and far=100, ndc(z) = A - B/z with B ~= 2.0e-3, so an
    // inverse-depth gap of 1e-4 (~2e-7 NDC) ties while 1e-3 (~2e-6) beats it.
    CameraIntrinsics K{100, 100, 32, 32, 64, 64};
    auto two_quads = [&](double invZ2) {
        TriMesh m;
        double zs[2] = {-1.0, -1.0 / invZ2};
        for (double z : zs) {
            int b = static_cast<int>(m.vertices.size());
            for (Vec2 c : {Vec2{-0.3, -0.3}, Vec2{0.3, -0.3}, Vec2{0.3, 0.3}, Vec2{-0.3, 0.3}})
                m.vertices.push_back({c.x, c.y, z});
            m.faces.push_back({b, b + 1, b + 2});
            m.faces.push_back({b, b + 2, b + 3});
            m.faceLabels.insert(m.faceLabels.end(), 2, kObjectLabel);
        }
        return rasterize_mesh(m, K, Mat4::identity());
    };
    GBuffer tie = two_quads(1.0 + 1e-4);
    CHECK(tie.face[tie.idx(32, 32)] < 2);  // second copy is within the epsilon: first kept
    GBuffer gap = two_quads(1.0 + 1e-3);
    CHECK(gap.face[gap.idx(32, 32)] >= 2);  // clearly nearer: overwritten
}

TEST_CASE("triangles straddling the camera are clipped at the near plane") {
    CameraIntrinsics K{100, 100, 32, 32, 64, 64};
    RasterParams params;
    Vec3 A{0, -0.2, -2}, B{0.3, -0.2, 1}, C{-0.3, -0.2, 1};  // B, C behind the camera

    TriMesh m;
    m.vertices = {A, B, C};
    m.faces = {{0, 1, 2}};
    m.faceLabels = {kObjectLabel};
    GBuffer gb = rasterize_mesh(m, K, Mat4::identity(), params);

    // Reference: clip the two crossing edges at z_view = -near directly.
    auto clip_at_near = [&](const Vec3& in, const Vec3& out) {
        double t = (-params.nearZ - in.z) / (out.z - in.z);
        return in + (out - in) * t;
    };
    Vec3 pab = clip_at_near(A, B), pac = clip_at_near(A, C);
    auto to_px = [&](const Vec3& p) {
        Vec2 px;
        REQUIRE(project_point(K, Mat4::identity(), p, &px));
        return px;
    };
    Vec2 sa = to_px(A), sb = to_px(pab), sc = to_px(pac);
    oracle::SnappedTri st = oracle::snap_tri(sa, sb, sc);
    int covered = 0;
    for (int y = 0; y < K.height; ++y)
        for (int x = 0; x < K.width; ++x) {
            bool expect = oracle::covers_pixel(st, x, y);
            CHECK((gb.face[gb.idx(x, y)] == 0) == expect);
            covered += expect;
            if (gb.face[gb.idx(x, y)] == 0) {
                CHECK(gb.invZ[gb.idx(x, y)] > 0);
                CHECK(gb.invZ[gb.idx(x, y)] <= 1.0 / params.nearZ + 1e-9);
            }
        }
    CHECK(covered > 0);

    // Entirely behind the camera: nothing rendered.
    TriMesh behind;
    behind.vertices = {{0, 0, 1}, {1, 0, 2}, {0, 1, 2}};
    behind.faces = {{0, 1, 2}};
    behind.faceLabels = {kObjectLabel};
    GBuffer none = rasterize_mesh(behind, K, Mat4::identity(), params);
    for (int32_t f : none.face) CHECK(f == -1);

    // A vertex exactly on the near plane is kept, not dropped.
    TriMesh touch;
    touch.vertices = {{0, 0, -params.nearZ}, {0.2, 0, -2}, {0, 0.2, -2}};
    touch.faces = {{0, 1, 2}};
    touch.faceLabels = {kObjectLabel};
    GBuffer tgb = rasterize_mesh(touch, K, Mat4::identity(), params);
    int tcov = 0;
    for (int32_t f : tgb.face) tcov += f == 0;
    CHECK(tcov > 0);
}

TEST_CASE("a fronto-parallel full-frame quad yields the exact texcoord lattice") {
    // 2m x 1m plane seen by a camera at distance height/2 with fx=fy=H/2:
    // the quad fills the frame edge-to-edge and uv is linear in the pixel.
    const int W = 1000, H = 500;
    TriMesh m;
    m.vertices = {{-1, -0.5, 0}, {1, -0.5, 0}, {1, 0.5, 0}, {-1, 0.5, 0}};
    m.texcoords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};  // v = 0 at the bottom edge
    m.faces = {{0, 1, 2}, {0, 2, 3}};
    m.faceLabels = {kObjectLabel, kObjectLabel};

    CameraIntrinsics K{H / 2.0, H / 2.0, W / 2.0, H / 2.0, W, H};
    Mat4 view = look_at({0, 0, 0.5}, {0, 0, 0}, {0, 1, 0});
    GBuffer gb = rasterize_mesh(m, K, view);

    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            size_t i = gb.idx(x, y);
            REQUIRE(gb.face[i] >= 0);
            CHECK(gb.u[i] == doctest::Approx((x + 0.5) / W).epsilon(1e-9));
            CHECK(gb.v[i] == doctest::Approx(1.0 - (y + 0.5) / H).epsilon(1e-9));
            CHECK(gb.invZ[i] == doctest::Approx(2.0).epsilon(1e-12));
        }
}

TEST_CASE("rasterization is bit-deterministic") {
    Rng rng(31337);
    std::vector<std::array<Vec2, 3>> tris;
    for (int i = 0; i < 12; ++i) {
        std::array<Vec2, 3> t;
        for (Vec2& p : t) p = {rng.uniform(-10, 70), rng.uniform(-10, 70)};
        tris.push_back(t);
    }
    TriMesh m = screen_mesh(tris);
    GBuffer a = rasterize_mesh(m, screen_cam(64, 64), Mat4::identity());
    GBuffer b = rasterize_mesh(m, screen_cam(64, 64), Mat4::identity());
    CHECK(a.face == b.face);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.invZ == b.invZ);
}

TEST_CASE("huge triangles pass through the guard band without artifacts") {
    // Vertices project to ~1e5 px off-screen; the guard band clips them, but
    // pixels decisively inside/outside the original triangle keep their
    // classification.
    CameraIntrinsics K{100, 100, 32, 32, 64, 64};
    TriMesh m;
    m.vertices = {{-1000, -300, -1}, {1000, -300, -1}, {0.1, 900, -1}};
    m.faces = {{0, 1, 2}};
    m.faceLabels = {kObjectLabel};
    GBuffer gb = rasterize_mesh(m, K, Mat4::identity());

    Vec2 s[3];
    for (int i = 0; i < 3; ++i) REQUIRE(project_point(K, Mat4::identity(), m.vertices[i], &s[i]));
    int checked = 0;
    for (int y = 0; y < K.height; ++y)
        for (int x = 0; x < K.width; ++x) {
            Vec2 p{x + 0.5, y + 0.5};
            double dmin = std::min({oracle::point_segment_distance(s[0], s[1], p),
                                    oracle::point_segment_distance(s[1], s[2], p),
                                    oracle::point_segment_distance(s[2], s[0], p)});
            if (dmin < 1.0) continue;  // near an edge: snap/clip may go either way
            bool inside = oracle::winding_number_inside({s[0], s[1], s[2]}, p);
            CHECK((gb.face[gb.idx(x, y)] == 0) == inside);
            ++checked;
        }
    CHECK(checked > 3000);

    // Entirely off-screen: empty buffer, no crash.
    TriMesh off;
    off.vertices = {{200, 200, -1}, {300, 200, -1}, {200, 300, -1}};
    off.faces = {{0, 1, 2}};
    off.faceLabels = {kObjectLabel};
    GBuffer ogb = rasterize_mesh(off, K, Mat4::identity());
    for (int32_t f : ogb.face) CHECK(f == -1);
}

TEST_CASE("meshes without texcoords rasterize with zeroed uv") {
    TriMesh m = screen_mesh({{Vec2{5, 5}, Vec2{40, 8}, Vec2{20, 45}}});
    GBuffer gb = rasterize_mesh(m, screen_cam(48, 48), Mat4::identity());
    int covered = 0;
    for (size_t i = 0; i < gb.face.size(); ++i) {
        if (gb.face[i] < 0) continue;
        ++covered;
        CHECK(gb.u[i] == 0.0);
        CHECK(gb.v[i] == 0.0);
    }
    CHECK(covered > 400);
}

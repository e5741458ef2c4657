#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "roomtex/errors.hpp"
#include "roomtex/planner.hpp"
#include "roomtex/rng.hpp"

using namespace roomtex;

namespace {

CameraIntrinsics phone_k() {
    return {720, 720, 540, 720, 1080, 1440};
}

SubPlane flat_sub(double w, double h) {
    SubPlane s;
    s.u0 = 0;
    s.v0 = 0;
    s.u1 = w;
    s.v1 = h;
    s.width = w;
    s.height = h;
    s.center = {0, 0, 0};
    return s;
}

// Validity invariant shared by several cases: camera strictly in the room,
// distance within bounds, all four subplane corners strictly inside the image
// per the independent projection oracle.
void check_plan_validity(const CapturePlan& plan, const RoomLayout& layout,
                         const CameraIntrinsics& K, const PlannerParams& params) {
    const std::vector<Vec2>& poly = layout.closed ? layout.loop : layout.hull;
    for (const PlanEntry& e : plan.entries) {
        CHECK(e.distance <= params.maxDistance);
        CHECK(oracle::winding_number_inside(poly, e.cameraPos.xz()));
        CHECK(e.cameraPos.y ==
              doctest::Approx(layout.floorHeight + params.cameraHeight).epsilon(1e-12));

        const PlaneInfo* wall = nullptr;
        for (const PlaneInfo& w : layout.walls)
            if (w.id == e.subplane.parentId) wall = &w;
        REQUIRE(wall != nullptr);
        PlaneAxes ax = wall_axes(*wall);
        Vec3 origin = wall->center - ax.u * (wall->width / 2) - ax.v * (wall->height / 2);
        const double cu[4] = {e.subplane.u0, e.subplane.u1, e.subplane.u1, e.subplane.u0};
        const double cv[4] = {e.subplane.v0, e.subplane.v0, e.subplane.v1, e.subplane.v1};
        for (int k = 0; k < 4; ++k) {
            Vec3 corner = origin + ax.u * cu[k] + ax.v * cv[k];
            Vec2 px;
            REQUIRE(oracle::pinhole_project(e.cameraPos, e.lookAt, e.up, K.fx, K.fy, K.cx, K.cy,
                                            corner, &px));
            CHECK(px.x > 0);
            CHECK(px.x < K.width);
            CHECK(px.y > 0);
            CHECK(px.y < K.height);
        }
    }
}

// Subplanes of one wall must tile the wall rectangle exactly.
void check_tiling(const CapturePlan& plan, const PlaneInfo& wall) {
    double total = 0;
    for (const PlanEntry& e : plan.entries) {
        CHECK(e.subplane.parentId == wall.id);
        CHECK(e.subplane.u0 >= -1e-12);
        CHECK(e.subplane.v0 >= -1e-12);
        CHECK(e.subplane.u1 <= wall.width + 1e-12);
        CHECK(e.subplane.v1 <= wall.height + 1e-12);
        total += e.subplane.width * e.subplane.height;
    }
    CHECK(total == doctest::Approx(wall.width * wall.height).epsilon(1e-9));
    for (size_t i = 0; i < plan.entries.size(); ++i)
        for (size_t j = i + 1; j < plan.entries.size(); ++j) {
            const SubPlane& a = plan.entries[i].subplane;
            const SubPlane& b = plan.entries[j].subplane;
            double ow = std::min(a.u1, b.u1) - std::max(a.u0, b.u0);
            double oh = std::min(a.v1, b.v1) - std::max(a.v0, b.v0);
            CHECK((ow <= 1e-12 || oh <= 1e-12));  // interiors disjoint
        }
}

}  // namespace

TEST_CASE("intrinsics averaging is the element-wise mean") {
    CameraIntrinsics a{1000, 990, 540, 720, 1080, 1440};
    CHECK(k_average({a}).fx == 1000);
    CameraIntrinsics b = a;
    b.fx = 1200;
    CHECK(k_average({a, b}).fx == doctest::Approx(1100).epsilon(1e-12));

    Rng rng(314);
    std::vector<CameraIntrinsics> many;
    double sfx = 0, sfy = 0, scx = 0, scy = 0;
    for (int i = 0; i < 10; ++i) {
        CameraIntrinsics k{rng.uniform(500, 1500), rng.uniform(500, 1500),
                           rng.uniform(500, 580), rng.uniform(680, 760), 1080, 1440};
        many.push_back(k);
        sfx += k.fx;
        sfy += k.fy;
        scx += k.cx;
        scy += k.cy;
    }
    CameraIntrinsics avg = k_average(many);
    CHECK(avg.fx == doctest::Approx(sfx / 10).epsilon(1e-14));
    CHECK(avg.fy == doctest::Approx(sfy / 10).epsilon(1e-14));
    CHECK(avg.cx == doctest::Approx(scx / 10).epsilon(1e-14));
    CHECK(avg.cy == doctest::Approx(scy / 10).epsilon(1e-14));

    CHECK_THROWS_AS(k_average({}), EmptyInput);
    CameraIntrinsics other = a;
    other.width = 720;
    CHECK_THROWS_AS(k_average({a, other}), MixedResolutions);
}

TEST_CASE("optimal distance matches the closed-form frustum solution") {
    CameraIntrinsics k{500, 500, 250, 250, 500, 500};
    CHECK(optimal_distance(flat_sub(1, 1), k, 0) == 1.0);
    CHECK(optimal_distance(flat_sub(2, 2), k, 0) == 2.0);  // doubling doubles d*
    CHECK(optimal_distance(flat_sub(0, 0), k, 0) == 0.0);
    // Wide plane: horizontal constraint dominates.
    CHECK(optimal_distance(flat_sub(3, 1), k, 0) == 3.0);
    // Margin shrinks usable fov, pushing the camera back.
    CHECK(optimal_distance(flat_sub(1, 1), k, 0.05) == doctest::Approx(1.0 / 0.95).epsilon(1e-12));
}

TEST_CASE("at the optimal distance the plane fits; slightly closer it does not") {
    CameraIntrinsics k = phone_k();
    SubPlane s = flat_sub(2.0, 1.4);
    double d = optimal_distance(s, k, 0);
    // Plane centered at origin in the XY plane, camera on +Z looking at it.
    auto corners_fit = [&](double dist) {
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0}) {
                Vec3 corner{sx * s.width / 2, sy * s.height / 2, 0};
                Vec2 px;
                if (!oracle::pinhole_project({0, 0, dist}, {0, 0, 0}, {0, 1, 0}, k.fx, k.fy,
                                             k.cx, k.cy, corner, &px))
                    return false;
                if (!(px.x >= 0 && px.x <= k.width && px.y >= 0 && px.y <= k.height))
                    return false;
            }
        return true;
    };
    CHECK(corners_fit(d * (1 + 1e-9)));
    CHECK(!corners_fit(d * (1 - 1e-6)));
}

TEST_CASE("a small wall is covered by a single image") {
    RoomLayout room = fixtures::l_room(0, 2.44);
    const PlaneInfo& smallWall = room.walls[3];  // the 1 m notch wall
    REQUIRE(smallWall.width == doctest::Approx(1.0));
    CapturePlan plan = divide_and_conquer(smallWall, room, phone_k(), {});
    CHECK(plan.entries.size() == 1);
    CHECK(plan.entries[0].subplane.width == doctest::Approx(1.0));
    check_plan_validity(plan, room, phone_k(), {});
    check_tiling(plan, smallWall);
}

TEST_CASE("a 6 m wall in a 4 m deep room splits into two 3 m subplanes") {
    RoomLayout room = fixtures::room_from_corners({{0, 0}, {6, 0}, {6, 4}, {0, 4}}, 0, 2.44);
    const PlaneInfo& wall = room.walls[0];
    PlannerParams params;
    CapturePlan plan = divide_and_conquer(wall, room, phone_k(), params);
    REQUIRE(plan.entries.size() == 2);
    CHECK(plan.entries[0].subplane.width == doctest::Approx(3.0));
    CHECK(plan.entries[1].subplane.width == doctest::Approx(3.0));
    CHECK(plan.entries[0].subplane.u0 < plan.entries[1].subplane.u0);  // raster order
    check_plan_validity(plan, room, phone_k(), params);
    check_tiling(plan, wall);
}

TEST_CASE("corridor walls too deep for a long lens are reported unplannable") {
    // 6m x 0.3m corridor: a 5000px-focal lens needs ~8.9m of standoff for a
    // full-height wall strip, but the room is only 0.3m deep in front of the
    // long walls. The short end walls still work (the camera backs down the
    // corridor), so planning must succeed partially and report the failures.
    RoomLayout room = fixtures::room_from_corners({{0, 0}, {6, 0}, {6, 0.3}, {0, 0.3}}, 0, 2.44);
    CameraIntrinsics tele{5000, 5000, 540, 720, 1080, 1440};
    CHECK_THROWS_AS(divide_and_conquer(room.walls[0], room, tele, {}), Unplannable);

    RoomPlan rp = plan_room(room, tele, {});
    CHECK(rp.unplannableWalls == std::vector<int>{0, 2});
    CHECK(!rp.plan.entries.empty());
    for (const PlanEntry& e : rp.plan.entries) {
        bool shortWall = e.subplane.parentId == 1 || e.subplane.parentId == 3;
        CHECK(shortWall);
    }
    check_plan_validity(rp.plan, room, tele, {});
}

TEST_CASE("a square room plans one image per wall with a phone-like camera") {
    RoomLayout room = fixtures::square_room(4, 0, 2.44);
    PlannerParams params;
    RoomPlan rp = plan_room(room, phone_k(), params);
    CHECK(rp.unplannableWalls.empty());
    CHECK(rp.plan.entries.size() >= 4);
    CHECK(rp.plan.entries.size() <= 16);
    CHECK(rp.plan.entries.size() == 4);  // regression pin for this exact geometry
    check_plan_validity(rp.plan, room, phone_k(), params);
    // Ordered by wall id.
    for (size_t i = 1; i < rp.plan.entries.size(); ++i)
        CHECK(rp.plan.entries[i - 1].subplane.parentId <= rp.plan.entries[i].subplane.parentId);
}

TEST_CASE("planning an empty layout yields an empty plan") {
    RoomLayout empty;
    RoomPlan rp = plan_room(empty, phone_k(), {});
    CHECK(rp.plan.entries.empty());
    CHECK(rp.unplannableWalls.empty());
}

TEST_CASE("shrinking the distance budget never reduces the entry count") {
    RoomLayout room = fixtures::square_room(4, 0, 2.44);
    const PlaneInfo& wall = room.walls[0];
    size_t last = 0;
    // Budgets below ~1.40 are genuinely unplannable for this wall: the camera
    // sits at mid-wall height, and a sub-rectangle whose edge lands exactly on
    // that height keeps the same oblique corner angles under halving (width
    // and standoff shrink together), so no amount of subdivision helps.
    for (double maxDist : {5.0, 2.5, 1.5}) {
        PlannerParams params;
        params.maxDistance = maxDist;
        CapturePlan plan = divide_and_conquer(wall, room, phone_k(), params);
        CHECK(plan.entries.size() >= last);
        last = plan.entries.size();
        check_plan_validity(plan, room, phone_k(), params);
        check_tiling(plan, wall);
    }
    CHECK(last > 1);

    // Once a budget fails, every smaller budget fails too.
    for (double maxDist : {1.3, 0.6}) {
        PlannerParams params;
        params.maxDistance = maxDist;
        CHECK_THROWS_AS(divide_and_conquer(wall, room, phone_k(), params), Unplannable);
    }
}

TEST_CASE("tilted rooms plan valid positions too") {
    // Rotated square room: axes no longer axis-aligned.
    std::vector<Vec2> corners;
    double c = std::cos(0.6), s = std::sin(0.6);
    for (Vec2 p : {Vec2{0, 0}, Vec2{5, 0}, Vec2{5, 3}, Vec2{0, 3}})
        corners.push_back({c * p.x - s * p.y + 2, s * p.x + c * p.y - 1});
    RoomLayout room = fixtures::room_from_corners(corners, 0, 2.44);
    PlannerParams params;
    RoomPlan rp = plan_room(room, phone_k(), params);
    CHECK(rp.unplannableWalls.empty());
    CHECK(!rp.plan.entries.empty());
    check_plan_validity(rp.plan, room, phone_k(), params);
    for (const PlaneInfo& w : room.walls) {
        CapturePlan one = divide_and_conquer(w, room, phone_k(), params);
        check_tiling(one, w);
    }
}

TEST_CASE("plans are deterministic and round-trip through json exactly") {
    RoomLayout room = fixtures::l_room(0, 2.44);
    PlannerParams params;
    params.maxDistance = 1.5;
    RoomPlan a = plan_room(room, phone_k(), params);
    RoomPlan b = plan_room(room, phone_k(), params);
    REQUIRE(a.plan.entries.size() == b.plan.entries.size());

    std::string p1 = "/tmp/roomtex_test_plan_a.json";
    std::string p2 = "/tmp/roomtex_test_plan_b.json";
    save_plan(p1, a);
    save_plan(p2, b);
    std::ifstream f1(p1), f2(p2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(!s1.empty());

    RoomPlan r = load_plan(p1);
    REQUIRE(r.plan.entries.size() == a.plan.entries.size());
    for (size_t i = 0; i < r.plan.entries.size(); ++i) {
        const PlanEntry& x = a.plan.entries[i];
        const PlanEntry& y = r.plan.entries[i];
        CHECK(x.subplane.parentId == y.subplane.parentId);
        CHECK(x.subplane.u0 == y.subplane.u0);
        CHECK(x.subplane.v1 == y.subplane.v1);
        CHECK(x.cameraPos.x == y.cameraPos.x);
        CHECK(x.cameraPos.y == y.cameraPos.y);
        CHECK(x.cameraPos.z == y.cameraPos.z);
        CHECK(x.lookAt.z == y.lookAt.z);
        CHECK(x.distance == y.distance);
        CHECK(y.subplane.center.x == y.lookAt.x);
    }
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

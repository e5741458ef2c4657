#include "roomtex/planner.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "roomtex/errors.hpp"

namespace roomtex {

CameraIntrinsics k_average(const std::vector<CameraIntrinsics>& list) {
    if (list.empty()) throw EmptyInput("no intrinsics to average");
    for (const CameraIntrinsics& k : list)
        if (k.width != list[0].width || k.height != list[0].height)
            throw MixedResolutions("intrinsics with differing image dimensions");
    CameraIntrinsics avg;
    avg.width = list[0].width;
    avg.height = list[0].height;
    for (const CameraIntrinsics& k : list) {
        avg.fx += k.fx;
        avg.fy += k.fy;
        avg.cx += k.cx;
        avg.cy += k.cy;
    }
    double n = static_cast<double>(list.size());
    avg.fx /= n;
    avg.fy /= n;
    avg.cx /= n;
    avg.cy /= n;
    return avg;
}

double optimal_distance(const SubPlane& sub, const CameraIntrinsics& K, double margin) {
    // tan(vFov/2) = height_px / (2 fy); the plane's half-extent must stay
    // within (1 - margin) of it, so d >= halfExtent / ((1-margin) tan(fov/2)).
    double dv = sub.height * K.fy / ((1 - margin) * K.height);
    double dh = sub.width * K.fx / ((1 - margin) * K.width);
    return std::max(dv, dh);
}

namespace {

struct WallFrameP {
    const PlaneInfo* plane;
    Vec3 u, v, origin;  // origin = lower-left corner
};

SubPlane make_sub(const WallFrameP& w, double u0, double v0, double u1, double v1) {
    SubPlane s;
    s.parentId = w.plane->id;
    s.u0 = u0;
    s.v0 = v0;
    s.u1 = u1;
    s.v1 = v1;
    s.width = u1 - u0;
    s.height = v1 - v0;
    s.center = w.origin + w.u * ((u0 + u1) / 2) + w.v * ((v0 + v1) / 2);
    return s;
}

bool can_capture(const WallFrameP& w, const SubPlane& sub, const RoomLayout& layout,
                 const CameraIntrinsics& K, const PlannerParams& params, PlanEntry* entry) {
    double d = optimal_distance(sub, K, params.margin);
    if (d > params.maxDistance) return false;
    Vec3 pos = sub.center + w.plane->normal * d;
    pos.y = layout.floorHeight + params.cameraHeight;
    if (!point_in_room(layout, pos.xz())) return false;

    Mat4 view = look_at(pos, sub.center, {0, 1, 0});
    const double cu[4] = {sub.u0, sub.u1, sub.u1, sub.u0};
    const double cv[4] = {sub.v0, sub.v0, sub.v1, sub.v1};
    for (int k = 0; k < 4; ++k) {
        Vec3 corner = w.origin + w.u * cu[k] + w.v * cv[k];
        Vec2 px;
        if (!project_point(K, view, corner, &px)) return false;
        if (!(px.x > 0 && px.x < K.width && px.y > 0 && px.y < K.height)) return false;
    }
    entry->subplane = sub;
    entry->cameraPos = pos;
    entry->lookAt = sub.center;
    entry->up = {0, 1, 0};
    entry->distance = d;
    return true;
}

constexpr double kMinSubplaneSide = 0.1;  // m

void plan_recursive(const WallFrameP& w, double u0, double v0, double u1, double v1,
                    const RoomLayout& layout, const CameraIntrinsics& K,
                    const PlannerParams& params, std::vector<PlanEntry>* out) {
    SubPlane sub = make_sub(w, u0, v0, u1, v1);
    PlanEntry entry;
    if (can_capture(w, sub, layout, K, params, &entry)) {
        out->push_back(entry);
        return;
    }
    // Halve the longer side (ties split along u).
    bool splitU = sub.width >= sub.height;
    double side = splitU ? sub.width : sub.height;
    if (side / 2 < kMinSubplaneSide)
        throw Unplannable("no valid camera position for wall " + std::to_string(w.plane->id));
    if (splitU) {
        double mid = (u0 + u1) / 2;
        plan_recursive(w, u0, v0, mid, v1, layout, K, params, out);
        plan_recursive(w, mid, v0, u1, v1, layout, K, params, out);
    } else {
        double mid = (v0 + v1) / 2;
        plan_recursive(w, u0, v0, u1, mid, layout, K, params, out);
        plan_recursive(w, u0, mid, u1, v1, layout, K, params, out);
    }
}

}  // namespace

CapturePlan divide_and_conquer(const PlaneInfo& plane, const RoomLayout& layout,
                               const CameraIntrinsics& K, const PlannerParams& params) {
    PlaneAxes ax = wall_axes(plane);
    WallFrameP w{&plane, ax.u, ax.v,
                 plane.center - ax.u * (plane.width / 2) - ax.v * (plane.height / 2)};
    CapturePlan plan;
    plan_recursive(w, 0, 0, plane.width, plane.height, layout, K, params, &plan.entries);
    std::sort(plan.entries.begin(), plan.entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
        if (a.subplane.v0 != b.subplane.v0) return a.subplane.v0 < b.subplane.v0;
        return a.subplane.u0 < b.subplane.u0;
    });
    return plan;
}

RoomPlan plan_room(const RoomLayout& layout, const CameraIntrinsics& K,
                   const PlannerParams& params) {
    std::vector<const PlaneInfo*> walls;
    for (const PlaneInfo& w : layout.walls) walls.push_back(&w);
    std::sort(walls.begin(), walls.end(),
              [](const PlaneInfo* a, const PlaneInfo* b) { return a->id < b->id; });

    RoomPlan result;
    for (const PlaneInfo* w : walls) {
        try {
            CapturePlan p = divide_and_conquer(*w, layout, K, params);
            result.plan.entries.insert(result.plan.entries.end(), p.entries.begin(),
                                       p.entries.end());
        } catch (const Unplannable&) {
            result.unplannableWalls.push_back(w->id);
        }
    }
    return result;
}

namespace {

nlohmann::json vec3_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw MalformedData("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void save_plan(const std::string& path, const RoomPlan& plan) {
    nlohmann::json entries = nlohmann::json::array();
    for (const PlanEntry& e : plan.plan.entries) {
        entries.push_back({{"planeId", e.subplane.parentId},
                           {"subRect", {e.subplane.u0, e.subplane.v0, e.subplane.u1, e.subplane.v1}},
                           {"cameraPos", vec3_json(e.cameraPos)},
                           {"lookAt", vec3_json(e.lookAt)},
                           {"up", vec3_json(e.up)},
                           {"distance", e.distance}});
    }
    nlohmann::json doc{{"entries", entries}, {"unplannableWalls", plan.unplannableWalls}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

RoomPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedData("bad plan json in " + path + ": " + e.what());
    }
    RoomPlan plan;
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw MalformedData("plan json missing entries array: " + path);
    for (const auto& j : doc["entries"]) {
        PlanEntry e;
        e.subplane.parentId = j.at("planeId").get<int>();
        const auto& r = j.at("subRect");
        if (!r.is_array() || r.size() != 4) throw MalformedData("bad subRect in " + path);
        e.subplane.u0 = r[0].get<double>();
        e.subplane.v0 = r[1].get<double>();
        e.subplane.u1 = r[2].get<double>();
        e.subplane.v1 = r[3].get<double>();
        e.subplane.width = e.subplane.u1 - e.subplane.u0;
        e.subplane.height = e.subplane.v1 - e.subplane.v0;
        e.cameraPos = vec3_from(j.at("cameraPos"));
        e.lookAt = vec3_from(j.at("lookAt"));
        e.subplane.center = e.lookAt;  // by construction the look-at target
        e.up = vec3_from(j.at("up"));
        e.distance = j.at("distance").get<double>();
        plan.plan.entries.push_back(e);
    }
    if (doc.contains("unplannableWalls"))
        for (const auto& v : doc["unplannableWalls"])
            plan.unplannableWalls.push_back(v.get<int>());
    return plan;
}

}  // namespace roomtex

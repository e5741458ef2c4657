#pragma once

#include <string>
#include <vector>

#include "roomtex/camera.hpp"
#include "roomtex/layout.hpp"

namespace roomtex {

struct SubPlane {
    int parentId = -1;
    // Rectangle in parent-plane coordinates (m): u axis along the wall,
    // v axis up, origin at the parent's lower-left corner.
    double u0 = 0, v0 = 0, u1 = 0, v1 = 0;
    Vec3 center;  // world-space center of the rectangle
    double width = 0, height = 0;
};

struct PlanEntry {
    SubPlane subplane;
    Vec3 cameraPos;  // optimal capture position
    Vec3 lookAt;     // the subplane center
    Vec3 up;
    double distance = 0;  // normal distance to the plane
};

struct CapturePlan {
    std::vector<PlanEntry> entries;
};

// plan_room's aggregate: walls that could not be planned are reported rather
// than aborting the rest of the room.
struct RoomPlan {
    CapturePlan plan;
    std::vector<int> unplannableWalls;
};

struct PlannerParams {
    double maxDistance = 5;    // m
    double cameraHeight = 1.22;  // m above the floor plane
    double margin = 0.05;      // fraction of the field of view held in reserve
};

// Element-wise arithmetic mean of the intrinsics; all entries must share the
// same image dimensions.
CameraIntrinsics k_average(const std::vector<CameraIntrinsics>& list);

// Smallest distance at which the subplane fits the camera frustum in portrait
// framing, with `margin` of the field of view held in reserve on each axis.
double optimal_distance(const SubPlane& sub, const CameraIntrinsics& K, double margin);

// Recursively halves the wall's longer side until every subplane is capturable
// from a single valid camera position: the position d* in front of the
// subplane center at cameraHeight must lie strictly inside the room, d* must
// not exceed maxDistance, and all four subplane corners must re-project
// strictly inside the image. Entries are ordered bottom-to-top, left-to-right.
// Throws Unplannable when recursion would shrink a side below 0.1 m.
CapturePlan divide_and_conquer(const PlaneInfo& plane, const RoomLayout& layout,
                               const CameraIntrinsics& K, const PlannerParams& params);

// Runs divide_and_conquer over every wall in id order; walls that throw
// Unplannable are recorded and skipped.
RoomPlan plan_room(const RoomLayout& layout, const CameraIntrinsics& K,
                   const PlannerParams& params);

void save_plan(const std::string& path, const RoomPlan& plan);
RoomPlan load_plan(const std::string& path);

}  // namespace roomtex

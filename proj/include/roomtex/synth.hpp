#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roomtex/frame.hpp"
#include "roomtex/layout.hpp"
#include "roomtex/plane2image.hpp"
#include "roomtex/planner.hpp"
#include "roomtex/texturing.hpp"

namespace roomtex {

// Everything here exists to make pipeline claims checkable at desk scale:
// a room whose true textures are known exactly, and capture sessions whose
// degradations (pose error, motion blur) are controlled by a seed.

struct RoomSpec {
    double width = 4.0;    // m, X extent
    double depth = 3.0;    // m, Z extent
    double height = 2.44;  // m, floor to ceiling
    int style = 0;         // 0 = smooth decor, 1 = adds fine detail
    int occluders = 0;     // boxes standing on the floor, 0..3
    uint64_t seed = 1;
};

// Axis-aligned furniture box.
struct OccluderBox {
    Vec3 center;
    Vec3 half;  // half extents, all > 0
};

struct SyntheticRoom {
    RoomLayout layout;
    // Walls in id order, then floor, then ceiling; groundTruth[i] is the
    // true texture of planes[i] at exactly kPlanePixelsPerMeter.
    std::vector<PlaneGeometry> planes;
    std::vector<Image8> groundTruth;
    std::vector<OccluderBox> boxes;
    // Renderable form: two triangles per plane textured with its ground
    // truth, plus the box faces with their own pages. Rendering a plane's
    // camera against this reproduces the ground-truth image bit-exactly.
    TextureAtlas world;
    uint64_t seed = 0;
};

// Deterministic in spec: same spec twice gives bit-identical rooms.
SyntheticRoom generate_room(const RoomSpec& spec);

// Appends a furniture box with a procedurally textured surface; page content
// derives from room.seed and the box's position in the list.
void add_box(SyntheticRoom& room, const OccluderBox& box);

struct NoiseModel {
    double poseSigmaT = 0;  // m, per-axis Gaussian on recorded positions
    double poseSigmaR = 0;  // degrees, Gaussian angle about a random axis
    // Mean motion blur in px. Each frame draws a factor in [0.5, 1.5], so a
    // capture session has sharp and soft frames like handheld video does.
    double blurSigma = 0;
    uint64_t seed = 0;
};

struct CaptureSet {
    std::vector<Frame> frames;    // recorded (perturbed) poses, degraded images
    std::vector<Mat4> truePoses;  // camToWorld each image was actually rendered from
};

// Handheld-video surrogate: portrait phone video resolution.
CameraIntrinsics orbit_intrinsics();
// Deliberate-still surrogate: portrait photo resolution.
CameraIntrinsics planned_intrinsics();

// camToWorld poses on a ring of `radius` meters around the room centroid at
// `cameraHeight` above the floor, looking outward, evenly spaced over a full
// turn. Throws PoseOutsideRoom if the ring leaves the room.
std::vector<Mat4> orbit_trajectory(const RoomLayout& layout, int count = 240,
                                   double radius = 0.4, double cameraHeight = 1.3);

// Wall shots from plan_room plus straight-down/straight-up shots tiling the
// floor and ceiling. Tile sizes leave >= 0.3 m of frame coverage beyond each
// tile edge so structure faces near tile seams still land fully inside at
// least one frame. The default margin is wider than plan_room's for the same
// reason. Throws Unplannable if any wall cannot be planned.
std::vector<Mat4> planned_poses(const RoomLayout& layout, const CameraIntrinsics& K,
                                const PlannerParams& params = {5.0, 1.22, 0.13});

// Renders room.world from each pose, then degrades per the noise model: the
// recorded pose is the true pose plus Gaussian noise, the image is blurred by
// blurSigma times the frame's blur factor. True poses are returned untouched.
// Per-frame RNG streams are forked from noise.seed, so results do not depend
// on render order. Throws PoseOutsideRoom if a pose center is outside the
// room volume.
CaptureSet simulate_capture(const SyntheticRoom& room, const std::vector<Mat4>& poses,
                            const CameraIntrinsics& K, const NoiseModel& noise);

// Writes the standard dataset layout under dir: frames/NNNNN.color.png,
// poses.json, intrinsics.json, layout.json, and (when requested) gt/ with the
// per-plane ground-truth images and their manifest.
void save_dataset(const std::string& dir, const SyntheticRoom& room,
                  const CaptureSet& capture, const CameraIntrinsics& K,
                  bool withGroundTruth = true);

}  // namespace roomtex

#include "roomtex/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "roomtex/errors.hpp"
#include "roomtex/image.hpp"
#include "roomtex/mesh_process.hpp"
#include "roomtex/parallel.hpp"
#include "roomtex/rng.hpp"

namespace roomtex {
namespace {

// Textures are deliberately band-limited: every component below has a feature
// scale of at least ~25 px, so resampling through capture and back loses very
// little energy. Hard edges would put most of their error budget right where
// bilinear filtering is weakest.
struct Wave {
    Vec2 dir;  // cycles advance along this unit direction
    double lambda = 100;
    double phase = 0;
    double amp[3] = {0, 0, 0};
};

struct Blob {
    Vec2 center;
    double sigma = 100;
    double amp[3] = {0, 0, 0};
};

struct Pattern {
    double base[3] = {128, 128, 128};
    Vec2 gradDir;
    double gradAmp[3] = {0, 0, 0};
    bool checker = false;
    double checkerLambda = 200;
    double checkerAmp[3] = {0, 0, 0};
    std::vector<Blob> blobs;
    std::vector<Wave> waves;
};

void draw_channel_amps(Rng& rng, double lo, double hi, double out[3]) {
    double a = rng.uniform(lo, hi);
    for (int c = 0; c < 3; ++c) {
        double scale = rng.uniform(0.35, 1.0);
        if (rng.u01() < 0.5) scale = -scale;
        out[c] = a * scale;
    }
}

Pattern make_pattern(Rng rng, int w, int h, bool fineDetail) {
    Pattern p;
    for (int c = 0; c < 3; ++c) p.base[c] = rng.uniform(100, 170);

    double ga = rng.uniform(0, 2 * kPi);
    p.gradDir = {std::cos(ga), std::sin(ga)};
    draw_channel_amps(rng, 15, 30, p.gradAmp);

    p.checker = rng.u01() < 0.5;
    p.checkerLambda = rng.uniform(140, 320);
    draw_channel_amps(rng, 18, 35, p.checkerAmp);

    int nBlobs = p.checker ? 1 : 2;
    for (int b = 0; b < nBlobs; ++b) {
        Blob blob;
        blob.center = {rng.uniform(0.15, 0.85) * w, rng.uniform(0.15, 0.85) * h};
        blob.sigma = rng.uniform(90, 240);
        draw_channel_amps(rng, 20, 35, blob.amp);
        p.blobs.push_back(blob);
    }

    int nWaves = fineDetail ? 4 : 2;
    for (int i = 0; i < nWaves; ++i) {
        Wave wv;
        double a = rng.uniform(0, 2 * kPi);
        wv.dir = {std::cos(a), std::sin(a)};
        bool fine = i >= 2;
        wv.lambda = fine ? rng.uniform(26, 56) : rng.uniform(150, 420);
        wv.phase = rng.uniform(0, 2 * kPi);
        draw_channel_amps(rng, fine ? 14 : 8, fine ? 30 : 18, wv.amp);
        p.waves.push_back(wv);
    }
    return p;
}

Image8 make_texture(int w, int h, const Pattern& p) {
    Image8 img(w, h, 3);
    double cx = 0.5 * w, cy = 0.5 * h;
    double invDiag = 1.0 / std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
    parallel_for(static_cast<size_t>(h), [&](size_t yy) {
        int y = static_cast<int>(yy);
        for (int x = 0; x < w; ++x) {
            double comps[3];
            double g = ((x - cx) * p.gradDir.x + (y - cy) * p.gradDir.y) * invDiag * 2.0;
            double ch = p.checker ? std::sin(2 * kPi * x / p.checkerLambda) *
                                        std::sin(2 * kPi * y / p.checkerLambda)
                                  : 0.0;
            for (int c = 0; c < 3; ++c) comps[c] = p.base[c] + p.gradAmp[c] * g + p.checkerAmp[c] * ch;
            for (const Blob& b : p.blobs) {
                double dx = x - b.center.x, dy = y - b.center.y;
                double e = std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
                for (int c = 0; c < 3; ++c) comps[c] += b.amp[c] * e;
            }
            for (const Wave& wv : p.waves) {
                double s = std::sin(2 * kPi * (x * wv.dir.x + y * wv.dir.y) / wv.lambda + wv.phase);
                for (int c = 0; c < 3; ++c) comps[c] += wv.amp[c] * s;
            }
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = static_cast<uint8_t>(std::lround(std::clamp(comps[c], 0.0, 255.0)));
        }
    });
    return img;
}

// Snapping to the 2 mm grid makes 500 px/m image sizes exact.
double snap_mm2(double v) { return std::round(v * 500.0) / 500.0; }

TriMesh box_mesh(const OccluderBox& b) {
    TriMesh m;
    const Vec3& c = b.center;
    const Vec3& e = b.half;
    auto P = [&](double sx, double sy, double sz) {
        return Vec3{c.x + sx * e.x, c.y + sy * e.y, c.z + sz * e.z};
    };
    // Outward-facing quads, CCW seen from outside.
    const Vec3 quads[6][4] = {
        {P(1, -1, -1), P(1, 1, -1), P(1, 1, 1), P(1, -1, 1)},      // +X
        {P(-1, -1, 1), P(-1, 1, 1), P(-1, 1, -1), P(-1, -1, -1)},  // -X
        {P(-1, 1, -1), P(-1, 1, 1), P(1, 1, 1), P(1, 1, -1)},      // +Y
        {P(-1, -1, -1), P(1, -1, -1), P(1, -1, 1), P(-1, -1, 1)},  // -Y
        {P(-1, -1, 1), P(1, -1, 1), P(1, 1, 1), P(-1, 1, 1)},      // +Z
        {P(1, -1, -1), P(-1, -1, -1), P(-1, 1, -1), P(1, 1, -1)},  // -Z
    };
    const Vec2 uv[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (const auto& q : quads) {
        int base = static_cast<int>(m.vertices.size());
        for (int k = 0; k < 4; ++k) {
            m.vertices.push_back(q[k]);
            m.texcoords.push_back(uv[k]);
        }
        m.faces.push_back({base, base + 1, base + 2});
        m.faces.push_back({base, base + 2, base + 3});
        m.faceLabels.push_back(kObjectLabel);
        m.faceLabels.push_back(kObjectLabel);
    }
    return m;
}

Mat4 pose_from_lookat(const Vec3& eye, const Vec3& at, const Vec3& up) {
    return rigid_inverse(look_at(eye, at, up));
}

Vec3 pose_center(const Mat4& m) { return {m[0][3], m[1][3], m[2][3]}; }

void require_inside(const RoomLayout& layout, const Vec3& p) {
    if (!point_in_room(layout, {p.x, p.z}) || p.y <= layout.floorHeight ||
        p.y >= layout.ceilingHeight)
        throw PoseOutsideRoom("camera at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ", " + std::to_string(p.z) + ")");
}

// Orientation noise: a small world-frame rotation applied to the camera axes;
// the position is perturbed independently.
Mat4 perturb_pose(const Mat4& camToWorld, const Vec3& dt, const Vec3& axis, double rad) {
    double c = std::cos(rad), s = std::sin(rad), C = 1 - c;
    double x = axis.x, y = axis.y, z = axis.z;
    double R[3][3] = {
        {c + x * x * C, x * y * C - z * s, x * z * C + y * s},
        {y * x * C + z * s, c + y * y * C, y * z * C - x * s},
        {z * x * C - y * s, z * y * C + x * s, c + z * z * C},
    };
    Mat4 out = camToWorld;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0;
            for (int k = 0; k < 3; ++k) v += R[i][k] * camToWorld[k][j];
            out[i][j] = v;
        }
    out[0][3] = camToWorld[0][3] + dt.x;
    out[1][3] = camToWorld[1][3] + dt.y;
    out[2][3] = camToWorld[2][3] + dt.z;
    return out;
}

}  // namespace

CameraIntrinsics orbit_intrinsics() { return {450, 450, 180, 240, 360, 480}; }

CameraIntrinsics planned_intrinsics() { return {1100, 1100, 540, 720, 1080, 1440}; }

SyntheticRoom generate_room(const RoomSpec& spec) {
    double w = snap_mm2(spec.width), d = snap_mm2(spec.depth), h = snap_mm2(spec.height);
    if (w < 0.5 || d < 0.5 || h < 0.5)
        throw MalformedData("room dimensions must be at least 0.5 m");
    if (spec.occluders < 0 || spec.occluders > 3)
        throw MalformedData("occluder count must be in 0..3");

    SyntheticRoom room;
    room.seed = spec.seed;

    const Vec2 corners[4] = {{0, 0}, {w, 0}, {w, d}, {0, d}};
    std::vector<PlaneInfo> walls;
    for (int i = 0; i < 4; ++i)
        walls.push_back(make_wall(i, corners[i], corners[(i + 1) % 4], 0.0, h));
    room.layout = assemble_layout(walls, 0.0, h);

    for (const PlaneInfo& wall : room.layout.walls)
        room.planes.push_back(plane_geometry(room.layout, wall.id));
    room.planes.push_back(plane_geometry(room.layout, kFloorPlaneId));
    room.planes.push_back(plane_geometry(room.layout, kCeilingPlaneId));

    Rng root(spec.seed);
    for (size_t i = 0; i < room.planes.size(); ++i) {
        const PlaneGeometry& g = room.planes[i];
        int W = static_cast<int>(std::lround(kPlanePixelsPerMeter * g.widthM));
        int H = static_cast<int>(std::lround(kPlanePixelsPerMeter * g.heightM));
        room.groundTruth.push_back(
            make_texture(W, H, make_pattern(root.fork(100 + i), W, H, spec.style != 0)));
    }

    for (size_t i = 0; i < room.planes.size(); ++i) {
        room.world.mesh = combine(room.world.mesh, simplify_and_remap(room.planes[i]));
        room.world.pages.push_back(room.groundTruth[i]);
        int page = static_cast<int>(i);
        room.world.facePage.insert(room.world.facePage.end(), {page, page});
        room.world.faceSource.insert(room.world.faceSource.end(), {0, 0});
    }
    for (int b = 0; b < spec.occluders; ++b) {
        Rng br = root.fork(200 + b);
        OccluderBox box;
        box.half = {br.uniform(0.15, 0.45), br.uniform(0.25, 0.5), br.uniform(0.15, 0.45)};
        double margin = 0.7;
        box.center = {br.uniform(margin + box.half.x, w - margin - box.half.x),
                      box.half.y,  // standing on the floor
                      br.uniform(margin + box.half.z, d - margin - box.half.z)};
        add_box(room, box);
    }
    return room;
}

void add_box(SyntheticRoom& room, const OccluderBox& box) {
    if (!(box.half.x > 0 && box.half.y > 0 && box.half.z > 0))
        throw MalformedData("box half extents must be positive");
    int page = static_cast<int>(room.world.pages.size());
    room.world.mesh = combine(room.world.mesh, box_mesh(box));
    room.world.pages.push_back(make_texture(
        192, 192, make_pattern(Rng(room.seed).fork(300 + room.boxes.size()), 192, 192, false)));
    for (int f = 0; f < 12; ++f) {
        room.world.facePage.push_back(page);
        room.world.faceSource.push_back(0);
    }
    room.boxes.push_back(box);
}

std::vector<Mat4> orbit_trajectory(const RoomLayout& layout, int count, double radius,
                                   double cameraHeight) {
    if (count <= 0) throw MalformedData("orbit needs a positive pose count");
    const Vec2& c = layout.mbb.center;
    double y = layout.floorHeight + cameraHeight;
    std::vector<Mat4> poses;
    poses.reserve(count);
    for (int k = 0; k < count; ++k) {
        double th = 2 * kPi * k / count;
        Vec3 dir{std::cos(th), 0, std::sin(th)};
        Vec3 pos{c.x + radius * dir.x, y, c.y + radius * dir.z};
        require_inside(layout, pos);
        poses.push_back(pose_from_lookat(pos, pos + dir, {0, 1, 0}));
    }
    return poses;
}

std::vector<Mat4> planned_poses(const RoomLayout& layout, const CameraIntrinsics& K,
                                const PlannerParams& params) {
    RoomPlan rp = plan_room(layout, K, params);
    if (!rp.unplannableWalls.empty())
        throw Unplannable("wall " + std::to_string(rp.unplannableWalls.front()) +
                          " cannot be captured");
    std::vector<Mat4> poses;
    for (const PlanEntry& e : rp.plan.entries)
        poses.push_back(pose_from_lookat(e.cameraPos, e.lookAt, e.up));

    // Floor and ceiling shots: straight down from just below the ceiling and
    // straight up from just above the floor, tiling the footprint's bounding
    // box. Frame coverage exceeds each tile by >= kSeamSlack so faces that
    // straddle a tile seam are still wholly inside a neighboring frame.
    const double kStandoff = 0.1;
    const double kSeamSlack = 0.3;
    const MBB& mbb = layout.mbb;
    Vec3 along{mbb.align.x, 0, mbb.align.y};
    Vec3 across{-mbb.align.y, 0, mbb.align.x};
    double d = layout.ceilingHeight - layout.floorHeight - kStandoff;
    double covAlong = 2.0 * K.cy * d / K.fy - kSeamSlack;   // image y runs along the box
    double covAcross = 2.0 * K.cx * d / K.fx - kSeamSlack;  // image x runs across it
    if (d <= 0 || covAlong <= 0 || covAcross <= 0)
        throw Unplannable("room too low to tile the floor and ceiling");
    int nAlong = static_cast<int>(std::ceil(mbb.width / covAlong));
    int nAcross = static_cast<int>(std::ceil(mbb.height / covAcross));

    for (int pass = 0; pass < 2; ++pass) {
        bool floorPass = pass == 0;
        double camY = floorPass ? layout.ceilingHeight - kStandoff : layout.floorHeight + kStandoff;
        double targetY = floorPass ? layout.floorHeight : layout.ceilingHeight;
        Vec3 up = floorPass ? along * -1.0 : along;
        for (int i = 0; i < nAlong; ++i) {
            for (int j = 0; j < nAcross; ++j) {
                double u = ((i + 0.5) / nAlong - 0.5) * mbb.width;
                double v = ((j + 0.5) / nAcross - 0.5) * mbb.height;
                Vec3 at{mbb.center.x + along.x * u + across.x * v, targetY,
                        mbb.center.y + along.z * u + across.z * v};
                Vec3 pos{at.x, camY, at.z};
                if (!point_in_room(layout, {pos.x, pos.z})) continue;
                poses.push_back(pose_from_lookat(pos, at, up));
            }
        }
    }
    return poses;
}

CaptureSet simulate_capture(const SyntheticRoom& room, const std::vector<Mat4>& poses,
                            const CameraIntrinsics& K, const NoiseModel& noise) {
    if (noise.poseSigmaT < 0 || noise.poseSigmaR < 0 || noise.blurSigma < 0)
        throw MalformedData("noise magnitudes must be nonnegative");
    for (const Mat4& p : poses) require_inside(room.layout, pose_center(p));

    CaptureSet out;
    out.frames.resize(poses.size());
    out.truePoses = poses;
    Rng root(noise.seed);
    // Outer loop stays serial: the renderer parallelizes internally.
    for (size_t i = 0; i < poses.size(); ++i) {
        // Fixed draw order per frame stream keeps captures identical across
        // noise settings that share a seed.
        Rng st = root.fork(i);
        Vec3 dt{st.normal(), st.normal(), st.normal()};
        Vec3 axis = st.unit_vector3();
        double angle = st.normal();
        double blurFactor = st.uniform(0.5, 1.5);

        Image8 img = render_atlas_view(room.world, K, poses[i]);
        double sigma = noise.blurSigma * blurFactor;
        if (sigma > 0) img = gaussian_blur(img, sigma);

        Frame& fr = out.frames[i];
        fr.rgb = std::move(img);
        fr.K = K;
        fr.camToWorld = perturb_pose(poses[i], dt * noise.poseSigmaT, axis,
                                     deg2rad(noise.poseSigmaR * angle));
    }
    return out;
}

void save_dataset(const std::string& dir, const SyntheticRoom& room, const CaptureSet& capture,
                  const CameraIntrinsics& K, bool withGroundTruth) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "frames");

    nlohmann::json poses = nlohmann::json::array();
    nlohmann::json intr = nlohmann::json::array();
    for (size_t i = 0; i < capture.frames.size(); ++i) {
        const Frame& fr = capture.frames[i];
        char name[32];
        std::snprintf(name, sizeof(name), "%05zu.color.png", i);
        save_png((fs::path(dir) / "frames" / name).string(), fr.rgb);

        nlohmann::json m = nlohmann::json::array();
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m.push_back(fr.camToWorld[r][c]);
        poses.push_back(std::move(m));
        intr.push_back({{"fx", fr.K.fx},
                        {"fy", fr.K.fy},
                        {"cx", fr.K.cx},
                        {"cy", fr.K.cy},
                        {"width", fr.K.width},
                        {"height", fr.K.height}});
    }
    (void)K;
    std::ofstream(fs::path(dir) / "poses.json") << nlohmann::json{{"poses", poses}}.dump(2) << "\n";
    std::ofstream(fs::path(dir) / "intrinsics.json")
        << nlohmann::json{{"frames", intr}}.dump(2) << "\n";
    save_layout((fs::path(dir) / "layout.json").string(), room.layout);

    if (!room.boxes.empty()) {
        TriMesh furniture;
        for (const OccluderBox& b : room.boxes) furniture = combine(furniture, box_mesh(b));
        furniture.texcoords.clear();
        save_ply((fs::path(dir) / "mesh.ply").string(), furniture);
    }

    if (withGroundTruth) {
        fs::create_directories(fs::path(dir) / "gt");
        for (size_t i = 0; i < room.planes.size(); ++i) {
            std::string name = "plane_" + plane_name(room.planes[i].planeId) + ".png";
            save_png((fs::path(dir) / "gt" / name).string(), room.groundTruth[i]);
        }
    }
}

}  // namespace roomtex

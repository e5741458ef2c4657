#include "roomtex/plane2image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

#include "roomtex/errors.hpp"
#include "roomtex/parallel.hpp"
#include "roomtex/raster.hpp"

namespace roomtex {

namespace {

// Up vector the plane camera uses. Walls keep world +Y; horizontal planes
// have no natural up, so both borrow the room MBB's long-edge direction --
// negated for the floor so that floor and ceiling images line up when one is
// flipped onto the other.
Vec3 plane_up(const PlaneGeometry& geom) {
    if (geom.planeId == kFloorPlaneId) return {-geom.mbbAlign.x, 0.0, -geom.mbbAlign.y};
    if (geom.planeId == kCeilingPlaneId) return {geom.mbbAlign.x, 0.0, geom.mbbAlign.y};
    return {0.0, 1.0, 0.0};
}

}  // namespace

PlaneGeometry plane_geometry(const RoomLayout& layout, int planeId) {
    PlaneGeometry geom;
    geom.planeId = planeId;
    if (planeId == kFloorPlaneId || planeId == kCeilingPlaneId) {
        if (!layout.closed) throw MalformedData("floor/ceiling geometry needs a closed layout");
        const MBB& mbb = layout.mbb;
        double y = planeId == kFloorPlaneId ? layout.floorHeight : layout.ceilingHeight;
        geom.center = {mbb.center.x, y, mbb.center.y};
        geom.normal = planeId == kFloorPlaneId ? Vec3{0.0, 1.0, 0.0} : Vec3{0.0, -1.0, 0.0};
        // Image y axis runs along the MBB long edge (the up vector above), so
        // the image height covers mbb.width and the image width mbb.height.
        geom.widthM = mbb.height;
        geom.heightM = mbb.width;
        geom.mbbAlign = mbb.align;
        return geom;
    }
    for (const PlaneInfo& wall : layout.walls) {
        if (wall.id != planeId) continue;
        geom.center = wall.center;
        geom.normal = wall.normal;
        geom.widthM = wall.width;
        geom.heightM = wall.height;
        return geom;
    }
    throw MalformedData("no plane with id " + std::to_string(planeId));
}

PlaneCamera setup_cam(const PlaneGeometry& geom) {
    int w = static_cast<int>(std::lround(kPlanePixelsPerMeter * geom.widthM));
    int h = static_cast<int>(std::lround(kPlanePixelsPerMeter * geom.heightM));
    if (w <= 0 || h <= 0) throw MalformedData("plane rectangle too small to image");
    PlaneCamera cam;
    cam.K = {h / 2.0, h / 2.0, w / 2.0, h / 2.0, w, h};
    // With fy = h/2 the frame spans the full rectangle height exactly when the
    // camera stands heightM/2 away; the width follows from the aspect ratio.
    cam.position = geom.center + geom.normal * (geom.heightM / 2.0);
    cam.camToWorld = rigid_inverse(look_at(cam.position, geom.center, plane_up(geom)));
    return cam;
}

TextureAtlas split_by_plane(const TextureAtlas& atlas, int planeId) {
    TextureAtlas out;
    out.pages = atlas.pages;
    out.mesh.faceLabels.reserve(atlas.mesh.faces.size());
    std::unordered_map<int, int> vertMap;
    for (size_t f = 0; f < atlas.mesh.faces.size(); ++f) {
        if (atlas.mesh.faceLabels[f] != planeId) continue;
        std::array<int, 3> tri;
        for (int k = 0; k < 3; ++k) {
            int v = atlas.mesh.faces[f][k];
            auto [it, fresh] = vertMap.try_emplace(v, static_cast<int>(out.mesh.vertices.size()));
            if (fresh) {
                out.mesh.vertices.push_back(atlas.mesh.vertices[v]);
                if (!atlas.mesh.texcoords.empty())
                    out.mesh.texcoords.push_back(atlas.mesh.texcoords[v]);
            }
            tri[k] = it->second;
        }
        out.mesh.faces.push_back(tri);
        out.mesh.faceLabels.push_back(planeId);
        out.facePage.push_back(atlas.facePage[f]);
        out.faceSource.push_back(atlas.faceSource[f]);
    }
    return out;
}

Image8 render_atlas_view(const TextureAtlas& atlas, const CameraIntrinsics& K,
                         const Mat4& camToWorld, Image8* untexturedMask) {
    Image8 pixels(K.width, K.height, 3);
    if (untexturedMask) *untexturedMask = Image8(K.width, K.height, 1);
    GBuffer gb = rasterize_mesh(atlas.mesh, K, rigid_inverse(camToWorld));
    parallel_for(static_cast<size_t>(K.height), [&](size_t row) {
        int y = static_cast<int>(row);
        for (int x = 0; x < K.width; ++x) {
            size_t i = gb.idx(x, y);
            int face = gb.face[i];
            if (face < 0 || atlas.faceSource[face] == kUntextured) {
                for (int ch = 0; ch < 3; ++ch) pixels.at(x, y, ch) = kUntexturedColor[ch];
                if (untexturedMask) untexturedMask->at(x, y) = 255;
                continue;
            }
            const Image8& page = atlas.pages[atlas.facePage[face]];
            double px = gb.u[i] * page.w;
            double py = (1.0 - gb.v[i]) * page.h;
            uint8_t texel[4] = {0, 0, 0, 0};
            sample_bilinear(page, px, py, texel);
            for (int ch = 0; ch < 3; ++ch) pixels.at(x, y, ch) = texel[ch];
        }
    });
    return pixels;
}

PlaneImage render_plane(int planeId, const TextureAtlas& atlas, const PlaneCamera& cam) {
    PlaneImage out;
    out.planeId = planeId;
    out.pixels = render_atlas_view(atlas, cam.K, cam.camToWorld, &out.mask);
    return out;
}

TriMesh simplify_and_remap(const PlaneGeometry& geom) {
    Vec3 f = geom.normal * -1.0;  // camera forward
    Vec3 s = normalize(cross(f, plane_up(geom)));
    Vec3 u = cross(s, f);
    Vec3 sw = s * (geom.widthM / 2.0);
    Vec3 uh = u * (geom.heightM / 2.0);
    TriMesh quad;
    quad.vertices = {geom.center - sw - uh, geom.center + sw - uh, geom.center + sw + uh,
                     geom.center - sw + uh};
    quad.texcoords = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    quad.faces = {{0, 1, 2}, {0, 2, 3}};
    quad.faceLabels = {geom.planeId, geom.planeId};
    return quad;
}

std::string plane_name(int planeId) {
    if (planeId == kFloorPlaneId) return "floor";
    if (planeId == kCeilingPlaneId) return "ceiling";
    return std::to_string(planeId);
}

void save_plane_image(const PlaneImage& img, const std::string& dir) {
    std::string base = dir + "/plane_" + plane_name(img.planeId);
    save_png(base + ".png", img.pixels);
    save_png(base + ".mask.png", img.mask);
}

namespace {

nlohmann::json vec3_json(const Vec3& v) { return {v.x, v.y, v.z}; }

Vec3 vec3_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw MalformedData("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void save_planes_manifest(const std::vector<PlaneManifestEntry>& entries,
                          const std::string& dir) {
    nlohmann::json root;
    root["metersPerPixel"] = 1.0 / kPlanePixelsPerMeter;
    nlohmann::json planes = nlohmann::json::array();
    for (const PlaneManifestEntry& e : entries) {
        PlaneCamera cam = setup_cam(e.geom);
        nlohmann::json p;
        p["id"] = e.geom.planeId;
        p["name"] = plane_name(e.geom.planeId);
        p["center"] = vec3_json(e.geom.center);
        p["normal"] = vec3_json(e.geom.normal);
        p["widthM"] = e.geom.widthM;
        p["heightM"] = e.geom.heightM;
        p["mbbAlign"] = {e.geom.mbbAlign.x, e.geom.mbbAlign.y};
        p["imageWidth"] = e.imageW;
        p["imageHeight"] = e.imageH;
        p["metersPerPixel"] = e.metersPerPixel;
        p["image"] = e.imageFile;
        p["mask"] = e.maskFile;
        p["camera"] = {{"position", vec3_json(cam.position)},
                       {"fx", cam.K.fx},
                       {"fy", cam.K.fy},
                       {"cx", cam.K.cx},
                       {"cy", cam.K.cy}};
        planes.push_back(std::move(p));
    }
    root["planes"] = std::move(planes);
    std::string path = dir + "/planes.json";
    std::ofstream outFile(path);
    if (!outFile) throw IoError("cannot write " + path);
    outFile << root.dump(2) << "\n";
    if (!outFile.good()) throw IoError("write failed: " + path);
}

std::vector<PlaneManifestEntry> load_planes_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedData(path + ": " + e.what());
    }
    if (!root.is_object() || !root.contains("planes") || !root["planes"].is_array())
        throw MalformedData(path + ": missing planes array");
    std::vector<PlaneManifestEntry> entries;
    for (const nlohmann::json& p : root["planes"]) {
        try {
            PlaneManifestEntry e;
            e.geom.planeId = p.at("id").get<int>();
            e.geom.center = vec3_from(p.at("center"));
            e.geom.normal = vec3_from(p.at("normal"));
            e.geom.widthM = p.at("widthM").get<double>();
            e.geom.heightM = p.at("heightM").get<double>();
            e.geom.mbbAlign = {p.at("mbbAlign").at(0).get<double>(),
                               p.at("mbbAlign").at(1).get<double>()};
            e.imageW = p.at("imageWidth").get<int>();
            e.imageH = p.at("imageHeight").get<int>();
            e.metersPerPixel = p.at("metersPerPixel").get<double>();
            e.imageFile = p.at("image").get<std::string>();
            e.maskFile = p.at("mask").get<std::string>();
            entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedData(path + ": " + e.what());
        }
    }
    return entries;
}

}  // namespace roomtex

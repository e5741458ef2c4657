#pragma once

#include <array>
#include <string>
#include <vector>

#include "roomtex/math.hpp"

namespace roomtex {

// Face label: kObjectLabel for free-standing geometry, otherwise the id of the
// layout plane the face belongs to (wall id, kFloorPlaneId, kCeilingPlaneId).
constexpr int kObjectLabel = -1;

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> faceLabels;  // one entry per face
    std::vector<Vec2> texcoords;  // empty, or one entry per vertex

    bool empty() const { return faces.empty(); }
};

Vec3 face_normal(const TriMesh& m, int f);    // unit; zero vector when degenerate
Vec3 face_centroid(const TriMesh& m, int f);
double face_area(const TriMesh& m, int f);
double surface_area(const TriMesh& m);

// Throws MalformedData when indices are out of range, a face is degenerate
// (area <= 1e-12 m^2), or per-face/per-vertex attribute counts mismatch.
void validate_mesh(const TriMesh& m);

// Wavefront OBJ. Labels are not part of the format; loaded faces get
// kObjectLabel. Polygonal faces are fan-triangulated.
void save_obj(const std::string& path, const TriMesh& m);
TriMesh load_obj(const std::string& path);

// Binary little-endian PLY with double-precision vertex data (and s,t
// texcoords when present). Loaded faces get kObjectLabel.
void save_ply(const std::string& path, const TriMesh& m);
TriMesh load_ply(const std::string& path);

// Sidecar label file: a JSON array with one entry per face, either the string
// "object" or {"structure": <plane id>}.
void save_labels(const std::string& path, const std::vector<int>& faceLabels);
std::vector<int> load_labels(const std::string& path, size_t expectedFaces);

}  // namespace roomtex

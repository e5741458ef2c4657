#pragma once

// Small room and mesh builders shared by the test binaries.

#include <vector>

#include "roomtex/layout.hpp"
#include "roomtex/mesh.hpp"

namespace fixtures {

using namespace roomtex;

inline RoomLayout room_from_corners(const std::vector<Vec2>& corners, double floorH = 0,
                                    double ceilH = 2.5, bool dropLastWall = false) {
    std::vector<PlaneInfo> walls;
    size_t n = corners.size() - (dropLastWall ? 1 : 0);
    for (size_t i = 0; i < n; ++i)
        walls.push_back(make_wall(static_cast<int>(i), corners[i],
                                  corners[(i + 1) % corners.size()], floorH, ceilH));
    return assemble_layout(std::move(walls), floorH, ceilH);
}

inline RoomLayout square_room(double side = 4, double floorH = 0, double ceilH = 2.5) {
    return room_from_corners({{0, 0}, {side, 0}, {side, side}, {0, side}}, floorH, ceilH);
}

// Area 10 m^2.
inline RoomLayout l_room(double floorH = 0, double ceilH = 2.5) {
    return room_from_corners({{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 3}, {0, 3}}, floorH, ceilH);
}

// Area 3 m^2.
inline RoomLayout l_room_small(double floorH = 0, double ceilH = 2.5) {
    return room_from_corners({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, floorH, ceilH);
}

// Axis-aligned box as 12 triangles, outward normals, label = object.
inline TriMesh box_mesh(const Vec3& center, const Vec3& size) {
    TriMesh m;
    Vec3 h = size * 0.5;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({center.x + (i & 1 ? h.x : -h.x), center.y + (i & 2 ? h.y : -h.y),
                              center.z + (i & 4 ? h.z : -h.z)});
    const int quads[6][4] = {
        {0, 4, 6, 2},  // -x
        {1, 3, 7, 5},  // +x
        {0, 1, 5, 4},  // -y
        {2, 6, 7, 3},  // +y
        {0, 2, 3, 1},  // -z
        {4, 5, 7, 6},  // +z
    };
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
        m.faceLabels.push_back(kObjectLabel);
        m.faceLabels.push_back(kObjectLabel);
    }
    return m;
}

// One isolated triangle centered at c, lying in the plane with the given unit
// normal, circumradius r.
inline void add_triangle(TriMesh* m, const Vec3& c, const Vec3& normal, double r = 0.05) {
    Vec3 t = std::abs(normal.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    Vec3 u = cross(t, normal);
    u = u * (1.0 / norm(u));
    Vec3 v = cross(normal, u);
    int base = static_cast<int>(m->vertices.size());
    m->vertices.push_back(c + u * r);
    m->vertices.push_back(c + (u * -0.5 + v * 0.866) * r);
    m->vertices.push_back(c + (u * -0.5 + v * -0.866) * r);
    m->faces.push_back({base, base + 1, base + 2});
    m->faceLabels.push_back(kObjectLabel);
}

}  // namespace fixtures

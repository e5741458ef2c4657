#pragma once

#include <array>
#include <string>
#include <vector>

#include "roomtex/math.hpp"

namespace roomtex {

enum class PlaneKind { Wall, Floor, Ceiling };

// Face-label plane ids for non-wall structure planes. Wall ids come from the
// layout file and are >= 0.
constexpr int kFloorPlaneId = -2;
constexpr int kCeilingPlaneId = -3;

struct PlaneInfo {
    int id = 0;
    Vec3 center;
    Vec3 normal;  // unit length, pointing into the room
    double width = 0, height = 0;
    std::array<Vec3, 4> corners{};
    PlaneKind kind = PlaneKind::Wall;
};

// In-plane orthonormal axes for a vertical wall: u is horizontal, v is +Y,
// and (u, v, normal) is right-handed, so u = cross(v, normal).
struct PlaneAxes {
    Vec3 u, v;
};
PlaneAxes wall_axes(const PlaneInfo& wall);

// Minimum-area bounding box of the floor plan in the X-Z plane.
// width >= height; align is a unit vector along the width edge with polar
// angle in [0, pi).
struct MBB {
    double width = 0, height = 0;
    Vec2 center;
    Vec2 align{1, 0};
};

struct RoomLayout {
    std::vector<PlaneInfo> walls;
    double floorHeight = 0;
    double ceilingHeight = 0;
    bool closed = false;
    std::vector<Vec2> loop;  // CCW wall loop in X-Z; empty when not closed
    std::vector<Vec2> hull;  // CCW convex hull of all wall corners in X-Z
    MBB mbb;
};

// Endpoints of the wall's footprint segment in the X-Z plane.
std::array<Vec2, 2> wall_endpoints(const PlaneInfo& wall);

// Parses and validates a layout JSON document. Throws MalformedLayout,
// DegenerateWall or NonVerticalWall. Derives closedness (endpoints snapped
// within 2 cm), the loop polygon, the convex hull and the MBB.
RoomLayout parse_layout(const std::string& json_text);
RoomLayout load_layout(const std::string& path);
std::string serialize_layout(const RoomLayout& layout);
void save_layout(const std::string& path, const RoomLayout& layout);

// Convenience constructor used by the synthetic-scene generator and tests:
// builds a wall from its two footprint endpoints. When walking e0 -> e1 the
// interior is on the left, i.e. the normal points left of the direction.
PlaneInfo make_wall(int id, const Vec2& e0, const Vec2& e1, double floorHeight,
                    double ceilingHeight);

// Builds a RoomLayout from walls + heights and derives loop/hull/MBB.
RoomLayout assemble_layout(std::vector<PlaneInfo> walls, double floorHeight,
                           double ceilingHeight);

// Strict-interior convex hull (CCW, no collinear points on edges).
// Throws EmptyInput on an empty set and CollinearInput when all points are
// collinear.
std::vector<Vec2> convex_hull_2d(const std::vector<Vec2>& points);

// Minimum-area bounding box via the rotating-calipers edge scan. Handles the
// degenerate all-collinear case (height = 0). Throws EmptyInput.
MBB compute_mbb(const std::vector<Vec2>& points);

// Even-odd test against the loop polygon (closed rooms) or the hull (open
// rooms). Boundary points count as outside.
bool point_in_room(const RoomLayout& layout, const Vec2& p);

// Generic strict even-odd point-in-polygon; boundary points are outside.
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);

double polygon_area(const std::vector<Vec2>& poly);  // signed, CCW positive

// True when any two non-adjacent edges properly intersect or overlap.
bool polygon_self_intersects(const std::vector<Vec2>& poly);

}  // namespace roomtex

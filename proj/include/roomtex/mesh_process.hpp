#pragma once

#include "roomtex/layout.hpp"
#include "roomtex/mesh.hpp"

namespace roomtex {

struct FilterParams {
    double distBandNear = 0.05;   // m: faces closer than this to a plane are dropped
    double distBandFar = 0.10;    // m: near..far band drops faces with plane-parallel normals
    double normalAngleMax = 10;   // degrees
};

// Keeps the faces of a captured mesh that (1) have their centroid inside the
// room footprint, (2) are not inside the near distance band of any layout
// plane, and (3) when inside the near..far band of a plane, tilt away from it
// by more than normalAngleMax. Wall bands apply only where the centroid
// projects into the wall rectangle inflated by distBandNear; floor/ceiling
// bands apply across the whole footprint. Surviving faces keep their labels.
TriMesh filter_mesh(const TriMesh& mesh, const RoomLayout& layout, const FilterParams& params);

// Each wall rectangle triangulated with a uniform interior grid at spacing
// 1/gridPerMeter (at least one interval per side) and constrained boundary
// edges; faces labeled with the wall id, wound so face normals match the wall
// normal.
TriMesh remesh_walls(const RoomLayout& layout, double gridPerMeter = 5);

// Floor and ceiling: the room polygon (loop when closed, convex hull of the
// wall corners otherwise) triangulated with constrained boundary edges, points
// along the boundary at spacing 1/alongEdgePerMeter, and a gridN x gridN
// lattice spanning the layout's oriented bounding box (lattice points outside
// the polygon are discarded). Two copies are emitted: floor at floorHeight
// with +Y normals, ceiling at ceilingHeight with -Y normals.
TriMesh remesh_horizontal(const RoomLayout& layout, int gridN = 15,
                          double alongEdgePerMeter = 5);

// Concatenates two meshes, fixing up indices; labels are preserved exactly.
TriMesh combine(const TriMesh& filtered, const TriMesh& structures);

}  // namespace roomtex

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "roomtex/math.hpp"

namespace roomtex {

struct CdtResult {
    // Actual point set used: exact duplicates merged, near-constraint points
    // snapped onto their constraint segment. Indices below refer to this list.
    std::vector<Vec2> points;
    // CCW triangles strictly inside the constraint boundary.
    std::vector<std::array<int, 3>> triangles;
    // Constrained edges present in the triangulation, normalized (lo, hi).
    std::vector<std::pair<int, int>> constrainedEdges;
};

// Constrained Delaunay triangulation of the given points. `constraints` are
// index pairs into `points`; they must form a non-crossing set whose closed
// loops bound the region to keep (triangles reachable from infinity without
// crossing a constraint are discarded). Points within 1e-6 m of a constraint
// segment are snapped onto it and the constraint is split through them.
// Every non-constrained interior edge of the result is locally Delaunay.
CdtResult triangulate_constrained(const std::vector<Vec2>& points,
                                  const std::vector<std::pair<int, int>>& constraints);

}  // namespace roomtex

#include "roomtex/mesh_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roomtex/cdt.hpp"
#include "roomtex/errors.hpp"

namespace roomtex {

namespace {

double line_angle_deg(const Vec3& a, const Vec3& b) {
    // Angle between undirected lines: mesh face winding is arbitrary.
    double c = std::min(1.0, std::abs(dot(a, b)));
    return rad2deg(std::acos(c));
}

double dist_to_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0, n = poly.size(); i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        Vec2 d = b - a;
        double len2 = dot(d, d);
        double t = len2 > 0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(p - (a + d * t)));
    }
    return best;
}

// Appends a 2D CDT mapped into 3D via `lift`, with one label for every face.
// `flip` reverses the winding order.
template <typename Lift>
void append_cdt(TriMesh* out, const CdtResult& cdt, Lift lift, bool flip, int label) {
    int base = static_cast<int>(out->vertices.size());
    for (const Vec2& p : cdt.points) out->vertices.push_back(lift(p));
    for (const auto& t : cdt.triangles) {
        if (flip)
            out->faces.push_back({base + t[0], base + t[2], base + t[1]});
        else
            out->faces.push_back({base + t[0], base + t[1], base + t[2]});
        out->faceLabels.push_back(label);
    }
}

}  // namespace

TriMesh filter_mesh(const TriMesh& mesh, const RoomLayout& layout, const FilterParams& params) {
    TriMesh out;
    out.vertices = mesh.vertices;
    out.texcoords = mesh.texcoords;
    const double near = params.distBandNear;
    const double far = params.distBandFar;

    struct WallFrame {
        Vec3 center, normal, u, v;
        double halfW, halfH;
    };
    std::vector<WallFrame> frames;
    for (const PlaneInfo& w : layout.walls) {
        PlaneAxes ax = wall_axes(w);
        frames.push_back({w.center, w.normal, ax.u, ax.v, w.width / 2, w.height / 2});
    }

    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        Vec3 c = face_centroid(mesh, static_cast<int>(f));
        if (!point_in_room(layout, c.xz())) continue;
        Vec3 fn = face_normal(mesh, static_cast<int>(f));

        bool removed = false;
        for (const WallFrame& w : frames) {
            Vec3 rel = c - w.center;
            double d = std::abs(dot(rel, w.normal));
            if (d > far) continue;
            // The band is local to the wall rectangle (slightly inflated).
            if (std::abs(dot(rel, w.u)) > w.halfW + near) continue;
            if (std::abs(dot(rel, w.v)) > w.halfH + near) continue;
            if (d < near || line_angle_deg(fn, w.normal) <= params.normalAngleMax) {
                removed = true;
                break;
            }
        }
        if (!removed) {
            const Vec3 up{0, 1, 0};
            for (double h : {layout.floorHeight, layout.ceilingHeight}) {
                double d = std::abs(c.y - h);
                if (d > far) continue;
                if (d < near || line_angle_deg(fn, up) <= params.normalAngleMax) {
                    removed = true;
                    break;
                }
            }
        }
        if (removed) continue;
        out.faces.push_back(mesh.faces[f]);
        out.faceLabels.push_back(mesh.faceLabels[f]);
    }
    return out;
}

TriMesh remesh_walls(const RoomLayout& layout, double gridPerMeter) {
    TriMesh out;
    for (const PlaneInfo& w : layout.walls) {
        int nu = std::max<long long>(1, std::llround(w.width * gridPerMeter));
        int nv = std::max<long long>(1, std::llround(w.height * gridPerMeter));
        std::vector<Vec2> pts;
        for (int j = 0; j <= nv; ++j)
            for (int i = 0; i <= nu; ++i)
                pts.push_back({i * w.width / nu, j * w.height / nv});
        int c00 = 0, c10 = nu, c01 = nv * (nu + 1), c11 = nv * (nu + 1) + nu;
        std::vector<std::pair<int, int>> cons{{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}};
        CdtResult cdt = triangulate_constrained(pts, cons);

        PlaneAxes ax = wall_axes(w);
        Vec3 origin = w.center - ax.u * (w.width / 2) - ax.v * (w.height / 2);
        append_cdt(
            &out, cdt, [&](const Vec2& p) { return origin + ax.u * p.x + ax.v * p.y; },
            /*flip=*/false, w.id);
    }
    return out;
}

TriMesh remesh_horizontal(const RoomLayout& layout, int gridN, double alongEdgePerMeter) {
    const std::vector<Vec2>& polygon = layout.closed ? layout.loop : layout.hull;
    if (polygon.size() < 3) throw EmptyInput("room polygon has fewer than 3 corners");
    if (polygon_self_intersects(polygon)) throw SelfIntersectingLoop("room loop self-intersects");

    int n = static_cast<int>(polygon.size());
    std::vector<Vec2> pts = polygon;
    std::vector<std::pair<int, int>> cons;
    for (int i = 0; i < n; ++i) cons.push_back({i, (i + 1) % n});

    // Points along the boundary. They land on the constraints (up to rounding)
    // and split them during triangulation.
    for (int i = 0; i < n; ++i) {
        Vec2 a = polygon[i], b = polygon[(i + 1) % n];
        long long m = std::max<long long>(1, std::llround(norm(b - a) * alongEdgePerMeter));
        for (long long k = 1; k < m; ++k)
            pts.push_back(a + (b - a) * (double(k) / double(m)));
    }

    // Lattice over the oriented bounding box, inclusive of its edges.
    const MBB& box = layout.mbb;
    Vec2 across = perp(box.align);
    for (int j = 0; j < gridN; ++j) {
        for (int i = 0; i < gridN; ++i) {
            double fu = gridN > 1 ? double(i) / (gridN - 1) - 0.5 : 0.0;
            double fv = gridN > 1 ? double(j) / (gridN - 1) - 0.5 : 0.0;
            Vec2 p = box.center + box.align * (fu * box.width) + across * (fv * box.height);
            // Keep interior points; near-boundary ones survive to be snapped.
            if (point_in_polygon(polygon, p) || dist_to_polygon(polygon, p) <= 1e-6)
                pts.push_back(p);
        }
    }

    CdtResult cdt = triangulate_constrained(pts, cons);

    TriMesh out;
    // 2D (x, y) is the plan-view (X, Z); lifting preserves that. Chart-order
    // winding gives -Y normals, so the floor copy is flipped to face up.
    append_cdt(
        &out, cdt, [&](const Vec2& p) { return Vec3{p.x, layout.floorHeight, p.y}; },
        /*flip=*/true, kFloorPlaneId);
    append_cdt(
        &out, cdt, [&](const Vec2& p) { return Vec3{p.x, layout.ceilingHeight, p.y}; },
        /*flip=*/false, kCeilingPlaneId);
    return out;
}

TriMesh combine(const TriMesh& filtered, const TriMesh& structures) {
    TriMesh out = filtered;
    int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), structures.vertices.begin(),
                        structures.vertices.end());
    for (const auto& f : structures.faces)
        out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    out.faceLabels.insert(out.faceLabels.end(), structures.faceLabels.begin(),
                          structures.faceLabels.end());
    if (!out.texcoords.empty() || !structures.texcoords.empty()) {
        out.texcoords.resize(base, {0, 0});
        if (structures.texcoords.empty()) {
            out.texcoords.resize(out.vertices.size(), {0, 0});
        } else {
            out.texcoords.insert(out.texcoords.end(), structures.texcoords.begin(),
                                 structures.texcoords.end());
        }
    }
    return out;
}

}  // namespace roomtex

#include "roomtex/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "roomtex/errors.hpp"

namespace roomtex {

using nlohmann::json;

namespace {

constexpr double kEndpointSnap = 0.02;     // loop-closure endpoint snap distance
constexpr double kMinWallExtent = 1e-4;    // below this a wall is degenerate
constexpr double kMaxNormalTiltY = 1e-3;   // |y| of a valid wall normal
constexpr double kCornerTol = 1e-6;

bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Canonical representative of an undirected direction: polar angle in [0, pi).
Vec2 canonical_dir(Vec2 d) {
    if (d.y < 0 || (d.y == 0 && d.x < 0)) d = -d;
    return d;
}

double polar_angle(const Vec2& d) {
    double a = std::atan2(d.y, d.x);
    if (a < 0) a += kPi;
    if (a >= kPi) a -= kPi;
    return a;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    double v = cross(b - a, c - a);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment_collinear(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Any contact between closed segments, proper or touching.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
    int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment_collinear(a, b, c)) return true;
    if (o2 == 0 && on_segment_collinear(a, b, d)) return true;
    if (o3 == 0 && on_segment_collinear(c, d, a)) return true;
    if (o4 == 0 && on_segment_collinear(c, d, b)) return true;
    return false;
}

}  // namespace

PlaneAxes wall_axes(const PlaneInfo& wall) {
    Vec3 v{0, 1, 0};
    Vec3 u = normalize(cross(v, wall.normal));
    return {u, normalize(cross(wall.normal, u))};
}

std::array<Vec2, 2> wall_endpoints(const PlaneInfo& wall) {
    Vec3 u = wall_axes(wall).u;
    Vec3 a = wall.center - u * (wall.width / 2);
    Vec3 b = wall.center + u * (wall.width / 2);
    return {a.xz(), b.xz()};
}

PlaneInfo make_wall(int id, const Vec2& e0, const Vec2& e1, double floorHeight,
                    double ceilingHeight) {
    PlaneInfo w;
    w.id = id;
    w.width = norm(e1 - e0);
    w.height = ceilingHeight - floorHeight;
    Vec2 d = normalize(e1 - e0);
    Vec2 n = perp(d);  // interior on the left of e0 -> e1
    w.normal = {n.x, 0, n.y};
    Vec2 mid = (e0 + e1) * 0.5;
    w.center = {mid.x, (floorHeight + ceilingHeight) * 0.5, mid.y};
    w.corners = {Vec3{e0.x, floorHeight, e0.y}, Vec3{e1.x, floorHeight, e1.y},
                 Vec3{e1.x, ceilingHeight, e1.y}, Vec3{e0.x, ceilingHeight, e0.y}};
    w.kind = PlaneKind::Wall;
    return w;
}

std::vector<Vec2> convex_hull_2d(const std::vector<Vec2>& points) {
    if (points.empty()) throw EmptyInput("convex_hull_2d given no points");
    std::vector<Vec2> pts = points;
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const size_t n = pts.size();
    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower hull
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper hull
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    if (hull.size() < 3) throw CollinearInput("all points are collinear");
    return hull;
}

MBB compute_mbb(const std::vector<Vec2>& points) {
    if (points.empty()) throw EmptyInput("compute_mbb given no points");

    std::vector<Vec2> hull;
    try {
        hull = convex_hull_2d(points);
    } catch (const CollinearInput&) {
        // Degenerate footprint: a segment (or a single point).
        Vec2 lo = points[0], hi = points[0];
        for (const Vec2& p : points) {
            if (p.x < lo.x || (p.x == lo.x && p.y < lo.y)) lo = p;
            if (p.x > hi.x || (p.x == hi.x && p.y > hi.y)) hi = p;
        }
        MBB box;
        box.center = (lo + hi) * 0.5;
        box.width = norm(hi - lo);
        box.height = 0;
        box.align = box.width > 0 ? canonical_dir(normalize(hi - lo)) : Vec2{1, 0};
        return box;
    }

    // The minimum-area rectangle has one side collinear with a hull edge, so an
    // edge scan is exhaustive.
    MBB best;
    double bestArea = std::numeric_limits<double>::infinity();
    double bestAngle = std::numeric_limits<double>::infinity();
    const size_t n = hull.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 d = normalize(hull[(i + 1) % n] - hull[i]);
        Vec2 q = perp(d);
        double minU = std::numeric_limits<double>::infinity(), maxU = -minU;
        double minV = minU, maxV = -minU;
        for (const Vec2& p : hull) {
            double u = dot(p, d), v = dot(p, q);
            minU = std::min(minU, u); maxU = std::max(maxU, u);
            minV = std::min(minV, v); maxV = std::max(maxV, v);
        }
        double eu = maxU - minU, ev = maxV - minV;
        double area = eu * ev;
        Vec2 align = canonical_dir(eu >= ev ? d : q);
        double angle = polar_angle(align);
        double tol = 1e-9 * std::max(1.0, bestArea);
        bool better = area < bestArea - tol || (std::abs(area - bestArea) <= tol && angle < bestAngle);
        if (better) {
            bestArea = area;
            bestAngle = angle;
            best.width = std::max(eu, ev);
            best.height = std::min(eu, ev);
            best.align = align;
            double cu = (minU + maxU) * 0.5, cv = (minV + maxV) * 0.5;
            best.center = d * cu + q * cv;
        }
    }
    return best;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    const size_t n = poly.size();
    if (n < 3) return false;
    // Boundary points are outside by contract.
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if (orient_sign(a, b, p) == 0 && on_segment_collinear(a, b, p)) return false;
    }
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool point_in_room(const RoomLayout& layout, const Vec2& p) {
    return point_in_polygon(layout.closed ? layout.loop : layout.hull, p);
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0;
    for (size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return a / 2;
}

bool polygon_self_intersects(const std::vector<Vec2>& poly) {
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share an endpoint by construction).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return true;
        }
    }
    return false;
}

RoomLayout assemble_layout(std::vector<PlaneInfo> walls, double floorHeight,
                           double ceilingHeight) {
    RoomLayout lay;
    lay.walls = std::move(walls);
    lay.floorHeight = floorHeight;
    lay.ceilingHeight = ceilingHeight;

    const size_t n = lay.walls.size();

    // Cluster wall endpoints within the snap distance.
    std::vector<Vec2> eps(2 * n);
    for (size_t i = 0; i < n; ++i) {
        auto e = wall_endpoints(lay.walls[i]);
        eps[2 * i] = e[0];
        eps[2 * i + 1] = e[1];
    }
    UnionFind uf(static_cast<int>(2 * n));
    for (size_t i = 0; i < 2 * n; ++i)
        for (size_t j = i + 1; j < 2 * n; ++j)
            if (norm(eps[i] - eps[j]) <= kEndpointSnap) uf.unite(int(i), int(j));

    std::vector<int> clusterOf(2 * n);
    std::vector<int> degree;
    std::vector<int> clusterIds;
    for (size_t i = 0; i < 2 * n; ++i) {
        int root = uf.find(int(i));
        auto it = std::find(clusterIds.begin(), clusterIds.end(), root);
        if (it == clusterIds.end()) {
            clusterIds.push_back(root);
            degree.push_back(0);
            clusterOf[i] = int(clusterIds.size()) - 1;
        } else {
            clusterOf[i] = int(it - clusterIds.begin());
        }
        degree[clusterOf[i]]++;
    }

    bool closed = n >= 3 && clusterIds.size() == n &&
                  std::all_of(degree.begin(), degree.end(), [](int d) { return d == 2; });
    if (closed) {
        // Walk the cycle wall by wall.
        std::vector<Vec2> clusterPos(clusterIds.size(), Vec2{0, 0});
        std::vector<int> clusterCount(clusterIds.size(), 0);
        for (size_t i = 0; i < 2 * n; ++i) {
            clusterPos[clusterOf[i]] = clusterPos[clusterOf[i]] + eps[i];
            clusterCount[clusterOf[i]]++;
        }
        for (size_t c = 0; c < clusterPos.size(); ++c) clusterPos[c] = clusterPos[c] / clusterCount[c];

        std::vector<bool> used(n, false);
        std::vector<Vec2> loop;
        size_t wall = 0;
        int enterCluster = clusterOf[0];  // start at wall 0's first endpoint
        for (size_t step = 0; step < n; ++step) {
            used[wall] = true;
            loop.push_back(clusterPos[enterCluster]);
            int exitCluster = clusterOf[2 * wall] == enterCluster ? clusterOf[2 * wall + 1]
                                                                  : clusterOf[2 * wall];
            // Find the unused wall incident to the exit cluster.
            size_t nextWall = n;
            for (size_t w = 0; w < n; ++w) {
                if (used[w]) continue;
                if (clusterOf[2 * w] == exitCluster || clusterOf[2 * w + 1] == exitCluster) {
                    nextWall = w;
                    break;
                }
            }
            if (nextWall == n) {
                if (step + 1 < n || exitCluster != clusterOf[0]) {
                    closed = false;  // disjoint cycles
                }
                break;
            }
            wall = nextWall;
            enterCluster = exitCluster;
        }
        if (closed && loop.size() == n) {
            if (polygon_area(loop) < 0) std::reverse(loop.begin(), loop.end());
            lay.loop = std::move(loop);
        } else {
            closed = false;
        }
    }
    lay.closed = closed;

    std::vector<Vec2> cornerPts;
    for (const auto& w : lay.walls)
        for (const auto& c : w.corners) cornerPts.push_back(c.xz());
    if (!cornerPts.empty()) {
        try {
            lay.hull = convex_hull_2d(cornerPts);
        } catch (const CollinearInput&) {
            lay.hull.clear();  // single-wall degenerate footprint
        }
        lay.mbb = compute_mbb(cornerPts);
    }
    return lay;
}

namespace {

Vec3 parse_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw MalformedLayout("expected a number triple");
    Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!finite(v)) throw MalformedLayout("non-finite coordinate");
    return v;
}

void validate_wall(const PlaneInfo& w) {
    if (w.width <= kMinWallExtent || w.height <= kMinWallExtent)
        throw DegenerateWall("wall " + std::to_string(w.id) + " has near-zero extent");
    if (std::abs(norm(w.normal) - 1.0) > 1e-9)
        throw MalformedLayout("wall " + std::to_string(w.id) + " normal is not unit length");
    if (std::abs(w.normal.y) > kMaxNormalTiltY)
        throw NonVerticalWall("wall " + std::to_string(w.id) + " normal tilts out of plane");

    PlaneAxes ax = wall_axes(w);
    bool seen[2][2] = {{false, false}, {false, false}};
    for (const Vec3& c : w.corners) {
        Vec3 d = c - w.center;
        if (std::abs(dot(d, w.normal)) > kCornerTol)
            throw MalformedLayout("wall " + std::to_string(w.id) + " corners are not coplanar");
        double u = dot(d, ax.u), v = dot(d, ax.v);
        if (std::abs(std::abs(u) - w.width / 2) > kCornerTol ||
            std::abs(std::abs(v) - w.height / 2) > kCornerTol)
            throw MalformedLayout("wall " + std::to_string(w.id) +
                                  " corners do not span width x height");
        seen[u > 0][v > 0] = true;
    }
    if (!(seen[0][0] && seen[0][1] && seen[1][0] && seen[1][1]))
        throw MalformedLayout("wall " + std::to_string(w.id) + " corners do not form a rectangle");
}

}  // namespace

RoomLayout parse_layout(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw MalformedLayout(std::string("invalid JSON: ") + e.what());
    }

    try {
        if (!j.is_object() || !j.contains("walls") || !j.contains("floorHeight") ||
            !j.contains("ceilingHeight"))
            throw MalformedLayout("missing walls/floorHeight/ceilingHeight");
        double floorH = j["floorHeight"].get<double>();
        double ceilH = j["ceilingHeight"].get<double>();
        if (!std::isfinite(floorH) || !std::isfinite(ceilH) || ceilH <= floorH)
            throw MalformedLayout("ceilingHeight must exceed floorHeight");

        std::vector<PlaneInfo> walls;
        std::vector<int> ids;
        for (const json& wj : j["walls"]) {
            PlaneInfo w;
            w.id = wj.at("id").get<int>();
            if (w.id < 0) throw MalformedLayout("wall ids must be non-negative");
            if (std::find(ids.begin(), ids.end(), w.id) != ids.end())
                throw MalformedLayout("duplicate wall id " + std::to_string(w.id));
            ids.push_back(w.id);
            w.center = parse_vec3(wj.at("center"));
            w.normal = parse_vec3(wj.at("normal"));
            w.width = wj.at("width").get<double>();
            w.height = wj.at("height").get<double>();
            if (!std::isfinite(w.width) || !std::isfinite(w.height))
                throw MalformedLayout("non-finite wall extent");
            const json& cj = wj.at("corners");
            if (!cj.is_array() || cj.size() != 4) throw MalformedLayout("expected 4 corners");
            for (int i = 0; i < 4; ++i) w.corners[i] = parse_vec3(cj[i]);
            validate_wall(w);
            walls.push_back(w);
        }
        if (walls.empty()) throw MalformedLayout("layout has no walls");
        return assemble_layout(std::move(walls), floorH, ceilH);
    } catch (const json::exception& e) {
        throw MalformedLayout(std::string("schema violation: ") + e.what());
    }
}

RoomLayout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_layout(ss.str());
}

std::string serialize_layout(const RoomLayout& layout) {
    json j;
    j["walls"] = json::array();
    for (const PlaneInfo& w : layout.walls) {
        json wj;
        wj["id"] = w.id;
        wj["center"] = {w.center.x, w.center.y, w.center.z};
        wj["normal"] = {w.normal.x, w.normal.y, w.normal.z};
        wj["width"] = w.width;
        wj["height"] = w.height;
        wj["corners"] = json::array();
        for (const Vec3& c : w.corners) wj["corners"].push_back({c.x, c.y, c.z});
        j["walls"].push_back(wj);
    }
    j["floorHeight"] = layout.floorHeight;
    j["ceilingHeight"] = layout.ceilingHeight;
    return j.dump(2);
}

void save_layout(const std::string& path, const RoomLayout& layout) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << serialize_layout(layout) << "\n";
}

}  // namespace roomtex

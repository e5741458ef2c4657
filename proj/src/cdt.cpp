#include "roomtex/cdt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "roomtex/errors.hpp"
#include "roomtex/predicates.hpp"

namespace roomtex {

namespace {

constexpr double kSnapDist = 1e-6;   // points this close to a constraint are snapped onto it
constexpr double kMergeDist = 1e-9;  // points this close to each other are merged

struct Tri {
    int v[3];       // CCW
    int n[3];       // neighbor across edge k = (v[k], v[k+1]); -1 if none
    bool con[3];    // edge k is a constraint
    bool alive = true;
};

class Triangulator {
public:
    explicit Triangulator(std::vector<Vec2> pts) : pts_(std::move(pts)) {
        // Super-triangle comfortably containing everything.
        double minX = 1e300, maxX = -1e300, minY = 1e300, maxY = -1e300;
        for (const Vec2& p : pts_) {
            minX = std::min(minX, p.x); maxX = std::max(maxX, p.x);
            minY = std::min(minY, p.y); maxY = std::max(maxY, p.y);
        }
        double cx = (minX + maxX) / 2, cy = (minY + maxY) / 2;
        double d = std::max({maxX - minX, maxY - minY, 1.0}) * 64;
        super_ = static_cast<int>(pts_.size());
        pts_.push_back({cx - 2 * d, cy - d});
        pts_.push_back({cx + 2 * d, cy - d});
        pts_.push_back({cx, cy + 2 * d});
        incident_.assign(pts_.size(), -1);
        Tri t{{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, {false, false, false}, true};
        tris_.push_back(t);
        note_incident(0);
        for (int i = 0; i < super_; ++i) insert_point(i);
    }

    void insert_constraint(int a, int b) {
        // walk_constraint may stop early at a vertex lying exactly on the
        // segment; it guarantees (a, stop) is constrained when it returns one.
        while (a != b) {
            if (mark_if_edge(a, b)) return;
            int stop = walk_constraint(a, b);
            if (stop < 0) return;
            a = stop;
        }
    }

    CdtResult finalize() {
        // Flood from the super-triangle through non-constrained edges: every
        // triangle reached lies outside the constraint boundary.
        std::vector<char> outside(tris_.size(), 0);
        std::queue<int> q;
        for (size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive) continue;
            if (has_super(static_cast<int>(t)) && !outside[t]) {
                outside[t] = 1;
                q.push(static_cast<int>(t));
            }
        }
        while (!q.empty()) {
            int t = q.front();
            q.pop();
            for (int k = 0; k < 3; ++k) {
                int u = tris_[t].n[k];
                if (u < 0 || outside[u] || tris_[t].con[k]) continue;
                outside[u] = 1;
                q.push(u);
            }
        }

        CdtResult res;
        res.points.assign(pts_.begin(), pts_.begin() + super_);
        std::map<std::pair<int, int>, bool> conEdges;
        for (size_t t = 0; t < tris_.size(); ++t) {
            if (!tris_[t].alive || outside[t] || has_super(static_cast<int>(t))) continue;
            const Tri& tr = tris_[t];
            res.triangles.push_back({tr.v[0], tr.v[1], tr.v[2]});
            for (int k = 0; k < 3; ++k)
                if (tr.con[k])
                    conEdges[{std::min(tr.v[k], tr.v[(k + 1) % 3]),
                              std::max(tr.v[k], tr.v[(k + 1) % 3])}] = true;
        }
        for (const auto& [e, _] : conEdges) res.constrainedEdges.push_back(e);
        return res;
    }

private:
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> incident_;  // some alive triangle containing each vertex
    int super_;
    int last_ = 0;

    const Vec2& P(int i) const { return pts_[i]; }

    bool has_super(int t) const {
        for (int k = 0; k < 3; ++k)
            if (tris_[t].v[k] >= super_) return true;
        return false;
    }

    void note_incident(int t) {
        for (int k = 0; k < 3; ++k) incident_[tris_[t].v[k]] = t;
    }

    int edge_of(int t, int a, int b) const {
        for (int k = 0; k < 3; ++k)
            if (tris_[t].v[k] == a && tris_[t].v[(k + 1) % 3] == b) return k;
        return -1;
    }

    int vertex_pos(int t, int v) const {
        for (int k = 0; k < 3; ++k)
            if (tris_[t].v[k] == v) return k;
        return -1;
    }

    // Link t's edge k with the triangle u (two-way).
    void link(int t, int k, int u) {
        tris_[t].n[k] = u;
        if (u >= 0) {
            int j = edge_of(u, tris_[t].v[(k + 1) % 3], tris_[t].v[k]);
            tris_[u].n[j] = t;
        }
    }

    // Locate the triangle containing p; returns (tri, edge) with edge = -1 for
    // strict interior, or the edge index p lies on. vertexHit reports an
    // exactly coincident vertex (should not occur after dedup).
    std::pair<int, int> locate(const Vec2& p, int* vertexHit) {
        *vertexHit = -1;
        int t = last_ < static_cast<int>(tris_.size()) && tris_[last_].alive ? last_ : 0;
        if (!tris_[t].alive)
            for (size_t i = 0; i < tris_.size(); ++i)
                if (tris_[i].alive) { t = static_cast<int>(i); break; }

        size_t guard = 0;
        while (true) {
            if (++guard > tris_.size() * 4 + 16) {  // robust fallback
                for (size_t i = 0; i < tris_.size(); ++i) {
                    if (!tris_[i].alive) continue;
                    int o0 = orient2d(P(tris_[i].v[0]), P(tris_[i].v[1]), p);
                    int o1 = orient2d(P(tris_[i].v[1]), P(tris_[i].v[2]), p);
                    int o2 = orient2d(P(tris_[i].v[2]), P(tris_[i].v[0]), p);
                    if (o0 >= 0 && o1 >= 0 && o2 >= 0) { t = static_cast<int>(i); guard = 0; break; }
                }
                if (guard != 0) throw std::logic_error("cdt: point location failed");
            }
            int neg = -1, zeroEdge = -1, zeroCount = 0;
            for (int k = 0; k < 3; ++k) {
                int o = orient2d(P(tris_[t].v[k]), P(tris_[t].v[(k + 1) % 3]), p);
                if (o < 0) { neg = k; break; }
                if (o == 0) { zeroEdge = k; ++zeroCount; }
            }
            if (neg >= 0) {
                int u = tris_[t].n[neg];
                if (u < 0) throw std::logic_error("cdt: walked out of the super-triangle");
                t = u;
                continue;
            }
            if (zeroCount == 2) {
                // p coincides with the vertex shared by the two zero edges.
                for (int k = 0; k < 3; ++k) {
                    const Vec2& v = P(tris_[t].v[k]);
                    if (v.x == p.x && v.y == p.y) { *vertexHit = tris_[t].v[k]; break; }
                }
                // Near-coincident but not equal: treat as on-edge.
                if (*vertexHit < 0) return {t, zeroEdge};
                return {t, -2};
            }
            return {t, zeroEdge};  // -1 when strictly interior
        }
    }

    void insert_point(int pi) {
        int vertexHit;
        auto [t, edge] = locate(P(pi), &vertexHit);
        if (edge == -2) return;  // duplicate; dedup should have caught it
        std::vector<std::pair<int, int>> check;
        if (edge < 0) {
            split_face(t, pi, check);
        } else {
            split_edge(t, edge, pi, check);
        }
        for (auto& [ct, ck] : check) legalize(ct, ck);
    }

    // Split triangle t = (a,b,c) into (a,b,p), (b,c,p), (c,a,p).
    void split_face(int t, int pi, std::vector<std::pair<int, int>>& check) {
        Tri old = tris_[t];
        int ids[3] = {t, alloc(), alloc()};
        for (int k = 0; k < 3; ++k) {
            Tri nt;
            nt.v[0] = old.v[k];
            nt.v[1] = old.v[(k + 1) % 3];
            nt.v[2] = pi;
            nt.con[0] = old.con[k];
            nt.con[1] = nt.con[2] = false;
            nt.n[0] = nt.n[1] = nt.n[2] = -1;
            tris_[ids[k]] = nt;
        }
        for (int k = 0; k < 3; ++k) {
            link(ids[k], 0, old.n[k]);
            tris_[ids[k]].n[1] = ids[(k + 1) % 3];
            tris_[ids[k]].n[2] = ids[(k + 2) % 3];
        }
        for (int k = 0; k < 3; ++k) {
            note_incident(ids[k]);
            check.push_back({ids[k], 0});
        }
        last_ = ids[0];
    }

    // Split edge k of t (and its neighbor, if any) at p.
    void split_edge(int t, int k, int pi, std::vector<std::pair<int, int>>& check) {
        int u = tris_[t].n[k];
        bool wasCon = tris_[t].con[k];
        int a = tris_[t].v[k], b = tris_[t].v[(k + 1) % 3], c = tris_[t].v[(k + 2) % 3];

        // t side: (a,b,c) -> (a,p,c) + (p,b,c)
        int t2 = alloc();
        Tri oldT = tris_[t];
        Tri ta{{a, pi, c}, {-1, -1, -1}, {wasCon, false, false}, true};
        Tri tb{{pi, b, c}, {-1, -1, -1}, {wasCon, false, false}, true};
        tb.con[1] = oldT.con[(k + 1) % 3];
        ta.con[2] = oldT.con[(k + 2) % 3];
        tris_[t] = ta;
        tris_[t2] = tb;
        tris_[t].n[1] = t2;
        tris_[t2].n[2] = t;
        link(t2, 1, oldT.n[(k + 1) % 3]);
        link(t, 2, oldT.n[(k + 2) % 3]);
        note_incident(t);
        note_incident(t2);
        check.push_back({t2, 1});
        check.push_back({t, 2});

        if (u >= 0) {
            int j = edge_of(u, b, a);
            int d = tris_[u].v[(j + 2) % 3];
            Tri oldU = tris_[u];
            int u2 = alloc();
            // u side: (b,a,d) -> (b,p,d) + (p,a,d)
            Tri ua{{b, pi, d}, {-1, -1, -1}, {wasCon, false, false}, true};
            Tri ub{{pi, a, d}, {-1, -1, -1}, {wasCon, false, false}, true};
            ua.con[2] = oldU.con[(j + 2) % 3];
            ub.con[1] = oldU.con[(j + 1) % 3];
            tris_[u] = ua;
            tris_[u2] = ub;
            tris_[u].n[1] = u2;
            tris_[u2].n[2] = u;
            link(u, 2, oldU.n[(j + 2) % 3]);
            link(u2, 1, oldU.n[(j + 1) % 3]);
            // Cross links: (a,p) edge of ta <-> (p,a) edge of ub; (p,b) of tb <-> (b,p) of ua.
            tris_[t].n[0] = u2;
            tris_[u2].n[0] = t;
            tris_[t2].n[0] = u;
            tris_[u].n[0] = t2;
            note_incident(u);
            note_incident(u2);
            check.push_back({u, 2});
            check.push_back({u2, 1});
        } else {
            tris_[t].n[0] = -1;
            tris_[t2].n[0] = -1;
        }
        last_ = t;
    }

    int alloc() {
        tris_.push_back(Tri{{0, 0, 0}, {-1, -1, -1}, {false, false, false}, true});
        return static_cast<int>(tris_.size()) - 1;
    }

    void legalize(int t, int k) {
        std::vector<std::pair<int, int>> stack{{t, k}};
        while (!stack.empty()) {
            auto [ct, ck] = stack.back();
            stack.pop_back();
            if (!tris_[ct].alive || tris_[ct].con[ck]) continue;
            int u = tris_[ct].n[ck];
            if (u < 0) continue;
            int a = tris_[ct].v[ck], b = tris_[ct].v[(ck + 1) % 3], c = tris_[ct].v[(ck + 2) % 3];
            int j = edge_of(u, b, a);
            if (j < 0) continue;
            int d = tris_[u].v[(j + 2) % 3];
            if (incircle(P(a), P(b), P(c), P(d)) <= 0) continue;
            // Only flip when the resulting triangles are valid (always true for
            // a genuine Delaunay violation, kept as a guard).
            if (orient2d(P(a), P(d), P(c)) <= 0 || orient2d(P(d), P(b), P(c)) <= 0) continue;

            Tri oldT = tris_[ct], oldU = tris_[u];
            // (a,b,c)+(b,a,d) -> (a,d,c)+(d,b,c)
            Tri nt{{a, d, c}, {-1, -1, -1}, {false, false, false}, true};
            Tri nu{{d, b, c}, {-1, -1, -1}, {false, false, false}, true};
            nt.con[0] = oldU.con[(j + 1) % 3];
            nt.con[2] = oldT.con[(ck + 2) % 3];
            nu.con[0] = oldU.con[(j + 2) % 3];
            nu.con[1] = oldT.con[(ck + 1) % 3];
            tris_[ct] = nt;
            tris_[u] = nu;
            tris_[ct].n[1] = u;
            tris_[u].n[2] = ct;
            link(ct, 0, oldU.n[(j + 1) % 3]);
            link(ct, 2, oldT.n[(ck + 2) % 3]);
            link(u, 0, oldU.n[(j + 2) % 3]);
            link(u, 1, oldT.n[(ck + 1) % 3]);
            note_incident(ct);
            note_incident(u);
            stack.push_back({ct, 0});
            stack.push_back({u, 0});
            stack.push_back({ct, 2});
            stack.push_back({u, 1});
        }
    }

    // Circulate the alive triangles around vertex v.
    std::vector<int> triangles_around(int v) {
        std::vector<int> out;
        int start = incident_[v];
        if (start < 0 || !tris_[start].alive || vertex_pos(start, v) < 0) {
            start = -1;
            for (size_t i = 0; i < tris_.size(); ++i)
                if (tris_[i].alive && vertex_pos(static_cast<int>(i), v) >= 0) {
                    start = static_cast<int>(i);
                    break;
                }
            if (start < 0) return out;
            incident_[v] = start;
        }
        int t = start;
        size_t guard = 0;
        do {
            out.push_back(t);
            int i = vertex_pos(t, v);
            int nxt = tris_[t].n[i];  // neighbor across edge (v, next)
            if (nxt < 0) break;       // cannot happen strictly inside the super-triangle
            t = nxt;
        } while (t != start && ++guard < tris_.size() + 8);
        return out;
    }

    bool mark_if_edge(int a, int b) {
        for (int t : triangles_around(a)) {
            int k = edge_of(t, a, b);
            if (k < 0) k = edge_of(t, b, a);
            if (k < 0) continue;
            tris_[t].con[k] = true;
            int u = tris_[t].n[k];
            if (u >= 0) {
                int j = edge_of(u, tris_[t].v[(k + 1) % 3], tris_[t].v[k]);
                tris_[u].con[j] = true;
            }
            return true;
        }
        return false;
    }

    // Marches the segment a->b, carves the crossed cavity and retriangulates
    // with (a, b) as a constrained base edge. Returns -1 when the full segment
    // was recovered, or a vertex lying exactly on the open segment at which the
    // recovery stopped — the prefix up to that vertex is constrained on return.
    int walk_constraint(int a, int b) {
        const Vec2 pa = P(a);
        const Vec2 pb = P(b);

        // Find the triangle at `a` whose opposite edge the segment crosses.
        int t0 = -1, left0 = -1, right0 = -1;
        for (int t : triangles_around(a)) {
            int i = vertex_pos(t, a);
            int p = tris_[t].v[(i + 1) % 3];
            int q = tris_[t].v[(i + 2) % 3];
            int op = orient2d(pa, pb, P(p));
            int oq = orient2d(pa, pb, P(q));
            // A neighbor vertex exactly on the open segment: the collinear
            // edge (a, p) is already present, so constrain it directly.
            if (op == 0 && between(pa, pb, P(p))) { mark_if_edge(a, p); return p; }
            if (oq == 0 && between(pa, pb, P(q))) { mark_if_edge(a, q); return q; }
            if (op < 0 && oq > 0) { t0 = t; left0 = q; right0 = p; break; }
        }
        if (t0 < 0) throw std::logic_error("cdt: lost constraint start");

        std::vector<int> cavity{t0};
        std::vector<int> upper{a}, lower{a};  // left / right polylines
        upper.push_back(left0);
        lower.push_back(right0);

        int earlyStop = -1;
        int t = t0;
        int eL = left0, eR = right0;  // current crossed edge is (eR, eL) seen from t
        while (true) {
            int k = edge_of(t, eR, eL);
            if (k < 0) k = edge_of(t, eL, eR);
            if (tris_[t].con[k]) throw MalformedData("constraint crosses another constraint");
            int u = tris_[t].n[k];
            if (u < 0) throw std::logic_error("cdt: constraint walk fell off");
            int j = edge_of(u, tris_[t].v[(k + 1) % 3], tris_[t].v[k]);
            int r = tris_[u].v[(j + 2) % 3];
            cavity.push_back(u);
            if (r == b) break;
            int orr = orient2d(pa, pb, P(r));
            if (orr == 0 && between(pa, pb, P(r))) {
                // Vertex exactly on the segment: carve only up to it.
                earlyStop = r;
                b = r;
                break;
            }
            t = u;
            if (orr > 0) {
                upper.push_back(r);
                eL = r;
            } else {
                lower.push_back(r);
                eR = r;
            }
        }
        upper.push_back(b);
        lower.push_back(b);
        retriangulate_cavity(cavity, upper, lower, a, b);
        return earlyStop;
    }

    static bool between(const Vec2& a, const Vec2& b, const Vec2& p) {
        // p collinear with ab assumed; strict interior of the segment.
        if (a.x != b.x) return p.x > std::min(a.x, b.x) && p.x < std::max(a.x, b.x);
        return p.y > std::min(a.y, b.y) && p.y < std::max(a.y, b.y);
    }

    void retriangulate_cavity(const std::vector<int>& cavity, const std::vector<int>& upper,
                              const std::vector<int>& lower, int a, int b) {
        // Record the cavity boundary: directed edges (as seen from inside the
        // cavity) -> (outside tri, its edge index, constrained).
        std::map<std::pair<int, int>, std::tuple<int, int, bool>> boundary;
        std::vector<char> inCavity(tris_.size(), 0);
        for (int t : cavity) inCavity[t] = 1;
        for (int t : cavity) {
            for (int k = 0; k < 3; ++k) {
                int u = tris_[t].n[k];
                if (u >= 0 && inCavity[u]) continue;
                int va = tris_[t].v[k], vb = tris_[t].v[(k + 1) % 3];
                int uj = u >= 0 ? edge_of(u, vb, va) : -1;
                boundary[{va, vb}] = {u, uj, tris_[t].con[k]};
            }
        }
        for (int t : cavity) tris_[t].alive = false;

        std::vector<std::array<int, 3>> newTris;
        // Upper polyline: vertices strictly left of a->b; triangles on (a, b).
        fill_pseudopolygon(upper, newTris);
        // Lower: reverse so it runs b->a with its vertices on the left.
        std::vector<int> lowerRev(lower.rbegin(), lower.rend());
        fill_pseudopolygon(lowerRev, newTris);

        // Materialize and stitch.
        std::map<std::pair<int, int>, std::pair<int, int>> newEdge;
        std::vector<int> ids;
        for (const auto& tv : newTris) {
            int id = alloc();
            tris_[id].v[0] = tv[0];
            tris_[id].v[1] = tv[1];
            tris_[id].v[2] = tv[2];
            ids.push_back(id);
            for (int k = 0; k < 3; ++k) newEdge[{tv[k], tv[(k + 1) % 3]}] = {id, k};
        }
        for (int id : ids) {
            for (int k = 0; k < 3; ++k) {
                int va = tris_[id].v[k], vb = tris_[id].v[(k + 1) % 3];
                bool isBase = (va == a && vb == b) || (va == b && vb == a);
                if (isBase) tris_[id].con[k] = true;
                auto rev = newEdge.find({vb, va});
                if (rev != newEdge.end()) {
                    tris_[id].n[k] = rev->second.first;
                    continue;
                }
                auto bnd = boundary.find({va, vb});
                if (bnd != boundary.end()) {
                    auto [u, uj, con] = bnd->second;
                    tris_[id].n[k] = u;
                    tris_[id].con[k] = tris_[id].con[k] || con;
                    if (u >= 0) tris_[u].n[uj] = id;
                }
            }
            note_incident(id);
        }
        last_ = ids.empty() ? 0 : ids[0];
        // Restore local Delaunayhood around the new edges.
        for (int id : ids)
            for (int k = 0; k < 3; ++k) legalize(id, k);
    }

    // poly = [s, v1, ..., vn, e], the chain of a simple polygon whose closing
    // edge is (e, s) and whose interior is left of s->e. Emits the Delaunay
    // triangulation of that polygon as CCW triangles (s, e, c) recursively.
    void fill_pseudopolygon(const std::vector<int>& poly, std::vector<std::array<int, 3>>& out) {
        if (poly.size() < 3) return;
        int s = poly.front(), e = poly.back();
        size_t ci = 0;  // sentinel: poly[0] is the base vertex, never a candidate
        for (size_t i = 1; i + 1 < poly.size(); ++i) {
            if (orient2d(P(s), P(e), P(poly[i])) <= 0) continue;
            if (ci == 0 || incircle(P(s), P(e), P(poly[ci]), P(poly[i])) > 0) ci = i;
        }
        if (ci == 0) throw std::logic_error("cdt: degenerate cavity chain");
        out.push_back({s, e, poly[ci]});
        std::vector<int> leftPart(poly.begin(), poly.begin() + ci + 1);
        std::vector<int> rightPart(poly.begin() + ci, poly.end());
        fill_pseudopolygon(leftPart, out);
        fill_pseudopolygon(rightPart, out);
    }
};

}  // namespace

CdtResult triangulate_constrained(const std::vector<Vec2>& inputPoints,
                                  const std::vector<std::pair<int, int>>& inputConstraints) {
    // --- dedup (exact and within the merge distance) ---
    std::vector<Vec2> pts;
    std::vector<int> remap(inputPoints.size());
    for (size_t i = 0; i < inputPoints.size(); ++i) {
        int found = -1;
        for (size_t j = 0; j < pts.size(); ++j) {
            if (norm(pts[j] - inputPoints[i]) <= kMergeDist) { found = static_cast<int>(j); break; }
        }
        if (found < 0) {
            pts.push_back(inputPoints[i]);
            found = static_cast<int>(pts.size()) - 1;
        }
        remap[i] = found;
    }
    std::vector<std::pair<int, int>> cons;
    for (auto [a, b] : inputConstraints) {
        int ra = remap[a], rb = remap[b];
        if (ra != rb) cons.push_back({ra, rb});
    }

    // --- snap near-constraint points onto their segment ---
    for (size_t i = 0; i < pts.size(); ++i) {
        for (auto [a, b] : cons) {
            if (static_cast<int>(i) == a || static_cast<int>(i) == b) continue;
            Vec2 pa = pts[a], pb = pts[b], p = pts[i];
            Vec2 d = pb - pa;
            double len2 = dot(d, d);
            if (len2 <= 0) continue;
            double t = dot(p - pa, d) / len2;
            if (t <= 0 || t >= 1) continue;
            Vec2 proj = pa + d * t;
            if (norm(p - proj) <= kSnapDist) {
                pts[i] = proj;
                break;
            }
        }
    }

    // --- split constraints through the points that now sit on them ---
    std::vector<std::pair<int, int>> finalCons;
    for (auto [a, b] : cons) {
        Vec2 pa = pts[a], pb = pts[b];
        Vec2 d = pb - pa;
        double len2 = dot(d, d);
        std::vector<std::pair<double, int>> chain{{0.0, a}, {1.0, b}};
        for (size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<int>(i) == a || static_cast<int>(i) == b) continue;
            double t = dot(pts[i] - pa, d) / len2;
            if (t <= 0 || t >= 1) continue;
            Vec2 proj = pa + d * t;
            if (norm(pts[i] - proj) <= kSnapDist) chain.push_back({t, static_cast<int>(i)});
        }
        std::sort(chain.begin(), chain.end());
        for (size_t i = 0; i + 1 < chain.size(); ++i)
            if (chain[i].second != chain[i + 1].second)
                finalCons.push_back({chain[i].second, chain[i + 1].second});
    }

    Triangulator tri(pts);
    for (auto [a, b] : finalCons) tri.insert_constraint(a, b);
    CdtResult res = tri.finalize();
    return res;
}

}  // namespace roomtex

#include "roomtex/texturing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include "json.hpp"
#include "roomtex/errors.hpp"
#include "roomtex/occlusion.hpp"
#include "roomtex/parallel.hpp"
#include "roomtex/raster.hpp"

namespace roomtex {

namespace {

ImageF sobel_magnitude(const ImageF& luma) {
    ImageF out(luma.w, luma.h);
    auto clamped = [&](int x, int y) {
        x = std::clamp(x, 0, luma.w - 1);
        y = std::clamp(y, 0, luma.h - 1);
        return luma.at(x, y);
    };
    for (int y = 0; y < luma.h; ++y)
        for (int x = 0; x < luma.w; ++x) {
            double gx = clamped(x + 1, y - 1) + 2 * clamped(x + 1, y) + clamped(x + 1, y + 1) -
                        clamped(x - 1, y - 1) - 2 * clamped(x - 1, y) - clamped(x - 1, y + 1);
            double gy = clamped(x - 1, y + 1) + 2 * clamped(x, y + 1) + clamped(x + 1, y + 1) -
                        clamped(x - 1, y - 1) - 2 * clamped(x, y - 1) - clamped(x + 1, y - 1);
            out.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    return out;
}

// Per-column scores rescaled so each face's best candidate is 1. Keeps the
// Potts weight meaningful across faces of very different screen sizes.
std::vector<std::vector<double>> normalized_columns(const ViewCandidateTable& table) {
    std::vector<std::vector<double>> norm(table.perFace.size());
    for (size_t f = 0; f < table.perFace.size(); ++f) {
        const auto& col = table.perFace[f];
        double maxS = 0;
        for (const auto& c : col) maxS = std::max(maxS, c.score);
        norm[f].resize(col.size());
        for (size_t i = 0; i < col.size(); ++i)
            norm[f][i] = maxS > 0 ? col[i].score / maxS : 1.0;
    }
    return norm;
}

// Index of `frame` in the (frame-sorted) column, or -1.
int column_find(const std::vector<ViewCandidate>& col, int frame) {
    auto it = std::lower_bound(col.begin(), col.end(), frame,
                               [](const ViewCandidate& c, int fr) { return c.frame < fr; });
    if (it == col.end() || it->frame != frame) return -1;
    return static_cast<int>(it - col.begin());
}

// Max-flow (Dinic) on double capacities; used for expansion moves.
class MaxFlow {
  public:
    explicit MaxFlow(int n) : g_(n), level_(n), iter_(n) {}

    void add_edge(int a, int b, double capAB, double capBA = 0) {
        g_[a].push_back({b, capAB, static_cast<int>(g_[b].size())});
        g_[b].push_back({a, capBA, static_cast<int>(g_[a].size()) - 1});
    }

    void run(int s, int t) {
        while (bfs(s, t)) {
            std::fill(iter_.begin(), iter_.end(), 0);
            while (dfs(s, t, std::numeric_limits<double>::infinity()) > kEps) {
            }
        }
        bfs(s, t);  // final residual reachability sits in level_
    }

    bool on_source_side(int v) const { return level_[v] >= 0; }

  private:
    static constexpr double kEps = 1e-12;

    struct Arc {
        int to;
        double cap;
        int rev;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (const Arc& a : g_[v])
                if (a.cap > kEps && level_[a.to] < 0) {
                    level_[a.to] = level_[v] + 1;
                    q.push(a.to);
                }
        }
        return level_[t] >= 0;
    }

    double dfs(int v, int t, double f) {
        if (v == t) return f;
        for (int& i = iter_[v]; i < static_cast<int>(g_[v].size()); ++i) {
            Arc& a = g_[v][i];
            if (a.cap > kEps && level_[a.to] == level_[v] + 1) {
                double d = dfs(a.to, t, std::min(f, a.cap));
                if (d > kEps) {
                    a.cap -= d;
                    g_[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    std::vector<std::vector<Arc>> g_;
    std::vector<int> level_, iter_;
};

struct Component {
    std::vector<int> faces;                    // sorted
    std::vector<std::array<int, 2>> pairs;     // internal adjacency
    std::vector<int> labelSpace;               // sorted union of candidate frames
};

double component_energy(const Component& comp, const ViewCandidateTable& table,
                        const std::vector<std::vector<double>>& norm, double lambda,
                        const std::vector<int>& label) {
    double e = 0;
    for (int f : comp.faces) {
        int idx = column_find(table.perFace[f], label[f]);
        e -= norm[f][idx];
    }
    for (const auto& p : comp.pairs)
        if (label[p[0]] != label[p[1]]) e += lambda;
    return e;
}

void solve_exhaustive(const Component& comp, const ViewCandidateTable& table,
                      const std::vector<std::vector<double>>& norm, double lambda,
                      std::vector<int>& label) {
    size_t n = comp.faces.size();
    std::vector<size_t> pick(n, 0);
    std::vector<int> best;
    double bestE = std::numeric_limits<double>::infinity();
    for (;;) {
        for (size_t i = 0; i < n; ++i) label[comp.faces[i]] = table.perFace[comp.faces[i]][pick[i]].frame;
        double e = component_energy(comp, table, norm, lambda, label);
        if (e < bestE) {
            bestE = e;
            best.assign(pick.begin(), pick.end());
        }
        size_t i = 0;
        for (; i < n; ++i) {
            if (++pick[i] < table.perFace[comp.faces[i]].size()) break;
            pick[i] = 0;
        }
        if (i == n) break;
    }
    for (size_t i = 0; i < n; ++i) label[comp.faces[i]] = table.perFace[comp.faces[i]][best[i]].frame;
}

void solve_expansion(const Component& comp, const ViewCandidateTable& table,
                     const std::vector<std::vector<double>>& norm, double lambda,
                     std::vector<int>& label) {
    double curE = component_energy(comp, table, norm, lambda, label);
    std::vector<int> pos(table.perFace.size(), -1);  // face -> movable node, per move

    for (int sweep = 0; sweep < 20; ++sweep) {
        bool improved = false;
        for (int alpha : comp.labelSpace) {
            std::vector<int> movable;
            for (int f : comp.faces)
                if (label[f] != alpha && column_find(table.perFace[f], alpha) >= 0)
                    movable.push_back(f);
            if (movable.empty()) continue;
            for (size_t i = 0; i < movable.size(); ++i) pos[movable[i]] = static_cast<int>(i);

            // Binary costs: x=1 means "take alpha", x=0 means "keep".
            std::vector<double> cost0(movable.size()), cost1(movable.size());
            for (size_t i = 0; i < movable.size(); ++i) {
                int f = movable[i];
                cost0[i] = -norm[f][column_find(table.perFace[f], label[f])];
                cost1[i] = -norm[f][column_find(table.perFace[f], alpha)];
            }
            int auxCount = 0;
            for (const auto& p : comp.pairs)
                if (pos[p[0]] >= 0 && pos[p[1]] >= 0 && label[p[0]] != label[p[1]]) auxCount++;

            // Nodes: 0 source, 1 sink, 2.. movable, then aux nodes. A node ends
            // on the source side exactly when the move takes it to alpha.
            int base = 2, auxBase = base + static_cast<int>(movable.size());
            MaxFlow flow(auxBase + auxCount);
            int aux = auxBase;
            for (const auto& p : comp.pairs) {
                int pf = pos[p[0]], pg = pos[p[1]];
                if (pf >= 0 && pg >= 0) {
                    if (label[p[0]] == label[p[1]]) {
                        flow.add_edge(base + pf, base + pg, lambda, lambda);
                    } else {
                        flow.add_edge(0, aux, lambda);
                        flow.add_edge(base + pf, aux, lambda, lambda);
                        flow.add_edge(aux, base + pg, lambda, lambda);
                        aux++;
                    }
                } else if (pf >= 0) {  // neighbor fixed (no alpha entry, or already alpha)
                    cost1[pf] += lambda * (alpha != label[p[1]] ? 1 : 0);
                    cost0[pf] += lambda * (label[p[0]] != label[p[1]] ? 1 : 0);
                } else if (pg >= 0) {
                    cost1[pg] += lambda * (alpha != label[p[0]] ? 1 : 0);
                    cost0[pg] += lambda * (label[p[1]] != label[p[0]] ? 1 : 0);
                }
            }
            for (size_t i = 0; i < movable.size(); ++i) {
                double shift = std::min(cost0[i], cost1[i]);
                // src->f is severed when f keeps, f->snk when f switches.
                flow.add_edge(0, base + static_cast<int>(i), cost0[i] - shift);
                flow.add_edge(base + static_cast<int>(i), 1, cost1[i] - shift);
            }
            flow.run(0, 1);

            std::vector<int> trial;
            trial.reserve(movable.size());
            for (size_t i = 0; i < movable.size(); ++i) {
                int f = movable[i];
                trial.push_back(label[f]);
                if (flow.on_source_side(base + static_cast<int>(i))) label[f] = alpha;
            }
            double newE = component_energy(comp, table, norm, lambda, label);
            if (newE < curE - 1e-12) {
                curE = newE;
                improved = true;
            } else {
                for (size_t i = 0; i < movable.size(); ++i) label[movable[i]] = trial[i];
            }
            for (int f : movable) pos[f] = -1;
        }
        if (!improved) break;
    }
}

}  // namespace

std::vector<std::array<int, 2>> shared_edge_pairs(const TriMesh& mesh) {
    std::unordered_map<uint64_t, std::vector<int>> edgeFaces;
    edgeFaces.reserve(mesh.faces.size() * 3);
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        for (int e = 0; e < 3; ++e) {
            int a = mesh.faces[f][e], b = mesh.faces[f][(e + 1) % 3];
            if (a > b) std::swap(a, b);
            uint64_t key = (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
            edgeFaces[key].push_back(static_cast<int>(f));
        }
    std::vector<std::array<int, 2>> pairs;
    for (const auto& [key, fs] : edgeFaces)
        for (size_t i = 0; i < fs.size(); ++i)
            for (size_t j = i + 1; j < fs.size(); ++j)
                pairs.push_back({std::min(fs[i], fs[j]), std::max(fs[i], fs[j])});
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

ViewCandidateTable build_candidate_table(const TriMesh& mesh, const std::vector<Frame>& frames,
                                         double angleMaxDeg) {
    size_t nf = mesh.faces.size();
    ViewCandidateTable table;
    table.frameCount = static_cast<int>(frames.size());
    table.perFace.resize(nf);
    if (frames.empty() || nf == 0) return table;

    TriangleBvh bvh(mesh);
    double cosMax = std::cos(deg2rad(angleMaxDeg));

    std::vector<std::vector<ViewCandidate>> byFrame(frames.size());
    parallel_for(frames.size(), [&](size_t i) {
        const Frame& fr = frames[i];
        Mat4 view = view_of(fr);
        Vec3 eye = camera_center(fr);
        GBuffer gb = rasterize_mesh(mesh, fr.K, view);
        ImageF grad = sobel_magnitude(to_luma(fr.rgb));

        std::vector<double> gradSum(nf, 0);
        std::vector<int> pixCount(nf, 0);
        for (size_t p = 0; p < gb.face.size(); ++p) {
            int f = gb.face[p];
            if (f >= 0) {
                gradSum[f] += grad.px[p];
                pixCount[f]++;
            }
        }

        for (size_t f = 0; f < nf; ++f) {
            Vec3 n = face_normal(mesh, static_cast<int>(f));
            Vec3 toCam = eye - face_centroid(mesh, static_cast<int>(f));
            double len = norm(toCam);
            if (len <= 0 || dot(n, toCam) / len < cosMax) continue;
            if (!occlusion_test(mesh, bvh, static_cast<int>(f), fr.K, fr.camToWorld)) continue;

            Vec2 px[3];
            for (int k = 0; k < 3; ++k)
                project_point(fr.K, view, mesh.vertices[mesh.faces[f][k]], &px[k]);
            double area = 0.5 * std::abs(cross(px[1] - px[0], px[2] - px[0]));
            double meanGrad = pixCount[f] > 0 ? gradSum[f] / pixCount[f] : 0.0;
            byFrame[i].push_back({static_cast<int>(f), area * meanGrad});
        }
    });

    for (size_t i = 0; i < frames.size(); ++i)
        for (const auto& c : byFrame[i])
            table.perFace[c.frame].push_back({static_cast<int>(i), c.score});
    return table;
}

double assignment_energy(const ViewCandidateTable& table, const TriMesh& mesh, double lambda,
                         const LabelAssignment& assignment) {
    if (assignment.label.size() != mesh.faces.size() ||
        table.perFace.size() != mesh.faces.size())
        throw MalformedData("assignment/table size does not match mesh");
    auto norm = normalized_columns(table);
    double e = 0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        int l = assignment.label[f];
        if (l == kUntextured) continue;
        int idx = column_find(table.perFace[f], l);
        if (idx < 0) throw MalformedData("face labeled with a frame it has no candidate for");
        e -= norm[f][idx];
    }
    for (const auto& p : shared_edge_pairs(mesh)) {
        if (table.perFace[p[0]].empty() || table.perFace[p[1]].empty()) continue;
        if (assignment.label[p[0]] != assignment.label[p[1]]) e += lambda;
    }
    return e;
}

LabelAssignment solve_labels(const ViewCandidateTable& table, const TriMesh& mesh, double lambda,
                             const LabelAssignment* warmStart, LabelSolver solver) {
    size_t nf = mesh.faces.size();
    if (table.perFace.size() != nf) throw MalformedData("candidate table does not match mesh");
    auto norm = normalized_columns(table);

    LabelAssignment out;
    out.label.assign(nf, kUntextured);
    for (size_t f = 0; f < nf; ++f) {
        const auto& col = table.perFace[f];
        if (col.empty()) continue;
        if (warmStart && warmStart->label.size() == nf &&
            column_find(col, warmStart->label[f]) >= 0) {
            out.label[f] = warmStart->label[f];
            continue;
        }
        size_t best = 0;
        for (size_t i = 1; i < col.size(); ++i)
            if (col[i].score > col[best].score) best = i;
        out.label[f] = col[best].frame;
    }

    // Adjacency restricted to faces that actually have candidates; boundary
    // cost against untextured faces is constant and so never affects argmin.
    std::vector<std::array<int, 2>> pairs;
    for (const auto& p : shared_edge_pairs(mesh))
        if (!table.perFace[p[0]].empty() && !table.perFace[p[1]].empty()) pairs.push_back(p);

    std::vector<int> compId(nf, -1);
    std::vector<std::vector<int>> adj(nf);
    for (const auto& p : pairs) {
        adj[p[0]].push_back(p[1]);
        adj[p[1]].push_back(p[0]);
    }
    std::vector<Component> comps;
    for (size_t f = 0; f < nf; ++f) {
        if (table.perFace[f].empty() || compId[f] >= 0) continue;
        int id = static_cast<int>(comps.size());
        comps.emplace_back();
        std::vector<int> stack{static_cast<int>(f)};
        compId[f] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comps[id].faces.push_back(v);
            for (int w : adj[v])
                if (compId[w] < 0) {
                    compId[w] = id;
                    stack.push_back(w);
                }
        }
        std::sort(comps[id].faces.begin(), comps[id].faces.end());
    }
    for (const auto& p : pairs) comps[compId[p[0]]].pairs.push_back(p);
    for (auto& c : comps) {
        for (int f : c.faces)
            for (const auto& cand : table.perFace[f]) c.labelSpace.push_back(cand.frame);
        std::sort(c.labelSpace.begin(), c.labelSpace.end());
        c.labelSpace.erase(std::unique(c.labelSpace.begin(), c.labelSpace.end()),
                           c.labelSpace.end());
    }

    parallel_for(comps.size(), [&](size_t ci) {
        const Component& comp = comps[ci];
        bool exhaustive;
        switch (solver) {
            case LabelSolver::Exhaustive:
                exhaustive = true;
                break;
            case LabelSolver::Expansion:
                exhaustive = false;
                break;
            default: {
                double product = 1;
                for (int f : comp.faces) {
                    product *= static_cast<double>(table.perFace[f].size());
                    if (product > 200000) break;
                }
                exhaustive = product <= 200000;
            }
        }
        if (exhaustive)
            solve_exhaustive(comp, table, norm, lambda, out.label);
        else
            solve_expansion(comp, table, norm, lambda, out.label);
    });
    return out;
}

namespace {

constexpr int kPageSize = 2048;
constexpr int kGutter = 2;
constexpr int kPatchSize = 8;  // magenta block shared by untextured faces

struct Chart {
    int source = kUntextured;  // frame id; kUntextured for the magenta patch
    std::vector<int> faces;
    int fx0 = 0, fy0 = 0;  // crop origin in the source frame
    int w = 0, h = 0;      // crop size
    int page = -1, px = 0, py = 0;  // placement
};

}  // namespace

TextureAtlas bake_atlas(const TriMesh& mesh, const LabelAssignment& assignment,
                        const std::vector<Frame>& frames) {
    size_t nf = mesh.faces.size();
    if (assignment.label.size() != nf) throw MalformedData("assignment does not match mesh");

    // Charts: connected groups of faces sharing an edge and a source frame.
    std::vector<int> parent(nf);
    for (size_t f = 0; f < nf; ++f) parent[f] = static_cast<int>(f);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& p : shared_edge_pairs(mesh)) {
        int l = assignment.label[p[0]];
        if (l == kUntextured || l != assignment.label[p[1]]) continue;
        parent[find(p[0])] = find(p[1]);
    }
    std::map<int, int> rootChart;  // ordered: charts come out in face order
    std::vector<Chart> charts;
    std::vector<int> faceChart(nf, -1);
    for (size_t f = 0; f < nf; ++f) {
        if (assignment.label[f] == kUntextured) continue;
        int root = find(static_cast<int>(f));
        auto [it, fresh] = rootChart.try_emplace(root, static_cast<int>(charts.size()));
        if (fresh) {
            charts.emplace_back();
            charts.back().source = assignment.label[f];
        }
        charts[it->second].faces.push_back(static_cast<int>(f));
        faceChart[f] = it->second;
    }

    // Crop rectangles: the chart's projected bounds padded so bilinear taps at
    // the border still read real frame texels.
    std::vector<std::unordered_map<int, Vec2>> chartVertPx(charts.size());
    for (size_t c = 0; c < charts.size(); ++c) {
        Chart& ch = charts[c];
        const Frame& fr = frames.at(ch.source);
        Mat4 view = view_of(fr);
        double minX = 1e30, minY = 1e30, maxX = -1e30, maxY = -1e30;
        for (int f : ch.faces)
            for (int k = 0; k < 3; ++k) {
                int vid = mesh.faces[f][k];
                if (chartVertPx[c].count(vid)) continue;
                Vec2 px;
                if (!project_point(fr.K, view, mesh.vertices[vid], &px))
                    throw MalformedData("assigned face does not project into its frame");
                chartVertPx[c][vid] = px;
                minX = std::min(minX, px.x);
                minY = std::min(minY, px.y);
                maxX = std::max(maxX, px.x);
                maxY = std::max(maxY, px.y);
            }
        ch.fx0 = std::max(0, static_cast<int>(std::floor(minX)) - kGutter);
        ch.fy0 = std::max(0, static_cast<int>(std::floor(minY)) - kGutter);
        int x1 = std::min(fr.rgb.w, static_cast<int>(std::ceil(maxX)) + kGutter);
        int y1 = std::min(fr.rgb.h, static_cast<int>(std::ceil(maxY)) + kGutter);
        ch.w = std::max(1, x1 - ch.fx0);
        ch.h = std::max(1, y1 - ch.fy0);
    }

    bool anyUntextured = false;
    for (size_t f = 0; f < nf; ++f)
        if (assignment.label[f] == kUntextured) anyUntextured = true;
    int patchChart = -1;
    if (anyUntextured) {
        patchChart = static_cast<int>(charts.size());
        charts.emplace_back();
        charts.back().w = kPatchSize;
        charts.back().h = kPatchSize;
    }

    // Shelf packing, tallest first. Oversized charts get a page of their own.
    std::vector<int> order(charts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (charts[a].h != charts[b].h) return charts[a].h > charts[b].h;
        if (charts[a].w != charts[b].w) return charts[a].w > charts[b].w;
        return a < b;
    });
    struct PageState {
        int w, h, shelfY = 0, shelfH = 0, cursorX = 0;
    };
    std::vector<PageState> pages;
    for (int ci : order) {
        Chart& ch = charts[ci];
        if (ch.w + 2 * kGutter > kPageSize || ch.h + 2 * kGutter > kPageSize) {
            ch.page = static_cast<int>(pages.size());
            ch.px = kGutter;
            ch.py = kGutter;
            pages.push_back({ch.w + 2 * kGutter, ch.h + 2 * kGutter, 0, 0, 0});
            continue;
        }
        int placed = -1;
        for (size_t p = 0; p < pages.size(); ++p) {
            PageState& ps = pages[p];
            if (ps.w != kPageSize) continue;  // dedicated oversize page
            if (ps.cursorX + ch.w + kGutter <= ps.w && ps.shelfY + ch.h + kGutter <= ps.h) {
                placed = static_cast<int>(p);
                break;
            }
            // Try a fresh shelf on this page.
            int nextY = ps.shelfY + ps.shelfH;
            if (nextY + ch.h + kGutter <= ps.h) {
                ps.shelfY = nextY;
                ps.shelfH = 0;
                ps.cursorX = kGutter;
                placed = static_cast<int>(p);
                break;
            }
        }
        if (placed < 0) {
            pages.push_back({kPageSize, kPageSize, kGutter, 0, kGutter});
            placed = static_cast<int>(pages.size()) - 1;
            pages[placed].shelfY = kGutter;
        }
        PageState& ps = pages[placed];
        if (ps.cursorX == 0) ps.cursorX = kGutter;
        if (ps.shelfY == 0) ps.shelfY = kGutter;
        ch.page = placed;
        ch.px = ps.cursorX;
        ch.py = ps.shelfY;
        ps.cursorX += ch.w + kGutter;
        ps.shelfH = std::max(ps.shelfH, ch.h + kGutter);
    }

    TextureAtlas atlas;
    for (const PageState& ps : pages) {
        Image8 page(ps.w, ps.h, 3);
        for (int y = 0; y < ps.h; ++y)
            for (int x = 0; x < ps.w; ++x)
                for (int c = 0; c < 3; ++c) page.at(x, y, c) = kUntexturedColor[c];
        atlas.pages.push_back(std::move(page));
    }
    parallel_for(charts.size(), [&](size_t ci) {
        const Chart& ch = charts[ci];
        if (ch.source == kUntextured) return;  // patch stays magenta
        const Image8& src = frames[ch.source].rgb;
        Image8& dst = atlas.pages[ch.page];
        for (int y = 0; y < ch.h; ++y)
            for (int x = 0; x < ch.w; ++x)
                for (int c = 0; c < src.c && c < 3; ++c)
                    dst.at(ch.px + x, ch.py + y, c) = src.at(ch.fx0 + x, ch.fy0 + y, c);
    });

    // Remapped mesh: vertices duplicated per chart so texcoords stay per-vertex.
    atlas.mesh.texcoords.clear();
    atlas.facePage.assign(nf, -1);
    atlas.faceSource.assign(nf, kUntextured);
    std::vector<std::unordered_map<int, int>> remap(charts.size());
    for (size_t f = 0; f < nf; ++f) {
        int ci = assignment.label[f] == kUntextured ? patchChart : faceChart[f];
        const Chart& ch = charts[ci];
        const Image8& page = atlas.pages[ch.page];
        std::array<int, 3> newFace;
        for (int k = 0; k < 3; ++k) {
            int vid = mesh.faces[f][k];
            auto [it, fresh] = remap[ci].try_emplace(vid, static_cast<int>(atlas.mesh.vertices.size()));
            if (fresh) {
                atlas.mesh.vertices.push_back(mesh.vertices[vid]);
                Vec2 uv;
                if (ch.source == kUntextured) {
                    uv = {(ch.px + ch.w * 0.5) / page.w, 1.0 - (ch.py + ch.h * 0.5) / page.h};
                } else {
                    Vec2 px = chartVertPx[ci].at(vid);
                    uv = {(px.x - ch.fx0 + ch.px) / page.w,
                          1.0 - (px.y - ch.fy0 + ch.py) / page.h};
                }
                atlas.mesh.texcoords.push_back(uv);
            }
            newFace[k] = it->second;
        }
        atlas.mesh.faces.push_back(newFace);
        atlas.mesh.faceLabels.push_back(mesh.faceLabels[f]);
        atlas.facePage[f] = ch.page;
        atlas.faceSource[f] = ch.source;
    }
    return atlas;
}

void save_textured_mesh(const TextureAtlas& atlas, const std::string& dir,
                        const std::string& base) {
    for (size_t p = 0; p < atlas.pages.size(); ++p)
        save_png(dir + "/" + base + "_page" + std::to_string(p) + ".png", atlas.pages[p]);

    std::ofstream mtl(dir + "/" + base + ".mtl");
    for (size_t p = 0; p < atlas.pages.size(); ++p) {
        mtl << "newmtl page" << p << "\n";
        mtl << "Kd 1 1 1\n";
        mtl << "map_Kd " << base << "_page" << p << ".png\n";
    }
    if (!mtl) throw IoError("cannot write " + dir + "/" + base + ".mtl");
    mtl.close();

    std::ofstream obj(dir + "/" + base + ".obj");
    obj << "mtllib " << base << ".mtl\n";
    char buf[128];
    const TriMesh& m = atlas.mesh;
    for (const Vec3& v : m.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        obj << buf;
    }
    for (const Vec2& t : m.texcoords) {
        std::snprintf(buf, sizeof buf, "vt %.9g %.9g\n", t.x, t.y);
        obj << buf;
    }
    // Faces grouped by page to keep material switches rare.
    std::vector<int> faceOrder(m.faces.size());
    for (size_t i = 0; i < faceOrder.size(); ++i) faceOrder[i] = static_cast<int>(i);
    std::stable_sort(faceOrder.begin(), faceOrder.end(),
                     [&](int a, int b) { return atlas.facePage[a] < atlas.facePage[b]; });
    int curPage = -1;
    for (int f : faceOrder) {
        if (atlas.facePage[f] != curPage) {
            curPage = atlas.facePage[f];
            obj << "usemtl page" << curPage << "\n";
        }
        const auto& fc = m.faces[f];
        obj << "f " << fc[0] + 1 << "/" << fc[0] + 1 << " " << fc[1] + 1 << "/" << fc[1] + 1
            << " " << fc[2] + 1 << "/" << fc[2] + 1 << "\n";
    }
    if (!obj) throw IoError("cannot write " + dir + "/" + base + ".obj");
}

void save_assignment(const std::string& path, const LabelAssignment& assignment) {
    nlohmann::json arr = nlohmann::json::array();
    for (int l : assignment.label) {
        if (l == kUntextured)
            arr.push_back(nullptr);
        else
            arr.push_back(l);
    }
    std::ofstream out(path);
    out << arr.dump(2) << "\n";
    if (!out) throw IoError("cannot write " + path);
}

LabelAssignment load_assignment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedData("assignment json: " + std::string(e.what()));
    }
    if (!arr.is_array()) throw MalformedData("assignment json must be an array");
    LabelAssignment a;
    for (const auto& v : arr) {
        if (v.is_null())
            a.label.push_back(kUntextured);
        else if (v.is_number_integer() && v.get<int>() >= 0)
            a.label.push_back(v.get<int>());
        else
            throw MalformedData("assignment entries must be null or non-negative ids");
    }
    return a;
}

}  // namespace roomtex

#pragma once

#include <array>
#include <string>
#include <vector>

#include "roomtex/frame.hpp"
#include "roomtex/image.hpp"
#include "roomtex/mesh.hpp"

namespace roomtex {

// Label value for faces no input image covers.
constexpr int kUntextured = -1;

// Sentinel texel color for untextured regions; downstream stages key on it.
constexpr std::array<uint8_t, 3> kUntexturedColor{255, 0, 255};

struct ViewCandidate {
    int frame = 0;
    double score = 0;  // projected pixel area x mean gradient, higher = better
};

// Sparse per-face candidate columns, each sorted by frame id. An entry exists
// only when the face passed the projection, occlusion, and viewing-angle tests
// for that frame.
struct ViewCandidateTable {
    int frameCount = 0;
    std::vector<std::vector<ViewCandidate>> perFace;
};

ViewCandidateTable build_candidate_table(const TriMesh& mesh, const std::vector<Frame>& frames,
                                         double angleMaxDeg = 45.0);

struct LabelAssignment {
    std::vector<int> label;  // frame id, or kUntextured
};

// Every unordered pair of faces sharing an edge (by vertex ids), each pair
// once with first < second, sorted.
std::vector<std::array<int, 2>> shared_edge_pairs(const TriMesh& mesh);

// E = sum_f -score_norm(label_f, f) + lambda * sum_adjacent [labels differ],
// where scores are normalized to each face column's maximum and pairs with an
// untextured side are skipped (their boundary cost is constant). This is the
// exact objective solve_labels minimizes.
double assignment_energy(const ViewCandidateTable& table, const TriMesh& mesh, double lambda,
                         const LabelAssignment& assignment);

enum class LabelSolver {
    Auto,        // exhaustive when the label-vector space is tiny, else expansion
    Exhaustive,  // exact minimum; cost grows with the product of column sizes
    Expansion,   // alpha-expansion via repeated min-cuts
};

LabelAssignment solve_labels(const ViewCandidateTable& table, const TriMesh& mesh,
                             double lambda = 1.0, const LabelAssignment* warmStart = nullptr,
                             LabelSolver solver = LabelSolver::Auto);

struct TextureAtlas {
    std::vector<Image8> pages;     // RGB
    TriMesh mesh;                  // vertices duplicated per chart, texcoords set
    std::vector<int> facePage;     // page index per face
    std::vector<int> faceSource;   // frame id per face, or kUntextured
};

// Groups contiguous same-label faces into charts, crops each chart's
// axis-aligned footprint (plus a 2 px margin for bilinear taps) out of its
// source frame, and shelf-packs the crops into pages. Untextured faces share
// one magenta patch. Texel data is copied untouched, so sampling the atlas at
// a face's texcoords reproduces the source frame exactly.
TextureAtlas bake_atlas(const TriMesh& mesh, const LabelAssignment& assignment,
                        const std::vector<Frame>& frames);

// Writes <base>.obj, <base>.mtl, <base>_page<N>.png into dir.
void save_textured_mesh(const TextureAtlas& atlas, const std::string& dir,
                        const std::string& base);

// JSON array, one entry per face: image id or null.
void save_assignment(const std::string& path, const LabelAssignment& assignment);
LabelAssignment load_assignment(const std::string& path);

}  // namespace roomtex

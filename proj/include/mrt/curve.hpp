#pragma once

#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mrt/geometry.hpp"
#include "mrt/nets.hpp"

namespace mrt {

// A net vertex: index v of level k.
struct VertexRef {
    int k = 0;
    int v = 0;
    auto operator<=>(const VertexRef&) const = default;
};

enum class SegmentKind { edge, bridge };

struct CurveSegment {
    int a = 0;  // vertex ids
    int b = 0;
    SegmentKind kind = SegmentKind::edge;
    int gen = 0;
    int bridge = -1;  // owning bridge record for bridge parts
};

// Segments and explicit points forming Gamma_k.
struct Snapshot {
    int k = 0;
    std::vector<int> segments;
    std::vector<int> points;  // vertex ids of isolated points
};

struct CurveGraph {
    int dim = 0;
    std::vector<Point> vertices;
    std::vector<CurveSegment> segments;
    std::vector<Snapshot> snapshots;  // one per stage k0..K
    const Snapshot& last() const { return snapshots.back(); }
};

struct ExtensionChain {
    std::vector<VertexRef> refs;  // (k, v), (k+1, v1), ..., (K, v_{K-k})
    PointList points;
    double length = 0.0;
};

struct BridgeRecord {
    int gen = 0;
    VertexRef v1, v2;
    ExtensionChain ext1, ext2;
    std::vector<VertexRef> index_set;  // I[k, v1] union I[k, v2]
    Point core_a, core_b;              // middle 9/10 of [v1, v2]
    bool from_t2 = false;
    std::vector<int> segments;
    double length = 0.0;
};

enum class Side { nonterminal, t1, t2 };

struct StageStats {
    int k = 0;
    int case1 = 0;
    int case2 = 0;
    int nonterminal = 0;
    int t1 = 0;
    int t2 = 0;
    int edges = 0;
    int bridges = 0;
};

struct CurveAccounting {
    double edge_sum = 0.0;     // edges of the final stage
    double bridge_sum = 0.0;   // all bridges
    double phantom_sum = 0.0;  // phantom length indexed by the final ledger
    double core_sum = 0.0;     // cores of bridges added by terminal case T2
    double alpha_sum = 0.0;    // sum over k > k0 of alpha^2 2^-k r0
    double naive_length = 0.0;
    double dedup_length = 0.0;
    double limit_error = 0.0;  // Hausdorff distance of the last level to the limit set
};

struct CurveConstruction {
    NetSequence nets;
    AlphaAssignment alphas;
    double epsilon = 1.0 / 32.0;
    int k0 = -1;
    CurveGraph graph;
    std::vector<BridgeRecord> bridges;
    std::vector<int> t2_bridges;
    std::vector<std::set<VertexRef>> phantom;  // indexed by stage k, empty below k0
    std::vector<StageStats> stages;
    std::vector<std::vector<int>> vertex_id;   // [k][v] -> graph vertex id
    CurveAccounting acct;
};

ExtensionChain extension_chain(const NetSequence& nets, int k, int v);

CurveConstruction construct_curve(const NetSequence& nets, const AlphaAssignment& alphas, double epsilon = 1.0 / 32.0);

struct Connectivity {
    bool connected = true;
    int components = 0;
    std::vector<std::pair<int, int>> spanning;  // element pairs merged, a spanning forest
    std::vector<int> side;                      // 0 for the first component, 1 otherwise
};

// Elements are the snapshot's segments followed by its explicit points.
Connectivity verify_connected(const CurveGraph& g, const Snapshot& s, double tol = 1e-12);

struct CurveLength {
    double naive = 0.0;
    double dedup = 0.0;
};

CurveLength curve_length(const std::vector<std::pair<Point, Point>>& segments, double tol = 1e-9);
CurveLength curve_length(const CurveGraph& g, const std::vector<int>& segment_ids, double tol = 1e-9);

struct LedgerViolation {
    int stage = 0;
    std::string property;  // bridge | terminal
    VertexRef pair;
    int bridge = -1;
    std::string describe() const;
};

// Bridge and Terminal-vertex properties at every stage.
std::vector<LedgerViolation> check_ledger(const CurveConstruction& c);

struct Certificate {
    bool cores_disjoint = true;
    std::vector<std::pair<int, int>> core_overlaps;
    std::vector<LedgerViolation> violations;
    double length = 0.0;       // deduplicated length of the final curve
    double denominator = 0.0;  // 2^-k0 r0 + alpha sum
    double c_hat = 0.0;
};

// Throws a validation error naming stage and pair on any ledger violation.
Certificate length_certificate(const CurveConstruction& c);

struct SoundnessReport {
    bool ok = true;
    std::vector<std::string> failures;
    int snapshots = 0;
};

// Per-snapshot connectivity and vertex coverage, insertion windows, cores and ledger.
SoundnessReport verify_construction(const CurveConstruction& c);

}  // namespace mrt

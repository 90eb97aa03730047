#pragma once

#include <string>
#include <vector>

#include "mrt/dyadic.hpp"
#include "mrt/geometry.hpp"
#include "mrt/measure.hpp"

namespace mrt {

struct NetSequence {
    double r0 = 1.0;
    double cstar = 2.0;
    std::vector<PointList> levels;                 // V_0 .. V_K
    std::vector<std::vector<DyadicCube>> witness;  // cube Q_{k,v} per vertex when built from a tree

    int K() const { return static_cast<int>(levels.size()) - 1; }
    int dim() const;
    double unit(int k) const;  // 2^-k r0
    // Least index k0 with #V_k >= 2 for every k >= k0; -1 when the last level is a singleton.
    int k0() const;
};

// Greedy maximal 2^-k r0 separated subsets of E in input order, levels 0..K, C* = 2.
NetSequence nets_from_points(const PointList& E, double r0, int K);

// Centers of mass of triples of tree members, greedily separated per level; levels are
// relative to the top scale and run down to the deepest member scale.
NetSequence nets_from_tree(const DiscreteMeasure& mu, const CubeTree& t, double r0, double cstar = 4.0);

struct NetViolation {
    std::string condition;  // separation | forward | backward | ball
    int level = 0;
    int i = -1;
    int j = -1;
    double dist = 0.0;
    double bound = 0.0;
};

struct NetValidation {
    bool ok = true;
    std::vector<NetViolation> violations;
    double min_cstar = 0.0;  // every C* strictly above this satisfies the proximity conditions
    double ball_ratio = 0.0; // enclosing radius of all levels over r0
};

NetValidation validate_nets(const NetSequence& nets, double cstar);

struct AlphaAssignment {
    std::vector<std::vector<Line>> lines;    // [k][v]
    std::vector<std::vector<double>> alpha;  // [k][v]
};

// Indices into V_{k-1} and V_k of points within 65 C* 2^-k r0 of vertex v of V_k.
struct Neighborhood {
    std::vector<int> prev;
    std::vector<int> same;
};
Neighborhood alpha_neighborhood(const NetSequence& nets, int k, int v);

// Largest normalized distance from the neighborhood of (k, v) to line l.
double alpha_for_line(const NetSequence& nets, int k, int v, const Line& l);

// With lines supplied, alphas are recomputed from them; otherwise each line is the
// sup-norm fit of the neighborhood.
AlphaAssignment fit_alphas(const NetSequence& nets, const AlphaAssignment* lines = nullptr);

struct NetLimit {
    PointList points;
    double error = 0.0;  // Hausdorff distance to the limit set is at most this
};
NetLimit net_limit(const NetSequence& nets);

}  // namespace mrt

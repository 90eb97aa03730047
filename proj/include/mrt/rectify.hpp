#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrt/beta.hpp"
#include "mrt/curve.hpp"
#include "mrt/dyadic.hpp"
#include "mrt/measure.hpp"

namespace mrt {

using CubeValues = std::unordered_map<DyadicCube, double, CubeHash>;

// sum over tree cubes containing atom i of b(Q) / mu(Q), with 0/0 = 0 and 1/0 = inf.
double normalized_sum(const DiscreteMeasure& mu, const CubeTree& t, const CubeValues& b, int atom);

struct LocalizationResult {
    std::vector<DyadicCube> good;  // sorted
    std::vector<DyadicCube> bad;   // sorted
    std::optional<CubeTree> good_tree;
    std::vector<int> a;        // atoms of Top with normalized sum <= N
    std::vector<int> a_prime;  // atoms of A in leaves of the good tree
    double mass_a = 0.0;
    double mass_a_prime = 0.0;
    double mass_top = 0.0;
    double good_sum = 0.0;  // sum of b over good cubes
    double n_cap = 0.0;
    double eps = 0.0;
    double budget = 0.0;  // N / eps
    bool all_bad = false;
    std::vector<std::string> failures;  // properties (1)-(4) rechecked on the output
    bool ok() const { return failures.empty(); }
};

// Good/bad partition: Q is bad when some R in T containing Q has mu(A cap R) <= eps mu(A) mu(R).
LocalizationResult localize(const DiscreteMeasure& mu, const CubeTree& t, const CubeValues& b, double n_cap, double eps);

struct Regime {
    enum Kind { lower_regular, plain_star_star, doubling };
    Kind kind = lower_regular;
    double c = 0.0;  // lower_regular
    double d = 0.0;  // doubling exponent
    static Regime LowerRegular(double c) { return {lower_regular, c, 0.0}; }
    static Regime PlainStarStar() { return {plain_star_star, 0.0, 0.0}; }
    static Regime Doubling(double d) { return {doubling, 0.0, d}; }
    std::string name() const;
};

struct GrownTree {
    std::optional<CubeTree> tree;
    DyadicCube q_x;
    double r_x = 0.0;  // 0 when the predicate fails on every ladder radius
    std::string diagnostic;
};

// Tree under Q_x whose branches satisfy the regime predicate down to scale k_max.
// For the doubling regime d is the pointwise exponent D_x; member cubes then satisfy
// mu(3 parent) <= (12 sqrt n)^D_x mu(3Q).
GrownTree grow_tree(const DiscreteMeasure& mu, const Point& x, Regime regime, int k_max,
                    const std::vector<double>& radii);

// Members that have a descendant at the deepest scale.
CubeTree prune_to_depth(const CubeTree& t);

struct DrawResult {
    CurveConstruction construction;
    std::string regime;
    double p = 2.0;
    double r0 = 0.0;
    int pruned = 0;                // members dropped for not reaching the deepest scale
    double alpha_sum = 0.0;        // sum alpha^2 2^-k r0
    double budget = 0.0;           // the regime's square-sum budget
    std::string budget_kind;
    int alpha_overrides = 0;       // vertices whose regime alpha did not cover the neighborhood
    double leaf_tolerance = 0.0;
    double max_leaf_distance = 0.0;
    double length = 0.0;           // deduplicated
    double naive_length = 0.0;
};

// Nets of triple centers of mass with C* = 4 and r0 = 3 diam Top, regime lines and alphas,
// then the curve construction. Throws a validation error naming the cube when the regime
// hypothesis fails and an internal error when a leaf is farther than the tolerance.
DrawResult draw_through_tree(BetaEngine& engine, const CubeTree& t, double p, Regime regime, double epsilon = 1.0 / 32.0);

// Distance from x to the final snapshot of a construction.
double distance_to_curve(const CurveConstruction& c, const Point& x);

struct Connector {
    Point a, b;
    double length = 0.0;
};

struct SupportCover {
    std::vector<DyadicCube> tops;
    std::vector<DrawResult> curves;
    std::vector<Connector> connectors;
    double curve_length = 0.0;      // sum of the per-tree deduplicated lengths
    double connector_length = 0.0;
    double total_length = 0.0;      // deduplicated length of the union with connectors
    double support_diam = 0.0;
    double s_star_star = 0.0;       // sum over the trees of beta**^2 diam Q
    double ratio = 0.0;             // total length / (diam spt + S**)
    int depth = 0;
};

// One tree per maximal cube Q with mu(3Q) > 0 and side <= diam spt, each `depth` scales deep,
// drawn through with beta** lines and joined by nearest-vertex connectors.
SupportCover cover_support(BetaEngine& engine, double p, int depth, double epsilon = 1.0 / 32.0);

struct DecomposeParams {
    double p = 2.0;
    std::vector<double> c_ladder{0.125, 0.25, 0.5, 1.0};
    std::vector<double> n_ladder{1.0, 4.0, 16.0};
    std::vector<double> eps_fractions{0.5, 0.25, 0.125};  // epsilon as a fraction of mu(Top)
    int k_max = 8;
    int radius_top = 3;   // density ladder radii 2^-j for j = radius_top..k_max
    double epsilon = 1.0 / 32.0;
};

struct AtomLabel {
    double lower_density = 0.0;
    std::vector<double> jones;  // truncated J^{*,c}_p per ladder c
    bool rect = false;
    double c = 0.0;             // first ladder c that qualified
    std::string reason;         // failing criterion for unrect candidates
    bool captured = false;
};

struct DecompositionReport {
    DecomposeParams params;
    std::vector<double> radii;
    double n_cap = 0.0;
    std::vector<AtomLabel> atoms;
    std::vector<DrawResult> curves;
    int trees = 0;
    double rect_mass = 0.0;
    double captured_mass = 0.0;
    double captured_fraction = 0.0;
};

DecompositionReport decompose_estimate(BetaEngine& engine, const DecomposeParams& params);

}  // namespace mrt

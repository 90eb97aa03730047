#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrt/beta.hpp"

namespace mrt {

struct JonesVariant {
    enum Kind { star, tilde, star_star, star_c };
    Kind kind = star;
    double c = 0.0;

    std::string name() const;
};

struct JonesTerm {
    DyadicCube cube;
    double beta = 0.0;
    double diam = 0.0;
    double mass = 0.0;  // mu(Q)
    double term = 0.0;  // beta^2 diam / mu(Q), 0 under 0/0
};

struct JonesReport {
    Point x;
    std::string variant;
    double p = 2.0;
    int k_max = 0;
    std::vector<JonesTerm> terms;
    double sum = 0.0;
    bool divergent = false;  // some term had beta > 0 and mu(Q) = 0
    std::optional<DyadicCube> divergent_cube;
};

// Least k with at most one atom in the scale-k cube containing x, capped at `cap`.
int default_k_max(const DiscreteMeasure& mu, const Point& x, int cap = 40);

double variant_beta(BetaEngine& engine, const DyadicCube& q, double p, JonesVariant v);
JonesReport jones_at(BetaEngine& engine, const Point& x, double p, int k_max, JonesVariant v);

struct SquareSumEntry {
    DyadicCube cube;           // representative cube
    std::uint64_t count = 1;   // cubes sharing this value
    double beta = 0.0;
    double term = 0.0;         // count * beta^2 * diam Q
};

struct SquareSum {
    std::string kind;
    double total = 0.0;
    std::uint64_t cubes = 0;
    std::vector<SquareSumEntry> ledger;
};

// Sum of beta**_p(Q)^2 diam Q over every cube of scales k_lo..k_hi.
SquareSum square_sum_star_star(BetaEngine& engine, double p, int k_lo, int k_hi);
// Sum of beta_p(mu, 3Q)^2 diam Q over the tree.
SquareSum square_sum_tree(BetaEngine& engine, const CubeTree& t, double p);
// Sum of beta^{*,c}_p(Q)^2 diam Q over the tree.
SquareSum square_sum_star_c_tree(BetaEngine& engine, const CubeTree& t, double p, double c);
// Sum of beta_E(3Q)^2 diam Q over cubes of scales k_lo..k_hi whose triple meets E.
SquareSum beta_sq_set(const PointList& E, int k_lo, int k_hi);

}  // namespace mrt

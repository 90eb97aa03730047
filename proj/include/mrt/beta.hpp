#pragma once

#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrt/dyadic.hpp"
#include "mrt/geometry.hpp"
#include "mrt/measure.hpp"

namespace mrt {

struct Variant {
    enum Kind { star, star_star, star_c };
    Kind kind = star;
    double c = 0.0;  // star_c only

    static Variant Star() { return {star, 0.0}; }
    static Variant StarStar() { return {star_star, 0.0}; }
    static Variant StarC(double c) { return {star_c, c}; }
    std::string name() const;
};

struct BetaValue {
    double value = 0.0;
    bool has_line = false;  // false when the infimum is over an empty family or zero mass
    Line line;
    int family_size = 0;    // number of cubes R entering the max
    int candidates = 0;     // lines evaluated by the optimizer
};

// Beta of the atoms of E against a fixed line; 0 when mu(E) = 0.
double beta_fixed_line(const DiscreteMeasure& mu, const Region& e, const Line& l, double p);
double beta_fixed_line(const DiscreteMeasure& mu, const std::vector<int>& atoms, double diam, const Line& l, double p);

// Infimum over lines, realized by fit_line.
BetaValue beta_best(const DiscreteMeasure& mu, const Region& e, double p);
BetaValue beta_best(const DiscreteMeasure& mu, const std::vector<int>& atoms, double diam, double p);

// Sup-norm flatness of a point set inside a region, relative to the region's diameter.
double beta_sup_set(const PointList& E, const Region& q);

struct FamilyMember {
    DyadicCube cube;
    const std::vector<int>* atoms = nullptr;
    double mass = 0.0;
    double diam = 0.0;    // diam 3R
    double weight = 0.0;  // multiplies beta_p(3R, l)^2
};

// max over members of weight * beta_p(mu, 3R, l)^2, minimized over lines.
class FamilyObjective {
public:
    FamilyObjective(const DiscreteMeasure& mu, std::vector<FamilyMember> members, double p);

    double eval(const Line& l) const;
    // Planar profile: for a direction angle theta, the optimal offset and value.
    std::pair<double, double> profile(double theta) const;
    const std::vector<FamilyMember>& members() const { return members_; }
    const std::vector<int>& atoms() const { return union_; }

private:
    double member_score(std::size_t r, const std::vector<double>& d) const;

    const DiscreteMeasure& mu_;
    std::vector<FamilyMember> members_;
    double p_;
    std::vector<int> union_;
    std::vector<std::vector<int>> pos_;  // member atom positions in union_
};

// Minimizes a family objective; extra lines are evaluated as additional candidates.
BetaValue minimize_family(const DiscreteMeasure& mu, const FamilyObjective& f, double p,
                          const std::vector<Line>& extra = {});

// Multiscale beta numbers over nearby-cube families, cached by the data-relevant part of
// the family window. Thread safe.
class BetaEngine {
public:
    explicit BetaEngine(const DiscreteMeasure& mu) : mu_(mu) {}

    BetaValue multi(const DyadicCube& q, double p, Variant v);
    BetaValue triple_best(const DyadicCube& q, double p);  // beta_p(mu, 3Q)
    std::vector<FamilyMember> family(const DyadicCube& q, Variant v) const;
    const DiscreteMeasure& measure() const { return mu_; }

    std::size_t cache_size() const;

private:
    std::string family_key(const DyadicCube& q, double p, Variant v) const;

    const DiscreteMeasure& mu_;
    mutable std::mutex mu_lock_;
    std::unordered_map<std::string, BetaValue> multi_cache_;
    std::unordered_map<std::string, BetaValue> triple_cache_;
};

BetaValue beta_multi(const DiscreteMeasure& mu, const DyadicCube& q, double p, Variant v);

}  // namespace mrt

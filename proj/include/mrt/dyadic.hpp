#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mrt/geometry.hpp"

namespace mrt {

// Half-open cube prod [j_i 2^-k, (j_i+1) 2^-k).
struct DyadicCube {
    int k = 0;
    std::vector<std::int64_t> j;

    int dim() const { return static_cast<int>(j.size()); }
    double side() const;
    double diam() const;
    Point lower() const;
    Point center() const;
    bool contains(const Point& x) const;  // half-open

    auto operator<=>(const DyadicCube&) const = default;
    bool operator==(const DyadicCube&) const = default;
};

struct CubeHash {
    std::size_t operator()(const DyadicCube& q) const;
};

// Axis-aligned closed box.
struct Box {
    Point center;
    double half = 0.0;

    double side() const { return 2.0 * half; }
    double diam() const;
    bool contains(const Point& x) const;
};

DyadicCube cube_at(const Point& x, int k);
DyadicCube parent(const DyadicCube& q);
DyadicCube ancestor(const DyadicCube& q, int k);
bool is_ancestor_or_self(const DyadicCube& a, const DyadicCube& q);
std::vector<DyadicCube> children(const DyadicCube& q);
Box dilate(const DyadicCube& q, double lambda);
inline Box triple(const DyadicCube& q) { return dilate(q, 3.0); }

// Exact test of a <= 1600 sqrt(n) for integer a.
bool within_nearby_bound(std::int64_t a, int n);

// R is nearby Q: scale k or k-1 and 3R inside the closed box 1600 sqrt(n) Q.
bool is_nearby(const DyadicCube& q, const DyadicCube& r);

// Index range along one axis of the nearby cubes of scale k - log2(m), m in {1, 2}.
std::pair<std::int64_t, std::int64_t> nearby_axis_window(std::int64_t jq, std::int64_t m, int n);

// Per-axis index ranges [lo, hi] of the nearby cubes at one scale.
struct IndexWindow {
    int k = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> range;
    std::uint64_t count() const;
};

// Windows at scales k and k-1, in that order.
std::pair<IndexWindow, IndexWindow> nearby_windows(const DyadicCube& q);
std::uint64_t count_nearby_cubes(const DyadicCube& q);
void for_each_nearby_cube(const DyadicCube& q, const std::function<void(const DyadicCube&)>& f);
std::vector<DyadicCube> nearby_cubes(const DyadicCube& q);

std::vector<DyadicCube> chain_of_cubes(const Point& x, int k_max);

// Upward-closed set of dyadic cubes below a single top.
class CubeTree {
public:
    CubeTree() = default;
    CubeTree(DyadicCube top, std::vector<DyadicCube> members);

    const DyadicCube& top() const { return top_; }
    const std::vector<DyadicCube>& members() const { return members_; }  // sorted by (k, j)
    bool empty() const { return members_.empty(); }
    bool contains(const DyadicCube& q) const { return index_.count(q) != 0; }
    std::vector<DyadicCube> children_in_tree(const DyadicCube& q) const;
    int deepest_scale() const;

private:
    DyadicCube top_;
    std::vector<DyadicCube> members_;
    std::unordered_set<DyadicCube, CubeHash> index_;
};

// Closed member cubes at scale k_max; each approximates leaves within its diameter.
struct LeafApprox {
    std::vector<DyadicCube> cubes;
    double error = 0.0;
};
LeafApprox leaves(const CubeTree& t, int k_max);

}  // namespace mrt

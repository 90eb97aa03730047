#include "mrt/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrt/error.hpp"

namespace mrt {

double DyadicCube::side() const { return std::ldexp(1.0, -k); }
double DyadicCube::diam() const { return side() * std::sqrt(static_cast<double>(dim())); }

Point DyadicCube::lower() const {
    Point p(dim());
    for (int i = 0; i < dim(); ++i) p[i] = std::ldexp(static_cast<double>(j[static_cast<std::size_t>(i)]), -k);
    return p;
}

Point DyadicCube::center() const {
    Point p(dim());
    for (int i = 0; i < dim(); ++i)
        p[i] = std::ldexp(static_cast<double>(2 * j[static_cast<std::size_t>(i)] + 1), -k - 1);
    return p;
}

bool DyadicCube::contains(const Point& x) const {
    require_dim(x, dim(), "cube containment");
    for (int i = 0; i < dim(); ++i)
        if (static_cast<std::int64_t>(std::floor(std::ldexp(x[i], k))) != j[static_cast<std::size_t>(i)]) return false;
    return true;
}

std::size_t CubeHash::operator()(const DyadicCube& q) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(q.k);
    for (std::int64_t v : q.j) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

double Box::diam() const { return 2.0 * half * std::sqrt(static_cast<double>(center.size())); }

bool Box::contains(const Point& x) const {
    require_dim(x, static_cast<int>(center.size()), "box containment");
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - center[i]) > half) return false;
    return true;
}

DyadicCube cube_at(const Point& x, int k) {
    DyadicCube q;
    q.k = k;
    q.j.resize(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) fail_input("non-finite coordinate");
        double v = std::floor(std::ldexp(x[i], k));
        if (std::abs(v) > 9.0e18) fail_input("coordinate out of dyadic index range");
        q.j[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(v);
    }
    return q;
}

namespace {
std::int64_t floor_div2(std::int64_t a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }
}  // namespace

DyadicCube parent(const DyadicCube& q) {
    DyadicCube p;
    p.k = q.k - 1;
    p.j.reserve(q.j.size());
    for (std::int64_t v : q.j) p.j.push_back(floor_div2(v));
    return p;
}

DyadicCube ancestor(const DyadicCube& q, int k) {
    if (k > q.k) fail_input("ancestor scale below the cube");
    DyadicCube a;
    a.k = k;
    const int shift = q.k - k;
    for (std::int64_t v : q.j) a.j.push_back(shift >= 63 ? (v < 0 ? -1 : 0) : (v >> shift));
    return a;
}

bool is_ancestor_or_self(const DyadicCube& a, const DyadicCube& q) {
    if (a.k > q.k || a.dim() != q.dim()) return false;
    return ancestor(q, a.k) == a;
}

std::vector<DyadicCube> children(const DyadicCube& q) {
    const int n = q.dim();
    std::vector<DyadicCube> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        DyadicCube c;
        c.k = q.k + 1;
        for (int i = 0; i < n; ++i) c.j.push_back(2 * q.j[static_cast<std::size_t>(i)] + ((mask >> i) & 1u));
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Box dilate(const DyadicCube& q, double lambda) {
    if (!(lambda > 0)) fail_input("dilation factor must be positive");
    return Box{q.center(), 0.5 * lambda * q.side()};
}

bool within_nearby_bound(std::int64_t a, int n) {
    if (a <= 0) return true;
    __int128 sq = static_cast<__int128>(a) * a;
    return sq <= static_cast<__int128>(2560000) * n;
}

namespace {

// Units of half the side of Q: Q has center 2jq+1; 3R spans [2m(jr-1), 2m(jr+2)].
bool axis_nearby(std::int64_t jq, std::int64_t jr, std::int64_t m, int n) {
    std::int64_t c = 2 * jq + 1;
    return within_nearby_bound(c - 2 * m * (jr - 1), n) && within_nearby_bound(2 * m * (jr + 2) - c, n);
}

std::pair<std::int64_t, std::int64_t> axis_window(std::int64_t jq, std::int64_t m, int n) {
    const double lam = 1600.0 * std::sqrt(static_cast<double>(n));
    const double c = static_cast<double>(2 * jq + 1);
    auto lo = static_cast<std::int64_t>(std::ceil((c - lam) / (2.0 * m) + 1.0));
    auto hi = static_cast<std::int64_t>(std::floor((c + lam) / (2.0 * m) - 2.0));
    while (axis_nearby(jq, lo - 1, m, n)) --lo;
    while (!axis_nearby(jq, lo, m, n)) ++lo;
    while (axis_nearby(jq, hi + 1, m, n)) ++hi;
    while (!axis_nearby(jq, hi, m, n)) --hi;
    return {lo, hi};
}

}  // namespace

std::pair<std::int64_t, std::int64_t> nearby_axis_window(std::int64_t jq, std::int64_t m, int n) {
    return axis_window(jq, m, n);
}

bool is_nearby(const DyadicCube& q, const DyadicCube& r) {
    if (q.dim() != r.dim()) return false;
    std::int64_t m;
    if (r.k == q.k) {
        m = 1;
    } else if (r.k == q.k - 1) {
        m = 2;
    } else {
        return false;
    }
    for (int i = 0; i < q.dim(); ++i)
        if (!axis_nearby(q.j[static_cast<std::size_t>(i)], r.j[static_cast<std::size_t>(i)], m, q.dim())) return false;
    return true;
}

std::uint64_t IndexWindow::count() const {
    std::uint64_t c = 1;
    for (const auto& [lo, hi] : range) {
        if (hi < lo) return 0;
        c *= static_cast<std::uint64_t>(hi - lo + 1);
    }
    return c;
}

std::pair<IndexWindow, IndexWindow> nearby_windows(const DyadicCube& q) {
    IndexWindow same{q.k, {}}, up{q.k - 1, {}};
    for (std::int64_t jq : q.j) {
        same.range.push_back(axis_window(jq, 1, q.dim()));
        up.range.push_back(axis_window(jq, 2, q.dim()));
    }
    return {same, up};
}

std::uint64_t count_nearby_cubes(const DyadicCube& q) {
    auto [a, b] = nearby_windows(q);
    return a.count() + b.count();
}

void for_each_nearby_cube(const DyadicCube& q, const std::function<void(const DyadicCube&)>& f) {
    auto [a, b] = nearby_windows(q);
    for (const IndexWindow* w : {&a, &b}) {
        if (w->count() == 0) continue;
        DyadicCube r;
        r.k = w->k;
        r.j.resize(w->range.size());
        for (std::size_t i = 0; i < w->range.size(); ++i) r.j[i] = w->range[i].first;
        for (;;) {
            f(r);
            std::size_t axis = 0;
            while (axis < r.j.size()) {
                if (r.j[axis] < w->range[axis].second) {
                    ++r.j[axis];
                    break;
                }
                r.j[axis] = w->range[axis].first;
                ++axis;
            }
            if (axis == r.j.size()) break;
        }
    }
}

std::vector<DyadicCube> nearby_cubes(const DyadicCube& q) {
    std::uint64_t c = count_nearby_cubes(q);
    if (c > 50'000'000ull) fail_input("nearby family too large to list; use for_each_nearby_cube");
    std::vector<DyadicCube> out;
    out.reserve(static_cast<std::size_t>(c));
    for_each_nearby_cube(q, [&](const DyadicCube& r) { out.push_back(r); });
    return out;
}

std::vector<DyadicCube> chain_of_cubes(const Point& x, int k_max) {
    if (k_max < 0) fail_input("k_max must be nonnegative");
    std::vector<DyadicCube> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) out.push_back(cube_at(x, k));
    return out;
}

CubeTree::CubeTree(DyadicCube top, std::vector<DyadicCube> members) : top_(std::move(top)) {
    std::sort(members.begin(), members.end(), [](const DyadicCube& a, const DyadicCube& b) {
        return a.k != b.k ? a.k < b.k : a.j < b.j;
    });
    members.erase(std::unique(members.begin(), members.end()), members.end());
    members_ = std::move(members);
    index_.insert(members_.begin(), members_.end());
    if (members_.empty()) return;
    if (!contains(top_)) fail_input("tree does not contain its top cube");
    for (const DyadicCube& q : members_) {
        if (q.dim() != top_.dim()) fail_input("tree member dimension differs from top");
        if (!is_ancestor_or_self(top_, q)) fail_input("tree member lies outside the top cube");
        if (q.k > top_.k && !contains(parent(q)))
            fail_input("tree is not upward closed at a scale-" + std::to_string(q.k) + " member");
    }
}

std::vector<DyadicCube> CubeTree::children_in_tree(const DyadicCube& q) const {
    std::vector<DyadicCube> out;
    for (DyadicCube& c : children(q))
        if (contains(c)) out.push_back(std::move(c));
    return out;
}

int CubeTree::deepest_scale() const { return members_.empty() ? top_.k : members_.back().k; }

LeafApprox leaves(const CubeTree& t, int k_max) {
    if (t.empty()) fail_input("leaves of an empty tree");
    if (k_max < t.top().k) fail_input("k_max above the top scale");
    LeafApprox out;
    for (const DyadicCube& q : t.members())
        if (q.k == k_max) out.cubes.push_back(q);
    out.error = std::ldexp(1.0, -k_max) * std::sqrt(static_cast<double>(t.top().dim()));
    return out;
}

}  // namespace mrt

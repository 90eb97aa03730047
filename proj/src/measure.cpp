#include "mrt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrt/error.hpp"

namespace mrt {

double region_diam(const Region& e) {
    if (auto q = std::get_if<DyadicCube>(&e)) return q->diam();
    if (auto b = std::get_if<Box>(&e)) return b->diam();
    return 2.0 * std::get<ClosedBall>(e).radius;
}

bool region_contains(const Region& e, const Point& x) {
    if (auto q = std::get_if<DyadicCube>(&e)) return q->contains(x);
    if (auto b = std::get_if<Box>(&e)) return b->contains(x);
    const auto& ball = std::get<ClosedBall>(e);
    require_dim(x, static_cast<int>(ball.center.size()), "ball containment");
    return (x - ball.center).norm() <= ball.radius;
}

const CellGroup* ScaleTable::cell(const DyadicCube& q) const {
    auto it = cell_index.find(q);
    return it == cell_index.end() ? nullptr : &cells[static_cast<std::size_t>(it->second)];
}

const CellGroup* ScaleTable::triple(const DyadicCube& q) const {
    auto it = triple_index.find(q);
    return it == triple_index.end() ? nullptr : &triples[static_cast<std::size_t>(it->second)];
}

DiscreteMeasure::DiscreteMeasure(int dim) : dim_(dim), points_(dim, 0) {
    if (dim < 1) fail_input("dimension must be at least 1");
}

DiscreteMeasure::DiscreteMeasure(PointMatrix points, std::vector<double> weights)
    : dim_(static_cast<int>(points.rows())), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim_ < 1) fail_input("dimension must be at least 1");
    if (static_cast<std::size_t>(points_.cols()) != weights_.size()) fail_input("atom and weight counts differ");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0) || !std::isfinite(weights_[i]))
            fail_input("atom " + std::to_string(i) + " has a nonpositive or non-finite weight");
        for (int d = 0; d < dim_; ++d)
            if (!std::isfinite(points_(d, static_cast<Eigen::Index>(i))))
                fail_input("atom " + std::to_string(i) + " has a non-finite coordinate");
        total_ += weights_[i];
    }
    build_grid();
}

DiscreteMeasure::DiscreteMeasure(const DiscreteMeasure& other)
    : dim_(other.dim_),
      points_(other.points_),
      weights_(other.weights_),
      total_(other.total_),
      cell_(other.cell_),
      origin_(other.origin_),
      grid_(other.grid_) {}

DiscreteMeasure& DiscreteMeasure::operator=(const DiscreteMeasure& other) {
    if (this == &other) return *this;
    dim_ = other.dim_;
    points_ = other.points_;
    weights_ = other.weights_;
    total_ = other.total_;
    cell_ = other.cell_;
    origin_ = other.origin_;
    grid_ = other.grid_;
    std::lock_guard<std::mutex> lock(scale_mu_);
    scales_.clear();
    return *this;
}

void DiscreteMeasure::build_grid() {
    grid_.clear();
    if (empty()) return;
    Point lo = lower_corner(), hi = upper_corner();
    double ext = (hi - lo).maxCoeff();
    double target = ext > 0 ? ext / std::max(1.0, std::pow(static_cast<double>(size()), 1.0 / dim_)) : 1.0;
    // Grid cells are dyadic so bucket keys are exact.
    int k = static_cast<int>(std::floor(-std::log2(std::max(target, 1e-300))));
    k = std::clamp(k, -60, 60);
    cell_ = std::ldexp(1.0, -k);
    origin_ = Point::Zero(dim_);
    for (int i = 0; i < size(); ++i) grid_[cube_at(points_.col(i), k)].push_back(i);
}

std::vector<int> DiscreteMeasure::query_box(const Point& lo, const Point& hi) const {
    std::vector<int> out;
    if (empty()) return out;
    const int k = static_cast<int>(std::lround(-std::log2(cell_)));
    DyadicCube a = cube_at(lo, k), b = cube_at(hi, k);
    double cells = 1.0;
    for (int d = 0; d < dim_; ++d) cells *= static_cast<double>(b.j[static_cast<std::size_t>(d)] - a.j[static_cast<std::size_t>(d)] + 1);
    auto in_range = [&](const DyadicCube& c) {
        for (int d = 0; d < dim_; ++d) {
            auto dd = static_cast<std::size_t>(d);
            if (c.j[dd] < a.j[dd] || c.j[dd] > b.j[dd]) return false;
        }
        return true;
    };
    if (cells > static_cast<double>(grid_.size())) {
        for (const auto& [c, atoms] : grid_)
            if (in_range(c)) out.insert(out.end(), atoms.begin(), atoms.end());
    } else {
        DyadicCube c = a;
        for (;;) {
            auto it = grid_.find(c);
            if (it != grid_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
            std::size_t axis = 0;
            while (axis < c.j.size()) {
                if (c.j[axis] < b.j[axis]) {
                    ++c.j[axis];
                    break;
                }
                c.j[axis] = a.j[axis];
                ++axis;
            }
            if (axis == c.j.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> DiscreteMeasure::atoms_in(const Region& e) const {
    std::vector<int> out;
    if (empty()) return out;
    Point lo, hi;
    if (auto q = std::get_if<DyadicCube>(&e)) {
        if (q->dim() != dim_) fail_input("dimension mismatch between cube and measure");
        lo = q->lower();
        hi = lo.array() + q->side();
    } else if (auto b = std::get_if<Box>(&e)) {
        require_dim(b->center, dim_, "box query");
        lo = b->center.array() - b->half;
        hi = b->center.array() + b->half;
    } else {
        const auto& ball = std::get<ClosedBall>(e);
        require_dim(ball.center, dim_, "ball query");
        lo = ball.center.array() - ball.radius;
        hi = ball.center.array() + ball.radius;
    }
    for (int i : query_box(lo, hi))
        if (region_contains(e, points_.col(i))) out.push_back(i);
    return out;
}

double DiscreteMeasure::mass_of(const std::vector<int>& atoms) const {
    double s = 0.0;
    for (int i : atoms) s += weights_[static_cast<std::size_t>(i)];
    return s;
}

double DiscreteMeasure::mass(const Region& e) const { return mass_of(atoms_in(e)); }

Point DiscreteMeasure::center_of_mass(const std::vector<int>& atoms) const {
    double m = mass_of(atoms);
    if (!(m > 0)) fail_input("center of mass of a region with zero mass");
    Point z = Point::Zero(dim_);
    for (int i : atoms) z += weights_[static_cast<std::size_t>(i)] * points_.col(i);
    return z / m;
}

Point DiscreteMeasure::center_of_mass(const Region& e) const { return center_of_mass(atoms_in(e)); }

Point DiscreteMeasure::lower_corner() const {
    if (empty()) fail_input("bounding box of an empty measure");
    return points_.rowwise().minCoeff();
}

Point DiscreteMeasure::upper_corner() const {
    if (empty()) fail_input("bounding box of an empty measure");
    return points_.rowwise().maxCoeff();
}

double DiscreteMeasure::support_diam() const {
    if (empty()) fail_input("diameter of an empty measure");
    std::vector<int> idx;
    if (dim_ == 2) {
        idx = convex_hull_2d(points_);
    } else {
        idx.resize(static_cast<std::size_t>(size()));
        std::iota(idx.begin(), idx.end(), 0);
    }
    double d = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            d = std::max(d, (points_.col(idx[a]) - points_.col(idx[b])).norm());
    return d;
}

const ScaleTable& DiscreteMeasure::scale(int k) const {
    std::lock_guard<std::mutex> lock(scale_mu_);
    auto it = scales_.find(k);
    if (it != scales_.end()) return *it->second;

    auto table = std::make_unique<ScaleTable>();
    table->k = k;
    std::map<DyadicCube, std::vector<int>> cells, triples;
    std::vector<std::int64_t> base(static_cast<std::size_t>(dim_));
    std::vector<std::vector<std::int64_t>> options(static_cast<std::size_t>(dim_));
    for (int i = 0; i < size(); ++i) {
        DyadicCube c = cube_at(points_.col(i), k);
        cells[c].push_back(i);
        // Closed triple 3R contains the atom iff each axis index lies in {c-1, c, c+1},
        // plus c-2 when the atom sits exactly on a grid hyperplane.
        for (int d = 0; d < dim_; ++d) {
            auto dd = static_cast<std::size_t>(d);
            options[dd] = {c.j[dd] - 1, c.j[dd], c.j[dd] + 1};
            if (std::ldexp(points_(d, i), k) == static_cast<double>(c.j[dd])) options[dd].push_back(c.j[dd] - 2);
        }
        std::vector<std::size_t> pos(static_cast<std::size_t>(dim_), 0);
        DyadicCube r;
        r.k = k;
        r.j.resize(static_cast<std::size_t>(dim_));
        for (;;) {
            for (std::size_t d = 0; d < pos.size(); ++d) r.j[d] = options[d][pos[d]];
            triples[r].push_back(i);
            std::size_t axis = 0;
            while (axis < pos.size()) {
                if (++pos[axis] < options[axis].size()) break;
                pos[axis] = 0;
                ++axis;
            }
            if (axis == pos.size()) break;
        }
    }
    auto fill = [&](std::map<DyadicCube, std::vector<int>>& src, std::vector<CellGroup>& dst,
                    std::unordered_map<DyadicCube, int, CubeHash>& index) {
        dst.reserve(src.size());
        index.reserve(src.size());
        for (auto& [cube, atoms] : src) {
            CellGroup g{cube, std::move(atoms), 0.0};
            g.mass = mass_of(g.atoms);
            index.emplace(g.cube, static_cast<int>(dst.size()));
            dst.push_back(std::move(g));
        }
    };
    fill(cells, table->cells, table->cell_index);
    fill(triples, table->triples, table->triple_index);
    if (!table->triples.empty()) {
        table->triple_lo = table->triples.front().cube.j;
        table->triple_hi = table->triple_lo;
        for (const CellGroup& g : table->triples)
            for (std::size_t d = 0; d < g.cube.j.size(); ++d) {
                table->triple_lo[d] = std::min(table->triple_lo[d], g.cube.j[d]);
                table->triple_hi[d] = std::max(table->triple_hi[d], g.cube.j[d]);
            }
    }
    auto [pos, inserted] = scales_.emplace(k, std::move(table));
    return *pos->second;
}

DensityProfile density_profile(const DiscreteMeasure& mu, const Point& x, const std::vector<double>& radii) {
    if (radii.empty()) fail_input("density profile needs at least one radius");
    DensityProfile out;
    out.radii = radii;
    out.lower = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0)) fail_input("radii must be positive");
        if (i > 0 && !(radii[i] < radii[i - 1])) fail_input("radii must be strictly decreasing");
        double r = mu.mass(ClosedBall{x, radii[i]}) / (2.0 * radii[i]);
        out.ratios.push_back(r);
        out.lower = std::min(out.lower, r);
    }
    return out;
}

DoublingProfile doubling_profile(const DiscreteMeasure& mu, const Point& x, const std::vector<double>& radii) {
    DoublingProfile out;
    out.radii = radii;
    for (double r : radii) {
        if (!(r > 0)) fail_input("radii must be positive");
        double inner = mu.mass(ClosedBall{x, r});
        double outer = mu.mass(ClosedBall{x, 2.0 * r});
        bool gap = !(inner > 0);
        out.gap.push_back(gap);
        out.ratios.push_back(gap ? 0.0 : outer / inner);
        if (!gap) out.estimate = std::max(out.estimate, outer / inner);
    }
    return out;
}

std::vector<double> radius_ladder(double r_top, int count) {
    if (!(r_top > 0) || count < 1) fail_input("radius ladder needs a positive top radius and count");
    std::vector<double> out;
    for (int j = 0; j < count; ++j) out.push_back(std::ldexp(r_top, -j));
    return out;
}

}  // namespace mrt

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mrt/dyadic.hpp"
#include "mrt/geometry.hpp"

namespace mrt {

struct ClosedBall {
    Point center;
    double radius = 0.0;
};

using Region = std::variant<DyadicCube, Box, ClosedBall>;

double region_diam(const Region& e);
bool region_contains(const Region& e, const Point& x);

// Atoms of one dyadic scale grouped by half-open cell and by closed triple 3R.
struct CellGroup {
    DyadicCube cube;
    std::vector<int> atoms;  // ascending atom index
    double mass = 0.0;
};

struct ScaleTable {
    int k = 0;
    std::vector<CellGroup> cells;    // sorted by cube
    std::vector<CellGroup> triples;  // cubes R with mu(3R) > 0, sorted by cube
    std::unordered_map<DyadicCube, int, CubeHash> cell_index;
    std::unordered_map<DyadicCube, int, CubeHash> triple_index;
    std::vector<std::int64_t> triple_lo, triple_hi;  // per-axis index extents of triples

    const CellGroup* cell(const DyadicCube& q) const;
    const CellGroup* triple(const DyadicCube& q) const;
};

class DiscreteMeasure {
public:
    explicit DiscreteMeasure(int dim = 2);
    DiscreteMeasure(PointMatrix points, std::vector<double> weights);
    DiscreteMeasure(const DiscreteMeasure& other);
    DiscreteMeasure& operator=(const DiscreteMeasure& other);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(weights_.size()); }
    bool empty() const { return weights_.empty(); }
    const PointMatrix& points() const { return points_; }
    Point point(int i) const { return points_.col(i); }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& weights() const { return weights_; }
    double total() const { return total_; }

    std::vector<int> atoms_in(const Region& e) const;
    double mass(const Region& e) const;
    double mass_of(const std::vector<int>& atoms) const;
    Point center_of_mass(const Region& e) const;
    Point center_of_mass(const std::vector<int>& atoms) const;

    // Lazily built per-scale grouping; safe to call from several threads.
    const ScaleTable& scale(int k) const;

    // Axis-aligned bounding box of the atoms.
    Point lower_corner() const;
    Point upper_corner() const;
    double support_diam() const;  // exact diameter of the atom set

private:
    void build_grid();
    std::vector<int> query_box(const Point& lo, const Point& hi) const;

    int dim_ = 2;
    PointMatrix points_;
    std::vector<double> weights_;
    double total_ = 0.0;

    double cell_ = 1.0;
    Point origin_;
    std::unordered_map<DyadicCube, std::vector<int>, CubeHash> grid_;

    mutable std::mutex scale_mu_;
    mutable std::map<int, std::unique_ptr<ScaleTable>> scales_;
};

struct DensityProfile {
    std::vector<double> radii;
    std::vector<double> ratios;  // mu(B(x,r)) / 2r
    double lower = 0.0;          // min over the supplied radii
};

struct DoublingProfile {
    std::vector<double> radii;
    std::vector<double> ratios;  // mu(B(x,2r)) / mu(B(x,r)), 0 where flagged
    std::vector<bool> gap;       // mu(B(x,r)) = 0
    double estimate = 0.0;       // max over non-gap radii
};

DensityProfile density_profile(const DiscreteMeasure& mu, const Point& x, const std::vector<double>& radii);
DoublingProfile doubling_profile(const DiscreteMeasure& mu, const Point& x, const std::vector<double>& radii);

// r_top * 2^-j for j = 0..count-1.
std::vector<double> radius_ladder(double r_top, int count);

}  // namespace mrt

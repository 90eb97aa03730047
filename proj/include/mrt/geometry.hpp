#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace mrt {

using Point = Eigen::VectorXd;
using PointList = std::vector<Point>;
// Points stored column-wise, n x m.
using PointMatrix = Eigen::MatrixXd;

inline constexpr double kSup = std::numeric_limits<double>::infinity();

struct Line {
    Point base;
    Point dir;  // unit length, lexicographically positive
    int dim() const { return static_cast<int>(base.size()); }
};

// Flips v so its first nonzero coordinate is positive.
void canonicalize(Point& v);
Line make_line(const Point& base, const Point& dir);
Line axis_line(const Point& base, int axis = 0);

void require_dim(const Point& x, int n, const char* what);

double dist_to_line(const Point& x, const Line& l);
double project(const Point& x, const Line& l);  // signed parameter along l

PointMatrix to_matrix(const PointList& pts);
PointList to_list(const PointMatrix& pts);

// Result of fitting a line to weighted points. For finite p the objective is the
// weighted mean of dist^p; for p = kSup it is the maximal distance.
struct LineFit {
    Line line;
    double objective = 0.0;
};

double line_objective(const PointMatrix& pts, const Eigen::VectorXd& w, const Line& l, double p);

LineFit fit_line(const PointMatrix& pts, const Eigen::VectorXd& w, double p);
LineFit fit_line(const PointList& pts, const std::vector<double>& w, double p);
LineFit fit_line_l2(const PointMatrix& pts, const Eigen::VectorXd& w);
LineFit fit_line_lp(const PointMatrix& pts, const Eigen::VectorXd& w, double p);
LineFit fit_line_sup(const PointMatrix& pts);

// Minimal enclosing ball, exact (Welzl).
struct Ball {
    Point center;
    double radius = 0.0;
};
Ball min_enclosing_ball(const PointMatrix& pts);

// 2-d convex hull (counter-clockwise, no collinear interior vertices).
std::vector<int> convex_hull_2d(const PointMatrix& pts);

double excess(const PointList& S, const PointList& T);
double hausdorff(const PointList& S, const PointList& T);

// Closest distance between segments [a0,a1] and [b0,b1].
double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1);
double point_segment_distance(const Point& x, const Point& a, const Point& b);

struct OrderingWitness {
    std::vector<int> order;   // indices of V sorted along both lines
    std::vector<double> t1;   // parameters along l1 (oriented), in order
    std::vector<double> t2;   // parameters along l2 (oriented), in order
    int sign1 = 1;
    int sign2 = 1;
    double ratio1 = 1.0;  // max |v_{i+1}-v_i| / |t1_{i+1}-t1_i|
    double bound1 = 1.0;  // 1 + 3 alpha^2
    double ratio2 = 1.0;  // length on l2 over its projection onto l1
    double bound2 = 1.0;  // 1 + 12 alpha^2
    bool ok = false;
};

// V must be 1-separated with all points within alpha <= 1/16 of both lines.
OrderingWitness order_along_lines(const PointList& V, const Line& l1, const Line& l2, double alpha);

}  // namespace mrt

#include "mrt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mrt/error.hpp"
#include "mrt/optimize.hpp"

namespace mrt {

void canonicalize(Point& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > 0) return;
        if (v[i] < 0) {
            v = -v;
            return;
        }
    }
}

Line make_line(const Point& base, const Point& dir) {
    if (base.size() != dir.size()) fail_input("line base and direction dimensions differ");
    double nrm = dir.norm();
    if (!(nrm > 0) || !std::isfinite(nrm)) fail_input("line direction must be a finite nonzero vector");
    Line l{base, dir / nrm};
    canonicalize(l.dir);
    return l;
}

Line axis_line(const Point& base, int axis) {
    Point d = Point::Zero(base.size());
    d[axis] = 1.0;
    return Line{base, d};
}

void require_dim(const Point& x, int n, const char* what) {
    if (x.size() != n)
        fail_input(std::string("dimension mismatch in ") + what + ": got " + std::to_string(x.size()) + ", expected " +
                   std::to_string(n));
}

double dist_to_line(const Point& x, const Line& l) {
    require_dim(x, l.dim(), "dist_to_line");
    Point r = x - l.base;
    double t = r.dot(l.dir);
    return (r - t * l.dir).norm();
}

double project(const Point& x, const Line& l) {
    require_dim(x, l.dim(), "project");
    return (x - l.base).dot(l.dir);
}

PointMatrix to_matrix(const PointList& pts) {
    if (pts.empty()) return PointMatrix(0, 0);
    PointMatrix m(pts[0].size(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        require_dim(pts[i], static_cast<int>(m.rows()), "point list");
        m.col(static_cast<Eigen::Index>(i)) = pts[i];
    }
    return m;
}

PointList to_list(const PointMatrix& pts) {
    PointList out;
    out.reserve(static_cast<std::size_t>(pts.cols()));
    for (Eigen::Index i = 0; i < pts.cols(); ++i) out.emplace_back(pts.col(i));
    return out;
}

namespace {

double col_dist(const PointMatrix& pts, Eigen::Index i, const Line& l) {
    Point r = pts.col(i) - l.base;
    double t = r.dot(l.dir);
    return (r - t * l.dir).norm();
}

void require_fit_input(const PointMatrix& pts, const Eigen::VectorXd& w) {
    if (pts.cols() == 0) fail_input("line fit needs at least one point");
    if (w.size() != pts.cols()) fail_input("weight count differs from point count");
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0) || !std::isfinite(w[i])) fail_input("weights must be finite and nonnegative");
        total += w[i];
    }
    if (!(total > 0)) fail_input("total weight must be positive");
}

bool all_coincident(const PointMatrix& pts) {
    for (Eigen::Index i = 1; i < pts.cols(); ++i)
        if (pts.col(i) != pts.col(0)) return false;
    return true;
}

double extent(const PointMatrix& pts) {
    if (pts.cols() == 0) return 0.0;
    return (pts.rowwise().maxCoeff() - pts.rowwise().minCoeff()).norm();
}

// Principal axes of a weighted point set, eigenvalues descending.
struct Principal {
    Point centroid;
    Eigen::MatrixXd axes;
    Eigen::VectorXd values;
};

Principal principal_axes(const PointMatrix& pts, const Eigen::VectorXd& w) {
    const double total = w.sum();
    Principal pr;
    pr.centroid = (pts * w) / total;
    const Eigen::Index n = pts.rows();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        if (w[i] == 0) continue;
        Point d = pts.col(i) - pr.centroid;
        c.noalias() += w[i] * d * d.transpose();
    }
    c /= total;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    pr.axes = es.eigenvectors().rowwise().reverse();
    pr.values = es.eigenvalues().reverse();
    // Equal top eigenvalues: pick the lexicographically largest unit vector of the eigenspace.
    const double top = pr.values[0];
    Eigen::Index s = 1;
    while (s < n && top - pr.values[s] <= 1e-12 * std::abs(top)) ++s;
    if (s > 1) {
        Eigen::MatrixXd basis = pr.axes.leftCols(s);
        for (Eigen::Index axis = 0; axis < n; ++axis) {
            Point v = basis * basis.row(axis).transpose();
            if (v.norm() > 1e-8) {
                pr.axes.col(0) = v.normalized();
                break;
            }
        }
    }
    Point d0 = pr.axes.col(0);
    canonicalize(d0);
    pr.axes.col(0) = d0;
    return pr;
}

}  // namespace

double line_objective(const PointMatrix& pts, const Eigen::VectorXd& w, const Line& l, double p) {
    if (pts.rows() != l.dim()) fail_input("dimension mismatch between points and line");
    if (std::isinf(p)) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < pts.cols(); ++i) m = std::max(m, col_dist(pts, i, l));
        return m;
    }
    double s = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        if (w[i] == 0) continue;
        double d = col_dist(pts, i, l);
        double dp = p == 2.0 ? d * d : (p == 1.0 ? d : std::pow(d, p));
        s += w[i] * dp;
        total += w[i];
    }
    return total > 0 ? s / total : 0.0;
}

LineFit fit_line_l2(const PointMatrix& pts, const Eigen::VectorXd& w) {
    require_fit_input(pts, w);
    if (all_coincident(pts) || pts.rows() == 1) return LineFit{axis_line(pts.col(0), 0), 0.0};
    Principal pr = principal_axes(pts, w);
    Line l{pr.centroid, pr.axes.col(0)};
    return LineFit{l, line_objective(pts, w, l, 2.0)};
}

LineFit fit_line_lp(const PointMatrix& pts, const Eigen::VectorXd& w, double p) {
    require_fit_input(pts, w);
    if (!(p >= 1.0)) fail_input("exponent p must be at least 1");
    if (all_coincident(pts) || pts.rows() == 1) return LineFit{axis_line(pts.col(0), 0), 0.0};
    if (p == 2.0) return fit_line_l2(pts, w);

    const Eigen::Index m = pts.cols();
    const Eigen::Index n = pts.rows();
    const double delta = 1e-12 * std::max(extent(pts), 1e-300);
    Principal pr = principal_axes(pts, w);

    LineFit best{Line{pr.centroid, pr.axes.col(0)}, 0.0};
    best.objective = line_objective(pts, w, best.line, p);
    auto consider = [&](const Line& l) {
        double obj = line_objective(pts, w, l, p);
        if (obj < best.objective) best = LineFit{l, obj};
    };

    auto irls = [&](Line l) {
        double prev = line_objective(pts, w, l, p);
        consider(l);
        Eigen::VectorXd v(m);
        for (int it = 0; it < 80; ++it) {
            for (Eigen::Index i = 0; i < m; ++i)
                v[i] = w[i] * std::pow(std::max(col_dist(pts, i, l), delta), p - 2.0);
            if (!(v.sum() > 0) || !std::isfinite(v.sum())) return;
            LineFit next = fit_line_l2(pts, v);
            double obj = line_objective(pts, w, next.line, p);
            if (!(obj < prev * (1.0 - 1e-14))) {
                consider(next.line);
                return;
            }
            l = next.line;
            prev = obj;
            consider(l);
        }
    };

    Line seed{pr.centroid, pr.axes.col(0)};
    irls(seed);
    // Eight perturbed seeds: seven rotations in the plane of the two leading axes and one offset shift.
    Point e1 = pr.axes.col(0);
    Point e2 = n >= 2 ? Point(pr.axes.col(1)) : e1;
    const double pi = std::acos(-1.0);
    for (int r = 1; r <= 7; ++r) {
        double a = r * pi / 8.0;
        irls(make_line(pr.centroid, std::cos(a) * e1 + std::sin(a) * e2));
    }
    double spread = std::sqrt(std::max(pr.values.size() > 1 ? pr.values[1] : 0.0, 0.0));
    irls(Line{pr.centroid + 0.5 * spread * e2, e1});

    // In the plane an optimal L1 line passes through two atoms; enumerate pairs when few.
    if (p == 1.0 && n == 2 && m <= 60) {
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j) {
                Point d = pts.col(j) - pts.col(i);
                if (d.norm() == 0) continue;
                consider(make_line(pts.col(i), d));
            }
    }
    return best;
}

std::vector<int> convex_hull_2d(const PointMatrix& pts) {
    const int m = static_cast<int>(pts.cols());
    std::vector<int> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (pts(0, a) != pts(0, b)) return pts(0, a) < pts(0, b);
        if (pts(1, a) != pts(1, b)) return pts(1, a) < pts(1, b);
        return a < b;
    });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](int a, int b) { return pts(0, a) == pts(0, b) && pts(1, a) == pts(1, b); }),
              idx.end());
    if (idx.size() <= 2) return idx;
    auto cross = [&](int o, int a, int b) {
        return (pts(0, a) - pts(0, o)) * (pts(1, b) - pts(1, o)) - (pts(1, a) - pts(1, o)) * (pts(0, b) - pts(0, o));
    };
    std::vector<int> hull(2 * idx.size());
    std::size_t k = 0;
    for (int i : idx) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
        int i = idx[t];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

Ball ball_through(const PointMatrix& pts, const std::vector<int>& support) {
    Ball b;
    if (support.empty()) {
        b.center = Point::Zero(pts.rows());
        b.radius = -1.0;
        return b;
    }
    Point p0 = pts.col(support[0]);
    const std::size_t k = support.size() - 1;
    if (k == 0) return Ball{p0, 0.0};
    Eigen::MatrixXd d(pts.rows(), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) d.col(static_cast<Eigen::Index>(i)) = pts.col(support[i + 1]) - p0;
    Eigen::MatrixXd a = 2.0 * d.transpose() * d;
    Eigen::VectorXd rhs = d.colwise().squaredNorm().transpose();
    Eigen::VectorXd lam = a.completeOrthogonalDecomposition().solve(rhs);
    b.center = p0 + d * lam;
    b.radius = 0.0;
    for (int s : support) b.radius = std::max(b.radius, (pts.col(s) - b.center).norm());
    return b;
}

bool inside(const Ball& b, const Point& x) {
    if (b.radius < 0) return false;
    return (x - b.center).norm() <= b.radius * (1.0 + 1e-12) + 1e-300;
}

Ball welzl(const PointMatrix& pts, std::vector<int>& idx, std::size_t end, std::vector<int>& support) {
    Ball b = ball_through(pts, support);
    if (support.size() == static_cast<std::size_t>(pts.rows()) + 1) return b;
    for (std::size_t i = 0; i < end; ++i) {
        if (inside(b, pts.col(idx[i]))) continue;
        support.push_back(idx[i]);
        b = welzl(pts, idx, i, support);
        support.pop_back();
        std::rotate(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(i), idx.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return b;
}

}  // namespace

Ball min_enclosing_ball(const PointMatrix& pts) {
    if (pts.cols() == 0) fail_input("enclosing ball of an empty set");
    std::vector<int> idx(static_cast<std::size_t>(pts.cols()));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(0x5eed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> support;
    Ball b = welzl(pts, idx, idx.size(), support);
    double r = 0.0;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) r = std::max(r, (pts.col(i) - b.center).norm());
    b.radius = r;
    return b;
}

namespace {

LineFit sup_fit_plane(const PointMatrix& pts) {
    std::vector<int> hull = convex_hull_2d(pts);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(pts.cols());
    if (hull.size() == 1) return LineFit{axis_line(pts.col(hull[0]), 0), 0.0};
    if (hull.size() == 2) {
        Line l = make_line(pts.col(hull[0]), pts.col(hull[1]) - pts.col(hull[0]));
        return LineFit{l, line_objective(pts, ones, l, kSup)};
    }
    const std::size_t h = hull.size();
    auto at = [&](std::size_t i) { return pts.col(hull[i % h]); };
    auto height = [&](std::size_t e, std::size_t j) {
        Eigen::Vector2d a = at(e), b = at(e + 1), c = at(j);
        Eigen::Vector2d u = b - a;
        return (u.x() * (c.y() - a.y()) - u.y() * (c.x() - a.x())) / u.norm();
    };
    double best_w = std::numeric_limits<double>::infinity();
    std::size_t best_e = 0;
    std::size_t j = 2;
    for (std::size_t e = 0; e < h; ++e) {
        if (j <= e + 1) j = e + 2;
        while (height(e, j + 1) >= height(e, j) && j + 1 < e + h) ++j;
        double w = height(e, j);
        if (w < best_w) {
            best_w = w;
            best_e = e;
        }
    }
    Eigen::Vector2d a = at(best_e), b = at(best_e + 1);
    Eigen::Vector2d u = (b - a).normalized();
    Eigen::Vector2d inward(-u.y(), u.x());
    Line l = make_line(Point(a + 0.5 * best_w * inward), Point(u));
    return LineFit{l, line_objective(pts, ones, l, kSup)};
}

// Orthonormal basis of the complement of unit vector u, as columns.
Eigen::MatrixXd complement_basis(const Point& u) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(u.size(), u.size());
    return q.rightCols(u.size() - 1);
}

LineFit sup_fit_space(const PointMatrix& pts) {
    const Eigen::Index n = pts.rows();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(pts.cols());
    auto radius_for = [&](const Point& u, Point* base) {
        Eigen::MatrixXd b = complement_basis(u);
        PointMatrix proj = b.transpose() * pts;
        Ball ball = min_enclosing_ball(proj);
        if (base) *base = b * ball.center;
        return ball.radius;
    };
    Principal pr = principal_axes(pts, ones);
    std::vector<Point> seeds;
    seeds.push_back(pr.axes.col(0));
    for (Eigen::Index i = 0; i < n; ++i) seeds.push_back(Point::Unit(n, i));
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t s = 0; s < seeds.size(); ++s) ranked.emplace_back(radius_for(seeds[s], nullptr), static_cast<int>(s));
    std::sort(ranked.begin(), ranked.end());

    LineFit best;
    best.objective = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::min<std::size_t>(2, ranked.size()); ++r) {
        Point u0 = seeds[static_cast<std::size_t>(ranked[r].second)];
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::MatrixXd tangent = complement_basis(u0);
            auto f = [&](const Eigen::VectorXd& t) { return radius_for((u0 + tangent * t).normalized(), nullptr); };
            MinResult res = minimize_simplex(f, Eigen::VectorXd::Zero(n - 1), pass == 0 ? 0.2 : 0.02, 300, 1e-9);
            u0 = (u0 + tangent * res.x).normalized();
        }
        Point base;
        radius_for(u0, &base);
        Line l = make_line(base, u0);
        double obj = line_objective(pts, ones, l, kSup);
        if (obj < best.objective) best = LineFit{l, obj};
    }
    return best;
}

}  // namespace

LineFit fit_line_sup(const PointMatrix& pts) {
    if (pts.cols() == 0) fail_input("line fit needs at least one point");
    if (all_coincident(pts) || pts.rows() == 1) return LineFit{axis_line(pts.col(0), 0), 0.0};
    if (pts.rows() == 2) return sup_fit_plane(pts);
    return sup_fit_space(pts);
}

LineFit fit_line(const PointMatrix& pts, const Eigen::VectorXd& w, double p) {
    if (std::isinf(p)) return fit_line_sup(pts);
    if (p == 2.0) return fit_line_l2(pts, w);
    return fit_line_lp(pts, w, p);
}

LineFit fit_line(const PointList& pts, const std::vector<double>& w, double p) {
    PointMatrix m = to_matrix(pts);
    Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) wv[static_cast<Eigen::Index>(i)] = w[i];
    if (std::isinf(p) && w.empty()) wv = Eigen::VectorXd::Ones(m.cols());
    return fit_line(m, wv, p);
}

double excess(const PointList& S, const PointList& T) {
    if (S.empty() || T.empty()) fail_input("excess of or over an empty set");
    double ex = 0.0;
    for (const Point& s : S) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& t : T) {
            require_dim(t, static_cast<int>(s.size()), "excess");
            best = std::min(best, (s - t).norm());
        }
        ex = std::max(ex, best);
    }
    return ex;
}

double hausdorff(const PointList& S, const PointList& T) { return std::max(excess(S, T), excess(T, S)); }

double point_segment_distance(const Point& x, const Point& a, const Point& b) {
    Point ab = b - a;
    double len2 = ab.squaredNorm();
    if (len2 == 0) return (x - a).norm();
    double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

double segment_distance(const Point& a0, const Point& a1, const Point& b0, const Point& b1) {
    Point d1 = a1 - a0, d2 = b1 - b0, r = a0 - b0;
    double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a == 0 && e == 0) return r.norm();
    if (a == 0) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e == 0) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double denom = a * e - b * b;
            s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    double direct = ((a0 + s * d1) - (b0 + t * d2)).norm();
    // Endpoint distances guard the clamped solution against cancellation.
    double ends = std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                            point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
    return std::min(direct, ends);
}

OrderingWitness order_along_lines(const PointList& V, const Line& l1, const Line& l2, double alpha) {
    if (V.size() < 2) fail_input("ordering needs at least two points");
    if (!(alpha >= 0) || alpha > 1.0 / 16.0) fail_input("alpha must lie in [0, 1/16]");
    const int n = l1.dim();
    require_dim(l2.base, n, "order_along_lines");
    for (std::size_t i = 0; i < V.size(); ++i) {
        require_dim(V[i], n, "order_along_lines");
        for (std::size_t j = i + 1; j < V.size(); ++j)
            if ((V[i] - V[j]).norm() < 1.0 - 1e-12)
                fail_input("points " + std::to_string(i) + " and " + std::to_string(j) + " are not 1-separated");
        if (dist_to_line(V[i], l1) > alpha + 1e-12)
            fail_input("point " + std::to_string(i) + " is farther than alpha from the first line");
        if (dist_to_line(V[i], l2) > alpha + 1e-12)
            fail_input("point " + std::to_string(i) + " is farther than alpha from the second line");
    }
    OrderingWitness w;
    w.sign1 = 1;
    w.sign2 = l1.dir.dot(l2.dir) >= 0 ? 1 : -1;
    w.order.resize(V.size());
    std::iota(w.order.begin(), w.order.end(), 0);
    std::vector<double> raw1(V.size()), raw2(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) {
        raw1[i] = project(V[i], l1);
        raw2[i] = w.sign2 * project(V[i], l2);
    }
    std::sort(w.order.begin(), w.order.end(), [&](int a, int b) { return raw1[static_cast<std::size_t>(a)] < raw1[static_cast<std::size_t>(b)]; });
    bool increasing = true;
    w.ratio1 = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        auto o = static_cast<std::size_t>(w.order[i]);
        w.t1.push_back(raw1[o]);
        w.t2.push_back(raw2[o]);
        if (i > 0) {
            auto prev = static_cast<std::size_t>(w.order[i - 1]);
            if (!(w.t1[i] > w.t1[i - 1]) || !(w.t2[i] > w.t2[i - 1])) increasing = false;
            double gap = w.t1[i] - w.t1[i - 1];
            w.ratio1 = std::max(w.ratio1, (V[o] - V[prev]).norm() / gap);
        }
    }
    double c = std::abs(l1.dir.dot(l2.dir));
    w.ratio2 = c > 0 ? 1.0 / c : std::numeric_limits<double>::infinity();
    w.bound1 = 1.0 + 3.0 * alpha * alpha;
    w.bound2 = 1.0 + 12.0 * alpha * alpha;
    const double slack = 1.0 + 1e-12;
    w.ok = increasing && w.ratio1 <= w.bound1 * slack && w.ratio2 <= w.bound2 * slack;
    return w;
}

}  // namespace mrt

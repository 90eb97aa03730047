#include "mrt/beta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mrt/error.hpp"
#include "mrt/optimize.hpp"

namespace mrt {

std::string Variant::name() const {
    switch (kind) {
        case star: return "star";
        case star_star: return "star_star";
        case star_c: return "star_c";
    }
    return "unknown";
}

namespace {

double powp(double d, double p) { return p == 2.0 ? d * d : (p == 1.0 ? d : std::pow(d, p)); }

void require_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) fail_input("exponent p must be a finite number >= 1");
}

double atom_dist(const DiscreteMeasure& mu, int i, const Line& l) {
    Point r = mu.points().col(i) - l.base;
    double t = r.dot(l.dir);
    return (r - t * l.dir).norm();
}

}  // namespace

double beta_fixed_line(const DiscreteMeasure& mu, const std::vector<int>& atoms, double diam, const Line& l, double p) {
    require_p(p);
    if (!(diam > 0)) fail_input("beta of a region with zero diameter");
    if (l.dim() != mu.dim()) fail_input("dimension mismatch between line and measure");
    double m = mu.mass_of(atoms);
    if (!(m > 0)) return 0.0;
    double s = 0.0;
    for (int i : atoms) s += mu.weight(i) * powp(atom_dist(mu, i, l), p);
    double mean = s / m;
    double root = p == 2.0 ? std::sqrt(mean) : (p == 1.0 ? mean : std::pow(mean, 1.0 / p));
    return root / diam;
}

double beta_fixed_line(const DiscreteMeasure& mu, const Region& e, const Line& l, double p) {
    return beta_fixed_line(mu, mu.atoms_in(e), region_diam(e), l, p);
}

BetaValue beta_best(const DiscreteMeasure& mu, const std::vector<int>& atoms, double diam, double p) {
    require_p(p);
    if (!(diam > 0)) fail_input("beta of a region with zero diameter");
    BetaValue out;
    if (atoms.empty()) return out;
    PointMatrix pts(mu.dim(), static_cast<Eigen::Index>(atoms.size()));
    Eigen::VectorXd w(static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        pts.col(static_cast<Eigen::Index>(i)) = mu.points().col(atoms[i]);
        w[static_cast<Eigen::Index>(i)] = mu.weight(atoms[i]);
    }
    LineFit fit = fit_line(pts, w, p);
    out.has_line = true;
    out.line = fit.line;
    out.value = beta_fixed_line(mu, atoms, diam, fit.line, p);
    out.family_size = 1;
    out.candidates = 1;
    return out;
}

BetaValue beta_best(const DiscreteMeasure& mu, const Region& e, double p) {
    return beta_best(mu, mu.atoms_in(e), region_diam(e), p);
}

double beta_sup_set(const PointList& E, const Region& q) {
    double diam = region_diam(q);
    if (!(diam > 0)) fail_input("beta of a region with zero diameter");
    PointList inside;
    for (const Point& x : E)
        if (region_contains(q, x)) inside.push_back(x);
    if (inside.empty()) return 0.0;
    LineFit fit = fit_line_sup(to_matrix(inside));
    return fit.objective / diam;
}

FamilyObjective::FamilyObjective(const DiscreteMeasure& mu, std::vector<FamilyMember> members, double p)
    : mu_(mu), members_(std::move(members)), p_(p) {
    require_p(p);
    std::vector<int> all;
    for (const FamilyMember& m : members_) all.insert(all.end(), m.atoms->begin(), m.atoms->end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    union_ = std::move(all);
    pos_.resize(members_.size());
    for (std::size_t r = 0; r < members_.size(); ++r) {
        pos_[r].reserve(members_[r].atoms->size());
        for (int a : *members_[r].atoms) {
            auto it = std::lower_bound(union_.begin(), union_.end(), a);
            pos_[r].push_back(static_cast<int>(it - union_.begin()));
        }
    }
}

double FamilyObjective::member_score(std::size_t r, const std::vector<double>& d) const {
    const FamilyMember& m = members_[r];
    double s = 0.0;
    const auto& atoms = *m.atoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += mu_.weight(atoms[i]) * powp(d[static_cast<std::size_t>(pos_[r][i])], p_);
    double mean = s / m.mass;
    double mean2 = p_ == 2.0 ? mean : std::pow(mean, 2.0 / p_);
    return m.weight * mean2 / (m.diam * m.diam);
}

double FamilyObjective::eval(const Line& l) const {
    std::vector<double> d(union_.size());
    for (std::size_t u = 0; u < union_.size(); ++u) d[u] = atom_dist(mu_, union_[u], l);
    double best = 0.0;
    for (std::size_t r = 0; r < members_.size(); ++r) best = std::max(best, member_score(r, d));
    return best;
}

std::pair<double, double> FamilyObjective::profile(double theta) const {
    const double sn = std::sin(theta), cs = std::cos(theta);
    std::vector<double> s(union_.size());
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    for (std::size_t u = 0; u < union_.size(); ++u) {
        auto col = mu_.points().col(union_[u]);
        s[u] = -sn * col[0] + cs * col[1];
        smin = std::min(smin, s[u]);
        smax = std::max(smax, s[u]);
    }
    const std::size_t nr = members_.size();
    if (p_ == 2.0) {
        std::vector<double> b(nr), a(nr), av(nr);
        for (std::size_t r = 0; r < nr; ++r) {
            const FamilyMember& m = members_[r];
            const auto& atoms = *m.atoms;
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) acc += mu_.weight(atoms[i]) * s[static_cast<std::size_t>(pos_[r][i])];
            double mean = acc / m.mass;
            double var = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                double dv = s[static_cast<std::size_t>(pos_[r][i])] - mean;
                var += mu_.weight(atoms[i]) * dv * dv;
            }
            b[r] = mean;
            a[r] = m.weight / (m.diam * m.diam);
            av[r] = a[r] * var / m.mass;
        }
        auto g = [&](double c, std::size_t* arg) {
            double best = -1.0;
            std::size_t who = 0;
            for (std::size_t r = 0; r < nr; ++r) {
                double dc = c - b[r];
                double v = a[r] * dc * dc + av[r];
                if (v > best) {
                    best = v;
                    who = r;
                }
            }
            if (arg) *arg = who;
            return best;
        };
        double lo = *std::min_element(b.begin(), b.end());
        double hi = *std::max_element(b.begin(), b.end());
        for (int it = 0; it < 200 && hi > lo; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            std::size_t who = 0;
            g(mid, &who);
            if (mid < b[who]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double c = 0.5 * (lo + hi);
        return {g(c, nullptr), c};
    }
    auto g = [&](double c) {
        double best = 0.0;
        for (std::size_t r = 0; r < nr; ++r) {
            const FamilyMember& m = members_[r];
            const auto& atoms = *m.atoms;
            double acc = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i)
                acc += mu_.weight(atoms[i]) * powp(std::abs(s[static_cast<std::size_t>(pos_[r][i])] - c), p_);
            best = std::max(best, m.weight * std::pow(acc / m.mass, 2.0 / p_) / (m.diam * m.diam));
        }
        return best;
    };
    if (!(smax > smin)) return {g(smin), smin};
    auto [c, v] = minimize_interval(g, smin, smax, 45, 120);
    return {v, c};
}

namespace {

Line line_from_angle(double theta, double c) {
    Point dir(2), base(2);
    dir << std::cos(theta), std::sin(theta);
    base << -std::sin(theta) * c, std::cos(theta) * c;
    return make_line(base, dir);
}

double angle_of(const Line& l) {
    double t = std::atan2(l.dir[1], l.dir[0]);
    const double pi = std::acos(-1.0);
    while (t < 0) t += pi;
    while (t >= pi) t -= pi;
    return t;
}

}  // namespace

BetaValue minimize_family(const DiscreteMeasure& mu, const FamilyObjective& f, double p, const std::vector<Line>& extra) {
    BetaValue out;
    const auto& members = f.members();
    out.family_size = static_cast<int>(members.size());
    if (members.empty()) return out;
    const int n = mu.dim();

    double best = std::numeric_limits<double>::infinity();
    Line best_line;
    std::vector<std::pair<double, Line>> tried;
    auto consider = [&](const Line& l) {
        double v = f.eval(l);
        ++out.candidates;
        tried.emplace_back(v, l);
        if (v < best) {
            best = v;
            best_line = l;
        }
    };

    const auto& uni = f.atoms();
    PointMatrix pu(n, static_cast<Eigen::Index>(uni.size()));
    Eigen::VectorXd wu(static_cast<Eigen::Index>(uni.size()));
    for (std::size_t i = 0; i < uni.size(); ++i) {
        pu.col(static_cast<Eigen::Index>(i)) = mu.points().col(uni[i]);
        wu[static_cast<Eigen::Index>(i)] = mu.weight(uni[i]);
    }
    consider(fit_line_l2(pu, wu).line);
    for (const Line& l : extra)
        if (l.dim() == n) consider(l);

    if (n >= 2) {
        // Per-cube principal lines, for the cubes scoring worst at the current best line.
        std::vector<std::size_t> order(members.size());
        std::iota(order.begin(), order.end(), 0);
        if (members.size() > 24) {
            std::vector<double> d(uni.size());
            for (std::size_t u = 0; u < uni.size(); ++u) d[u] = dist_to_line(mu.points().col(uni[u]), best_line);
            std::vector<double> score(members.size());
            for (std::size_t r = 0; r < members.size(); ++r) {
                FamilyObjective single(mu, {members[r]}, p);
                score[r] = single.eval(best_line);
            }
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
            order.resize(16);
        }
        for (std::size_t r : order) {
            const auto& atoms = *members[r].atoms;
            PointMatrix pr(n, static_cast<Eigen::Index>(atoms.size()));
            Eigen::VectorXd wr(static_cast<Eigen::Index>(atoms.size()));
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                pr.col(static_cast<Eigen::Index>(i)) = mu.points().col(atoms[i]);
                wr[static_cast<Eigen::Index>(i)] = mu.weight(atoms[i]);
            }
            consider(fit_line_l2(pr, wr).line);
        }
        if (members.size() >= 2 && (n == 2 || members.size() <= 400)) {
            PointMatrix cent(n, static_cast<Eigen::Index>(members.size()));
            for (std::size_t r = 0; r < members.size(); ++r)
                cent.col(static_cast<Eigen::Index>(r)) = mu.center_of_mass(*members[r].atoms);
            consider(fit_line_sup(cent).line);
        }
    }

    const double pi = std::acos(-1.0);
    if (n == 2) {
        const int grid = p == 2.0 ? 90 : 36;
        const int refine = p == 2.0 ? 3 : 2;
        std::vector<double> vals(static_cast<std::size_t>(grid));
        for (int i = 0; i < grid; ++i) vals[static_cast<std::size_t>(i)] = f.profile(i * pi / grid).first;
        std::vector<std::pair<double, double>> centers;
        for (int i = 0; i < grid; ++i) {
            double v = vals[static_cast<std::size_t>(i)];
            double prev = vals[static_cast<std::size_t>((i + grid - 1) % grid)];
            double next = vals[static_cast<std::size_t>((i + 1) % grid)];
            if (v <= prev && v <= next) centers.emplace_back(v, i * pi / grid);
        }
        std::sort(centers.begin(), centers.end());
        if (centers.size() > static_cast<std::size_t>(refine)) centers.resize(static_cast<std::size_t>(refine));
        centers.emplace_back(best, angle_of(best_line));
        const double half = pi / grid;
        for (const auto& [v0, t0] : centers) {
            (void)v0;
            auto h = [&](double t) { return f.profile(t).first; };
            auto [t, v] = minimize_interval(h, t0 - half, t0 + half, 40, 80);
            (void)v;
            consider(line_from_angle(t, f.profile(t).second));
        }
    } else if (n >= 3) {
        std::sort(tried.begin(), tried.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Line> starts;
        for (std::size_t i = 0; i < std::min<std::size_t>(2, tried.size()); ++i) starts.push_back(tried[i].second);
        double scale = std::max((pu.rowwise().maxCoeff() - pu.rowwise().minCoeff()).norm(), 1e-12);
        for (const Line& s : starts) {
            Line cur = s;
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(cur.dir);
                Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
                Eigen::MatrixXd t = q.rightCols(n - 1);
                auto line_of = [&](const Eigen::VectorXd& x) {
                    Point u = (cur.dir + t * x.head(n - 1)).normalized();
                    Point b = cur.base + t * x.tail(n - 1) * scale;
                    return Line{b, u};
                };
                auto obj = [&](const Eigen::VectorXd& x) { return f.eval(line_of(x)); };
                MinResult res = minimize_simplex(obj, Eigen::VectorXd::Zero(2 * (n - 1)), pass == 0 ? 0.1 : 0.01, 400, 1e-10);
                cur = make_line(line_of(res.x).base, line_of(res.x).dir);
            }
            consider(cur);
        }
    } else {
        consider(axis_line(mu.points().col(uni[0]), 0));
    }

    out.has_line = true;
    out.line = best_line;
    out.value = std::sqrt(std::max(best, 0.0));
    return out;
}

std::vector<FamilyMember> BetaEngine::family(const DyadicCube& q, Variant v) const {
    if (q.dim() != mu_.dim()) fail_input("dimension mismatch between cube and measure");
    if (v.kind == Variant::star_c && !(v.c > 0)) fail_input("star_c variant requires c > 0");
    std::vector<FamilyMember> out;
    auto [w0, w1] = nearby_windows(q);
    const double rootn = std::sqrt(static_cast<double>(q.dim()));
    for (const IndexWindow* w : {&w0, &w1}) {
        const ScaleTable& t = mu_.scale(w->k);
        const double diam3 = 3.0 * std::ldexp(1.0, -w->k) * rootn;
        for (const CellGroup& g : t.triples) {
            bool inside = true;
            for (std::size_t d = 0; d < g.cube.j.size() && inside; ++d)
                inside = g.cube.j[d] >= w->range[d].first && g.cube.j[d] <= w->range[d].second;
            if (!inside) continue;
            FamilyMember m{g.cube, &g.atoms, g.mass, diam3, 1.0};
            if (v.kind == Variant::star) {
                m.weight = std::min(g.mass / diam3, 1.0);
            } else if (v.kind == Variant::star_c) {
                if (!(g.mass >= v.c * diam3)) continue;
                m.weight = std::min(v.c, 1.0);
            }
            out.push_back(m);
        }
    }
    return out;
}

std::string BetaEngine::family_key(const DyadicCube& q, double p, Variant v) const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g|%d|%.17g", p, static_cast<int>(v.kind), v.c);
    std::string key = buf;
    auto [w0, w1] = nearby_windows(q);
    for (const IndexWindow* w : {&w0, &w1}) {
        const ScaleTable& t = mu_.scale(w->k);
        key += "|" + std::to_string(w->k) + ":";
        bool empty = t.triples.empty();
        std::string part;
        for (std::size_t d = 0; d < w->range.size() && !empty; ++d) {
            std::int64_t lo = std::max(w->range[d].first, t.triple_lo[d]);
            std::int64_t hi = std::min(w->range[d].second, t.triple_hi[d]);
            if (hi < lo) empty = true;
            part += std::to_string(lo) + "," + std::to_string(hi) + ";";
        }
        key += empty ? std::string("empty") : part;
    }
    return key;
}

BetaValue BetaEngine::multi(const DyadicCube& q, double p, Variant v) {
    require_p(p);
    if (v.kind == Variant::star_c && !(v.c > 0)) fail_input("star_c variant requires c > 0");
    std::string key = family_key(q, p, v);
    {
        std::lock_guard<std::mutex> lock(mu_lock_);
        auto it = multi_cache_.find(key);
        if (it != multi_cache_.end()) return it->second;
    }
    std::vector<FamilyMember> members = family(q, v);
    BetaValue out;
    out.family_size = 0;
    if (!members.empty()) {
        // Witness lines of dominating quantities keep the inequalities between variants exact.
        std::vector<Line> extra;
        if (v.kind == Variant::star_c) {
            BetaValue s = multi(q, p, Variant::Star());
            if (s.has_line) extra.push_back(s.line);
        }
        if (p != 2.0) {
            BetaValue s = multi(q, 2.0, v);
            if (s.has_line) extra.push_back(s.line);
        }
        FamilyObjective f(mu_, std::move(members), p);
        out = minimize_family(mu_, f, p, extra);
    }
    std::lock_guard<std::mutex> lock(mu_lock_);
    multi_cache_.emplace(key, out);
    return out;
}

BetaValue BetaEngine::triple_best(const DyadicCube& q, double p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g|%d", p, q.k);
    std::string key = buf;
    for (std::int64_t j : q.j) key += "," + std::to_string(j);
    {
        std::lock_guard<std::mutex> lock(mu_lock_);
        auto it = triple_cache_.find(key);
        if (it != triple_cache_.end()) return it->second;
    }
    const ScaleTable& t = mu_.scale(q.k);
    const CellGroup* g = t.triple(q);
    BetaValue out;
    if (g) out = beta_best(mu_, g->atoms, triple(q).diam(), p);
    std::lock_guard<std::mutex> lock(mu_lock_);
    triple_cache_.emplace(key, out);
    return out;
}

std::size_t BetaEngine::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_lock_);
    return multi_cache_.size() + triple_cache_.size();
}

BetaValue beta_multi(const DiscreteMeasure& mu, const DyadicCube& q, double p, Variant v) {
    BetaEngine engine(mu);
    return engine.multi(q, p, v);
}

}  // namespace mrt

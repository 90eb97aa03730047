#include "mrt/nets.hpp"

#include <algorithm>
#include <cmath>

#include "mrt/error.hpp"
#include "mrt/parallel.hpp"

namespace mrt {

int NetSequence::dim() const {
    for (const auto& lv : levels)
        if (!lv.empty()) return static_cast<int>(lv.front().size());
    return 0;
}

double NetSequence::unit(int k) const { return std::ldexp(r0, -k); }

int NetSequence::k0() const {
    int k0 = -1;
    for (int k = K(); k >= 0; --k) {
        if (levels[static_cast<std::size_t>(k)].size() < 2) break;
        k0 = k;
    }
    return k0;
}

namespace {

std::vector<int> greedy_separated(const PointList& pts, double delta) {
    std::vector<int> chosen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool far = true;
        for (int c : chosen)
            if ((pts[i] - pts[static_cast<std::size_t>(c)]).norm() < delta) {
                far = false;
                break;
            }
        if (far) chosen.push_back(static_cast<int>(i));
    }
    return chosen;
}

double nearest(const Point& x, const PointList& s, int* who = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d = (x - s[i]).norm();
        if (d < best) {
            best = d;
            if (who) *who = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

NetSequence nets_from_points(const PointList& E, double r0, int K) {
    if (E.empty()) fail_input("net construction needs a nonempty point set");
    if (!(r0 > 0)) fail_input("r0 must be positive");
    if (K < 0) fail_input("K must be nonnegative");
    NetSequence nets;
    nets.r0 = r0;
    nets.cstar = 2.0;
    for (int k = 0; k <= K; ++k) {
        PointList lv;
        for (int i : greedy_separated(E, std::ldexp(r0, -k))) lv.push_back(E[static_cast<std::size_t>(i)]);
        nets.levels.push_back(std::move(lv));
    }
    return nets;
}

NetSequence nets_from_tree(const DiscreteMeasure& mu, const CubeTree& t, double r0, double cstar) {
    if (t.empty()) fail_input("net construction needs a nonempty tree");
    if (!(r0 > 0)) fail_input("r0 must be positive");
    NetSequence nets;
    nets.r0 = r0;
    nets.cstar = cstar;
    const int top = t.top().k;
    const int deepest = t.deepest_scale();
    for (int k = top; k <= deepest; ++k) {
        const ScaleTable& table = mu.scale(k);
        PointList z;
        std::vector<DyadicCube> cubes;
        for (const DyadicCube& q : t.members()) {
            if (q.k != k) continue;
            const CellGroup* g = table.triple(q);
            if (!g) fail_input("tree member with a zero-mass triple at scale " + std::to_string(k));
            z.push_back(mu.center_of_mass(g->atoms));
            cubes.push_back(q);
        }
        PointList lv;
        std::vector<DyadicCube> wit;
        for (int i : greedy_separated(z, std::ldexp(r0, -(k - top)))) {
            lv.push_back(z[static_cast<std::size_t>(i)]);
            wit.push_back(cubes[static_cast<std::size_t>(i)]);
        }
        nets.levels.push_back(std::move(lv));
        nets.witness.push_back(std::move(wit));
    }
    return nets;
}

NetValidation validate_nets(const NetSequence& nets, double cstar) {
    NetValidation rep;
    auto add = [&](const char* cond, int k, int i, int j, double d, double b) {
        rep.ok = false;
        rep.violations.push_back(NetViolation{cond, k, i, j, d, b});
    };
    for (int k = 0; k <= nets.K(); ++k) {
        const PointList& v = nets.levels[static_cast<std::size_t>(k)];
        const double u = nets.unit(k);
        if (v.empty()) {
            add("empty", k, -1, -1, 0.0, 0.0);
            continue;
        }
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = a + 1; b < v.size(); ++b) {
                double d = (v[a] - v[b]).norm();
                if (d < u) add("separation", k, static_cast<int>(a), static_cast<int>(b), d, u);
            }
        if (k < nets.K() && !nets.levels[static_cast<std::size_t>(k) + 1].empty()) {
            for (std::size_t a = 0; a < v.size(); ++a) {
                int who = -1;
                double d = nearest(v[a], nets.levels[static_cast<std::size_t>(k) + 1], &who);
                rep.min_cstar = std::max(rep.min_cstar, d / u);
                if (!(d < cstar * u)) add("forward", k, static_cast<int>(a), who, d, cstar * u);
            }
        }
        if (k > 0 && !nets.levels[static_cast<std::size_t>(k) - 1].empty()) {
            for (std::size_t a = 0; a < v.size(); ++a) {
                int who = -1;
                double d = nearest(v[a], nets.levels[static_cast<std::size_t>(k) - 1], &who);
                rep.min_cstar = std::max(rep.min_cstar, d / u);
                if (!(d < cstar * u)) add("backward", k, static_cast<int>(a), who, d, cstar * u);
            }
        }
    }
    PointList all;
    for (const auto& lv : nets.levels) all.insert(all.end(), lv.begin(), lv.end());
    if (!all.empty()) {
        Ball b = min_enclosing_ball(to_matrix(all));
        rep.ball_ratio = b.radius / nets.r0;
        if (b.radius > cstar * nets.r0) add("ball", -1, -1, -1, b.radius, cstar * nets.r0);
    }
    return rep;
}

Neighborhood alpha_neighborhood(const NetSequence& nets, int k, int v) {
    Neighborhood nb;
    const Point& c = nets.levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
    const double r = 65.0 * nets.cstar * nets.unit(k);
    if (k > 0) {
        const PointList& prev = nets.levels[static_cast<std::size_t>(k) - 1];
        for (std::size_t i = 0; i < prev.size(); ++i)
            if ((prev[i] - c).norm() <= r) nb.prev.push_back(static_cast<int>(i));
    }
    const PointList& same = nets.levels[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < same.size(); ++i)
        if ((same[i] - c).norm() <= r) nb.same.push_back(static_cast<int>(i));
    return nb;
}

double alpha_for_line(const NetSequence& nets, int k, int v, const Line& l) {
    Neighborhood nb = alpha_neighborhood(nets, k, v);
    double m = 0.0;
    for (int i : nb.prev) m = std::max(m, dist_to_line(nets.levels[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i)], l));
    for (int i : nb.same) m = std::max(m, dist_to_line(nets.levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)], l));
    return m / nets.unit(k);
}

AlphaAssignment fit_alphas(const NetSequence& nets, const AlphaAssignment* lines) {
    AlphaAssignment out;
    out.lines.resize(nets.levels.size());
    out.alpha.resize(nets.levels.size());
    std::vector<std::pair<int, int>> jobs;
    for (int k = 0; k <= nets.K(); ++k) {
        auto kk = static_cast<std::size_t>(k);
        out.lines[kk].resize(nets.levels[kk].size());
        out.alpha[kk].resize(nets.levels[kk].size());
        for (std::size_t v = 0; v < nets.levels[kk].size(); ++v) jobs.emplace_back(k, static_cast<int>(v));
    }
    parallel_for(jobs.size(), [&](std::size_t j) {
        auto [k, v] = jobs[j];
        auto kk = static_cast<std::size_t>(k);
        auto vv = static_cast<std::size_t>(v);
        Line l;
        if (lines) {
            l = lines->lines[kk][vv];
        } else {
            Neighborhood nb = alpha_neighborhood(nets, k, v);
            PointList pts;
            for (int i : nb.prev) pts.push_back(nets.levels[kk - 1][static_cast<std::size_t>(i)]);
            for (int i : nb.same) pts.push_back(nets.levels[kk][static_cast<std::size_t>(i)]);
            check(!pts.empty(), "alpha neighborhood is empty");
            l = fit_line_sup(to_matrix(pts)).line;
        }
        out.lines[kk][vv] = l;
        out.alpha[kk][vv] = alpha_for_line(nets, k, v, l);
    });
    return out;
}

NetLimit net_limit(const NetSequence& nets) {
    if (nets.levels.empty()) fail_input("net limit of an empty sequence");
    return NetLimit{nets.levels.back(), 2.0 * nets.cstar * nets.unit(nets.K())};
}

}  // namespace mrt

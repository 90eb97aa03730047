#include "mrt/rectify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mrt/error.hpp"
#include "mrt/jones.hpp"
#include "mrt/nets.hpp"
#include "mrt/parallel.hpp"

namespace mrt {

namespace {

std::string cube_str(const DyadicCube& q) {
    std::string s = "k=" + std::to_string(q.k) + " j=(";
    for (std::size_t i = 0; i < q.j.size(); ++i) s += (i ? "," : "") + std::to_string(q.j[i]);
    return s + ")";
}

double cell_mass(const DiscreteMeasure& mu, const DyadicCube& q) {
    const CellGroup* g = mu.scale(q.k).cell(q);
    return g ? g->mass : 0.0;
}

double triple_mass(const DiscreteMeasure& mu, const DyadicCube& q) {
    const CellGroup* g = mu.scale(q.k).triple(q);
    return g ? g->mass : 0.0;
}

double sqrt_n(int n) { return std::sqrt(static_cast<double>(n)); }

// Least k >= 0 with 2^-k <= s.
int scale_for_side(double s) {
    int k = 0;
    while (std::ldexp(1.0, -k) > s) ++k;
    return k;
}

}  // namespace

double normalized_sum(const DiscreteMeasure& mu, const CubeTree& t, const CubeValues& b, int atom) {
    const Point x = mu.point(atom);
    if (t.empty() || !t.top().contains(x)) return 0.0;
    double s = 0.0;
    for (int k = t.top().k; k <= t.deepest_scale(); ++k) {
        DyadicCube q = cube_at(x, k);
        if (!t.contains(q)) break;
        auto it = b.find(q);
        double bq = it == b.end() ? 0.0 : it->second;
        if (bq == 0.0) continue;
        double m = cell_mass(mu, q);
        if (m == 0.0) return std::numeric_limits<double>::infinity();
        s += bq / m;
    }
    return s;
}

LocalizationResult localize(const DiscreteMeasure& mu, const CubeTree& t, const CubeValues& b, double n_cap, double eps) {
    if (t.empty()) fail_input("localization needs a nonempty tree");
    if (!(n_cap >= 0) || !std::isfinite(n_cap)) fail_input("N must be finite and nonnegative");
    if (!(eps > 0)) fail_input("epsilon must be positive");
    for (const auto& [q, v] : b)
        if (!(v >= 0)) fail_input("b must be nonnegative");
    LocalizationResult r;
    r.n_cap = n_cap;
    r.eps = eps;
    r.budget = n_cap / eps;
    const DyadicCube& top = t.top();
    const CellGroup* tg = mu.scale(top.k).cell(top);
    r.mass_top = tg ? tg->mass : 0.0;
    if (tg)
        for (int i : tg->atoms)
            if (normalized_sum(mu, t, b, i) <= n_cap) r.a.push_back(i);
    r.mass_a = mu.mass_of(r.a);

    std::unordered_map<DyadicCube, double, CubeHash> mass_a_in;
    for (int i : r.a) {
        const Point x = mu.point(i);
        for (int k = top.k; k <= t.deepest_scale(); ++k) {
            DyadicCube q = cube_at(x, k);
            if (!t.contains(q)) break;
            mass_a_in[q] += mu.weight(i);
        }
    }
    std::unordered_set<DyadicCube, CubeHash> bad;
    if (r.mass_a == 0.0) {
        r.all_bad = true;
        bad.insert(t.members().begin(), t.members().end());
    } else {
        // Members are sorted by scale, so parents are decided first.
        for (const DyadicCube& q : t.members()) {
            bool is_bad = q != top && bad.count(parent(q));
            if (!is_bad) {
                auto it = mass_a_in.find(q);
                double ma = it == mass_a_in.end() ? 0.0 : it->second;
                is_bad = ma <= eps * r.mass_a * cell_mass(mu, q);
            }
            if (is_bad) bad.insert(q);
        }
    }
    for (const DyadicCube& q : t.members()) (bad.count(q) ? r.bad : r.good).push_back(q);
    for (const DyadicCube& q : r.good) {
        auto it = b.find(q);
        if (it != b.end()) r.good_sum += it->second;
    }
    for (int i : r.a) {
        const Point x = mu.point(i);
        bool in_bad = false;
        for (int k = top.k; k <= t.deepest_scale() && !in_bad; ++k) {
            DyadicCube q = cube_at(x, k);
            if (!t.contains(q)) break;
            in_bad = bad.count(q) != 0;
        }
        if (!in_bad) r.a_prime.push_back(i);
    }
    r.mass_a_prime = mu.mass_of(r.a_prime);

    // Properties (1)-(4) rechecked on the output.
    if (!r.good.empty()) {
        try {
            r.good_tree = CubeTree(top, r.good);
        } catch (const Error& e) {
            r.failures.push_back(std::string("good cubes do not form a tree under Top: ") + e.what());
        }
    }
    for (const DyadicCube& q : r.bad)
        for (const DyadicCube& ch : t.children_in_tree(q))
            if (!bad.count(ch)) r.failures.push_back("child of bad cube " + cube_str(q) + " is good");
    if (r.mass_a_prime < (1.0 - eps * r.mass_top) * r.mass_a - 1e-12 * r.mass_a)
        r.failures.push_back("mass of A' below (1 - eps mu(Top)) mu(A)");
    if (r.mass_a > 0.0 && !(r.good_sum < r.budget)) r.failures.push_back("sum of b over good cubes not below N/eps");
    return r;
}

std::string Regime::name() const {
    switch (kind) {
        case lower_regular: return "lower_regular";
        case plain_star_star: return "plain_star_star";
        case doubling: return "doubling";
    }
    return "";
}

namespace {

struct TopChoice {
    DyadicCube q_x;
    double r_x = 0.0;
    std::string diagnostic;
    bool ok = false;
};

TopChoice choose_top(const DiscreteMeasure& mu, const Point& x, Regime regime, int k_max, const std::vector<double>& radii) {
    TopChoice out;
    out.q_x = cube_at(x, k_max);
    if (radii.empty()) fail_input("tree growing needs a radius ladder");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1])) fail_input("radius ladder must be strictly decreasing");
    const int n = mu.dim();
    auto holds = [&](double r) {
        if (regime.kind == Regime::doubling)
            return mu.mass(ClosedBall{x, 2.0 * r}) <= std::pow(2.0, regime.d) * mu.mass(ClosedBall{x, r});
        return mu.mass(ClosedBall{x, r}) >= 3.0 * sqrt_n(n) * regime.c * r;
    };
    // Largest ladder radius below which the predicate holds at every ladder radius.
    for (std::size_t i = radii.size(); i-- > 0;) {
        if (!holds(radii[i])) break;
        out.r_x = radii[i];
    }
    if (out.r_x == 0.0) {
        out.diagnostic = regime.name() + " predicate fails at the smallest ladder radius";
        return out;
    }
    double side = std::min(out.r_x, 1.0);
    if (regime.kind == Regime::doubling) {
        int e = static_cast<int>(std::ceil(std::log2(6.0 * sqrt_n(n))));
        side = std::min(out.r_x / std::ldexp(1.0, e - 1), 1.0);
    }
    int k = scale_for_side(side);
    if (k > k_max) {
        out.diagnostic = "Q_x is finer than k_max";
        return out;
    }
    out.q_x = cube_at(x, k);
    out.ok = true;
    return out;
}

bool member_predicate(const DiscreteMeasure& mu, const DyadicCube& q, Regime regime) {
    const int n = mu.dim();
    if (regime.kind == Regime::lower_regular) return triple_mass(mu, q) >= regime.c * 3.0 * q.diam();
    if (regime.kind == Regime::doubling)
        return triple_mass(mu, parent(q)) <= std::pow(12.0 * sqrt_n(n), regime.d) * triple_mass(mu, q);
    return triple_mass(mu, q) > 0.0;
}

GrownTree grow_from(const DiscreteMeasure& mu, const TopChoice& top, Regime regime, int k_max) {
    GrownTree g;
    g.q_x = top.q_x;
    g.r_x = top.r_x;
    g.diagnostic = top.diagnostic;
    if (!top.ok) return g;
    if (!member_predicate(mu, top.q_x, regime)) {
        g.diagnostic = regime.name() + " predicate fails at Q_x " + cube_str(top.q_x);
        return g;
    }
    std::vector<DyadicCube> members{top.q_x};
    std::vector<DyadicCube> frontier{top.q_x};
    for (int k = top.q_x.k + 1; k <= k_max && !frontier.empty(); ++k) {
        const ScaleTable& table = mu.scale(k);
        std::vector<DyadicCube> next;
        for (const DyadicCube& q : frontier)
            for (const DyadicCube& ch : children(q))
                if (table.triple(ch) && member_predicate(mu, ch, regime)) next.push_back(ch);
        members.insert(members.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    g.tree = CubeTree(top.q_x, members);
    return g;
}

}  // namespace

GrownTree grow_tree(const DiscreteMeasure& mu, const Point& x, Regime regime, int k_max, const std::vector<double>& radii) {
    require_dim(x, mu.dim(), "grow_tree");
    if (regime.kind == Regime::lower_regular && !(regime.c > 0)) fail_input("lower regular regime needs c > 0");
    if (regime.kind == Regime::doubling && !(regime.d >= 1)) fail_input("doubling regime needs D >= 1");
    if (regime.kind == Regime::plain_star_star) fail_input("trees are grown in the lower regular or doubling regime");
    return grow_from(mu, choose_top(mu, x, regime, k_max, radii), regime, k_max);
}

CubeTree prune_to_depth(const CubeTree& t) {
    if (t.empty()) return t;
    const int deep = t.deepest_scale();
    std::set<DyadicCube> keep;
    for (const DyadicCube& q : t.members()) {
        if (q.k != deep) continue;
        DyadicCube a = q;
        while (keep.insert(a).second && a.k > t.top().k) a = parent(a);
    }
    return CubeTree(t.top(), std::vector<DyadicCube>(keep.begin(), keep.end()));
}

double distance_to_curve(const CurveConstruction& c, const Point& x) {
    const CurveGraph& g = c.graph;
    const Snapshot& s = g.last();
    double best = std::numeric_limits<double>::infinity();
    for (int id : s.segments) {
        const CurveSegment& seg = g.segments[static_cast<std::size_t>(id)];
        best = std::min(best, point_segment_distance(x, g.vertices[static_cast<std::size_t>(seg.a)],
                                                     g.vertices[static_cast<std::size_t>(seg.b)]));
    }
    for (int id : s.points) best = std::min(best, (x - g.vertices[static_cast<std::size_t>(id)]).norm());
    return best;
}

namespace {

bool box_inside(const Box& inner, const Box& outer) {
    for (Eigen::Index i = 0; i < inner.center.size(); ++i) {
        if (inner.center[i] - inner.half < outer.center[i] - outer.half) return false;
        if (inner.center[i] + inner.half > outer.center[i] + outer.half) return false;
    }
    return true;
}

}  // namespace

DrawResult draw_through_tree(BetaEngine& engine, const CubeTree& t, double p, Regime regime, double epsilon) {
    if (t.empty()) fail_input("drawing needs a nonempty tree");
    if (!(p >= 1.0)) fail_input("exponent p must be at least 1");
    const DiscreteMeasure& mu = engine.measure();
    const int n = mu.dim();
    DrawResult r;
    r.regime = regime.name();
    r.p = p;
    CubeTree tree = prune_to_depth(t);
    r.pruned = static_cast<int>(t.members().size() - tree.members().size());
    for (const DyadicCube& q : tree.members()) {
        if (regime.kind == Regime::lower_regular && !(triple_mass(mu, q) >= regime.c * 3.0 * q.diam()))
            fail_validation("lower regularity fails on member cube " + cube_str(q));
        if (regime.kind == Regime::doubling && q != tree.top() &&
            !(triple_mass(mu, parent(q)) <= std::pow(2.0, regime.d) * triple_mass(mu, q)))
            fail_validation("doubling condition fails on member cube " + cube_str(q));
    }
    r.r0 = 3.0 * tree.top().diam();
    NetSequence nets = nets_from_tree(mu, tree, r.r0, 4.0);

    AlphaAssignment al;
    al.lines.resize(nets.levels.size());
    al.alpha.resize(nets.levels.size());
    std::vector<std::pair<int, int>> jobs;
    for (int k = 0; k <= nets.K(); ++k) {
        auto kk = static_cast<std::size_t>(k);
        al.lines[kk].resize(nets.levels[kk].size());
        al.alpha[kk].assign(nets.levels[kk].size(), 0.0);
        for (std::size_t v = 0; v < nets.levels[kk].size(); ++v) {
            al.lines[kk][v] = axis_line(nets.levels[kk][v]);
            if (k >= 1) jobs.emplace_back(k, static_cast<int>(v));
        }
    }
    const double cfac = std::max(1.0 / std::sqrt(std::max(regime.c, 1e-300)), 1.0);
    const double dfac = 6400.0 * sqrt_n(n) * std::pow(3200.0 * sqrt_n(n), regime.d / p);
    std::vector<char> override_flag(jobs.size(), 0);
    parallel_for(jobs.size(), [&](std::size_t j) {
        auto [k, v] = jobs[j];
        auto kk = static_cast<std::size_t>(k);
        auto vv = static_cast<std::size_t>(v);
        const DyadicCube& q = nets.witness[kk][vv];
        BetaValue bv;
        double alpha = 0.0;
        if (regime.kind == Regime::lower_regular) {
            bv = engine.multi(q, p, Variant::StarC(regime.c));
            alpha = 4.0 * cfac * bv.value;
        } else if (regime.kind == Regime::plain_star_star) {
            bv = engine.multi(q, p, Variant::StarStar());
            alpha = 4.0 * bv.value;
        } else {
            // Minimal member cube above Q whose triple holds the triples of the neighborhood.
            Neighborhood nb = alpha_neighborhood(nets, k, v);
            std::vector<Box> boxes;
            for (int i : nb.prev) boxes.push_back(triple(nets.witness[kk - 1][static_cast<std::size_t>(i)]));
            for (int i : nb.same) boxes.push_back(triple(nets.witness[kk][static_cast<std::size_t>(i)]));
            DyadicCube hat = q;
            for (;;) {
                Box h = triple(hat);
                bool all = std::all_of(boxes.begin(), boxes.end(), [&](const Box& b) { return box_inside(b, h); });
                if (all || hat == tree.top()) break;
                hat = parent(hat);
            }
            bv = engine.triple_best(hat, p);
            alpha = dfac * bv.value;
        }
        Line line;
        if (bv.has_line) {
            line = bv.line;
        } else {
            Neighborhood nb = alpha_neighborhood(nets, k, v);
            PointList pts;
            for (int i : nb.prev) pts.push_back(nets.levels[kk - 1][static_cast<std::size_t>(i)]);
            for (int i : nb.same) pts.push_back(nets.levels[kk][static_cast<std::size_t>(i)]);
            line = fit_line_sup(to_matrix(pts)).line;
        }
        double need = alpha_for_line(nets, k, v, line);
        if (need > alpha * (1.0 + 1e-9) + 1e-12) {
            override_flag[j] = 1;
            alpha = need;
        }
        al.lines[kk][vv] = line;
        al.alpha[kk][vv] = alpha;
    });
    r.alpha_overrides = static_cast<int>(std::count(override_flag.begin(), override_flag.end(), 1));
    r.construction = construct_curve(nets, al, epsilon);
    r.alpha_sum = r.construction.acct.alpha_sum;
    r.length = r.construction.acct.dedup_length;
    r.naive_length = r.construction.acct.naive_length;

    if (regime.kind == Regime::lower_regular) {
        r.budget_kind = "max(1/c,1) S*c";
        r.budget = std::max(1.0 / regime.c, 1.0) * square_sum_star_c_tree(engine, tree, p, regime.c).total;
    } else if (regime.kind == Regime::plain_star_star) {
        r.budget_kind = "S**";
        std::vector<double> terms(tree.members().size());
        parallel_for(terms.size(), [&](std::size_t i) {
            const DyadicCube& q = tree.members()[i];
            double b = engine.multi(q, p, Variant::StarStar()).value;
            terms[i] = b * b * q.diam();
        });
        for (double v : terms) r.budget += v;
    } else {
        r.budget_kind = "(3200 sqrt n)^(2D/p) S_p";
        r.budget = std::pow(3200.0 * sqrt_n(n), 2.0 * regime.d / p) * square_sum_tree(engine, tree, p).total;
    }

    LeafApprox lf = leaves(tree, tree.deepest_scale());
    r.leaf_tolerance = 2.0 * nets.cstar * nets.unit(nets.K()) + lf.error;
    std::vector<double> dist(lf.cubes.size());
    parallel_for(lf.cubes.size(), [&](std::size_t i) { dist[i] = distance_to_curve(r.construction, lf.cubes[i].center()); });
    for (std::size_t i = 0; i < dist.size(); ++i) {
        r.max_leaf_distance = std::max(r.max_leaf_distance, dist[i]);
        if (dist[i] > r.leaf_tolerance)
            fail_internal("leaf cube " + cube_str(lf.cubes[i]) + " is farther than the tolerance from the curve");
    }
    return r;
}

SupportCover cover_support(BetaEngine& engine, double p, int depth, double epsilon) {
    const DiscreteMeasure& mu = engine.measure();
    if (mu.empty()) fail_input("cannot cover the support of an empty measure");
    if (depth < 0) fail_input("depth must be nonnegative");
    SupportCover out;
    out.depth = depth;
    out.support_diam = mu.support_diam();
    int k_top = 0;
    if (out.support_diam > 0) {
        k_top = static_cast<int>(std::floor(-std::log2(out.support_diam)));
        while (std::ldexp(1.0, -k_top) > out.support_diam) ++k_top;
        while (std::ldexp(1.0, -(k_top - 1)) <= out.support_diam) --k_top;
    }
    for (const CellGroup& g : mu.scale(k_top).triples) out.tops.push_back(g.cube);
    for (const DyadicCube& top : out.tops) {
        std::vector<DyadicCube> members;
        for (int k = k_top; k <= k_top + depth; ++k)
            for (const CellGroup& g : mu.scale(k).triples)
                if (is_ancestor_or_self(top, g.cube)) members.push_back(g.cube);
        out.curves.push_back(draw_through_tree(engine, CubeTree(top, members), p, Regime::PlainStarStar(), epsilon));
        out.curve_length += out.curves.back().length;
        out.s_star_star += out.curves.back().budget;
    }
    auto curve_points = [](const DrawResult& d) {
        const CurveGraph& g = d.construction.graph;
        std::set<int> ids(g.last().points.begin(), g.last().points.end());
        for (int s : g.last().segments) {
            ids.insert(g.segments[static_cast<std::size_t>(s)].a);
            ids.insert(g.segments[static_cast<std::size_t>(s)].b);
        }
        PointList pts;
        for (int id : ids) pts.push_back(g.vertices[static_cast<std::size_t>(id)]);
        return pts;
    };
    for (std::size_t i = 0; i + 1 < out.curves.size(); ++i) {
        PointList a = curve_points(out.curves[i]), b = curve_points(out.curves[i + 1]);
        Connector best;
        best.length = std::numeric_limits<double>::infinity();
        for (const Point& x : a)
            for (const Point& y : b) {
                double d = (x - y).norm();
                if (d < best.length) best = Connector{x, y, d};
            }
        out.connectors.push_back(best);
        out.connector_length += best.length;
    }
    std::vector<std::pair<Point, Point>> all;
    for (const DrawResult& d : out.curves) {
        const CurveGraph& g = d.construction.graph;
        for (int s : g.last().segments) {
            const CurveSegment& seg = g.segments[static_cast<std::size_t>(s)];
            all.emplace_back(g.vertices[static_cast<std::size_t>(seg.a)], g.vertices[static_cast<std::size_t>(seg.b)]);
        }
    }
    for (const Connector& c : out.connectors) all.emplace_back(c.a, c.b);
    out.total_length = curve_length(all).dedup;
    double denom = out.support_diam + out.s_star_star;
    out.ratio = denom > 0 ? out.total_length / denom : 0.0;
    return out;
}

DecompositionReport decompose_estimate(BetaEngine& engine, const DecomposeParams& params) {
    const DiscreteMeasure& mu = engine.measure();
    if (params.c_ladder.empty() || params.n_ladder.empty() || params.eps_fractions.empty())
        fail_input("decomposition ladders must be nonempty");
    for (double c : params.c_ladder)
        if (!(c > 0)) fail_input("ladder values of c must be positive");
    for (double f : params.eps_fractions)
        if (!(f > 0 && f < 1)) fail_input("epsilon fractions must lie in (0, 1)");
    if (params.radius_top > params.k_max) fail_input("radius ladder top must not exceed k_max");
    DecompositionReport rep;
    rep.params = params;
    for (int j = params.radius_top; j <= params.k_max; ++j) rep.radii.push_back(std::ldexp(1.0, -j));
    rep.n_cap = *std::max_element(params.n_ladder.begin(), params.n_ladder.end());
    const int n = mu.dim();
    rep.atoms.resize(static_cast<std::size_t>(mu.size()));
    parallel_for(rep.atoms.size(), [&](std::size_t i) {
        AtomLabel& a = rep.atoms[i];
        const Point x = mu.point(static_cast<int>(i));
        a.lower_density = density_profile(mu, x, rep.radii).lower;
        bool any_density = false;
        for (double c : params.c_ladder) {
            JonesReport jr = jones_at(engine, x, params.p, params.k_max, JonesVariant{JonesVariant::star_c, c});
            double j = jr.divergent ? std::numeric_limits<double>::infinity() : jr.sum;
            a.jones.push_back(j);
            bool dens = a.lower_density > 1.5 * sqrt_n(n) * c;
            any_density = any_density || dens;
            if (!a.rect && dens && j < rep.n_cap) {
                a.rect = true;
                a.c = c;
            }
        }
        if (!a.rect) a.reason = any_density ? "jones" : "density";
    });

    // Trees are shared by every atom with the same (c, Q_x).
    std::map<std::pair<double, DyadicCube>, std::vector<int>> groups;
    for (std::size_t i = 0; i < rep.atoms.size(); ++i) {
        const AtomLabel& a = rep.atoms[i];
        if (!a.rect) continue;
        rep.rect_mass += mu.weight(static_cast<int>(i));
        TopChoice tc = choose_top(mu, mu.point(static_cast<int>(i)), Regime::LowerRegular(a.c), params.k_max, rep.radii);
        if (tc.ok) groups[{a.c, tc.q_x}].push_back(static_cast<int>(i));
    }
    std::set<std::vector<DyadicCube>> drawn;
    for (const auto& [key, atoms] : groups) {
        const auto& [c, q_x] = key;
        TopChoice tc;
        tc.q_x = q_x;
        tc.ok = true;
        GrownTree g = grow_from(mu, tc, Regime::LowerRegular(c), params.k_max);
        if (!g.tree) continue;
        ++rep.trees;
        const CubeTree& t = *g.tree;
        CubeValues b;
        std::vector<double> vals(t.members().size());
        parallel_for(vals.size(), [&](std::size_t i) {
            const DyadicCube& q = t.members()[i];
            double v = engine.multi(q, params.p, Variant::StarC(c)).value;
            vals[i] = v * v * q.diam();
        });
        for (std::size_t i = 0; i < vals.size(); ++i) b.emplace(t.members()[i], vals[i]);
        const double eta = cell_mass(mu, t.top());
        if (eta == 0.0) continue;
        for (double n_cap : params.n_ladder)
            for (double f : params.eps_fractions) {
                LocalizationResult loc = localize(mu, t, b, n_cap, f * eta);
                if (!loc.good_tree) continue;
                if (!drawn.insert(loc.good).second) continue;
                rep.curves.push_back(draw_through_tree(engine, *loc.good_tree, params.p, Regime::LowerRegular(c), params.epsilon));
            }
    }
    parallel_for(rep.atoms.size(), [&](std::size_t i) {
        AtomLabel& a = rep.atoms[i];
        if (!a.rect) return;
        const Point x = mu.point(static_cast<int>(i));
        for (const DrawResult& d : rep.curves)
            if (distance_to_curve(d.construction, x) <= d.leaf_tolerance) {
                a.captured = true;
                break;
            }
    });
    for (std::size_t i = 0; i < rep.atoms.size(); ++i)
        if (rep.atoms[i].captured) rep.captured_mass += mu.weight(static_cast<int>(i));
    rep.captured_fraction = rep.rect_mass > 0 ? std::min(1.0, rep.captured_mass / rep.rect_mass) : 0.0;
    return rep;
}

}  // namespace mrt

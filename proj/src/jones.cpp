#include "mrt/jones.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mrt/error.hpp"
#include "mrt/parallel.hpp"

namespace mrt {

std::string JonesVariant::name() const {
    switch (kind) {
        case star: return "star";
        case tilde: return "tilde";
        case star_star: return "star_star";
        case star_c: return "star_c";
    }
    return "unknown";
}

int default_k_max(const DiscreteMeasure& mu, const Point& x, int cap) {
    for (int k = 0; k < cap; ++k) {
        const CellGroup* g = mu.scale(k).cell(cube_at(x, k));
        if (!g || g->atoms.size() <= 1) return k;
    }
    return cap;
}

double variant_beta(BetaEngine& engine, const DyadicCube& q, double p, JonesVariant v) {
    switch (v.kind) {
        case JonesVariant::tilde: return engine.triple_best(q, p).value;
        case JonesVariant::star: return engine.multi(q, p, Variant::Star()).value;
        case JonesVariant::star_star: return engine.multi(q, p, Variant::StarStar()).value;
        case JonesVariant::star_c:
            if (!(v.c > 0)) fail_input("star_c variant requires c > 0");
            return engine.multi(q, p, Variant::StarC(v.c)).value;
    }
    return 0.0;
}

JonesReport jones_at(BetaEngine& engine, const Point& x, double p, int k_max, JonesVariant v) {
    const DiscreteMeasure& mu = engine.measure();
    require_dim(x, mu.dim(), "jones_at");
    if (!(p >= 1.0)) fail_input("exponent p must be at least 1");
    if (v.kind == JonesVariant::star_c && !(v.c > 0)) fail_input("star_c variant requires c > 0");
    JonesReport r;
    r.x = x;
    r.variant = v.name();
    r.p = p;
    r.k_max = k_max;
    std::vector<DyadicCube> chain = chain_of_cubes(x, k_max);
    r.terms.resize(chain.size());
    parallel_for(chain.size(), [&](std::size_t i) {
        JonesTerm t;
        t.cube = chain[i];
        t.diam = chain[i].diam();
        const CellGroup* g = mu.scale(chain[i].k).cell(chain[i]);
        t.mass = g ? g->mass : 0.0;
        t.beta = variant_beta(engine, chain[i], p, v);
        r.terms[i] = t;
    });
    for (JonesTerm& t : r.terms) {
        if (t.beta == 0.0) {
            t.term = 0.0;
        } else if (t.mass == 0.0) {
            t.term = 0.0;
            if (!r.divergent) {
                r.divergent = true;
                r.divergent_cube = t.cube;
            }
        } else {
            t.term = t.beta * t.beta * t.diam / t.mass;
        }
        r.sum += t.term;
    }
    return r;
}

namespace {

using Interval = std::pair<std::int64_t, std::int64_t>;
constexpr Interval kEmpty{1, 0};

Interval clip(Interval w, std::int64_t lo, std::int64_t hi) {
    Interval c{std::max(w.first, lo), std::min(w.second, hi)};
    return c.second < c.first ? kEmpty : c;
}

struct Run {
    std::int64_t start = 0;
    std::uint64_t length = 0;
    Interval same = kEmpty, up = kEmpty;
};

}  // namespace

SquareSum square_sum_star_star(BetaEngine& engine, double p, int k_lo, int k_hi) {
    if (k_hi < k_lo) fail_input("empty scale range");
    const DiscreteMeasure& mu = engine.measure();
    SquareSum out;
    out.kind = "S_star_star";
    if (mu.empty()) return out;
    const int n = mu.dim();
    for (int k = k_lo; k <= k_hi; ++k) {
        const ScaleTable& ts = mu.scale(k);
        const ScaleTable& tu = mu.scale(k - 1);
        std::vector<std::vector<Run>> runs(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            auto dd = static_cast<std::size_t>(d);
            // Scan every index whose window can reach the data at either scale.
            std::int64_t from = std::numeric_limits<std::int64_t>::max(), to = std::numeric_limits<std::int64_t>::min();
            if (!ts.triples.empty()) {
                auto w = nearby_axis_window(0, 1, n);
                from = std::min(from, ts.triple_lo[dd] + w.first - 2);
                to = std::max(to, ts.triple_hi[dd] + w.second + 2);
            }
            if (!tu.triples.empty()) {
                auto w = nearby_axis_window(0, 2, n);
                from = std::min(from, 2 * (tu.triple_lo[dd] - w.second) - 4);
                to = std::max(to, 2 * (tu.triple_hi[dd] - w.first) + 4);
            }
            for (std::int64_t jq = from; jq <= to; ++jq) {
                Interval same = ts.triples.empty() ? kEmpty : clip(nearby_axis_window(jq, 1, n), ts.triple_lo[dd], ts.triple_hi[dd]);
                Interval up = tu.triples.empty() ? kEmpty : clip(nearby_axis_window(jq, 2, n), tu.triple_lo[dd], tu.triple_hi[dd]);
                auto& rs = runs[dd];
                if (!rs.empty() && rs.back().same == same && rs.back().up == up) {
                    ++rs.back().length;
                } else {
                    rs.push_back(Run{jq, 1, same, up});
                }
            }
        }
        // Families are products of per-axis runs.
        std::vector<std::vector<std::size_t>> combos;
        std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
        for (;;) {
            bool same_ok = true, up_ok = true;
            for (std::size_t d = 0; d < pick.size(); ++d) {
                same_ok = same_ok && runs[d][pick[d]].same != kEmpty;
                up_ok = up_ok && runs[d][pick[d]].up != kEmpty;
            }
            if (same_ok || up_ok) combos.push_back(pick);
            std::size_t axis = 0;
            while (axis < pick.size()) {
                if (++pick[axis] < runs[axis].size()) break;
                pick[axis] = 0;
                ++axis;
            }
            if (axis == pick.size()) break;
        }
        std::vector<SquareSumEntry> entries(combos.size());
        parallel_for(combos.size(), [&](std::size_t c) {
            SquareSumEntry e;
            e.cube.k = k;
            e.count = 1;
            for (std::size_t d = 0; d < combos[c].size(); ++d) {
                const Run& r = runs[d][combos[c][d]];
                e.cube.j.push_back(r.start);
                e.count *= r.length;
            }
            e.beta = engine.multi(e.cube, p, Variant::StarStar()).value;
            e.term = static_cast<double>(e.count) * e.beta * e.beta * e.cube.diam();
            entries[c] = std::move(e);
        });
        for (SquareSumEntry& e : entries) {
            out.total += e.term;
            out.cubes += e.count;
            out.ledger.push_back(std::move(e));
        }
    }
    return out;
}

namespace {

SquareSum tree_sum(const CubeTree& t, const std::string& kind, const std::function<double(const DyadicCube&)>& beta) {
    if (t.empty()) fail_input("square sum over an empty tree");
    SquareSum out;
    out.kind = kind;
    const auto& members = t.members();
    std::vector<SquareSumEntry> entries(members.size());
    parallel_for(members.size(), [&](std::size_t i) {
        SquareSumEntry e;
        e.cube = members[i];
        e.beta = beta(members[i]);
        e.term = e.beta * e.beta * members[i].diam();
        entries[i] = std::move(e);
    });
    for (SquareSumEntry& e : entries) {
        out.total += e.term;
        ++out.cubes;
        out.ledger.push_back(std::move(e));
    }
    return out;
}

}  // namespace

SquareSum square_sum_tree(BetaEngine& engine, const CubeTree& t, double p) {
    return tree_sum(t, "S_p_tree", [&](const DyadicCube& q) { return engine.triple_best(q, p).value; });
}

SquareSum square_sum_star_c_tree(BetaEngine& engine, const CubeTree& t, double p, double c) {
    if (!(c > 0)) fail_input("c must be positive");
    return tree_sum(t, "S_star_c_tree", [&](const DyadicCube& q) { return engine.multi(q, p, Variant::StarC(c)).value; });
}

SquareSum beta_sq_set(const PointList& E, int k_lo, int k_hi) {
    if (k_hi < k_lo) fail_input("empty scale range");
    SquareSum out;
    out.kind = "beta_sq_set";
    if (E.empty()) return out;
    DiscreteMeasure mu(to_matrix(E), std::vector<double>(E.size(), 1.0));
    for (int k = k_lo; k <= k_hi; ++k) {
        const ScaleTable& t = mu.scale(k);
        std::vector<SquareSumEntry> entries(t.triples.size());
        parallel_for(t.triples.size(), [&](std::size_t i) {
            const CellGroup& g = t.triples[i];
            PointMatrix pts(mu.dim(), static_cast<Eigen::Index>(g.atoms.size()));
            for (std::size_t a = 0; a < g.atoms.size(); ++a) pts.col(static_cast<Eigen::Index>(a)) = mu.points().col(g.atoms[a]);
            SquareSumEntry e;
            e.cube = g.cube;
            e.beta = fit_line_sup(pts).objective / triple(g.cube).diam();
            e.term = e.beta * e.beta * g.cube.diam();
            entries[i] = std::move(e);
        });
        for (SquareSumEntry& e : entries) {
            out.total += e.term;
            ++out.cubes;
            out.ledger.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace mrt

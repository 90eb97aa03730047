// Acceptance suite: one criterion per invocation (or all with no argument), one
// PASS/FAIL line each. Tolerances and thresholds are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mrt/beta.hpp"
#include "mrt/cli.hpp"
#include "mrt/curve.hpp"
#include "mrt/error.hpp"
#include "mrt/jones.hpp"
#include "mrt/nets.hpp"
#include "mrt/parallel.hpp"
#include "mrt/rectify.hpp"
#include "oracles.hpp"

using namespace mrt;
using oracle::pt;

namespace {

constexpr double kLermanSlack = 1e-12;
constexpr double kOracleRel = 1e-3;
constexpr double kOracleFloor = 1e-8;  // resolution of the line grid where the true value is 0
constexpr double kRangeSlack = 1e-12;
constexpr double kFlatTol = 1e-12;
constexpr double kChatVariation = 0.20;
constexpr double kSegmentFactor = 1.1;
constexpr double kTspBound = 4.0;
constexpr double kTspStability = 0.25;
constexpr double kCantorIncrementFloor = 0.9;  // fraction of the calibrated increment
constexpr double kLabelAgreement = 0.85;
constexpr double kCaptured = 0.90;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

bool oracle_agrees(double got, double ref) { return std::abs(got - ref) <= kOracleRel * std::max(got, ref) + kOracleFloor; }

Region random_region(oracle::Rng& rng) {
    Point c = pt(oracle::uniform(rng, -0.2, 1.2), oracle::uniform(rng, -0.2, 1.2));
    switch (static_cast<int>(oracle::uniform(rng, 0, 3))) {
        case 0: return cube_at(c, static_cast<int>(oracle::uniform(rng, 0, 4)));
        case 1: return Box{c, oracle::uniform(rng, 0.05, 0.8)};
        default: return ClosedBall{c, oracle::uniform(rng, 0.05, 0.8)};
    }
}

Line random_line(oracle::Rng& rng) {
    double th = oracle::uniform(rng, 0, M_PI);
    return make_line(pt(oracle::uniform(rng, -0.5, 1.5), oracle::uniform(rng, -0.5, 1.5)), pt(std::cos(th), std::sin(th)));
}

// Atoms spread by arc length along a polyline, total mass equal to its length.
DiscreteMeasure sample_curve(const PointList& poly, int m, double* length = nullptr) {
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < poly.size(); ++i) cum.push_back(cum.back() + (poly[i] - poly[i - 1]).norm());
    const double L = cum.back();
    PointList pts;
    std::size_t s = 1;
    for (int i = 0; i < m; ++i) {
        double t = (i + 0.5) / m * L;
        while (cum[s] < t) ++s;
        double f = (t - cum[s - 1]) / (cum[s] - cum[s - 1]);
        pts.push_back(poly[s - 1] + f * (poly[s] - poly[s - 1]));
    }
    if (length) *length = L;
    return oracle::measure_of(pts, L / m);
}

PointList parametric(const std::function<Point(double)>& f, int steps = 4000) {
    PointList out;
    for (int i = 0; i <= steps; ++i) out.push_back(f(static_cast<double>(i) / steps));
    return out;
}

// 1. Center of mass against beta times diameter.
Outcome lerman() {
    Timer timer;
    oracle::Rng rng(1001);
    int violations = 0, checked = 0;
    double worst = -1e300;
    for (int t = 0; t < 10000; ++t) {
        DiscreteMeasure mu = oracle::random_measure(rng, 2, 1 + t % 25, 0, 1);
        Region e = random_region(rng);
        if (mu.mass(e) == 0) {
            e = ClosedBall{mu.point(0), oracle::uniform(rng, 0.05, 0.8)};
        }
        Line l = random_line(rng);
        double p = t % 2 ? 1.0 : 2.0;
        double lhs = dist_to_line(mu.center_of_mass(e), l);
        double rhs = beta_fixed_line(mu, e, l, p) * region_diam(e);
        worst = std::max(worst, lhs - rhs);
        violations += lhs > rhs + kLermanSlack;
        ++checked;
    }
    double secs = timer.seconds();
    return {violations == 0 && secs < 10.0,
            fmt("%d instances, %d violations, max(lhs - rhs) = %.3g, %.1f s", checked, violations, worst, secs)};
}

// 2. Line fits and star multiscale betas against the brute-force line grid.
Outcome beta_oracle() {
    Timer timer;
    oracle::Rng rng(1002);
    int bad_best = 0, bad_star = 0;
    double worst_best = 0, worst_star = 0;
    for (int t = 0; t < 200; ++t) {
        DiscreteMeasure mu = oracle::random_measure(rng, 2, 1 + t % 10, 0, 1);
        DyadicCube q = cube_at(mu.point(t % mu.size()), static_cast<int>(oracle::uniform(rng, 0, 4)));
        Box e = triple(q);
        PointList pts;
        std::vector<double> w;
        for (int i : mu.atoms_in(e)) {
            pts.push_back(mu.point(i));
            w.push_back(mu.weight(i));
        }
        for (double p : {1.0, 2.0}) {
            double got = beta_best(mu, e, p).value;
            double ref = oracle::beta_best_grid(pts, w, e.diam(), p);
            worst_best = std::max(worst_best, std::abs(got - ref));
            bad_best += !oracle_agrees(got, ref);
        }
        double got = beta_multi(mu, q, 2.0, Variant::Star()).value;
        double ref = oracle::beta_multi_grid(oracle::family(mu, q, oracle::Kind::star), 2.0);
        worst_star = std::max(worst_star, std::abs(got - ref));
        bad_star += !oracle_agrees(got, ref);
    }
    double secs = timer.seconds();
    return {bad_best == 0 && bad_star == 0 && secs < 120.0,
            fmt("200 instances: beta_best %d disagreements (max abs gap %.2g), star %d (max abs gap %.2g), %.1f s", bad_best,
                worst_best, bad_star, worst_star, secs)};
}

// 3. Range, monotonicity in p and the star_c <= star comparison.
Outcome monotonicity() {
    oracle::Rng rng(1003);
    int range = 0, range_single = 0, mono = 0, order = 0, values = 0;
    double largest = 0;
    const std::vector<double> cs{0.1, 0.5, 2.0};
    for (int m = 0; m < 100; ++m) {
        DiscreteMeasure mu = oracle::random_measure(rng, 2, 2 + m % 29, 0, 1);
        BetaEngine engine(mu);
        for (int t = 0; t < 10; ++t) {
            Point x = mu.point(static_cast<int>(oracle::uniform(rng, 0, mu.size())));
            x += pt(oracle::uniform(rng, -0.1, 0.1), oracle::uniform(rng, -0.1, 0.1));
            DyadicCube q = cube_at(x, static_cast<int>(oracle::uniform(rng, -1, 7)));
            auto in_range = [&](double v, bool single) {
                ++values;
                largest = std::max(largest, v);
                bool ok = v >= 0 && v <= 1 + kRangeSlack;
                if (!ok) (single ? range_single : range) += 1;
            };
            auto monotone = [&](double b1, double b2) { mono += b1 > b2 + kRangeSlack; };
            double t1 = engine.triple_best(q, 1.0).value, t2 = engine.triple_best(q, 2.0).value;
            in_range(t1, true);
            in_range(t2, true);
            monotone(t1, t2);
            for (Variant v : {Variant::Star(), Variant::StarStar()}) {
                double b1 = engine.multi(q, 1.0, v).value, b2 = engine.multi(q, 2.0, v).value;
                in_range(b1, false);
                in_range(b2, false);
                monotone(b1, b2);
            }
            for (double p : {1.0, 2.0}) {
                double star = engine.multi(q, p, Variant::Star()).value;
                for (double c : cs) {
                    double sc = engine.multi(q, p, Variant::StarC(c)).value;
                    in_range(sc, false);
                    order += sc > star + kRangeSlack;
                }
            }
            for (double c : cs) monotone(engine.multi(q, 1.0, Variant::StarC(c)).value, engine.multi(q, 2.0, Variant::StarC(c)).value);
        }
    }
    return {range + range_single + mono + order == 0,
            fmt("1000 cubes, %d values: out of [0,1] %d single-region + %d multiscale (largest %.3g); p-monotonicity %d; "
                "star_c > star %d",
                values, range_single, range, largest, mono, order)};
}

// 4. Measures on lines: every beta and every Jones variant vanishes.
Outcome flatness() {
    std::vector<std::pair<Point, Point>> lines{{pt(0.05, 0.3), pt(0.95, 0.3)},
                                               {pt(0.6, 0.02), pt(0.6, 0.98)},
                                               {pt(0.1, 0.1), pt(0.9, 0.9)},
                                               {pt(-0.3, 0.7), pt(1.1, 0.182)}};
    double worst_beta = 0, worst_jones = 0;
    int evaluated = 0;
    for (const auto& [a, b] : lines) {
        PointList pts;
        for (int i = 0; i < 40; ++i) pts.push_back(a + (b - a) * (i / 39.0));
        DiscreteMeasure mu = oracle::measure_of(pts, 0.05);
        BetaEngine engine(mu);
        for (int k = -1; k <= 6; ++k)
            for (const CellGroup& g : mu.scale(k).triples) {
                for (double p : {1.0, 2.0}) {
                    worst_beta = std::max(worst_beta, engine.triple_best(g.cube, p).value);
                    for (Variant v : {Variant::Star(), Variant::StarStar(), Variant::StarC(0.25), Variant::StarC(1.0)})
                        worst_beta = std::max(worst_beta, engine.multi(g.cube, p, v).value);
                    evaluated += 5;
                }
            }
        for (int i = 0; i < mu.size(); ++i) {
            int k_max = default_k_max(mu, mu.point(i));
            for (auto kind : {JonesVariant::star, JonesVariant::tilde, JonesVariant::star_star, JonesVariant::star_c}) {
                JonesReport r = jones_at(engine, mu.point(i), 2.0, k_max, JonesVariant{kind, 0.5});
                worst_jones = std::max(worst_jones, r.divergent ? INFINITY : r.sum);
            }
        }
    }
    return {worst_beta <= kFlatTol && worst_jones <= kFlatTol,
            fmt("4 lines, %d beta values max %.3g; Jones at every atom (4 variants) max %.3g", evaluated, worst_beta, worst_jones)};
}

PointList random_net_input(oracle::Rng& rng, int t) {
    PointList E;
    int m = 30 + t % 70;
    switch (t % 5) {
        case 0:
            for (int i = 0; i < m; ++i) E.push_back(pt(oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)));
            break;
        case 1:
            for (int i = 0; i < m; ++i) {
                double s = oracle::uniform(rng, 0, 1);
                E.push_back(pt(s, 0.3 * s + oracle::uniform(rng, -0.01, 0.01)));
            }
            break;
        case 2:
            for (int i = 0; i < m; ++i) {
                double a = oracle::uniform(rng, 0, 2 * M_PI);
                E.push_back(pt(0.5 + 0.4 * std::cos(a), 0.5 + 0.4 * std::sin(a)));
            }
            break;
        case 3:
            for (int i = 0; i < m; ++i) {
                Point c = i % 3 == 0 ? pt(0.2, 0.2) : (i % 3 == 1 ? pt(0.8, 0.3) : pt(0.5, 0.9));
                E.push_back(c + pt(oracle::uniform(rng, -0.05, 0.05), oracle::uniform(rng, -0.05, 0.05)));
            }
            break;
        default:
            for (int i = 0; i < m; ++i) {
                double s = oracle::uniform(rng, 0, 1);
                E.push_back(pt(s, 0.5 + 0.2 * std::sin(6 * s)));
            }
    }
    return E;
}

// 5. Construction soundness on random valid nets.
Outcome soundness() {
    Timer timer;
    oracle::Rng rng(1005);
    int built = 0, unsound = 0, ledger = 0, cores = 0, rejected = 0;
    std::string first;
    while (built < 100) {
        PointList E = random_net_input(rng, built);
        double diam = 0;
        for (const Point& a : E)
            for (const Point& b : E) diam = std::max(diam, (a - b).norm());
        NetSequence nets = nets_from_points(E, diam, 3 + built % 4);
        if (!validate_nets(nets, 2.0).ok) {
            ++rejected;
            continue;
        }
        ++built;
        CurveConstruction c = construct_curve(nets, fit_alphas(nets));
        SoundnessReport s = verify_construction(c);
        if (!s.ok) {
            ++unsound;
            if (first.empty()) first = s.failures.front();
        }
        try {
            Certificate cert = length_certificate(c);
            cores += !cert.cores_disjoint;
        } catch (const Error& e) {
            ++ledger;
            if (first.empty()) first = e.what();
        }
    }
    double secs = timer.seconds();
    return {unsound + ledger + cores == 0 && secs < 120.0,
            fmt("100 nets (%d rejected as invalid), unsound %d, ledger failures %d, overlapping cores %d, %.1f s%s%s", rejected,
                unsound, ledger, cores, secs, first.empty() ? "" : "; first: ", first.c_str())};
}

struct CurveRun {
    double length = 0;
    double c_hat = 0;
};

CurveRun run_construction(const DiscreteMeasure& mu, int K) {
    NetSequence nets = nets_from_points(to_list(mu.points()), mu.support_diam(), K);
    CurveConstruction c = construct_curve(nets, fit_alphas(nets));
    Certificate cert = length_certificate(c);
    return {cert.length, cert.c_hat};
}

// 6. Length constant across depths on a circle; near-exact length on a segment.
Outcome length_bound() {
    PointList circle;
    for (int i = 0; i < 1024; ++i) {
        double a = 2 * M_PI * i / 1024;
        circle.push_back(pt(0.5 + 0.4 * std::cos(a), 0.5 + 0.4 * std::sin(a)));
    }
    DiscreteMeasure mu = oracle::measure_of(circle, 1.0 / 1024);
    std::vector<double> chat;
    std::string text;
    for (int K : {5, 6, 7}) {
        CurveRun r = run_construction(mu, K);
        chat.push_back(r.c_hat);
        text += fmt("K=%d H1=%.4g C=%.4g; ", K, r.length, r.c_hat);
    }
    double lo = *std::min_element(chat.begin(), chat.end()), hi = *std::max_element(chat.begin(), chat.end());
    double variation = (hi - lo) / lo;
    bool finite = std::isfinite(hi);

    const Point a = pt(0.1, 0.2), b = pt(0.85, 0.55);
    PointList seg;
    for (int i = 0; i < 1024; ++i) seg.push_back(a + (b - a) * ((i + 0.5) / 1024));
    DiscreteMeasure sm = oracle::measure_of(seg, (b - a).norm() / 1024);
    double worst = 0;
    for (int K : {6, 7}) worst = std::max(worst, run_construction(sm, K).length / (b - a).norm());
    return {finite && variation <= kChatVariation && worst <= kSegmentFactor,
            fmt("circle %svariation %.3g (limit %.2f); segment H1/length max %.4g at K=6,7 (limit %.2f)", text.c_str(), variation,
                kChatVariation, worst, kSegmentFactor)};
}

// Truncated sum of beta*_2^2 diam Q over cubes whose triples carry mass.
double truncated_star_sum(BetaEngine& engine, int k_lo, int k_hi) {
    double s = 0;
    for (int k = k_lo; k <= k_hi; ++k)
        for (const CellGroup& g : engine.measure().scale(k).triples) {
            double b = engine.multi(g.cube, 2.0, Variant::Star()).value;
            s += b * b * g.cube.diam();
        }
    return s;
}

// 7. Square sums over five curves, normalized by length.
Outcome tsp_necessity() {
    Timer timer;
    std::vector<std::pair<std::string, PointList>> curves{
        {"segment", parametric([](double t) { return pt(0.1 + 0.8 * t, 0.2 + 0.4 * t); })},
        {"arc", parametric([](double t) { return pt(0.5 + 0.4 * std::cos(M_PI * t), 0.3 + 0.4 * std::sin(M_PI * t)); })},
        {"polyline", PointList{pt(0.1, 0.1), pt(0.5, 0.15), pt(0.45, 0.6), pt(0.9, 0.7)}},
        {"spiral", parametric([](double t) {
             double r = 0.1 + 0.3 * t, a = 3.0 * M_PI * t;
             return pt(0.5 + r * std::cos(a), 0.5 + r * std::sin(a));
         })},
        {"graph", parametric([](double t) {
             double x = 0.1 + 0.8 * t;
             return pt(x, 0.5 + 0.1 * std::abs(std::fmod(8 * t, 2.0) - 1.0));
         })}};
    const int k_lo = 0, K = 5;
    bool bounded = true, stable = true;
    std::string text;
    for (const auto& [name, poly] : curves) {
        double L = 0;
        DiscreteMeasure mu = sample_curve(poly, 512, &L);
        BetaEngine engine(mu);
        double s0 = truncated_star_sum(engine, k_lo, K) / L;
        double s1 = truncated_star_sum(engine, k_lo, K + 1) / L;
        bounded = bounded && s0 <= kTspBound && s1 <= kTspBound;
        double change = s0 > 0 ? rel_gap(s1, s0) : (s1 > 0 ? INFINITY : 0.0);
        stable = stable && change <= kTspStability;
        text += fmt("%s %.3g -> %.3g; ", name.c_str(), s0, s1);
    }
    return {bounded && stable, fmt("S/L at K=%d -> %d: %sbound %.1f %s, refinement within %.0f%% %s, %.1f s", K, K + 1, text.c_str(),
                                   kTspBound, bounded ? "holds" : "fails", 100 * kTspStability, stable ? "holds" : "fails",
                                   timer.seconds())};
}

// Mean truncated tilde Jones sum over the construction points of a Cantor depth.
double cantor_mean_tilde(int depth, bool use_oracle) {
    DiscreteMeasure mu = oracle::measure_of(oracle::four_corner_cantor(depth), std::pow(0.25, depth));
    BetaEngine engine(mu);
    const int k_max = 2 * depth;
    double total = 0;
    for (int i = 0; i < mu.size(); ++i) {
        const Point x = mu.point(i);
        if (!use_oracle) {
            total += jones_at(engine, x, 2.0, k_max, JonesVariant{JonesVariant::tilde, 0}).sum;
            continue;
        }
        for (int k = 0; k <= k_max; ++k) {
            DyadicCube q = cube_at(x, k);
            Box t = triple(q);
            PointList pts;
            std::vector<double> w;
            for (int a = 0; a < mu.size(); ++a)
                if (t.contains(mu.point(a))) {
                    pts.push_back(mu.point(a));
                    w.push_back(mu.weight(a));
                }
            total += oracle::l2_best_mean_sq(pts, w) / (t.diam() * t.diam()) * q.diam() / mu.mass(q);
        }
    }
    return total / mu.size();
}

// 8. Tilde Jones growth on the four-corner Cantor set.
Outcome cantor_divergence() {
    Timer timer;
    double o3 = cantor_mean_tilde(3, true), o4 = cantor_mean_tilde(4, true);
    double inc = o4 - o3;
    double j3 = cantor_mean_tilde(3, false), j4 = cantor_mean_tilde(4, false), j5 = cantor_mean_tilde(5, false);
    bool calibrated = inc > 0 && rel_gap(j4 - j3, inc) <= 1e-9;
    double secs = timer.seconds();
    return {calibrated && j5 - j4 >= kCantorIncrementFloor * inc && secs < 60.0,
            fmt("mean J~ at depths 3/4/5 = %.6g / %.6g / %.6g; oracle increment 3->4 %.6g, library %.6g; 4->5 %.6g (floor %.2f x), "
                "%.1f s",
                j3, j4, j5, inc, j4 - j3, j5 - j4, kCantorIncrementFloor, secs)};
}

// 9. Localization properties on random instances, recomputed independently.
Outcome localization() {
    oracle::Rng rng(1009);
    int failures = 0, self_reported = 0, with_a = 0;
    for (int t = 0; t < 200; ++t) {
        DiscreteMeasure mu = oracle::random_measure(rng, 2, 3 + t % 40, 0, 1);
        DyadicCube top = cube_at(pt(0.5, 0.5), 0);
        std::vector<DyadicCube> members;
        const int depth = 1 + t % 6;
        for (int k = 0; k <= depth; ++k)
            for (const CellGroup& g : mu.scale(k).cells)
                if (is_ancestor_or_self(top, g.cube) && (k < 2 || oracle::uniform(rng, 0, 1) < 0.85)) {
                    if (k == 0 || std::find(members.begin(), members.end(), parent(g.cube)) != members.end())
                        members.push_back(g.cube);
                }
        CubeTree tree(top, members);
        CubeValues b;
        for (const DyadicCube& q : tree.members())
            if (oracle::uniform(rng, 0, 1) < 0.8) b[q] = std::pow(oracle::uniform(rng, 0, 1), 3) * q.diam();
        const double n_cap = std::exp(oracle::uniform(rng, -3, 3));
        const double eps = oracle::uniform(rng, 0.01, 1.0) / mu.total();
        LocalizationResult r = localize(mu, tree, b, n_cap, eps);
        self_reported += !r.ok();

        std::vector<int> a;
        for (int i = 0; i < mu.size(); ++i) {
            double s = 0;
            bool inf = false;
            for (const DyadicCube& q : tree.members())
                if (q.contains(mu.point(i)) && b.count(q) && b.at(q) > 0) {
                    double m = mu.mass(q);
                    if (m == 0) inf = true;
                    else s += b.at(q) / m;
                }
            if (top.contains(mu.point(i)) && !inf && s <= n_cap) a.push_back(i);
        }
        double mass_a = mu.mass_of(a);
        with_a += mass_a > 0;
        std::set<DyadicCube> good(r.good.begin(), r.good.end()), bad(r.bad.begin(), r.bad.end());
        bool ok = r.a == a && good.size() + bad.size() == tree.members().size();
        // (1) good cubes form a tree under the same top, or none are good.
        if (!good.empty()) {
            ok = ok && good.count(top);
            for (const DyadicCube& q : good)
                if (q != top) ok = ok && good.count(parent(q));
        }
        // (2) bad cubes have only bad children.
        for (const DyadicCube& q : bad)
            for (const DyadicCube& ch : tree.children_in_tree(q)) ok = ok && bad.count(ch);
        // (3) mass of A outside bad cubes.
        double mass_a_prime = 0;
        for (int i : a) {
            bool in_bad = false;
            for (const DyadicCube& q : bad) in_bad = in_bad || q.contains(mu.point(i));
            if (!in_bad) mass_a_prime += mu.weight(i);
        }
        ok = ok && mass_a_prime >= (1 - eps * mu.mass(top)) * mass_a * (1 - 1e-12);
        // (4) strict bound on the good sum.
        double good_sum = 0;
        for (const DyadicCube& q : good)
            if (b.count(q)) good_sum += b.at(q);
        if (mass_a > 0) ok = ok && good_sum < n_cap / eps;
        else ok = ok && good.empty();
        failures += !ok;
    }
    return {failures == 0 && self_reported == 0,
            fmt("200 instances (%d with mu(A) > 0): independent recheck failures %d, self-reported failures %d", with_a, failures,
                self_reported)};
}

// 10. Decomposition of a segment plus Cantor mixture.
Outcome decomposition() {
    Timer timer;
    const int m = 1024;
    PointList pts = oracle::four_corner_cantor(5, 0.5);
    PointList all;
    const Point a = pt(0.6, 0.25), b = pt(0.85, 0.25);
    for (int i = 0; i < m; ++i) all.push_back(a + (b - a) * ((i + 0.5) / m));
    all.insert(all.end(), pts.begin(), pts.end());
    DiscreteMeasure mu(to_matrix(all), std::vector<double>(all.size(), 0.5 / m));
    BetaEngine engine(mu);
    DecompositionReport rep = decompose_estimate(engine, DecomposeParams{});
    int agree = 0, seg_rect = 0, cantor_rect = 0;
    for (int i = 0; i < mu.size(); ++i) {
        bool truth = i < m;
        agree += rep.atoms[static_cast<std::size_t>(i)].rect == truth;
        (truth ? seg_rect : cantor_rect) += rep.atoms[static_cast<std::size_t>(i)].rect;
    }
    double agreement = static_cast<double>(agree) / mu.size();
    double secs = timer.seconds();
    return {agreement >= kLabelAgreement && rep.captured_fraction >= kCaptured && secs < 300.0,
            fmt("agreement %.3f (segment rect %d/%d, Cantor rect %d/%d), captured %.3f of rect mass by %d curves, %.1f s", agreement,
                seg_rect, m, cantor_rect, m, rep.captured_fraction, static_cast<int>(rep.curves.size()), secs)};
}

// 11. Byte-identical reports across repeats and thread counts.
Outcome determinism() {
    std::vector<cli::RunConfig> cfgs;
    auto add = [&](const std::string& cmd, const std::string& file, auto tweak) {
        cli::RunConfig c;
        c.command = cmd;
        c.input = std::string(MRT_DATA_DIR) + "/" + file;
        tweak(c);
        cfgs.push_back(c);
    };
    add("beta", "circle.csv", [](cli::RunConfig& c) { c.k_hi = 3; });
    add("jones", "circle.csv", [](cli::RunConfig& c) { c.k_max = 6; });
    add("tst", "collinear.csv", [](cli::RunConfig& c) { c.k_hi = 4; });
    add("curve", "circle.csv", [](cli::RunConfig& c) { c.depth = 5; });
    add("decompose", "collinear.csv", [](cli::RunConfig& c) { c.k_max = 5; });
    add("validate", "collinear.csv", [](cli::RunConfig&) {});
    int mismatches = 0;
    std::size_t bytes = 0;
    for (cli::RunConfig c : cfgs) {
        c.threads = 1;
        std::string one = cli::run(c).report, again = cli::run(c).report;
        c.threads = 8;
        std::string eight = cli::run(c).report;
        mismatches += (one != again) + (one != eight);
        bytes += one.size();
    }
    set_threads(0);
    return {mismatches == 0, fmt("%zu commands, %zu report bytes, %d mismatches across repeats and 1 vs 8 threads", cfgs.size(), bytes,
                                 mismatches)};
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"lerman inequality", lerman},
    {"beta oracle agreement", beta_oracle},
    {"range and monotonicity", monotonicity},
    {"zero-beta flatness", flatness},
    {"curve construction soundness", soundness},
    {"length bound surrogate", length_bound},
    {"square-sum necessity surrogate", tsp_necessity},
    {"cantor divergence", cantor_divergence},
    {"localization", localization},
    {"decomposition estimator", decomposition},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
    const int count = static_cast<int>(std::size(kCriteria));
    int lo = 1, hi = count;
    if (argc > 1) {
        lo = hi = std::atoi(argv[1]);
        if (lo < 1 || lo > count) {
            std::fprintf(stderr, "usage: %s [criterion 1..%d]\n", argv[0], count);
            return 2;
        }
    }
    int failed = 0;
    for (int i = lo; i <= hi; ++i) {
        const Criterion& c = kCriteria[i - 1];
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %02d %s  %s: %s\n", i, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}

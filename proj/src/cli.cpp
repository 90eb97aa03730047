#include "mrt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrt/beta.hpp"
#include "mrt/curve.hpp"
#include "mrt/error.hpp"
#include "mrt/jones.hpp"
#include "mrt/nets.hpp"
#include "mrt/parallel.hpp"
#include "mrt/rectify.hpp"

namespace mrt::cli {

namespace {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::input: return "input";
        case ErrorKind::internal: return "internal";
    }
    return "internal";
}

Json cube_json(const DyadicCube& q) { return Json{{"k", q.k}, {"j", q.j}}; }

void check_config(const RunConfig& cfg) {
    static const std::vector<std::string> commands{"beta", "jones", "tst", "curve", "decompose", "validate"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        fail_input("unknown command '" + cfg.command + "'");
    if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) fail_input("p must be a finite number >= 1");
    if (!(cfg.c > 0)) fail_input("c must be positive");
    if (cfg.k_lo > cfg.k_hi) fail_input("k_lo must not exceed k_hi");
    if (cfg.k_max < -1 || cfg.k_max > 60) fail_input("k_max must lie in [0, 60]");
    if (cfg.depth < 0 || cfg.depth > 30) fail_input("depth must lie in [0, 30]");
    if (!(cfg.cstar > 1)) fail_input("C* must exceed 1");
    if (!(cfg.epsilon > 0) || cfg.epsilon > 1.0 / 32.0) fail_input("epsilon must lie in (0, 1/32]");
    if (cfg.threads < 0) fail_input("threads must be nonnegative");
}

PointList atoms_of(const DiscreteMeasure& mu) {
    PointList pts;
    for (int i = 0; i < mu.size(); ++i) pts.push_back(mu.point(i));
    return pts;
}

Json run_beta(const RunConfig& cfg, BetaEngine& engine) {
    const DiscreteMeasure& mu = engine.measure();
    std::vector<DyadicCube> cubes;
    for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
        for (const CellGroup& g : mu.scale(k).cells) cubes.push_back(g.cube);
    std::vector<Json> rows(cubes.size());
    parallel_for(cubes.size(), [&](std::size_t i) {
        const DyadicCube& q = cubes[i];
        const CellGroup* g = mu.scale(q.k).cell(q);
        rows[i] = Json{{"cube", cube_json(q)},
                       {"mass", g ? g->mass : 0.0},
                       {"beta_triple", engine.triple_best(q, cfg.p).value},
                       {"beta_star", engine.multi(q, cfg.p, Variant::Star()).value},
                       {"beta_star_star", engine.multi(q, cfg.p, Variant::StarStar()).value},
                       {"beta_star_c", engine.multi(q, cfg.p, Variant::StarC(cfg.c)).value}};
    });
    return Json{{"cubes", rows}};
}

Json run_jones(const RunConfig& cfg, BetaEngine& engine) {
    const DiscreteMeasure& mu = engine.measure();
    const std::vector<JonesVariant> variants{{JonesVariant::star, 0.0},
                                             {JonesVariant::tilde, 0.0},
                                             {JonesVariant::star_star, 0.0},
                                             {JonesVariant::star_c, cfg.c}};
    std::vector<Json> rows(static_cast<std::size_t>(mu.size()));
    parallel_for(rows.size(), [&](std::size_t i) {
        const Point x = mu.point(static_cast<int>(i));
        const int k_max = cfg.k_max >= 0 ? cfg.k_max : default_k_max(mu, x);
        Json row{{"atom", i}, {"x", point_json(x)}, {"k_max", k_max}};
        for (const JonesVariant& v : variants) {
            JonesReport r = jones_at(engine, x, cfg.p, k_max, v);
            Json e{{"sum", r.sum}, {"divergent", r.divergent}};
            if (r.divergent_cube) e["divergent_cube"] = cube_json(*r.divergent_cube);
            row[v.name()] = std::move(e);
        }
        rows[i] = std::move(row);
    });
    return Json{{"atoms", rows}};
}

Json square_json(const SquareSum& s) { return Json{{"total", s.total}, {"cubes", s.cubes}, {"ledger_entries", s.ledger.size()}}; }

Json run_tst(const RunConfig& cfg, BetaEngine& engine) {
    const DiscreteMeasure& mu = engine.measure();
    return Json{{"beta_sq_set", square_json(beta_sq_set(atoms_of(mu), cfg.k_lo, cfg.k_hi))},
                {"s_star_star", square_json(square_sum_star_star(engine, cfg.p, cfg.k_lo, cfg.k_hi))}};
}

struct CurveRun {
    NetSequence nets;
    NetValidation validation;
    CurveConstruction construction;
};

CurveRun build_curve(const RunConfig& cfg, const DiscreteMeasure& mu) {
    CurveRun out;
    double r0 = mu.support_diam();
    if (r0 <= 0) r0 = 1.0;
    out.nets = nets_from_points(atoms_of(mu), r0, cfg.depth);
    out.validation = validate_nets(out.nets, cfg.cstar);
    if (!out.validation.ok) return out;
    out.nets.cstar = cfg.cstar;
    AlphaAssignment al = fit_alphas(out.nets);
    out.construction = construct_curve(out.nets, al, cfg.epsilon);
    return out;
}

Json nets_json(const NetValidation& v) {
    Json viol = Json::array();
    for (const NetViolation& x : v.violations)
        viol.push_back(Json{{"condition", x.condition}, {"level", x.level}, {"i", x.i}, {"j", x.j}, {"dist", x.dist}, {"bound", x.bound}});
    return Json{{"ok", v.ok}, {"min_cstar", v.min_cstar}, {"ball_ratio", v.ball_ratio}, {"violations", viol}};
}

Json soundness_json(const SoundnessReport& s) {
    return Json{{"ok", s.ok}, {"snapshots", s.snapshots}, {"failures", s.failures}};
}

Json run_curve(const RunConfig& cfg, const DiscreteMeasure& mu, int& exit_code) {
    CurveRun cr = build_curve(cfg, mu);
    if (!cr.validation.ok) {
        exit_code = 1;
        return Json{{"nets", nets_json(cr.validation)}};
    }
    Json j = curve_json(cr.construction);
    Certificate cert = length_certificate(cr.construction);
    j["certificate"] = Json{{"length", cert.length},
                            {"denominator", cert.denominator},
                            {"c_hat", cert.c_hat},
                            {"cores_disjoint", cert.cores_disjoint}};
    SoundnessReport s = verify_construction(cr.construction);
    j["soundness"] = soundness_json(s);
    j["nets"] = nets_json(cr.validation);
    if (!s.ok) exit_code = 1;
    return j;
}

Json run_decompose(const RunConfig& cfg, BetaEngine& engine) {
    DecomposeParams dp;
    dp.p = cfg.p;
    dp.c_ladder = cfg.c_ladder;
    dp.n_ladder = cfg.n_ladder;
    dp.eps_fractions = cfg.eps_ladder;
    dp.k_max = cfg.k_max >= 0 ? cfg.k_max : 8;
    dp.epsilon = cfg.epsilon;
    dp.radius_top = std::min(dp.radius_top, dp.k_max);
    DecompositionReport rep = decompose_estimate(engine, dp);
    Json atoms = Json::array();
    int rect = 0;
    for (std::size_t i = 0; i < rep.atoms.size(); ++i) {
        const AtomLabel& a = rep.atoms[i];
        rect += a.rect;
        Json row{{"atom", i},
                 {"lower_density", a.lower_density},
                 {"jones_star_c", a.jones},
                 {"label", a.rect ? "rect-candidate" : "unrect-candidate"},
                 {"captured", a.captured}};
        if (a.rect) {
            row["c"] = a.c;
        } else {
            row["reason"] = a.reason;
        }
        atoms.push_back(std::move(row));
    }
    Json curves = Json::array();
    for (const DrawResult& d : rep.curves)
        curves.push_back(Json{{"regime", d.regime},
                              {"length", d.length},
                              {"alpha_sum", d.alpha_sum},
                              {"budget", d.budget},
                              {"leaf_tolerance", d.leaf_tolerance},
                              {"max_leaf_distance", d.max_leaf_distance},
                              {"alpha_overrides", d.alpha_overrides}});
    return Json{{"parameters", Json{{"radius_top", dp.radius_top}, {"n_cap", rep.n_cap}, {"radii", rep.radii}}},
                {"rect_candidates", rect},
                {"trees", rep.trees},
                {"rect_mass", rep.rect_mass},
                {"captured_mass", rep.captured_mass},
                {"captured_fraction", rep.captured_fraction},
                {"curves", curves},
                {"atoms", atoms}};
}

Json run_validate(const RunConfig& cfg, const DiscreteMeasure& mu, int& exit_code) {
    CurveRun cr = build_curve(cfg, mu);
    Json j{{"nets", nets_json(cr.validation)}};
    bool ok = cr.validation.ok;
    if (cr.validation.ok) {
        SoundnessReport s = verify_construction(cr.construction);
        std::vector<LedgerViolation> ledger = check_ledger(cr.construction);
        Json lv = Json::array();
        for (const LedgerViolation& v : ledger) lv.push_back(v.describe());
        j["curve"] = soundness_json(s);
        j["ledger"] = Json{{"ok", ledger.empty()}, {"violations", lv}};
        ok = ok && s.ok && ledger.empty();
    }
    // Trees of all cubes with mu(3Q) > 0 below each scale-k_lo cube.
    int members = 0, trees = 0;
    for (const CellGroup& top : mu.scale(cfg.k_lo).triples) {
        std::vector<DyadicCube> m;
        for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
            for (const CellGroup& g : mu.scale(k).triples)
                if (is_ancestor_or_self(top.cube, g.cube)) m.push_back(g.cube);
        CubeTree t(top.cube, m);
        members += static_cast<int>(t.members().size());
        ++trees;
    }
    j["trees"] = Json{{"ok", true}, {"count", trees}, {"members", members}};
    j["ok"] = ok;
    if (!ok) exit_code = 1;
    return j;
}

}  // namespace

Json config_json(const RunConfig& cfg) {
    return Json{{"command", cfg.command}, {"input", cfg.input},       {"format", cfg.format},
                {"p", cfg.p},             {"c", cfg.c},               {"c_ladder", cfg.c_ladder},
                {"n_ladder", cfg.n_ladder}, {"eps_ladder", cfg.eps_ladder}, {"k_max", cfg.k_max},
                {"k_lo", cfg.k_lo},       {"k_hi", cfg.k_hi},         {"depth", cfg.depth},
                {"cstar", cfg.cstar},     {"epsilon", cfg.epsilon}};
}

RunResult run(const RunConfig& cfg, const DiscreteMeasure& mu) {
    RunResult res;
    Json report;
    report["config"] = config_json(cfg);
    try {
        check_config(cfg);
        if (cfg.threads > 0) set_threads(cfg.threads);
        report["measure"] = Json{{"dim", mu.dim()}, {"atoms", mu.size()}, {"total_mass", mu.total()}};
        if (cfg.p > 2.0) report["warnings"] = Json::array({"p > 2 lies outside the range covered by the characterization"});
        BetaEngine engine(mu);
        Json body;
        if (cfg.command == "beta") body = run_beta(cfg, engine);
        if (cfg.command == "jones") body = run_jones(cfg, engine);
        if (cfg.command == "tst") body = run_tst(cfg, engine);
        if (cfg.command == "curve") body = run_curve(cfg, mu, res.exit_code);
        if (cfg.command == "decompose") body = run_decompose(cfg, engine);
        if (cfg.command == "validate") body = run_validate(cfg, mu, res.exit_code);
        report["result"] = std::move(body);
    } catch (const Error& e) {
        res.exit_code = static_cast<int>(e.kind());
        report["error"] = Json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
    } catch (const std::exception& e) {
        res.exit_code = static_cast<int>(ErrorKind::internal);
        report["error"] = Json{{"kind", "internal"}, {"message", e.what()}};
    }
    res.report = dump_json(report);
    return res;
}

RunResult run(const RunConfig& cfg) {
    try {
        DiscreteMeasure mu = load_measure(cfg.input, cfg.format);
        return run(cfg, mu);
    } catch (const Error& e) {
        Json report;
        report["config"] = config_json(cfg);
        report["error"] = Json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
        return RunResult{static_cast<int>(e.kind()), dump_json(report)};
    }
}

}  // namespace mrt::cli

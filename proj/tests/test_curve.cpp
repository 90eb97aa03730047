#include <gtest/gtest.h>

#include "mrt/curve.hpp"
#include "mrt/error.hpp"
#include "mrt/rectify.hpp"
#include "oracles.hpp"

using namespace mrt;
using oracle::pt;

namespace {

PointList collinear(int m) {
    PointList E;
    for (int i = 0; i < m; ++i) E.push_back(pt(i / double(m), 0.5 * i / double(m) + 0.1));
    return E;
}

CurveConstruction build(const PointList& E, int K) {
    PointList copy = E;
    NetSequence nets = nets_from_points(copy, hausdorff(E, {E[0]}) * 1.01, K);
    return construct_curve(nets, fit_alphas(nets));
}

}  // namespace

TEST(Curve, CollinearNetGivesTheSegment) {
    PointList E = collinear(32);
    CurveConstruction c = build(E, 6);
    SoundnessReport s = verify_construction(c);
    EXPECT_TRUE(s.ok) << (s.failures.empty() ? "" : s.failures[0]);
    double chord = (E.front() - E.back()).norm();
    EXPECT_NEAR(c.acct.dedup_length, chord, 1e-9);
    Certificate cert = length_certificate(c);
    EXPECT_TRUE(cert.cores_disjoint);
    EXPECT_NEAR(cert.c_hat, chord / c.nets.unit(c.k0), 1e-9);
    EXPECT_LE(c.acct.alpha_sum, 1e-20);
}

TEST(Curve, RandomNetsAreSound) {
    oracle::Rng rng(61);
    for (int t = 0; t < 8; ++t) {
        PointList E;
        for (int i = 0; i < 30; ++i) E.push_back(pt(oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 0.2 * (t % 3))));
        CurveConstruction c = build(E, 5);
        SoundnessReport s = verify_construction(c);
        EXPECT_TRUE(s.ok) << (s.failures.empty() ? "" : s.failures[0]);
        EXPECT_NO_THROW(length_certificate(c));
        Connectivity conn = verify_connected(c.graph, c.graph.last());
        EXPECT_TRUE(conn.connected);
        for (const Point& v : c.nets.levels.back()) EXPECT_LE(distance_to_curve(c, v), 1e-12);
    }
}

TEST(Curve, ExtensionChainsAreShort) {
    oracle::Rng rng(62);
    PointList E;
    for (int i = 0; i < 60; ++i) E.push_back(pt(oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)));
    NetSequence nets = nets_from_points(E, 1.5, 5);
    for (int k = 0; k < 5; ++k)
        for (int v = 0; v < static_cast<int>(nets.levels[static_cast<std::size_t>(k)].size()); ++v) {
            ExtensionChain ch = extension_chain(nets, k, v);
            EXPECT_EQ(static_cast<int>(ch.refs.size()), 5 - k + 1);
            EXPECT_LE(ch.length, 2 * nets.cstar * nets.unit(k) + 1e-12);
            double len = 0;
            for (std::size_t i = 1; i < ch.points.size(); ++i) len += (ch.points[i] - ch.points[i - 1]).norm();
            EXPECT_NEAR(len, ch.length, 1e-12);
        }
}

TEST(Curve, LengthDeduplicatesOverlaps) {
    std::vector<std::pair<Point, Point>> segs{{pt(0, 0), pt(1, 0)}, {pt(0.5, 0), pt(2, 0)}};
    CurveLength l = curve_length(segs);
    EXPECT_NEAR(l.dedup, 2.0, 1e-12);
    EXPECT_NEAR(l.naive, 2.5, 1e-12);
    segs.push_back({pt(2, 0), pt(1, 0)});
    segs.push_back({pt(0, 1), pt(0, 2)});
    l = curve_length(segs);
    EXPECT_NEAR(l.dedup, 3.0, 1e-12);
    EXPECT_NEAR(l.naive, 4.5, 1e-12);
    // Parallel but distinct lines are not merged.
    EXPECT_NEAR(curve_length({{pt(0, 0), pt(1, 1)}, {pt(0, 0.1), pt(1, 1.1)}}).dedup, 2 * std::sqrt(2.0), 1e-12);
}

TEST(Curve, DisconnectedSnapshotIsDetected) {
    CurveGraph g;
    g.dim = 2;
    g.vertices = {pt(0, 0), pt(1, 0), pt(3, 0), pt(4, 0), pt(1, 0)};
    g.segments = {{0, 1}, {2, 3}};
    Snapshot s{0, {0, 1}, {}};
    Connectivity c = verify_connected(g, s);
    EXPECT_FALSE(c.connected);
    EXPECT_EQ(c.components, 2);
    s.points = {4};
    EXPECT_FALSE(verify_connected(g, s).connected);
    g.vertices[2] = pt(0.5, 0);
    EXPECT_TRUE(verify_connected(g, s).connected);
}

TEST(Curve, InputErrors) {
    NetSequence nets = nets_from_points(collinear(8), 1.2, 3);
    AlphaAssignment a = fit_alphas(nets);
    EXPECT_THROW(construct_curve(nets, a, 0.05), Error);
    EXPECT_THROW(construct_curve(nets, a, 0.0), Error);
    AlphaAssignment bad = a;
    bad.lines[2][0] = make_line(pt(0, 5), pt(1, 0));
    try {
        construct_curve(nets, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::input);
        EXPECT_NE(std::string(e.what()).find("(2,0)"), std::string::npos);
    }
    NetSequence empty = nets;
    empty.levels[1].clear();
    EXPECT_THROW(construct_curve(empty, a), Error);
}

TEST(Curve, TamperedLedgerFailsTheCertificate) {
    CurveConstruction c = build(collinear(32), 6);
    for (auto& s : c.phantom) s.clear();
    EXPECT_FALSE(check_ledger(c).empty());
    try {
        length_certificate(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::validation);
        EXPECT_NE(std::string(e.what()).find("stage"), std::string::npos);
    }
}

TEST(Curve, SinglePointNet) {
    NetSequence nets = nets_from_points({pt(0.2, 0.2)}, 1.0, 3);
    CurveConstruction c = construct_curve(nets, fit_alphas(nets));
    EXPECT_EQ(c.k0, -1);
    EXPECT_EQ(c.acct.dedup_length, 0.0);
    EXPECT_TRUE(verify_construction(c).ok);
}

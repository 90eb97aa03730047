#include <gtest/gtest.h>

#include "mrt/dyadic.hpp"
#include "mrt/error.hpp"
#include "oracles.hpp"

using namespace mrt;
using oracle::pt;

TEST(Dyadic, CubesAreHalfOpen) {
    DyadicCube q = cube_at(pt(0.5, 0.25), 1);
    EXPECT_EQ(q.j, (std::vector<std::int64_t>{1, 0}));
    EXPECT_TRUE(q.contains(pt(0.5, 0.0)));
    EXPECT_FALSE(q.contains(pt(1.0, 0.0)));
    DyadicCube neg = cube_at(pt(-0.1, -1.0), 2);
    EXPECT_EQ(neg.j, (std::vector<std::int64_t>{-1, -4}));
    EXPECT_DOUBLE_EQ(neg.side(), 0.25);
    EXPECT_DOUBLE_EQ(neg.diam(), 0.25 * std::sqrt(2.0));
}

TEST(Dyadic, ParentChildrenAncestor) {
    DyadicCube q = cube_at(pt(-0.3, 0.7), 5);
    for (const DyadicCube& c : children(q)) {
        EXPECT_EQ(parent(c), q);
        EXPECT_TRUE(is_ancestor_or_self(q, c));
    }
    EXPECT_EQ(children(q).size(), 4u);
    EXPECT_EQ(ancestor(q, 2), cube_at(pt(-0.3, 0.7), 2));
    EXPECT_FALSE(is_ancestor_or_self(children(q)[0], q));
}

TEST(Dyadic, TripleIsClosedAndCentered) {
    DyadicCube q = cube_at(pt(0.1, 0.1), 2);
    Box b = triple(q);
    EXPECT_TRUE(b.contains(pt(-0.25, 0.5)));
    EXPECT_FALSE(b.contains(pt(-0.26, 0.5)));
    EXPECT_DOUBLE_EQ(b.diam(), 0.75 * std::sqrt(2.0));
}

// Per-axis count of nearby indices from the floating definition.
static std::pair<long long, long long> axis_counts(long long jq, int n) {
    const double h = 1.0, half = 800.0 * std::sqrt(static_cast<double>(n));
    const double c = (jq + 0.5) * h;
    long long a = 0, b = 0;
    for (long long j = jq - 3000; j <= jq + 3000; ++j) {
        if ((j - 1) * h >= c - half && (j + 2) * h <= c + half) ++a;
        double H = 2 * h;
        if ((j - 1) * H >= c - half && (j + 2) * H <= c + half) ++b;
    }
    return {a, b};
}

TEST(Dyadic, NearbyCountMatchesEnumerationInThePlane) {
    auto [a, b] = axis_counts(0, 2);
    EXPECT_EQ(count_nearby_cubes(cube_at(pt(0.1, 0.2), 0)), static_cast<std::uint64_t>(a * a + b * b));
    EXPECT_EQ(count_nearby_cubes(cube_at(pt(0.1, 0.2), 0)), 6375465u);
}

TEST(Dyadic, NearbyCountInSpaceAndEnumerationLimit) {
    Point x = Point::Zero(3);
    DyadicCube q = cube_at(x, 3);
    auto [a, b] = axis_counts(0, 3);
    EXPECT_EQ(count_nearby_cubes(q), static_cast<std::uint64_t>(a * a * a + b * b * b));
    EXPECT_THROW(nearby_cubes(q), Error);
}

TEST(Dyadic, NearbyPredicateMatchesWindows) {
    DyadicCube q = cube_at(pt(0.3, -0.6), 4);
    auto [w0, w1] = nearby_windows(q);
    EXPECT_EQ(w0.count() + w1.count(), count_nearby_cubes(q));
    oracle::Rng rng(3);
    for (int t = 0; t < 2000; ++t) {
        int s = t % 2 ? q.k : q.k - 1;
        DyadicCube r{s, {q.j[0] / (s == q.k ? 1 : 2) + std::uniform_int_distribution<long long>(-1200, 1200)(rng),
                         q.j[1] / (s == q.k ? 1 : 2) + std::uniform_int_distribution<long long>(-1200, 1200)(rng)}};
        const IndexWindow& w = s == q.k ? w0 : w1;
        bool in = true;
        for (int d = 0; d < 2; ++d) in = in && r.j[d] >= w.range[d].first && r.j[d] <= w.range[d].second;
        EXPECT_EQ(is_nearby(q, r), in);
        // Floating definition: 3R inside the closed 1600 sqrt 2 Q box.
        Box big = dilate(q, 1600.0 * std::sqrt(2.0));
        Box tr = triple(r);
        bool geo = true;
        for (int d = 0; d < 2; ++d)
            geo = geo && tr.center[d] - tr.half >= big.center[d] - big.half && tr.center[d] + tr.half <= big.center[d] + big.half;
        EXPECT_EQ(in, geo);
    }
    EXPECT_FALSE(is_nearby(q, cube_at(pt(0.3, -0.6), q.k + 1)));
}

TEST(Dyadic, ChainIsNested) {
    auto chain = chain_of_cubes(pt(0.37, 0.81), 7);
    ASSERT_EQ(chain.size(), 8u);
    for (std::size_t i = 1; i < chain.size(); ++i) EXPECT_EQ(parent(chain[i]), chain[i - 1]);
}

TEST(Dyadic, TreeValidation) {
    DyadicCube top = cube_at(pt(0.1, 0.1), 0);
    auto kids = children(top);
    CubeTree t(top, {top, kids[0], kids[1], children(kids[0])[3]});
    EXPECT_EQ(t.deepest_scale(), 2);
    EXPECT_EQ(t.children_in_tree(top).size(), 2u);
    EXPECT_THROW(CubeTree(top, {kids[0]}), Error);
    EXPECT_THROW(CubeTree(top, {top, children(kids[0])[3]}), Error);
    EXPECT_THROW(CubeTree(top, {top, cube_at(pt(3, 3), 1)}), Error);
    LeafApprox lf = leaves(t, 2);
    EXPECT_EQ(lf.cubes.size(), 1u);
    EXPECT_DOUBLE_EQ(lf.error, 0.25 * std::sqrt(2.0));
}

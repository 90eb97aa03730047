#include "mrt/curve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "mrt/error.hpp"

namespace mrt {

namespace {

bool lex_less(const Point& a, const Point& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// Nearest point of `level` to x; ties go to the lexicographically smallest point.
int nearest_index(const Point& x, const PointList& level) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < level.size(); ++i) {
        double d = (x - level[i]).norm();
        if (d < bd || (d == bd && best >= 0 && lex_less(level[i], level[static_cast<std::size_t>(best)]))) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

const Point& at(const NetSequence& nets, int k, int v) {
    return nets.levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
}

std::vector<int> ball_indices(const PointList& level, const Point& c, double r) {
    std::vector<int> out;
    for (std::size_t i = 0; i < level.size(); ++i)
        if ((level[i] - c).norm() <= r) out.push_back(static_cast<int>(i));
    return out;
}

std::string ref_str(VertexRef r) { return "(" + std::to_string(r.k) + "," + std::to_string(r.v) + ")"; }

}  // namespace

ExtensionChain extension_chain(const NetSequence& nets, int k, int v) {
    if (k < 0 || k > nets.K() || v < 0 || v >= static_cast<int>(nets.levels[static_cast<std::size_t>(k)].size()))
        fail_input("extension chain of a vertex outside the nets");
    ExtensionChain ch;
    ch.refs.push_back({k, v});
    ch.points.push_back(at(nets, k, v));
    for (int j = k; j < nets.K(); ++j) {
        int nxt = nearest_index(ch.points.back(), nets.levels[static_cast<std::size_t>(j) + 1]);
        check(nxt >= 0, "empty net level");
        ch.refs.push_back({j + 1, nxt});
        ch.length += (at(nets, j + 1, nxt) - ch.points.back()).norm();
        ch.points.push_back(at(nets, j + 1, nxt));
    }
    return ch;
}

namespace {

class Builder {
public:
    Builder(const NetSequence& nets, const AlphaAssignment& al, double eps, CurveConstruction& c)
        : nets_(nets), al_(al), eps_(eps), c_(c) {}

    void run();

private:
    double unit(int k) const { return nets_.unit(k); }
    int vid(int k, int v) const { return c_.vertex_id[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]; }
    int add_segment(int a, int b, SegmentKind kind, int gen, int bridge);
    int add_bridge(int k, int a, int b, bool t2);
    void add_edge(int k, int a, int b);
    void add_index_set(int bridge);
    void stage_initial();
    void stage(int k);
    void close_stage(int k);

    const NetSequence& nets_;
    const AlphaAssignment& al_;
    double eps_;
    CurveConstruction& c_;
    std::map<std::tuple<int, int, int>, int> bridge_key_;
    std::vector<int> frozen_;
    std::set<std::pair<int, int>> stage_edges_;
    std::vector<int> stage_edge_segments_;
    std::vector<int> stage_points_;
    std::set<VertexRef> ledger_;
    StageStats stats_;
};

int Builder::add_segment(int a, int b, SegmentKind kind, int gen, int bridge) {
    if (a == b) return -1;
    c_.graph.segments.push_back(CurveSegment{a, b, kind, gen, bridge});
    return static_cast<int>(c_.graph.segments.size()) - 1;
}

void Builder::add_edge(int k, int a, int b) {
    if (a > b) std::swap(a, b);
    if (!stage_edges_.insert({a, b}).second) return;
    double d = (at(nets_, k, a) - at(nets_, k, b)).norm();
    if (!(d < 30.0 * nets_.cstar * unit(k)))
        fail_internal("edge at stage " + std::to_string(k) + " violates the 30 C* 2^-k window");
    int s = add_segment(vid(k, a), vid(k, b), SegmentKind::edge, k, -1);
    if (s >= 0) stage_edge_segments_.push_back(s);
    ++stats_.edges;
}

int Builder::add_bridge(int k, int a, int b, bool t2) {
    if (a > b) std::swap(a, b);
    auto key = std::make_tuple(k, a, b);
    auto it = bridge_key_.find(key);
    int id;
    if (it != bridge_key_.end()) {
        id = it->second;
    } else {
        const double u = nets_.cstar * unit(k);
        double d = (at(nets_, k, a) - at(nets_, k, b)).norm();
        if (!(d >= 30.0 * u)) fail_internal("bridge at stage " + std::to_string(k) + " shorter than 30 C* 2^-k");
        if (k > c_.k0 && !(d < 130.0 * u))
            fail_internal("bridge at stage " + std::to_string(k) + " longer than 130 C* 2^-k");
        BridgeRecord br;
        br.gen = k;
        br.v1 = {k, a};
        br.v2 = {k, b};
        br.ext1 = extension_chain(nets_, k, a);
        br.ext2 = extension_chain(nets_, k, b);
        std::set<VertexRef> idx(br.ext1.refs.begin(), br.ext1.refs.end());
        idx.insert(br.ext2.refs.begin(), br.ext2.refs.end());
        br.index_set.assign(idx.begin(), idx.end());
        const Point& pa = at(nets_, k, a);
        const Point& pb = at(nets_, k, b);
        Point mid = 0.5 * (pa + pb);
        br.core_a = mid - 0.45 * (pb - pa);
        br.core_b = mid + 0.45 * (pb - pa);
        id = static_cast<int>(c_.bridges.size());
        auto chain_segments = [&](const ExtensionChain& ch) {
            for (std::size_t i = 0; i + 1 < ch.refs.size(); ++i) {
                int s = add_segment(vid(ch.refs[i].k, ch.refs[i].v), vid(ch.refs[i + 1].k, ch.refs[i + 1].v),
                                    SegmentKind::bridge, k, id);
                if (s >= 0) br.segments.push_back(s);
            }
        };
        int s = add_segment(vid(k, a), vid(k, b), SegmentKind::bridge, k, id);
        if (s >= 0) br.segments.push_back(s);
        chain_segments(br.ext1);
        chain_segments(br.ext2);
        br.length = d + br.ext1.length + br.ext2.length;
        frozen_.insert(frozen_.end(), br.segments.begin(), br.segments.end());
        c_.bridges.push_back(std::move(br));
        bridge_key_.emplace(key, id);
        ++stats_.bridges;
    }
    BridgeRecord& br = c_.bridges[static_cast<std::size_t>(id)];
    if (t2) {
        double d = (at(nets_, k, a) - at(nets_, k, b)).norm();
        if (!(d < 64.0 * nets_.cstar * unit(k)))
            fail_internal("terminal bridge at stage " + std::to_string(k) + " longer than 64 C* 2^-k");
        if (!br.from_t2) {
            br.from_t2 = true;
            c_.t2_bridges.push_back(id);
        }
    }
    return id;
}

void Builder::add_index_set(int bridge) {
    const auto& idx = c_.bridges[static_cast<std::size_t>(bridge)].index_set;
    ledger_.insert(idx.begin(), idx.end());
}

void Builder::close_stage(int k) {
    Snapshot s;
    s.k = k;
    s.segments = stage_edge_segments_;
    s.segments.insert(s.segments.end(), frozen_.begin(), frozen_.end());
    std::sort(s.segments.begin(), s.segments.end());
    s.points = stage_points_;
    std::sort(s.points.begin(), s.points.end());
    s.points.erase(std::unique(s.points.begin(), s.points.end()), s.points.end());
    c_.graph.snapshots.push_back(std::move(s));
    c_.phantom[static_cast<std::size_t>(k)] = ledger_;
    stats_.k = k;
    c_.stages.push_back(stats_);
}

void Builder::stage_initial() {
    const int k = c_.k0;
    const PointList& lv = nets_.levels[static_cast<std::size_t>(k)];
    const double thr = 30.0 * nets_.cstar * unit(k);
    for (std::size_t v = 0; v < lv.size(); ++v) ledger_.insert({k, static_cast<int>(v)});
    for (std::size_t a = 0; a < lv.size(); ++a)
        for (std::size_t b = a + 1; b < lv.size(); ++b) {
            if ((lv[a] - lv[b]).norm() < thr) {
                add_edge(k, static_cast<int>(a), static_cast<int>(b));
            } else {
                add_index_set(add_bridge(k, static_cast<int>(a), static_cast<int>(b), false));
            }
        }
    close_stage(k);
}

void Builder::stage(int k) {
    stage_edges_.clear();
    stage_edge_segments_.clear();
    stage_points_.clear();
    stats_ = StageStats{};
    for (auto it = ledger_.begin(); it != ledger_.end();) {
        if (it->k == k - 1 || it->k == k) {
            it = ledger_.erase(it);
        } else {
            ++it;
        }
    }
    const PointList& lv = nets_.levels[static_cast<std::size_t>(k)];
    const PointList& prev = nets_.levels[static_cast<std::size_t>(k) - 1];
    const double u = nets_.cstar * unit(k);
    for (std::size_t vi = 0; vi < lv.size(); ++vi) {
        const int v = static_cast<int>(vi);
        const Point& pv = lv[vi];
        std::vector<int> nb = ball_indices(lv, pv, 65.0 * u);
        if (al_.alpha[static_cast<std::size_t>(k)][vi] >= eps_) {
            ++stats_.case1;
            for (int a : nb) ledger_.insert({k, a});
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j) {
                    if ((lv[static_cast<std::size_t>(nb[i])] - lv[static_cast<std::size_t>(nb[j])]).norm() < 30.0 * u) {
                        add_edge(k, nb[i], nb[j]);
                    } else {
                        add_index_set(add_bridge(k, nb[i], nb[j], false));
                    }
                }
            continue;
        }
        ++stats_.case2;
        const Line& l = al_.lines[static_cast<std::size_t>(k)][vi];
        auto by_projection = [&](std::vector<int>& ids, const PointList& pts) {
            std::vector<double> t(ids.size());
            for (std::size_t i = 0; i < ids.size(); ++i) t[i] = project(pts[static_cast<std::size_t>(ids[i])], l);
            std::vector<std::size_t> ord(ids.size());
            std::iota(ord.begin(), ord.end(), 0);
            std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
            std::vector<int> out;
            for (std::size_t o : ord) out.push_back(ids[o]);
            ids = std::move(out);
        };
        by_projection(nb, lv);
        const int i0 = static_cast<int>(std::find(nb.begin(), nb.end(), v) - nb.begin());
        const int wv = nearest_index(pv, prev);
        std::vector<int> wl = ball_indices(prev, pv, 65.0 * u);
        by_projection(wl, prev);
        const int p0 = static_cast<int>(std::find(wl.begin(), wl.end(), wv) - wl.begin());
        if (p0 == static_cast<int>(wl.size())) fail_input("nearest previous vertex lies outside the 65 C* 2^-k ball");
        for (int side : {+1, -1}) {
            int i = i0, t = 0;
            while (i + side >= 0 && i + side < static_cast<int>(nb.size())) {
                const Point& cur = lv[static_cast<std::size_t>(nb[static_cast<std::size_t>(i)])];
                const Point& nxt = lv[static_cast<std::size_t>(nb[static_cast<std::size_t>(i + side)])];
                if (!((nxt - cur).norm() < 30.0 * u) || !((nxt - pv).norm() <= 30.0 * u)) break;
                add_edge(k, nb[static_cast<std::size_t>(i)], nb[static_cast<std::size_t>(i + side)]);
                i += side;
                ++t;
            }
            if (t >= 1) {
                ++stats_.nonterminal;
                continue;
            }
            // Terminal: inspect the previous generation from w_v outward in this direction.
            std::vector<int> w;
            for (int q = p0; q >= 0 && q < static_cast<int>(wl.size()); q += side) w.push_back(wl[static_cast<std::size_t>(q)]);
            const int s = static_cast<int>(w.size()) - 1;
            int r = 0;
            for (int q = 0; q <= s; ++q)
                if ((prev[static_cast<std::size_t>(w[static_cast<std::size_t>(q)])] - pv).norm() <= 2.0 * u) r = q;
            bool t1 = r == s ||
                      !((prev[static_cast<std::size_t>(w[static_cast<std::size_t>(r)])] -
                         prev[static_cast<std::size_t>(w[static_cast<std::size_t>(r + 1)])])
                            .norm() < 60.0 * u);
            if (t1) {
                ++stats_.t1;
                stage_points_.push_back(vid(k, v));
                ledger_.insert({k, v});
                continue;
            }
            ++stats_.t2;
            if (i0 + side < 0 || i0 + side >= static_cast<int>(nb.size()))
                fail_input("terminal case T2 at (" + std::to_string(k) + "," + std::to_string(v) +
                           ") has no neighbor; the forward proximity condition fails");
            add_index_set(add_bridge(k, v, nb[static_cast<std::size_t>(i0 + side)], true));
        }
    }
    close_stage(k);
}

void Builder::run() {
    const int K = nets_.K();
    c_.vertex_id.resize(nets_.levels.size());
    std::map<std::vector<double>, int> ids;
    for (int k = 0; k <= K; ++k)
        for (const Point& p : nets_.levels[static_cast<std::size_t>(k)]) {
            std::vector<double> key(p.data(), p.data() + p.size());
            auto [it, inserted] = ids.emplace(key, static_cast<int>(c_.graph.vertices.size()));
            if (inserted) c_.graph.vertices.push_back(p);
            c_.vertex_id[static_cast<std::size_t>(k)].push_back(it->second);
        }
    c_.phantom.assign(nets_.levels.size(), {});
    if (c_.k0 < 0) {
        Snapshot s;
        s.k = K;
        s.points.push_back(vid(K, 0));
        c_.graph.snapshots.push_back(s);
        return;
    }
    stage_initial();
    for (int k = c_.k0 + 1; k <= K; ++k) stage(k);
}

}  // namespace

CurveConstruction construct_curve(const NetSequence& nets, const AlphaAssignment& alphas, double epsilon) {
    if (!(epsilon > 0) || epsilon > 1.0 / 32.0) fail_input("epsilon must lie in (0, 1/32]");
    if (nets.levels.empty()) fail_input("curve construction needs at least one net level");
    for (const auto& lv : nets.levels)
        if (lv.empty()) fail_input("curve construction needs nonempty net levels");
    CurveConstruction c;
    c.nets = nets;
    c.alphas = alphas;
    c.epsilon = epsilon;
    c.k0 = nets.k0();
    c.graph.dim = nets.dim();
    if (alphas.alpha.size() != nets.levels.size() || alphas.lines.size() != nets.levels.size())
        fail_input("alpha assignment does not match the net levels");
    for (int k = std::max(c.k0 + 1, 1); c.k0 >= 0 && k <= nets.K(); ++k) {
        auto kk = static_cast<std::size_t>(k);
        if (alphas.alpha[kk].size() != nets.levels[kk].size()) fail_input("alpha assignment does not match the net levels");
        for (std::size_t v = 0; v < nets.levels[kk].size(); ++v) {
            double need = alpha_for_line(nets, k, static_cast<int>(v), alphas.lines[kk][v]);
            if (need > alphas.alpha[kk][v] * (1.0 + 1e-9) + 1e-12)
                fail_input("alpha recheck failure at (" + std::to_string(k) + "," + std::to_string(v) + ")");
        }
    }
    Builder(nets, alphas, epsilon, c).run();

    CurveAccounting& a = c.acct;
    const Snapshot& last = c.graph.last();
    for (int s : last.segments) {
        const CurveSegment& seg = c.graph.segments[static_cast<std::size_t>(s)];
        if (seg.kind == SegmentKind::edge)
            a.edge_sum += (c.graph.vertices[static_cast<std::size_t>(seg.a)] - c.graph.vertices[static_cast<std::size_t>(seg.b)]).norm();
    }
    for (const BridgeRecord& b : c.bridges) a.bridge_sum += b.length;
    if (c.k0 >= 0) {
        for (const VertexRef& r : c.phantom.back()) a.phantom_sum += 3.0 * nets.cstar * nets.unit(r.k);
        for (int k = c.k0 + 1; k <= nets.K(); ++k)
            for (double al : alphas.alpha[static_cast<std::size_t>(k)]) a.alpha_sum += al * al * nets.unit(k);
    }
    for (int id : c.t2_bridges) {
        const BridgeRecord& b = c.bridges[static_cast<std::size_t>(id)];
        a.core_sum += (b.core_b - b.core_a).norm();
    }
    CurveLength len = curve_length(c.graph, last.segments);
    a.naive_length = len.naive;
    a.dedup_length = len.dedup;
    a.limit_error = 2.0 * nets.cstar * nets.unit(nets.K());
    return c;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

}  // namespace

Connectivity verify_connected(const CurveGraph& g, const Snapshot& s, double tol) {
    Connectivity out;
    const std::size_t ns = s.segments.size();
    const std::size_t ne = ns + s.points.size();
    if (ne == 0) {
        out.connected = false;
        return out;
    }
    UnionFind uf(ne);
    std::unordered_map<int, int> first_touch;
    auto touch = [&](int vertex, int element) {
        auto [it, inserted] = first_touch.emplace(vertex, element);
        if (!inserted && uf.unite(it->second, element)) out.spanning.emplace_back(it->second, element);
    };
    for (std::size_t i = 0; i < ns; ++i) {
        const CurveSegment& seg = g.segments[static_cast<std::size_t>(s.segments[i])];
        touch(seg.a, static_cast<int>(i));
        touch(seg.b, static_cast<int>(i));
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) touch(s.points[i], static_cast<int>(ns + i));

    auto components = [&] {
        std::set<int> roots;
        for (std::size_t e = 0; e < ne; ++e) roots.insert(uf.find(static_cast<int>(e)));
        return static_cast<int>(roots.size());
    };
    if (components() > 1) {
        // Geometric contacts: crossings, overlaps and points on segments.
        double scale = 1.0;
        for (const Point& v : g.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
        const double eps = tol * scale;
        auto ends = [&](std::size_t e, Point& a, Point& b) {
            if (e < ns) {
                const CurveSegment& seg = g.segments[static_cast<std::size_t>(s.segments[e])];
                a = g.vertices[static_cast<std::size_t>(seg.a)];
                b = g.vertices[static_cast<std::size_t>(seg.b)];
            } else {
                a = b = g.vertices[static_cast<std::size_t>(s.points[e - ns])];
            }
        };
        std::vector<Point> lo(ne), hi(ne), pa(ne), pb(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            ends(e, pa[e], pb[e]);
            lo[e] = pa[e].cwiseMin(pb[e]).array() - eps;
            hi[e] = pa[e].cwiseMax(pb[e]).array() + eps;
        }
        for (std::size_t a = 0; a < ne; ++a)
            for (std::size_t b = a + 1; b < ne; ++b) {
                if (uf.find(static_cast<int>(a)) == uf.find(static_cast<int>(b))) continue;
                if ((lo[a].array() > hi[b].array()).any() || (lo[b].array() > hi[a].array()).any()) continue;
                if (segment_distance(pa[a], pb[a], pa[b], pb[b]) <= eps) {
                    uf.unite(static_cast<int>(a), static_cast<int>(b));
                    out.spanning.emplace_back(static_cast<int>(a), static_cast<int>(b));
                }
            }
    }
    out.components = components();
    out.connected = out.components == 1;
    out.side.resize(ne);
    const int root0 = uf.find(0);
    for (std::size_t e = 0; e < ne; ++e) out.side[e] = uf.find(static_cast<int>(e)) == root0 ? 0 : 1;
    return out;
}

CurveLength curve_length(const std::vector<std::pair<Point, Point>>& segments, double tol) {
    CurveLength out;
    struct Item {
        Point a, b, d, f;
    };
    std::vector<Item> items;
    double scale = 1.0;
    for (const auto& [a, b] : segments) {
        double len = (b - a).norm();
        out.naive += len;
        if (len == 0) continue;
        scale = std::max({scale, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
        Point d = (b - a) / len;
        // Sign fixed by the first coordinate that is clearly nonzero.
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (std::abs(d[i]) > 1e-9) {
                if (d[i] < 0) d = -d;
                break;
            }
        }
        Point f = a - a.dot(d) * d;
        items.push_back({a, b, d, f});
    }
    const double eps = tol * scale;
    const double q = 1e-6;
    std::map<std::vector<long long>, std::vector<int>> buckets;
    auto key_of = [&](const Item& it) {
        std::vector<long long> key;
        for (Eigen::Index i = 0; i < it.d.size(); ++i) key.push_back(static_cast<long long>(std::floor(it.d[i] / q)));
        for (Eigen::Index i = 0; i < it.f.size(); ++i) key.push_back(static_cast<long long>(std::floor(it.f[i] / (q * scale))));
        return key;
    };
    UnionFind uf(items.size());
    auto collinear = [&](const Item& x, const Item& y) {
        Line l{x.a, x.d};
        return dist_to_line(y.a, l) <= eps && dist_to_line(y.b, l) <= eps;
    };
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::vector<long long> key = key_of(items[i]);
        // Visit the 3^m neighboring buckets.
        std::vector<long long> probe = key;
        std::vector<int> off(key.size(), -1);
        for (;;) {
            for (std::size_t t = 0; t < key.size(); ++t) probe[t] = key[t] + off[t];
            auto it = buckets.find(probe);
            if (it != buckets.end())
                for (int j : it->second)
                    if (collinear(items[static_cast<std::size_t>(j)], items[i])) uf.unite(j, static_cast<int>(i));
            std::size_t axis = 0;
            while (axis < off.size()) {
                if (++off[axis] <= 1) break;
                off[axis] = -1;
                ++axis;
            }
            if (axis == off.size()) break;
        }
        buckets[key].push_back(static_cast<int>(i));
    }
    std::map<int, std::vector<std::pair<double, double>>> groups;
    for (std::size_t i = 0; i < items.size(); ++i) {
        int root = uf.find(static_cast<int>(i));
        const Item& ref = items[static_cast<std::size_t>(root)];
        double ta = (items[i].a - ref.a).dot(ref.d), tb = (items[i].b - ref.a).dot(ref.d);
        groups[root].emplace_back(std::min(ta, tb), std::max(ta, tb));
    }
    for (auto& [root, iv] : groups) {
        std::sort(iv.begin(), iv.end());
        double lo = iv[0].first, hi = iv[0].second;
        for (std::size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first > hi) {
                out.dedup += hi - lo;
                lo = iv[i].first;
                hi = iv[i].second;
            } else {
                hi = std::max(hi, iv[i].second);
            }
        }
        out.dedup += hi - lo;
    }
    return out;
}

CurveLength curve_length(const CurveGraph& g, const std::vector<int>& segment_ids, double tol) {
    std::vector<std::pair<Point, Point>> segs;
    segs.reserve(segment_ids.size());
    for (int s : segment_ids) {
        const CurveSegment& seg = g.segments[static_cast<std::size_t>(s)];
        segs.emplace_back(g.vertices[static_cast<std::size_t>(seg.a)], g.vertices[static_cast<std::size_t>(seg.b)]);
    }
    return curve_length(segs, tol);
}

std::string LedgerViolation::describe() const {
    std::string s = property + " property fails at stage " + std::to_string(stage) + " for pair " + ref_str(pair);
    if (bridge >= 0) s += " of bridge " + std::to_string(bridge);
    return s;
}

std::vector<LedgerViolation> check_ledger(const CurveConstruction& c) {
    std::vector<LedgerViolation> out;
    if (c.k0 < 0) return out;
    const NetSequence& nets = c.nets;
    for (int k = c.k0; k <= nets.K(); ++k) {
        const auto& ledger = c.phantom[static_cast<std::size_t>(k)];
        for (std::size_t b = 0; b < c.bridges.size(); ++b) {
            const BridgeRecord& br = c.bridges[b];
            if (br.gen != k) continue;
            for (const VertexRef& r : br.index_set)
                if (!ledger.count(r)) out.push_back({k, "bridge", r, static_cast<int>(b)});
        }
        const PointList& lv = nets.levels[static_cast<std::size_t>(k)];
        const double u = nets.unit(k);
        for (std::size_t w = 0; w < lv.size(); ++w) {
            VertexRef ref{k, static_cast<int>(w)};
            if (ledger.count(ref)) continue;
            std::vector<int> nb = ball_indices(lv, lv[w], 30.0 * nets.cstar * u);
            bool extreme;
            if (nb.size() == 1) {
                extreme = true;
            } else {
                PointList pts;
                for (int i : nb) pts.push_back(lv[static_cast<std::size_t>(i)]);
                LineFit fit = fit_line_sup(to_matrix(pts));
                if (!(fit.objective < c.epsilon * u)) continue;
                double tw = project(lv[w], fit.line);
                bool left = false, right = false;
                for (const Point& p : pts) {
                    double t = project(p, fit.line);
                    left = left || t < tw;
                    right = right || t > tw;
                }
                extreme = !left || !right;
            }
            if (extreme) out.push_back({k, "terminal", ref, -1});
        }
    }
    return out;
}

Certificate length_certificate(const CurveConstruction& c) {
    Certificate cert;
    for (std::size_t i = 0; i < c.t2_bridges.size(); ++i)
        for (std::size_t j = i + 1; j < c.t2_bridges.size(); ++j) {
            const BridgeRecord& a = c.bridges[static_cast<std::size_t>(c.t2_bridges[i])];
            const BridgeRecord& b = c.bridges[static_cast<std::size_t>(c.t2_bridges[j])];
            if (segment_distance(a.core_a, a.core_b, b.core_a, b.core_b) <= 1e-12) {
                cert.cores_disjoint = false;
                cert.core_overlaps.emplace_back(c.t2_bridges[i], c.t2_bridges[j]);
            }
        }
    cert.violations = check_ledger(c);
    if (!cert.violations.empty()) fail_validation(cert.violations.front().describe());
    cert.length = c.acct.dedup_length;
    cert.denominator = (c.k0 >= 0 ? c.nets.unit(c.k0) : c.nets.r0) + c.acct.alpha_sum;
    cert.c_hat = cert.length / cert.denominator;
    return cert;
}

SoundnessReport verify_construction(const CurveConstruction& c) {
    SoundnessReport rep;
    auto fail = [&](const std::string& m) {
        rep.ok = false;
        rep.failures.push_back(m);
    };
    const CurveGraph& g = c.graph;
    const NetSequence& nets = c.nets;
    rep.snapshots = static_cast<int>(g.snapshots.size());
    for (const Snapshot& s : g.snapshots) {
        Connectivity conn = verify_connected(g, s);
        if (!conn.connected) fail("snapshot " + std::to_string(s.k) + " has " + std::to_string(conn.components) + " components");
        std::set<int> present(s.points.begin(), s.points.end());
        for (int id : s.segments) {
            present.insert(g.segments[static_cast<std::size_t>(id)].a);
            present.insert(g.segments[static_cast<std::size_t>(id)].b);
        }
        const auto& ids = c.vertex_id[static_cast<std::size_t>(s.k)];
        for (std::size_t v = 0; v < ids.size(); ++v) {
            if (present.count(ids[v])) continue;
            const Point& p = g.vertices[static_cast<std::size_t>(ids[v])];
            bool on = false;
            for (int id : s.segments) {
                const CurveSegment& seg = g.segments[static_cast<std::size_t>(id)];
                if (point_segment_distance(p, g.vertices[static_cast<std::size_t>(seg.a)], g.vertices[static_cast<std::size_t>(seg.b)]) <= 1e-12) {
                    on = true;
                    break;
                }
            }
            if (!on) fail("vertex (" + std::to_string(s.k) + "," + std::to_string(v) + ") missing from its snapshot");
        }
    }
    for (const CurveSegment& seg : g.segments) {
        if (seg.kind != SegmentKind::edge) continue;
        double d = (g.vertices[static_cast<std::size_t>(seg.a)] - g.vertices[static_cast<std::size_t>(seg.b)]).norm();
        if (!(d < 30.0 * nets.cstar * nets.unit(seg.gen))) fail("edge outside its window at stage " + std::to_string(seg.gen));
    }
    for (std::size_t b = 0; b < c.bridges.size(); ++b) {
        const BridgeRecord& br = c.bridges[b];
        const double u = nets.cstar * nets.unit(br.gen);
        double d = (at(nets, br.v1.k, br.v1.v) - at(nets, br.v2.k, br.v2.v)).norm();
        if (!(d >= 30.0 * u)) fail("bridge " + std::to_string(b) + " shorter than its window");
        if (br.gen > c.k0 && !(d < 130.0 * u)) fail("bridge " + std::to_string(b) + " longer than its window");
        if (br.from_t2 && !(d < 64.0 * u)) fail("terminal bridge " + std::to_string(b) + " longer than 64 C* 2^-k");
        if (br.ext1.length > 2.0 * u * (1.0 + 1e-12) || br.ext2.length > 2.0 * u * (1.0 + 1e-12))
            fail("extension of bridge " + std::to_string(b) + " longer than 2 C* 2^-k r0");
        for (const Snapshot& s : g.snapshots) {
            if (s.k < br.gen) continue;
            for (int id : br.segments)
                if (!std::binary_search(s.segments.begin(), s.segments.end(), id))
                    fail("bridge " + std::to_string(b) + " missing from snapshot " + std::to_string(s.k));
        }
    }
    for (std::size_t i = 0; i < c.t2_bridges.size(); ++i)
        for (std::size_t j = i + 1; j < c.t2_bridges.size(); ++j) {
            const BridgeRecord& a = c.bridges[static_cast<std::size_t>(c.t2_bridges[i])];
            const BridgeRecord& b = c.bridges[static_cast<std::size_t>(c.t2_bridges[j])];
            if (segment_distance(a.core_a, a.core_b, b.core_a, b.core_b) <= 1e-12)
                fail("cores of bridges " + std::to_string(c.t2_bridges[i]) + " and " + std::to_string(c.t2_bridges[j]) + " intersect");
        }
    for (const LedgerViolation& v : check_ledger(c)) fail(v.describe());
    return rep;
}

}  // namespace mrt

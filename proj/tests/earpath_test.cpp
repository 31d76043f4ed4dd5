#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "d2gen/augment.hpp"
#include "d2gen/earpath.hpp"
#include "d2gen/generate.hpp"
#include "test_util.hpp"

using namespace d2gen;
using namespace d2gen::testing;

namespace {

// A hand-built four-vertex expansion with a long root path on v, used for
// the escape and blocking-vertex checks. Pattern: x=0, u=1, w=2, v=3.
struct EscapeFixture {
    Digraph pattern{
        4, {{0, 3}, {0, 2}, {1, 3}, {1, 2}, {3, 0}, {3, 1}, {2, 0}, {2, 1}, {2, 3}}};
    // host vertex names
    int v = 0, v1 = 1, v2 = 2, v3 = 3, vb1 = 4, vb2 = 5, va1 = 6, va2 = 7;
    int z1 = 8, z2 = 9;
    int q = 10, xb2 = 11, x2 = 12, xb1 = 13, x1 = 14, x0 = 15, xa1 = 16, xa2 = 17;
    int p = 18, ub1 = 19, u2 = 20, ub2 = 21, u1 = 22, u0 = 23, ua1 = 24, ua2 = 25;
    int wa1 = 26, w0 = 27, wa2 = 28, w1 = 29, w2v = 30, wb1 = 31, wb2 = 32;

    ButterflyModel model;
    Digraph host;

    explicit EscapeFixture(bool with_side_paths = true) {
        std::vector<Edge> edges = {
            // branch of pattern v (root 0): in-branching 6->0, 7->0; out 0->1->2->3
            {va1, v}, {va2, v}, {v, v1}, {v1, v2}, {v2, v3},
            // branch of x (root 15): out-branching 15->14->12
            {x0, x1}, {x1, x2},
            // branch of u (root 23): out 23->22->20
            {u0, u1}, {u1, u2},
            // branch of w (root 27): out 27->29->30
            {w0, w1}, {w1, w2v},
            // bridges
            {x2, xb2}, {xb2, q}, {q, va1},          // (x,v)
            {x2, xb1}, {xb1, wa2}, {wa2, w0},       // (x,w)
            {u2, ub1}, {ub1, p}, {p, va2},          // (u,v)
            {u2, ub2}, {ub2, wa1}, {wa1, w0},       // (u,w)
            {w2v, wb1}, {wb1, xa2}, {xa2, x0},      // (w,x)
            {w2v, wb2}, {wb2, ua2}, {ua2, u0},      // (w,u)
            {w2v, z2}, {z2, z1}, {z1, va1},         // (w,v)
            {v3, vb1}, {vb1, xa1}, {xa1, x0},       // (v,x)
            {v3, vb2}, {vb2, ua1}, {ua1, u0},       // (v,u)
        };
        if (with_side_paths) {
            edges.push_back({q, va2});    // escape segment P_0
            edges.push_back({va2, ub1});  // escape segment P_2
            edges.push_back({p, wa1});    // escape segment P_4
            edges.push_back({v1, z2});    // bad path from the root path
            edges.push_back({z1, q});     // bad path into the corridor
            edges.push_back({v1, vb1});   // switching path leaving the root-path prefix
        }
        host = Digraph(33, std::move(edges));

        model.host = host;
        model.pattern = pattern;
        model.vertex_map.resize(4);
        model.vertex_map[0].root = x0;
        model.vertex_map[0].out_edges = {{x0, x1}, {x1, x2}};
        model.vertex_map[1].root = u0;
        model.vertex_map[1].out_edges = {{u0, u1}, {u1, u2}};
        model.vertex_map[2].root = w0;
        model.vertex_map[2].out_edges = {{w0, w1}, {w1, w2v}};
        model.vertex_map[3].root = v;
        model.vertex_map[3].in_edges = {{va1, v}, {va2, v}};
        model.vertex_map[3].out_edges = {{v, v1}, {v1, v2}, {v2, v3}};
        std::map<Edge, std::vector<int>> paths = {
            {{0, 3}, {x2, xb2, q, va1}},   {{0, 2}, {x2, xb1, wa2, w0}},
            {{1, 3}, {u2, ub1, p, va2}},   {{1, 2}, {u2, ub2, wa1, w0}},
            {{2, 0}, {w2v, wb1, xa2, x0}}, {{2, 1}, {w2v, wb2, ua2, u0}},
            {{2, 3}, {w2v, z2, z1, va1}},  {{3, 0}, {v3, vb1, xa1, x0}},
            {{3, 1}, {v3, vb2, ua1, u0}}};
        for (auto e : pattern.edges()) model.edge_map.push_back(paths.at(e));
    }

    Escape escape() const {
        Escape esc;
        esc.segments = {{q, va2}, {va2}, {va2, ub1}, {ub1, p}, {p, wa1}};
        esc.pattern_edge = {1, 3};  // (u, v)
        return esc;
    }
};

}  // namespace

TEST_CASE("ear-path enumeration") {
    Digraph c3 = bidirected_cycle(3);
    Digraph sub = subdivide_edge(c3, {0, 1}).graph;
    Decoration sub_dec = decorate(*find_expansion(c3, sub));
    CHECK(enumerate_earpaths(sub, sub_dec).empty());

    // chain-augmented C3: ear-paths against a C3 expansion, cross-checked by
    // a brute-force path scan
    Digraph host = add_chain(c3, {0, 1}, 1, 0, 1);
    auto model = find_expansion(c3, host);
    REQUIRE(model.has_value());
    Decoration dec = decorate(*model);
    auto ears = enumerate_earpaths(host, dec);
    for (const auto& ear : ears) CHECK(is_earpath(host, dec, ear));
    int expected = 0;
    uint64_t exp = dec.expansion_mask;
    std::function<void(int, uint64_t)> walk = [&](int cur, uint64_t used) {
        for (int nxt : host.out_neighbors(cur)) {
            if (exp >> nxt & 1)
                ++expected;
            else if (!(used >> nxt & 1))
                walk(nxt, used | uint64_t{1} << nxt);
        }
    };
    for (int a = 0; a < host.order(); ++a) {
        if (!(exp >> a & 1)) continue;
        for (int b : host.out_neighbors(a)) {
            if (exp >> b & 1) {
                if (!dec.has_expansion_edge(a, b)) ++expected;
            } else {
                walk(b, uint64_t{1} << b);
            }
        }
    }
    CHECK(static_cast<int>(ears.size()) == expected);
    CHECK(!ears.empty());
}

TEST_CASE("trichotomy on the small corpus") {
    auto members = oracle_enumerate(4);
    int classified = 0;
    for (const auto& df : members) {
        Digraph d = from_form(df);
        for (const auto& hf : members) {
            if (hf.n > df.n) continue;
            Digraph h = from_form(hf);
            auto model = find_expansion(h, d);
            if (!model) continue;
            Decoration dec = decorate(*model);
            for (const auto& ear : enumerate_earpaths(d, dec)) {
                EarPathFlags flags = earpath_flags(dec, ear);
                CHECK(flags.count() == 1);
                classify_earpath(ear, dec, d);  // must not throw
                ++classified;
            }
        }
    }
    CHECK(classified > 50);
}

TEST_CASE("classification is inversion covariant") {
    Digraph c3 = bidirected_cycle(3);
    Digraph host = add_chain(c3, {0, 1}, 1, 0, 2);
    auto model = find_expansion(c3, host);
    REQUIRE(model.has_value());
    Decoration dec = decorate(*model);
    ButterflyModel inv = invert_model(*model);
    Decoration idec = decorate(inv);
    Digraph ihost = invert(host);
    auto ears = enumerate_earpaths(host, dec);
    CHECK(!ears.empty());
    for (const auto& ear : ears) {
        EarPath rev{std::vector<int>(ear.vertices.rbegin(), ear.vertices.rend())};
        CHECK(is_earpath(ihost, idec, rev));
        EarPathFlags fwd = earpath_flags(dec, ear);
        EarPathFlags bwd = earpath_flags(idec, rev);
        CHECK(fwd.switching == bwd.switching);
        CHECK(fwd.bad == bwd.bad);
        CHECK(fwd.augmenting == bwd.augmenting);
    }
}

TEST_CASE("laced paths") {
    CHECK(paths_laced({0, 1, 2}, {3, 4}));
    CHECK_FALSE(properly_laced({0, 1, 2}, {3, 4}));
    CHECK(lace({0, 1, 2}, {3, 4}) == std::vector<int>{3, 4});
    CHECK(lace_component_count({0, 1, 2, 3}, {1, 2}) == 1);
    CHECK(lace({0, 1, 2, 3}, {1, 2}) == std::vector<int>{1, 2});

    // the crossing configuration with four shared segments
    std::vector<int> p = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> weave = {10, 7, 8, 5, 6, 3, 4, 1, 2, 11};
    CHECK(paths_laced(p, weave));
    CHECK(properly_laced(p, weave));
    CHECK(lace_component_count(p, weave) == 4);
    CHECK(lace(p, weave) == weave);

    // an unlaced crossing gets rerouted through the first path
    std::vector<int> base = {0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<int> cross = {0, 8, 3, 4, 9, 7};
    CHECK_FALSE(paths_laced(base, cross));
    std::vector<int> fixed = lace(base, cross);
    CHECK(paths_laced(base, fixed));
    CHECK(lace_component_count(base, fixed) == 1);
    CHECK(fixed == base);

    // brute-force minimality oracle on the weave instance
    std::map<int, std::set<int>> adj;
    auto add = [&](const std::vector<int>& path) {
        for (size_t i = 0; i + 1 < path.size(); ++i) adj[path[i]].insert(path[i + 1]);
    };
    add(p);
    add(weave);
    int best = 1 << 20;
    std::vector<int> cur{10};
    std::set<int> used{10};
    std::function<void(int)> dfs = [&](int at) {
        if (at == 11) {
            best = std::min(best, lace_component_count(p, cur));
            return;
        }
        for (int nxt : adj[at]) {
            if (used.count(nxt)) continue;
            cur.push_back(nxt);
            used.insert(nxt);
            dfs(nxt);
            used.erase(nxt);
            cur.pop_back();
        }
    };
    dfs(10);
    CHECK(best == lace_component_count(p, lace(p, weave)));
}

TEST_CASE("switching onto a parallel edge shortens the bridge") {
    Digraph c3 = bidirected_cycle(3);
    auto sub = subdivide_edge(c3, {0, 1});
    std::vector<Edge> edges = sub.graph.edges();
    edges.push_back({0, 1});  // parallel to the subdivided bridge
    Digraph host(4, edges);
    ExpansionSearchOptions opts;
    std::vector<Edge> exact = sub.graph.edges();
    opts.exact_edges = &exact;
    auto model = find_expansion(c3, host, opts);
    REQUIRE(model.has_value());
    Decoration dec = decorate(*model);

    EarPath ear{{0, 1}};
    EarPathClass cls = classify_earpath(ear, dec, host);
    CHECK(cls.kind == EarPathKind::switching);
    CHECK(cls.parallel);

    ButterflyModel switched = switch_onto(*model, ear);
    CHECK(validate_model(switched).ok);
    // the subdivision vertex left the expansion, the direct edge joined it
    CHECK(switched.expansion_vertices() == 0b0111);
    auto switched_edges = switched.expansion_edges();
    CHECK(std::find(switched_edges.begin(), switched_edges.end(), Edge{0, 1}) !=
          switched_edges.end());

    // switching back onto the replaced path restores the original vertex set
    Decoration dec2 = decorate(switched);
    EarPath back{{0, sub.middle, 1}};
    CHECK(classify_earpath(back, dec2, host).kind == EarPathKind::switching);
    ButterflyModel restored = switch_onto(switched, back);
    CHECK(validate_model(restored).ok);
    CHECK(restored.expansion_vertices() == model->expansion_vertices());

    // non-switching input is rejected
    CHECK_THROWS_AS(switch_onto(*model, EarPath{{1, 0}}), error);
}

TEST_CASE("switching soundness across the small corpus") {
    auto members = oracle_enumerate(4);
    int switched_count = 0;
    for (const auto& df : members) {
        Digraph d = from_form(df);
        for (const auto& hf : members) {
            if (hf.n > df.n) continue;
            Digraph h = from_form(hf);
            if (hf == df) continue;
            auto model = find_expansion(h, d);
            if (!model) continue;
            Decoration dec = decorate(*model);
            for (const auto& ear : enumerate_earpaths(d, dec)) {
                if (classify_earpath(ear, dec, d).kind != EarPathKind::switching) continue;
                ButterflyModel switched = switch_onto(*model, ear);
                CHECK(validate_model(switched).ok);
                CHECK(switched.pattern == h);
                ++switched_count;
            }
        }
    }
    CHECK(switched_count > 10);
}

TEST_CASE("escape fixture validates") {
    EscapeFixture fx;
    REQUIRE(validate_model(fx.model).ok);
    REQUIRE(is_strongly_k_connected(fx.pattern, 2));
    Decoration dec = decorate(fx.model);

    // the (u,v) corridor is the path ub1 -> p -> va2
    uint64_t corridor = dec.in_star[3].mask & dec.out_star[1].mask;
    CHECK(corridor ==
          ((uint64_t{1} << fx.ub1) | (uint64_t{1} << fx.p) | (uint64_t{1} << fx.va2)));

    Escape esc = fx.escape();
    CHECK(esc.duration() == 2);
    EscapeCheck check = validate_escape(esc, dec, fx.host);
    INFO(check.clause);
    CHECK(check.ok);

    // serialization round-trip
    auto segments = parse_segments(serialize_escape(esc));
    CHECK(segments == esc.segments);
}

TEST_CASE("escape mutations fail with named clauses") {
    EscapeFixture fx;
    Decoration dec = decorate(fx.model);

    // rerouting P_2 off the corridor violates clause (c)
    {
        std::vector<Edge> edges = fx.host.edges();
        edges.push_back({fx.va2, fx.u1});
        edges.push_back({fx.u1, fx.ub1});
        Digraph host2(fx.host.order(), edges);
        Escape esc = fx.escape();
        esc.segments[2] = {fx.va2, fx.u1};
        esc.segments[3] = {fx.u1};
        esc.segments[4] = {fx.u1, fx.ub1};
        EscapeCheck check = validate_escape(esc, dec, host2);
        CHECK_FALSE(check.ok);
        CHECK(check.clause.substr(0, 1) == "c");
    }
    // k = 0 has no duration
    {
        Escape esc;
        esc.segments = {{fx.q, fx.va2}};
        esc.pattern_edge = {1, 3};
        EscapeCheck check = validate_escape(esc, dec, fx.host);
        CHECK_FALSE(check.ok);
        CHECK(check.clause.substr(0, 8) == "duration");
    }
    // broken chaining between segments
    {
        Escape esc = fx.escape();
        esc.segments[1] = {fx.ub1};
        EscapeCheck check = validate_escape(esc, dec, fx.host);
        CHECK_FALSE(check.ok);
        CHECK(check.clause.substr(0, 9) == "structure");
    }
}

TEST_CASE("escapes reverse") {
    EscapeFixture fx;
    ButterflyModel inv = invert_model(fx.model);
    Decoration idec = decorate(inv);
    Escape esc = fx.escape();
    Escape rev;
    rev.pattern_edge = {3, 1};  // (v, u)
    for (auto it = esc.segments.rbegin(); it != esc.segments.rend(); ++it)
        rev.segments.emplace_back(it->rbegin(), it->rend());
    EscapeCheck check = validate_escape(rev, idec, invert(fx.host));
    INFO(check.clause);
    CHECK(check.ok);
}

TEST_CASE("blocking vertices") {
    EscapeFixture fx;
    Decoration dec = decorate(fx.model);
    // the root path of v is v -> v1 -> v2 -> v3; the side path from v1 is a
    // switching path leaving the prefix, so v2 is not blocking
    CHECK(dec.root_path[3].vertices == std::vector<int>{fx.v, fx.v1, fx.v2, fx.v3});
    CHECK_FALSE(is_blocking_vertex(fx.host, dec, 3, fx.v2));

    // without the side paths it is
    EscapeFixture bare(false);
    Decoration bdec = decorate(bare.model);
    CHECK(is_blocking_vertex(bare.host, bdec, 3, bare.v2));

    // trivial root paths are blocking vacuously
    Digraph c3 = bidirected_cycle(3);
    Digraph sub = subdivide_edge(c3, {0, 1}).graph;
    Decoration sdec = decorate(*find_expansion(c3, sub));
    CHECK(sdec.root_path[0].vertices.size() == 1);
    CHECK(is_blocking_vertex(sub, sdec, 0, sdec.root_path[0].vertices[0]));

    // off the root path
    CHECK_THROWS_AS(is_blocking_vertex(fx.host, dec, 3, fx.q), error);
}

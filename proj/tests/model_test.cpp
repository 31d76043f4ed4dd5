#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>

#include "d2gen/augment.hpp"
#include "d2gen/butterfly.hpp"
#include "d2gen/generate.hpp"
#include "test_util.hpp"

using namespace d2gen;
using namespace d2gen::testing;

namespace {

uint64_t bit(int v) { return uint64_t{1} << v; }

// Degree-scan re-check of the decoration clauses, independent of how
// decorate builds its objects.
void check_decoration_definitions(const Decoration& dec) {
    const Digraph& pattern = dec.pattern;
    for (int v = 0; v < pattern.order(); ++v) {
        // trees contain every high-degree vertex of the branchset
        for (int x = 0; x < dec.host.order(); ++x) {
            if (!(dec.branchset[v] >> x & 1)) continue;
            if (dec.expansion_in_degree(x) >= 2) CHECK(dec.in_tree[v].contains(x));
            if (dec.expansion_out_degree(x) >= 2) CHECK(dec.out_tree[v].contains(x));
        }
        // stars contain the trees, and their non-root vertices run along
        // degree-one corridors
        CHECK((dec.in_star[v].mask & dec.in_tree[v].mask) == dec.in_tree[v].mask);
        CHECK((dec.out_star[v].mask & dec.out_tree[v].mask) == dec.out_tree[v].mask);
        for (int x = 0; x < dec.host.order(); ++x) {
            if (dec.in_star[v].contains(x) && x != dec.in_star[v].root)
                CHECK(dec.expansion_out_degree(x) == 1);
            if (dec.out_star[v].contains(x) && x != dec.out_star[v].root)
                CHECK(dec.expansion_in_degree(x) == 1);
        }
        // star maximality: no vertex outside can still be pulled in
        for (int x = 0; x < dec.host.order(); ++x) {
            if (!dec.in_expansion(x)) continue;
            if (!dec.in_star[v].contains(x) && dec.expansion_out_degree(x) == 1) {
                int head = std::countr_zero(dec.exp_out[x]);
                CHECK_FALSE(dec.in_star[v].contains(head));
            }
            if (!dec.out_star[v].contains(x) && dec.expansion_in_degree(x) == 1) {
                int tail = std::countr_zero(dec.exp_in[x]);
                CHECK_FALSE(dec.out_star[v].contains(tail));
            }
        }
        // the root path is the star intersection and contains the root
        CHECK(dec.root_path[v].mask == (dec.in_star[v].mask & dec.out_star[v].mask));
    }
    // the two vertex partitions of the expansion
    uint64_t in_side = 0, out_side = 0;
    for (int v = 0; v < pattern.order(); ++v) {
        uint64_t a = dec.in_star[v].mask;
        uint64_t b = dec.out_tree[v].mask & ~dec.root_path[v].mask;
        CHECK((in_side & a) == 0);
        CHECK((in_side & b) == 0);
        in_side |= a | b;
        uint64_t c = dec.out_star[v].mask;
        uint64_t d = dec.in_tree[v].mask & ~dec.root_path[v].mask;
        CHECK((out_side & c) == 0);
        CHECK((out_side & d) == 0);
        out_side |= c | d;
    }
    CHECK(in_side == dec.expansion_mask);
    CHECK(out_side == dec.expansion_mask);
}

}  // namespace

TEST_CASE("identity models validate and decorate to singletons") {
    for (const auto& base : base_class(5)) {
        ButterflyModel m = identity_model(base.graph);
        CHECK(validate_model(m).ok);
        Decoration dec = decorate(m);
        for (int v = 0; v < base.graph.order(); ++v) {
            CHECK(dec.in_tree[v].mask == bit(v));
            CHECK(dec.out_tree[v].mask == bit(v));
            CHECK(dec.root_path[v].vertices == std::vector<int>{v});
            CHECK(dec.in_star[v].mask == bit(v));
        }
        for (size_t i = 0; i < base.graph.edges().size(); ++i) {
            auto [u, w] = base.graph.edges()[i];
            CHECK(dec.bridge[i].vertices == std::vector<int>{u, w});
        }
        check_decoration_definitions(dec);
    }
}

TEST_CASE("validate_model reports violated clauses") {
    Digraph c3 = bidirected_cycle(3);
    ButterflyModel m = identity_model(c3);

    ButterflyModel shared = m;
    shared.vertex_map[0].out_edges = {{0, 1}};  // branch of 0 now overlaps branch of 1
    auto check = validate_model(shared);
    CHECK_FALSE(check.ok);
    CHECK(check.violation.find("disjointness") != std::string::npos);

    ButterflyModel bad_bridge = m;
    bad_bridge.edge_map[0] = {0, 2};  // wrong endpoint for pattern edge (0,1)
    check = validate_model(bad_bridge);
    CHECK_FALSE(check.ok);
    CHECK(check.violation.find("bridge") != std::string::npos);
}

TEST_CASE("subdivision model") {
    Digraph c3 = bidirected_cycle(3);
    auto sub = subdivide_edge(c3, {0, 1});
    ButterflyModel m;
    m.host = sub.graph;
    m.pattern = c3;
    m.vertex_map.resize(3);
    for (int v = 0; v < 3; ++v) m.vertex_map[v].root = v;
    for (auto [u, w] : c3.edges()) {
        if (Edge{u, w} == Edge{0, 1})
            m.edge_map.push_back({0, sub.middle, 1});
        else
            m.edge_map.push_back({u, w});
    }
    CHECK(validate_model(m).ok);
    Decoration dec = decorate(m);
    // the subdivision vertex sits inside the (0,1) bridge
    CHECK(dec.bridge[0].vertices == std::vector<int>{0, sub.middle, 1});
    for (int v = 0; v < 3; ++v) {
        CHECK(dec.in_tree[v].mask == bit(v));
        CHECK(dec.out_tree[v].mask == bit(v));
    }
    check_decoration_definitions(dec);
}

TEST_CASE("two-vertex branch set with a junction root") {
    // pattern: bidirected diamond (K4 minus one edge); vertex 0 has degree 3
    Digraph pattern(4, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {0, 3}, {3, 0}, {1, 2}, {2, 1},
                        {2, 3}, {3, 2}});
    REQUIRE(is_strongly_k_connected(pattern, 2));
    // host: vertex 0 expands to the branch {3,4} with out-branching 3->4;
    // pattern vertices 1,2,3 live on host vertices 0,1,2
    Digraph host(5, {{3, 4},                    // branch edge
                     {3, 0},                    // bridge (0,1)
                     {4, 1},                    // bridge (0,2)
                     {4, 2},                    // bridge (0,3)
                     {0, 3}, {1, 3}, {2, 3},    // bridges into 0
                     {0, 1}, {1, 0}, {1, 2}, {2, 1}});
    ButterflyModel m;
    m.host = host;
    m.pattern = pattern;
    m.vertex_map.resize(4);
    m.vertex_map[0].root = 3;
    m.vertex_map[0].out_edges = {{3, 4}};
    m.vertex_map[1].root = 0;
    m.vertex_map[2].root = 1;
    m.vertex_map[3].root = 2;
    for (auto [u, w] : pattern.edges()) {
        std::map<int, int> at{{1, 0}, {2, 1}, {3, 2}};
        if (u == 0)
            m.edge_map.push_back({w == 1 ? 3 : 4, at[w]});
        else if (w == 0)
            m.edge_map.push_back({at[u], 3});
        else
            m.edge_map.push_back({at[u], at[w]});
    }
    REQUIRE(validate_model(m).ok);
    Decoration dec = decorate(m);
    // both branch vertices have expansion out-degree two, so the out-tree
    // spans the whole branch set; the in-tree stays at the root
    CHECK(dec.out_tree[0].mask == (bit(3) | bit(4)));
    CHECK(dec.out_tree[0].edges == std::vector<Edge>{{3, 4}});
    CHECK(dec.in_tree[0].mask == bit(3));
    CHECK(dec.root_path[0].vertices == std::vector<int>{3});
    check_decoration_definitions(dec);
}

TEST_CASE("find_expansion finds and misses correctly") {
    Digraph c3 = bidirected_cycle(3);
    auto self = find_expansion(c3, c3);
    REQUIRE(self.has_value());
    CHECK(validate_model(*self).ok);

    CHECK_FALSE(find_expansion(bidirected_cycle(3), bidirected_cycle(4)).has_value());
    CHECK_FALSE(find_expansion(diagonal_four_cycle(), bidirected_cycle(4)).has_value());

    // a chain addition hosts the original
    Digraph host = add_chain(c3, {0, 1}, 1, 0, 1);
    auto model = find_expansion(c3, host);
    REQUIRE(model.has_value());
    CHECK(validate_model(*model).ok);
    CHECK(model->pattern == c3);
}

TEST_CASE("find_expansion agrees with the delete/contract backend") {
    std::mt19937 rng(77);
    MinorIndex index;
    int hits = 0;
    for (int trial = 0; trial < 150; ++trial) {
        int hn = 2 + static_cast<int>(rng() % 3);
        int dn = hn + static_cast<int>(rng() % 3);
        Digraph h = random_digraph(hn, 0.55, rng);
        Digraph d = random_digraph(dn, 0.55, rng);
        bool reference = index.is_minor(h, d);
        auto model = find_expansion(h, d);
        CHECK(reference == model.has_value());
        if (model) {
            CHECK(validate_model(*model).ok);
            ++hits;
        }
    }
    CHECK(hits > 10);
}

TEST_CASE("model text round-trip") {
    Digraph c3 = bidirected_cycle(3);
    Digraph host = add_chain(c3, {0, 1}, 1, 0, 1);
    auto model = find_expansion(c3, host);
    REQUIRE(model.has_value());
    ButterflyModel parsed = ButterflyModel::parse(model->serialize(), host);
    CHECK(validate_model(parsed).ok);
    CHECK(parsed.pattern == model->pattern);
    CHECK(parsed.edge_map == model->edge_map);
}

TEST_CASE("inverted models mirror decorations") {
    Digraph c3 = bidirected_cycle(3);
    Digraph host = add_chain(c3, {0, 1}, 1, 0, 1);
    auto model = find_expansion(c3, host);
    REQUIRE(model.has_value());
    ButterflyModel inv = invert_model(*model);
    CHECK(validate_model(inv).ok);
    Decoration dec = decorate(*model);
    Decoration idec = decorate(inv);
    for (int v = 0; v < 3; ++v) {
        CHECK(dec.in_star[v].mask == idec.out_star[v].mask);
        CHECK(dec.out_tree[v].mask == idec.in_tree[v].mask);
        CHECK(dec.root_path[v].mask == idec.root_path[v].mask);
    }
}

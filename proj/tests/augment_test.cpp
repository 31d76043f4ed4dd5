#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "d2gen/augment.hpp"
#include "d2gen/generate.hpp"
#include "test_util.hpp"

using namespace d2gen;
using namespace d2gen::testing;

namespace {

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return errc::bad_format;
}

std::vector<Digraph> oracle_reps(int max_order) {
    std::vector<Digraph> out;
    for (const auto& form : oracle_enumerate(max_order)) out.push_back(from_form(form));
    return out;
}

}  // namespace

TEST_CASE("splits") {
    CHECK(code_of([] {
        split(diagonal_four_cycle(), SplitSpec{0, true, {1, 2}});
    }) == errc::degree_too_small);

    // vertex 0 with out-neighbors {1,2,3}, exposed {1,2}
    Digraph d(4, {{0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 0}, {3, 0}, {1, 2}, {2, 3}, {3, 1},
                  {2, 1}, {3, 2}, {1, 3}});
    REQUIRE(is_strongly_k_connected(d, 2));
    auto res = split(d, SplitSpec{0, true, {1, 2}});
    CHECK(res.base == 0);
    CHECK(res.exposed == 4);
    CHECK(res.graph.has_edge(0, 4));
    CHECK(res.graph.has_edge(4, 1));
    CHECK(res.graph.has_edge(4, 2));
    CHECK(res.graph.has_edge(0, 3));
    CHECK_FALSE(res.graph.has_edge(0, 1));
    CHECK(butterfly_contract(res.graph, {0, 4}).graph == d);

    // the exposed vertex is the only one missing the double-degree condition
    for (bool out : {true, false}) {
        auto r = split(d, SplitSpec{0, out, {2, 3}});
        for (int v = 0; v < r.graph.order(); ++v) {
            bool deficient = r.graph.out_degree(v) < 2 || r.graph.in_degree(v) < 2;
            CHECK(deficient == (v == r.exposed));
        }
    }
}

TEST_CASE("add_chain") {
    Digraph c3 = bidirected_cycle(3);
    Digraph got = add_chain(c3, {0, 1}, 1, 0, 1);
    CHECK(got.order() == 4);
    CHECK(is_strongly_k_connected(got, 2));

    // length four matches the illustration: four new vertices, the carrier
    // replaced, five forward plus five return edges
    Digraph long_chain = add_chain(c3, {0, 1}, 1, 0, 4);
    CHECK(long_chain.order() == 7);
    CHECK(long_chain.edge_count() == c3.edge_count() - 1 + 5 + 5);
    CHECK_FALSE(long_chain.has_edge(0, 1));

    CHECK(code_of([&] { add_chain(c3, {0, 1}, 1, 0, 0); }) == errc::precondition_violated);
    CHECK(code_of([&] { add_chain(directed_cycle(3), {1, 0}, 2, 1, 7); }) ==
          errc::edge_absent);
    // length-1 chains may not reuse the carrier endpoints on the same side
    CHECK(code_of([&] { add_chain(c3, {0, 1}, 0, 2, 1); }) == errc::simplicity_violation);
    CHECK(code_of([&] { add_chain(c3, {0, 1}, 2, 1, 1); }) == errc::simplicity_violation);
    // x = y is fine when the result stays simple
    Digraph loopback = add_chain(c3, {0, 1}, 2, 2, 1);
    CHECK(loopback.order() == 4);
    CHECK(loopback.has_edge(2, 3));
    CHECK(loopback.has_edge(3, 2));
}

TEST_CASE("deleting the return path and contracting recovers the original") {
    for (const Digraph& d : oracle_reps(4)) {
        for (auto e : d.edges()) {
            Digraph got = add_chain(d, e, e.second, e.first, 2);
            // drop the return path x -> z2 -> z1 -> y
            int n = d.order();
            Digraph stripped = delete_edge(got, {e.second, n + 1});
            stripped = delete_edge(stripped, {n + 1, n});
            stripped = delete_edge(stripped, {n, e.first});
            // contract the two subdivision vertices
            stripped = butterfly_contract(stripped, {e.first, n}).graph;
            stripped = butterfly_contract(stripped, {e.first, n}).graph;
            CHECK(stripped == d);
        }
    }
}

TEST_CASE("basic augmentation") {
    Digraph c3 = bidirected_cycle(3);
    CHECK(code_of([&] {
        apply_augmentation(c3, BasicAug{0, 1, std::nullopt, std::nullopt});
    }) == errc::precondition_violated);
    CHECK(code_of([&] {
        apply_augmentation(c3, BasicAug{0, 1, std::vector<int>{1, 2}, std::nullopt});
    }) == errc::degree_too_small);

    // directed C4 plus one diagonal digon misses (3,1); basic{u=1,v=3} adds
    // the edge (e(v), e(u)) = (3,1)
    Digraph d(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {2, 0}, {1, 3}});
    Digraph got = apply_augmentation(d, BasicAug{1, 3, std::nullopt, std::nullopt});
    CHECK(got == diagonal_four_cycle());
}

TEST_CASE("collarette augmentation") {
    Digraph c3 = bidirected_cycle(3);
    Digraph got = apply_augmentation(c3, CollaretteAug{0, 1, 1});
    CHECK(got.order() == 6);
    CHECK(is_strongly_k_connected(got, 2));
    CHECK(code_of([&] {
        apply_augmentation(directed_cycle(3), CollaretteAug{0, 1, 1});
    }) == errc::precondition_violated);
}

TEST_CASE("bracelet augmentation") {
    Digraph a4 = diagonal_four_cycle();
    BraceletAug aug{1, 3, 0, 2, 3, true};  // subdivide (0,1), pierce 3 -> z -> 2
    Digraph got = apply_augmentation(a4, aug);
    CHECK(got.order() == 5);
    CHECK(is_strongly_k_connected(got, 2));
    CHECK(got.has_edge(3, 4));
    CHECK(got.has_edge(4, 2));
    CHECK(got.has_edge(0, 4));
    CHECK(got.has_edge(4, 1));
    CHECK_FALSE(got.has_edge(0, 1));

    BraceletAug wrong{1, 0, 3, 2, 3, true};  // roles swapped: conditions fail
    CHECK(code_of([&] { apply_augmentation(a4, wrong); }) == errc::precondition_violated);
}

TEST_CASE("descriptor text round-trips") {
    std::vector<Augmentation> samples = {
        BasicAug{0, 1, std::nullopt, std::nullopt},
        BasicAug{2, 4, std::vector<int>{1, 3}, std::vector<int>{0, 5}},
        BasicDoubleAug{2, {0, 1}, {3, 4}},
        ChainAug{0, 1, std::vector<int>{1, 3}, std::nullopt, ClusterSlot::exposed,
                 ClusterSlot::base, 2},
        CollaretteAug{0, 1, 3},
        BraceletAug{1, 3, 0, 2, 3, false},
    };
    for (const auto& aug : samples) {
        std::string text = format_augmentation(aug);
        CHECK(format_augmentation(parse_augmentation(text)) == text);
    }
    CHECK(format_augmentation(samples[3]) ==
          "(chain u=0 v=1 out-split=(0;1,3) carrier=(e(u),v) len=2)");
}

TEST_CASE("enumeration respects the vertex budget") {
    Digraph c3 = bidirected_cycle(3);
    CHECK(enumerate_augmentations(c3, 3).empty());

    auto with_one_extra = enumerate_augmentations(c3, 4);
    CHECK(!with_one_extra.empty());
    bool found_chain = false;
    for (const auto& [aug, result] : with_one_extra) {
        CHECK(result.order() <= 4);
        CHECK(is_strongly_k_connected(result, 2));
        CHECK(result.edge_count() > c3.edge_count());
        if (const auto* chain = std::get_if<ChainAug>(&aug))
            found_chain |= chain->len == 1;
    }
    CHECK(found_chain);

    // the bracelet instance above shows up at budget 5
    bool found_bracelet = false;
    for (const auto& [aug, result] : enumerate_augmentations(diagonal_four_cycle(), 5)) {
        if (const auto* br = std::get_if<BraceletAug>(&aug))
            found_bracelet |= br->w == 1 && br->x == 3 && br->a == 0 && br->y == 2 &&
                              br->b == 3 && br->subdivide_in;
    }
    CHECK(found_bracelet);

    // descriptors are unique and sorted
    auto augs = enumerate_augmentations(diagonal_four_cycle(), 6);
    std::vector<std::string> names;
    for (const auto& [aug, result] : augs) names.push_back(format_augmentation(aug));
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
}

TEST_CASE("preservation and edge growth at small order") {
    for (const Digraph& d : oracle_reps(4)) {
        for (const auto& [aug, result] : enumerate_augmentations(d, d.order() + 2)) {
            CHECK(is_strongly_k_connected(result, 2));
            CHECK(result.edge_count() > d.edge_count());
        }
    }
}

TEST_CASE("augmentation witnesses replay to the original") {
    for (const Digraph& d : oracle_reps(4)) {
        for (const auto& [aug, result] : enumerate_augmentations(d, d.order() + 2)) {
            WitnessScript script = augmentation_witness(d, aug);
            CHECK(script.replay(result) == d);
        }
    }
}

TEST_CASE("sampled agreement between witnesses and the search backend") {
    MinorIndex index;
    for (const Digraph& d : oracle_reps(3)) {
        for (const auto& [aug, result] : enumerate_augmentations(d, d.order() + 2))
            CHECK(index.is_minor(d, result));
    }
}

TEST_CASE("inversion duality") {
    for (const Digraph& d : oracle_reps(4)) {
        Digraph inv = invert(d);
        for (const auto& [aug, result] : enumerate_augmentations(d, d.order() + 2)) {
            Augmentation mirrored = invert_augmentation(aug);
            Digraph mirrored_result = apply_augmentation(inv, mirrored);
            CHECK(canonical_form(mirrored_result) == canonical_form(invert(result)));
        }
    }
}

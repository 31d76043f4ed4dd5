#pragma once

#include <optional>
#include <string>
#include <vector>

#include "d2gen/butterfly.hpp"
#include "d2gen/digraph.hpp"

namespace d2gen {

// An ear-path of the expansion J: a host path that starts and ends in V(J)
// and is internally disjoint from J; a single host edge with both endpoints
// in V(J) qualifies iff it is not an expansion edge.
struct EarPath {
    std::vector<int> vertices;

    int start() const { return vertices.front(); }
    int end() const { return vertices.back(); }
};

// All ear-paths of the expansion, each once, in a fixed deterministic order.
std::vector<EarPath> enumerate_earpaths(const Digraph& host, const Decoration& dec);

bool is_earpath(const Digraph& host, const Decoration& dec, const EarPath& p);

// ---------------------------------------------------------------------------
// Classification: every ear-path of an expansion of a strongly 2-connected
// pattern in a strongly 2-connected host is exactly one of switching, bad,
// or augmenting.
// ---------------------------------------------------------------------------
enum class EarPathKind { switching, bad, augmenting };
enum class AugVariant { a1, a2, a3, a4 };

const char* earpath_kind_name(EarPathKind k);
const char* aug_variant_name(AugVariant v);

struct EarPathClass {
    EarPathKind kind;
    // switching
    Edge pattern_edge{-1, -1};
    bool parallel = false;
    // bad
    int witness_vertex = -1;
    // augmenting
    AugVariant variant = AugVariant::a1;
    int aug_u = -1, aug_v = -1;
};

// The three predicates evaluated independently (for the trichotomy checks).
struct EarPathFlags {
    bool switching = false;
    bool bad = false;
    bool augmenting = false;

    int count() const { return (switching ? 1 : 0) + (bad ? 1 : 0) + (augmenting ? 1 : 0); }
};

bool is_switching_for(const Decoration& dec, const EarPath& p, Edge pattern_edge);
bool is_parallel_switching(const Decoration& dec, const EarPath& p, Edge pattern_edge);
bool is_bad_for(const Decoration& dec, const EarPath& p, int pattern_vertex);
bool is_bad_any(const Decoration& dec, const EarPath& p);

EarPathFlags earpath_flags(const Decoration& dec, const EarPath& p);

// Throws NotAnEarPath when p is not an ear-path of dec's expansion.
EarPathClass classify_earpath(const EarPath& p, const Decoration& dec, const Digraph& host);

// ---------------------------------------------------------------------------
// Laced paths. Two paths are laced when every weakly connected component of
// their intersection is a directed path and the components appear along the
// second path in reverse order of their appearance along the first.
// ---------------------------------------------------------------------------
int lace_component_count(const std::vector<int>& p, const std::vector<int>& q);
bool paths_laced(const std::vector<int>& p, const std::vector<int>& q);
bool properly_laced(const std::vector<int>& p, const std::vector<int>& q);

// A Start(q)-End(q) path inside the union of the two paths, laced with p,
// minimizing the number of weakly connected components of the intersection
// with p (ties broken by lexicographically smallest vertex sequence).
std::vector<int> lace(const std::vector<int>& p, const std::vector<int>& q);

// ---------------------------------------------------------------------------
// Switching. Replaces the portion of the expansion the path runs parallel
// to, yielding a model of the same pattern whose expansion gains exactly
// E(p) and loses exactly the replaced segment's interior.
// ---------------------------------------------------------------------------
ButterflyModel switch_onto(const ButterflyModel& m, const EarPath& p);

// ---------------------------------------------------------------------------
// Blocking vertices: r on the root path of pattern vertex v such that no
// switching path crosses from the strict prefix of the root path (up to r)
// out of it, and none enters the strict suffix from outside.
// ---------------------------------------------------------------------------
bool is_blocking_vertex(const Digraph& host, const Decoration& dec, int pattern_vertex, int r);

// ---------------------------------------------------------------------------
// Escapes: alternating concatenations of bad/switching segments properly
// laced with the (u,v) corridor in_star(v) /\ out_star(u). Validated, never
// synthesized.
// ---------------------------------------------------------------------------
struct Escape {
    std::vector<std::vector<int>> segments;  // P_0 .. P_2k, consecutive share endpoints
    Edge pattern_edge{-1, -1};               // (u,v)

    int duration() const { return (static_cast<int>(segments.size()) - 1) / 2; }
};

struct EscapeCheck {
    bool ok = true;
    std::string clause;  // first failing clause when !ok
};

EscapeCheck validate_escape(const Escape& esc, const Decoration& dec, const Digraph& host);

// "v0,v1,...|w0,w1,..." with '|' separating segments.
std::string serialize_path(const std::vector<int>& path);
std::vector<int> parse_path(std::string_view text);
std::string serialize_escape(const Escape& esc);
std::vector<std::vector<int>> parse_segments(std::string_view text);

}  // namespace d2gen

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "d2gen/augment.hpp"
#include "d2gen/butterfly.hpp"
#include "d2gen/digraph.hpp"

namespace d2gen {

Digraph bidirected_cycle(int k);
Digraph diagonal_four_cycle();  // directed 4-cycle plus the two anti-diametrical digons

struct BaseMember {
    std::string name;  // "bidirected-C3", "A4", ...
    Digraph graph;
};

// The base family up to the given order: bidirected C_k for 3 <= k <=
// max_order, plus the diagonal four-cycle when max_order >= 4.
std::vector<BaseMember> base_class(int max_order);

// ---------------------------------------------------------------------------
// Bounded generation closure under the four augmentations.
// ---------------------------------------------------------------------------
struct ClosureMember {
    Digraph rep;
    std::optional<CanonicalForm> parent;  // none for base members
    std::string descriptor;               // empty for base members
};

struct ClosureSet {
    int max_order = 0;
    std::map<CanonicalForm, ClosureMember> members;

    std::map<int, int> counts_by_order() const;
};

inline constexpr int default_generation_bound = 6;

// Fixed point of: seed with the base class, apply every augmentation within
// the vertex budget to every member, dedup by canonical form. Provenance of
// a non-base member is the smallest (parent form, descriptor) pair over all
// ways the closure produces it, so the result is schedule-independent.
ClosureSet generate_closure(int max_order, int jobs = 1,
                            int bound = default_generation_bound);

// Canonical forms of all strongly 2-connected digraphs with 3 <= order <=
// max_order, each exactly once. Orders up to 5 by exhaustive scan over all
// labeled digraphs; order 6 by a pruned out-row search (slow; minutes).
std::vector<CanonicalForm> oracle_enumerate(int max_order, int jobs = 1);

struct GenerationReport {
    bool equal = false;
    std::map<int, int> closure_counts;
    std::map<int, int> oracle_counts;
    std::vector<CanonicalForm> missing;  // in the oracle, not generated
    std::vector<CanonicalForm> extra;    // generated, not in the oracle

    std::string to_string() const;
};

GenerationReport verify_generation(int max_order, int jobs = 1);

// Scans the base class in order for a butterfly-minor of d; returns the
// witness member's name. Strongly 2-connected inputs always have one.
std::optional<std::string> contains_base_minor(const Digraph& d, MinorIndex& index);

// ---------------------------------------------------------------------------
// Closure directory: members.d2c (multi-record, canonical order),
// provenance.tsv (form-hash, parent-hash or "-", descriptor or "-"),
// meta (max_order and counts).
// ---------------------------------------------------------------------------
void write_closure_dir(const ClosureSet& closure, const std::string& dir);
ClosureSet read_closure_dir(const std::string& dir);

}  // namespace d2gen

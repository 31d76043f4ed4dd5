#pragma once

#include <string>
#include <vector>

#include "d2gen/augment.hpp"
#include "d2gen/butterfly.hpp"
#include "d2gen/digraph.hpp"

namespace d2gen {

// A certified chain D_0, ..., D_n with D_0 isomorphic to the pattern and
// D_n isomorphic to the host; step i applies steps[i] to graphs[i].
struct AugmentationSequence {
    std::vector<Digraph> graphs;
    std::vector<Augmentation> steps;

    int length() const { return static_cast<int>(steps.size()); }
};

inline constexpr int default_splitter_bound = 6;

// Greedy certified search: from the current digraph, enumerate augmentations
// within |V(d)| vertices, keep the ones whose result is a butterfly-minor of
// d, and advance to the smallest (canonical form, descriptor) candidate.
// Edge counts grow strictly, so this terminates in at most
// |E(d)| - |E(h)| steps; a missing successor throws NoSuccessor.
AugmentationSequence find_sequence(const Digraph& h, const Digraph& d, MinorIndex& index,
                                   int max_order = default_splitter_bound);

struct SequenceCheck {
    bool ok = true;
    std::string report;  // names the first failing step and clause
};

// Re-checks everything from scratch: endpoint isomorphisms, per-step
// re-application, strong 2-connectivity, minor containment in the next step
// and in d, strict edge growth.
SequenceCheck validate_sequence(const AugmentationSequence& s, const Digraph& h,
                                const Digraph& d, MinorIndex& index);

// Text form: "splitter v1", then alternating d2c records and descriptor
// lines.
std::string serialize_sequence(const AugmentationSequence& s);
AugmentationSequence parse_sequence(std::string_view text);

}  // namespace d2gen

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "d2gen/butterfly.hpp"
#include "d2gen/digraph.hpp"

namespace d2gen {

// ---------------------------------------------------------------------------
// Splits. An out-split at v partitions N+(v) into a base part N_b (>=1) and
// an exposed part N_e (>=2); v becomes base (keeps its index) plus a new
// exposed vertex (index n) with the single edge base->exposed. In-splits are
// the mirror image (edge exposed->base).
// ---------------------------------------------------------------------------
struct SplitSpec {
    int vertex = -1;
    bool out = true;           // out-split or in-split
    std::vector<int> exposed;  // sorted exposed neighbor set
};

struct SplitResult {
    Digraph graph;
    int base;     // same index as the split vertex
    int exposed;  // new index (old n)
};

SplitResult split(const Digraph& d, const SplitSpec& s);

// Replaces edge (u,v) with the path u -> z_1 -> ... -> z_len -> v and weaves
// the return path x -> z_len -> ... -> z_1 -> y through it. New vertices get
// indices n..n+len-1 in that order.
Digraph add_chain(const Digraph& d, Edge e, int x, int y, int len);

struct SubdivideResult {
    Digraph graph;
    int middle;  // new index (old n)
};

SubdivideResult subdivide_edge(const Digraph& d, Edge e);

// ---------------------------------------------------------------------------
// The four augmentations. Descriptors are expressed against the input
// digraph's vertex names; apply_augmentation resolves the naming of split
// vertices internally (see format_augmentation for the text grammar).
// ---------------------------------------------------------------------------

struct BasicAug {
    int u = -1, v = -1;
    std::optional<std::vector<int>> out_split;  // exposed set of an out-split at u
    std::optional<std::vector<int>> in_split;   // exposed set of an in-split at v
};

// Out-split at w, then in-split at base(w), then the edge
// exposed(base(w)) -> exposed(w).
struct BasicDoubleAug {
    int w = -1;
    std::vector<int> out_exposed;
    std::vector<int> in_exposed;
};

enum class ClusterSlot { base, exposed };

struct ChainAug {
    int u = -1, v = -1;
    std::optional<std::vector<int>> out_split;
    std::optional<std::vector<int>> in_split;
    ClusterSlot tail_slot = ClusterSlot::base;  // which of b(u)/e(u) tails the carrier
    ClusterSlot head_slot = ClusterSlot::base;  // which of b(v)/e(v) heads it
    int len = 1;
};

// Subdivide the digon (u,v),(v,u): x on (v,u), y on (u,v); add (x,y) and
// weave a y-x-chain of the given length through it.
struct CollaretteAug {
    int u = -1, v = -1;
    int len = 1;
};

// w has in-neighborhood {x,a} and out-neighborhood {y,b} with the adjacency
// side conditions; subdivide (a,w) (side=in) or (w,b) (side=out) with z and
// add the edges (x,z),(z,y).
struct BraceletAug {
    int w = -1, x = -1, a = -1, y = -1, b = -1;
    bool subdivide_in = true;
};

using Augmentation =
    std::variant<BasicAug, BasicDoubleAug, ChainAug, CollaretteAug, BraceletAug>;

// Single-line s-expression, e.g.
//   (basic u=0 v=1 out-split=(0;2,3))
//   (basic-double w=2 out-split=(2;0,1) in-split=(2;3,4))
//   (chain u=0 v=1 out-split=(0;1,3) carrier=(e(u),v) len=2)
//   (collarette u=0 v=1 len=1)
//   (bracelet w=1 x=3 a=0 y=2 b=3 side=in)
std::string format_augmentation(const Augmentation& a);
Augmentation parse_augmentation(std::string_view text);

Digraph apply_augmentation(const Digraph& d, const Augmentation& a);

// Every augmentation valid on d whose result has at most vertex_budget
// vertices, sorted by descriptor string, each exactly once.
std::vector<std::pair<Augmentation, Digraph>> enumerate_augmentations(const Digraph& d,
                                                                      int vertex_budget);

// The mirrored augmentation on invert(d): applying it there yields a digraph
// isomorphic to invert(apply_augmentation(d, a)).
Augmentation invert_augmentation(const Augmentation& a);

// A delete/contract script on apply_augmentation(d, a) that replays to
// exactly d, witnessing that d is a butterfly-minor of the result.
WitnessScript augmentation_witness(const Digraph& d, const Augmentation& a);

}  // namespace d2gen

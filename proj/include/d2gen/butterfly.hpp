#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "d2gen/digraph.hpp"

namespace d2gen {

// ---------------------------------------------------------------------------
// Butterfly contraction.
//
// An edge (u,v) is butterfly-contractible if it is u's only outgoing edge or
// v's only incoming edge. Contracting identifies u and v, then drops loops
// and duplicate pairs; the merged vertex keeps index min(u,v) and indices
// above max(u,v) shift down by one.
// ---------------------------------------------------------------------------

bool is_contractible(const Digraph& d, Edge e);
std::vector<Edge> contractible_edges(const Digraph& d);

struct ContractResult {
    Digraph graph;
    std::vector<int> old_to_new;  // old index -> new index (merged pair maps together)
};

ContractResult butterfly_contract(const Digraph& d, Edge e);

// Vertex deletion with dense re-indexing (old indices above v shift down).
struct DeleteVertexResult {
    Digraph graph;
    std::vector<int> old_to_new;  // deleted vertex maps to -1
};

DeleteVertexResult delete_vertex(const Digraph& d, int v);

Digraph delete_edge(const Digraph& d, Edge e);

// ---------------------------------------------------------------------------
// Witness scripts: replayable delete/contract sequences. Each op addresses
// the graph state produced by the previous ops (indices re-densified after
// DV and C).
//
// Text form, one op per line: "D u v" (delete edge), "DV v" (delete
// vertex), "C u v" (butterfly-contract edge).
// ---------------------------------------------------------------------------
struct WitnessOp {
    enum class Kind { delete_edge, delete_vertex, contract };
    Kind kind;
    int u = 0;
    int v = 0;
};

struct WitnessScript {
    std::vector<WitnessOp> ops;

    std::string serialize() const;
    static WitnessScript parse(std::string_view text);
    Digraph replay(const Digraph& start) const;
};

// ---------------------------------------------------------------------------
// Minor testing. Reference backend: breadth-first search over the
// delete/contract state space, states deduplicated by canonical form,
// pruned when vertex or edge count drops below the pattern's.
//
// MinorIndex memoizes one-step successor forms globally, so repeated
// queries against overlapping state spaces share all the work. It is an
// explicit object rather than hidden global state; share one instance
// across related queries.
// ---------------------------------------------------------------------------
class MinorIndex {
public:
    uint32_t intern(const CanonicalForm& form);
    const CanonicalForm& form(uint32_t id) const { return forms_[id]; }

    // All forms reachable from id by single delete/contract steps.
    const std::vector<uint32_t>& successors(uint32_t id);

    // True iff pattern h is a butterfly-minor of host d.
    bool is_minor(const Digraph& h, const Digraph& d);

    // Every form reachable from d (including d itself).
    std::vector<uint32_t> minor_closure(const Digraph& d);

    size_t form_count() const { return forms_.size(); }

private:
    std::unordered_map<std::string, uint32_t> id_by_key_;
    std::vector<CanonicalForm> forms_;
    std::vector<std::vector<uint32_t>> succ_;
    std::vector<char> succ_ready_;
};

bool is_butterfly_minor(const Digraph& h, const Digraph& d, MinorIndex& index);

// Convenience overload with a private index (no sharing).
bool is_butterfly_minor(const Digraph& h, const Digraph& d);

// Finds a delete/contract script transforming d into a digraph isomorphic
// to h, or nullopt. BFS over concrete states deduplicated by canonical form.
std::optional<WitnessScript> find_minor_witness(const Digraph& h, const Digraph& d);

// ---------------------------------------------------------------------------
// Butterfly-models. mu assigns each pattern vertex a branch subgraph (an
// in-branching and an out-branching sharing only their root) and each
// pattern edge a host path from the tail's out-branching to the head's
// in-branching, internally disjoint from everything else.
// ---------------------------------------------------------------------------
struct Branch {
    int root = -1;
    std::vector<Edge> in_edges;   // in-branching, edges oriented toward root
    std::vector<Edge> out_edges;  // out-branching, edges oriented away from root

    std::vector<int> in_vertices() const;   // root included
    std::vector<int> out_vertices() const;  // root included
    std::vector<int> vertices() const;      // union
};

struct ButterflyModel {
    Digraph host;
    Digraph pattern;
    std::vector<Branch> vertex_map;          // indexed by pattern vertex
    std::vector<std::vector<int>> edge_map;  // indexed like pattern.edges(); host paths

    // All vertices / edges used by the model (the expansion mu(H)).
    uint64_t expansion_vertices() const;
    std::vector<Edge> expansion_edges() const;

    std::string serialize() const;
    static ButterflyModel parse(std::string_view text, const Digraph& host);
};

struct ModelCheck {
    bool ok = true;
    std::string violation;  // names the first violated clause
};

// Never throws; reports the first violated model clause.
ModelCheck validate_model(const ButterflyModel& m);

// The trivial model of d in itself.
ButterflyModel identity_model(const Digraph& d);

// Mirror of a model in the inverted host/pattern: branchings swap roles and
// bridge paths reverse.
ButterflyModel invert_model(const ButterflyModel& m);

struct ExpansionSearchOptions {
    // Restrict the search to these host vertices (mask); 0 means all.
    uint64_t allowed_vertices = 0;
    // When set, the model must use exactly this edge set (and all vertices
    // incident to it). Used to re-derive a model for a known expansion.
    const std::vector<Edge>* exact_edges = nullptr;
    int max_n = default_canon_bound;
};

// Backtracking search for a butterfly-model of h in d. Deterministic: the
// first model in a fixed search order (roots ascending, branch sets by size
// then lexicographic, bridges by DFS order). Returns nullopt iff none
// exists within the options' constraints.
std::optional<ButterflyModel> find_expansion(const Digraph& h, const Digraph& d,
                                             const ExpansionSearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Decoration: the derived structure of an expansion. All sets are relative
// to the expansion subgraph J = mu(H), not the full host.
// ---------------------------------------------------------------------------
struct Subpath {
    std::vector<int> vertices;  // in path order; single vertex => trivial path
    uint64_t mask = 0;

    bool contains(int v) const { return mask >> v & 1; }
    int start() const { return vertices.front(); }
    int end() const { return vertices.back(); }
    size_t length() const { return vertices.size() - 1; }
};

struct Subtree {
    int root = -1;
    uint64_t mask = 0;  // vertex set
    std::vector<Edge> edges;

    bool contains(int v) const { return mask >> v & 1; }
};

struct Decoration {
    Digraph host;
    Digraph pattern;
    uint64_t expansion_mask = 0;
    std::vector<Edge> expansion_edges;

    std::vector<Subtree> in_tree;    // per pattern vertex
    std::vector<Subtree> out_tree;
    std::vector<Subtree> in_star;
    std::vector<Subtree> out_star;
    std::vector<Subpath> root_path;  // out_star intersected with in_star
    std::vector<uint64_t> branchset; // out_tree + in_tree + root_path vertex sets
    std::vector<Subpath> bridge;     // per pattern edge

    // adjacency of the expansion subgraph, indexed by host vertex
    std::vector<uint64_t> exp_out;
    std::vector<uint64_t> exp_in;

    bool in_expansion(int v) const { return expansion_mask >> v & 1; }
    bool has_expansion_edge(int u, int v) const { return exp_out[u] >> v & 1; }
    int expansion_out_degree(int v) const;
    int expansion_in_degree(int v) const;
};

// Requires validate_model(m).ok; throws InvalidModel otherwise.
Decoration decorate(const ButterflyModel& m);

}  // namespace d2gen

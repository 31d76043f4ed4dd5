#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace d2gen {

// Error codes shared across the library. Every throwing operation uses
// `error` with one of these codes so callers (CLI, bindings, tests) can
// dispatch without string matching.
enum class errc {
    malformed_header,
    duplicate_edge,
    loop_edge,
    index_out_of_range,
    size_bound_exceeded,
    not_contractible,
    degree_too_small,
    not_a_vertex,
    edge_absent,
    simplicity_violation,
    precondition_violated,
    invalid_model,
    not_an_earpath,
    not_switching,
    not_on_root_path,
    not_a_minor,
    not_strongly_2_connected,
    no_successor,
    bad_format,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] void fail(errc code, const std::string& msg);

using Edge = std::pair<int, int>;

// Simple finite digraph on dense vertex indices 0..n-1. No loops, no
// parallel edges; a digon (u,v),(v,u) is two distinct edges and is fine.
// Immutable after construction. Vertex count is capped at 64 so adjacency
// fits one machine word per vertex; everything in this library operates at
// desk scale far below that.
class Digraph {
public:
    static constexpr int max_vertices = 64;

    Digraph() = default;
    Digraph(int n, std::vector<Edge> edges);

    int order() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_vertex(int v) const { return v >= 0 && v < n_; }
    bool has_edge(int u, int v) const {
        return has_vertex(u) && has_vertex(v) && (out_bits_[u] >> v & 1);
    }

    const std::vector<int>& out_neighbors(int v) const;
    const std::vector<int>& in_neighbors(int v) const;
    int out_degree(int v) const { return static_cast<int>(out_neighbors(v).size()); }
    int in_degree(int v) const { return static_cast<int>(in_neighbors(v).size()); }

    // Bitmask views of the adjacency rows/columns (bit j of out_mask(v) is
    // the edge (v,j)).
    uint64_t out_mask(int v) const;
    uint64_t in_mask(int v) const;
    uint64_t vertex_mask() const {
        return n_ == 64 ? ~uint64_t{0} : (uint64_t{1} << n_) - 1;
    }

    bool operator==(const Digraph& other) const {
        return n_ == other.n_ && edges_ == other.edges_;
    }

private:
    void check_vertex(int v) const;

    int n_ = 0;
    std::vector<Edge> edges_;  // sorted by (tail, head), unique
    std::vector<uint64_t> out_bits_;
    std::vector<uint64_t> in_bits_;
    std::vector<std::vector<int>> out_adj_;  // sorted
    std::vector<std::vector<int>> in_adj_;   // sorted
};

// ---------------------------------------------------------------------------
// d2c text format.
//
//   first line "n m", then m lines "u v" (edge (u,v)); '#' starts a comment
//   line; records in a multi-record stream are separated by blank lines.
// ---------------------------------------------------------------------------
Digraph parse_d2c(std::string_view text);
std::vector<Digraph> parse_d2c_stream(std::string_view text);
std::string serialize_d2c(const Digraph& d);

Digraph read_d2c_file(const std::string& path);

// ---------------------------------------------------------------------------
// Connectivity.
// ---------------------------------------------------------------------------

// n=0 and n=1 count as strongly connected (vacuous).
bool is_strongly_connected(const Digraph& d);

// Restricted to the vertices in `keep`; <=1 vertex counts as connected.
bool is_strongly_connected_within(const Digraph& d, uint64_t keep);

// True iff n >= k+1 and d-S is strongly connected for every vertex set S
// with |S| <= k-1 (checked by exhaustion over subsets). Requires k >= 1.
bool is_strongly_k_connected(const Digraph& d, int k);

// ---------------------------------------------------------------------------
// Relabeling / inversion.
// ---------------------------------------------------------------------------

// perm[old] = new; perm must be a permutation of 0..n-1.
Digraph relabel(const Digraph& d, const std::vector<int>& perm);

Digraph invert(const Digraph& d);

// ---------------------------------------------------------------------------
// Canonical form: the lexicographically smallest row-major adjacency-matrix
// bit string over all vertex permutations. Exact (exhaustive search with a
// certain-loss prefix prune); equal forms iff the digraphs are isomorphic.
// ---------------------------------------------------------------------------
struct CanonicalForm {
    int n = 0;
    std::string bits;  // n*n chars of '0'/'1', row-major

    auto operator<=>(const CanonicalForm&) const = default;

    // Compact stable key, usable as a map key and in files.
    std::string key() const { return std::to_string(n) + ":" + bits; }
    // 16-hex-digit FNV-1a hash of key(), used in provenance files.
    std::string hash() const;
};

inline constexpr int default_canon_bound = 10;

CanonicalForm canonical_form(const Digraph& d, int max_n = default_canon_bound);

// The digraph whose adjacency matrix is exactly `form.bits`.
Digraph from_form(const CanonicalForm& form);

bool isomorphic(const Digraph& a, const Digraph& b, int max_n = default_canon_bound);

}  // namespace d2gen

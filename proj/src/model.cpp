#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

#include "d2gen/butterfly.hpp"

namespace d2gen {

namespace {

uint64_t bit(int v) { return uint64_t{1} << v; }

std::vector<int> mask_to_vector(uint64_t mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return out;
}

std::string edge_str(int u, int v) {
    return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Branch / model basics
// ---------------------------------------------------------------------------

std::vector<int> Branch::in_vertices() const {
    uint64_t mask = bit(root);
    for (auto [a, b] : in_edges) mask |= bit(a) | bit(b);
    return mask_to_vector(mask);
}

std::vector<int> Branch::out_vertices() const {
    uint64_t mask = bit(root);
    for (auto [a, b] : out_edges) mask |= bit(a) | bit(b);
    return mask_to_vector(mask);
}

std::vector<int> Branch::vertices() const {
    uint64_t mask = bit(root);
    for (auto [a, b] : in_edges) mask |= bit(a) | bit(b);
    for (auto [a, b] : out_edges) mask |= bit(a) | bit(b);
    return mask_to_vector(mask);
}

uint64_t ButterflyModel::expansion_vertices() const {
    uint64_t mask = 0;
    for (const auto& br : vertex_map)
        for (int v : br.vertices()) mask |= bit(v);
    for (const auto& path : edge_map)
        for (int v : path) mask |= bit(v);
    return mask;
}

std::vector<Edge> ButterflyModel::expansion_edges() const {
    std::vector<Edge> edges;
    for (const auto& br : vertex_map) {
        edges.insert(edges.end(), br.in_edges.begin(), br.in_edges.end());
        edges.insert(edges.end(), br.out_edges.begin(), br.out_edges.end());
    }
    for (const auto& path : edge_map)
        for (size_t i = 0; i + 1 < path.size(); ++i) edges.emplace_back(path[i], path[i + 1]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

ButterflyModel identity_model(const Digraph& d) {
    ButterflyModel m;
    m.host = d;
    m.pattern = d;
    m.vertex_map.resize(d.order());
    for (int v = 0; v < d.order(); ++v) m.vertex_map[v].root = v;
    m.edge_map.reserve(d.edges().size());
    for (auto [u, v] : d.edges()) m.edge_map.push_back({u, v});
    return m;
}

ButterflyModel invert_model(const ButterflyModel& m) {
    ButterflyModel out;
    out.host = invert(m.host);
    out.pattern = invert(m.pattern);
    out.vertex_map.resize(m.vertex_map.size());
    for (size_t v = 0; v < m.vertex_map.size(); ++v) {
        const Branch& br = m.vertex_map[v];
        Branch& nb = out.vertex_map[v];
        nb.root = br.root;
        // in-branching edges (a->b toward root) become out-branching edges
        // (b->a away from root) in the inverted host, and vice versa.
        for (auto [a, b] : br.in_edges) nb.out_edges.emplace_back(b, a);
        for (auto [a, b] : br.out_edges) nb.in_edges.emplace_back(b, a);
        std::sort(nb.in_edges.begin(), nb.in_edges.end());
        std::sort(nb.out_edges.begin(), nb.out_edges.end());
    }
    out.edge_map.resize(m.edge_map.size());
    const auto& old_edges = m.pattern.edges();
    const auto& new_edges = out.pattern.edges();
    for (size_t i = 0; i < old_edges.size(); ++i) {
        Edge rev{old_edges[i].second, old_edges[i].first};
        auto it = std::lower_bound(new_edges.begin(), new_edges.end(), rev);
        assert(it != new_edges.end() && *it == rev);
        std::vector<int> path(m.edge_map[i].rbegin(), m.edge_map[i].rend());
        out.edge_map[static_cast<size_t>(it - new_edges.begin())] = std::move(path);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model serialization (CLI-facing)
// ---------------------------------------------------------------------------

std::string ButterflyModel::serialize() const {
    std::ostringstream os;
    os << "model v1\n";
    os << "pattern " << pattern.order() << ' ' << pattern.edge_count() << '\n';
    for (auto [s, t] : pattern.edges()) os << s << ' ' << t << '\n';
    auto edges_str = [](const std::vector<Edge>& edges) {
        if (edges.empty()) return std::string("-");
        std::string s;
        for (size_t i = 0; i < edges.size(); ++i) {
            if (i) s += ';';
            s += std::to_string(edges[i].first) + ',' + std::to_string(edges[i].second);
        }
        return s;
    };
    for (size_t v = 0; v < vertex_map.size(); ++v) {
        const Branch& br = vertex_map[v];
        os << "vertex " << v << " root=" << br.root << " in=" << edges_str(br.in_edges)
           << " out=" << edges_str(br.out_edges) << '\n';
    }
    for (size_t i = 0; i < edge_map.size(); ++i) {
        auto [s, t] = pattern.edges()[i];
        os << "edge " << s << ' ' << t << " path=";
        for (size_t j = 0; j < edge_map[i].size(); ++j) {
            if (j) os << ',';
            os << edge_map[i][j];
        }
        os << '\n';
    }
    return os.str();
}

namespace {

std::vector<Edge> parse_edge_list(const std::string& text, int lineno) {
    std::vector<Edge> out;
    if (text == "-") return out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        size_t comma = item.find(',');
        if (comma == std::string::npos)
            fail(errc::bad_format, "model line " + std::to_string(lineno) + ": bad edge list");
        out.emplace_back(std::stoi(item.substr(0, comma)), std::stoi(item.substr(comma + 1)));
    }
    return out;
}

std::string expect_prefix(const std::string& token, const std::string& prefix, int lineno) {
    if (token.rfind(prefix, 0) != 0)
        fail(errc::bad_format,
             "model line " + std::to_string(lineno) + ": expected '" + prefix + "...'");
    return token.substr(prefix.size());
}

}  // namespace

ButterflyModel ButterflyModel::parse(std::string_view text, const Digraph& host) {
    ButterflyModel m;
    m.host = host;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line() || line != "model v1")
        fail(errc::bad_format, "model: missing 'model v1' header");
    if (!next_line()) fail(errc::bad_format, "model: missing pattern header");
    int pn = 0, pm = 0;
    {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag >> pn >> pm) || tag != "pattern")
            fail(errc::bad_format, "model line " + std::to_string(lineno) + ": expected pattern");
    }
    std::vector<Edge> pedges;
    for (int i = 0; i < pm; ++i) {
        if (!next_line()) fail(errc::bad_format, "model: truncated pattern edges");
        std::istringstream ls(line);
        int s = 0, t = 0;
        if (!(ls >> s >> t))
            fail(errc::bad_format, "model line " + std::to_string(lineno) + ": expected edge");
        pedges.emplace_back(s, t);
    }
    m.pattern = Digraph(pn, pedges);
    m.vertex_map.resize(pn);
    m.edge_map.resize(m.pattern.edges().size());
    std::vector<char> vertex_seen(pn, 0), edge_seen(m.pattern.edges().size(), 0);
    while (next_line()) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "vertex") {
            int v = -1;
            std::string root_tok, in_tok, out_tok;
            if (!(ls >> v >> root_tok >> in_tok >> out_tok) || v < 0 || v >= pn)
                fail(errc::bad_format, "model line " + std::to_string(lineno));
            Branch br;
            br.root = std::stoi(expect_prefix(root_tok, "root=", lineno));
            br.in_edges = parse_edge_list(expect_prefix(in_tok, "in=", lineno), lineno);
            br.out_edges = parse_edge_list(expect_prefix(out_tok, "out=", lineno), lineno);
            m.vertex_map[v] = std::move(br);
            vertex_seen[v] = 1;
        } else if (tag == "edge") {
            int s = -1, t = -1;
            std::string path_tok;
            if (!(ls >> s >> t >> path_tok))
                fail(errc::bad_format, "model line " + std::to_string(lineno));
            auto& edges = m.pattern.edges();
            auto it = std::lower_bound(edges.begin(), edges.end(), Edge{s, t});
            if (it == edges.end() || *it != Edge{s, t})
                fail(errc::bad_format, "model line " + std::to_string(lineno) +
                                           ": unknown pattern edge " + edge_str(s, t));
            std::vector<int> path;
            std::istringstream ps(expect_prefix(path_tok, "path=", lineno));
            std::string num;
            while (std::getline(ps, num, ',')) path.push_back(std::stoi(num));
            size_t idx = static_cast<size_t>(it - edges.begin());
            m.edge_map[idx] = std::move(path);
            edge_seen[idx] = 1;
        } else {
            fail(errc::bad_format,
                 "model line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
        }
    }
    for (int v = 0; v < pn; ++v)
        if (!vertex_seen[v])
            fail(errc::bad_format, "model: missing vertex " + std::to_string(v));
    for (size_t i = 0; i < edge_seen.size(); ++i)
        if (!edge_seen[i])
            fail(errc::bad_format, "model: missing edge " +
                                       edge_str(m.pattern.edges()[i].first,
                                                m.pattern.edges()[i].second));
    return m;
}

// ---------------------------------------------------------------------------
// Model validation
// ---------------------------------------------------------------------------

namespace {

// Checks that `edges` forms an arborescence on its vertices rooted at
// `root`: oriented toward the root when `toward_root`, away otherwise.
// Returns the vertex mask, or nullopt on violation.
std::optional<uint64_t> check_branching(const Digraph& host, int root,
                                        const std::vector<Edge>& edges, bool toward_root,
                                        std::string& why) {
    uint64_t mask = bit(root);
    std::map<int, int> link;  // non-root vertex -> its unique neighbor closer to root
    for (auto [a, b] : edges) {
        if (!host.has_edge(a, b)) {
            why = "branching edge " + edge_str(a, b) + " not in host";
            return std::nullopt;
        }
        int child = toward_root ? a : b;
        int parent = toward_root ? b : a;
        if (child == root) {
            why = "branching edge " + edge_str(a, b) + " leaves the root on the wrong side";
            return std::nullopt;
        }
        if (link.count(child)) {
            why = "vertex " + std::to_string(child) + " has two branching edges";
            return std::nullopt;
        }
        link[child] = parent;
        mask |= bit(a) | bit(b);
    }
    // every vertex must reach the root through link without cycles
    for (auto [start, _] : link) {
        int cur = start;
        int steps = 0;
        while (cur != root) {
            auto it = link.find(cur);
            if (it == link.end()) {
                why = "vertex " + std::to_string(cur) + " disconnected from branching root";
                return std::nullopt;
            }
            cur = it->second;
            if (++steps > static_cast<int>(link.size())) {
                why = "cycle in branching at vertex " + std::to_string(start);
                return std::nullopt;
            }
        }
    }
    return mask;
}

}  // namespace

ModelCheck validate_model(const ButterflyModel& m) {
    auto bad = [](std::string why) { return ModelCheck{false, std::move(why)}; };
    int pn = m.pattern.order();
    if (static_cast<int>(m.vertex_map.size()) != pn)
        return bad("vertex_map size does not match pattern order");
    if (m.edge_map.size() != m.pattern.edges().size())
        return bad("edge_map size does not match pattern edge count");

    std::vector<uint64_t> branch_mask(pn, 0);
    std::vector<uint64_t> in_mask(pn, 0), out_mask(pn, 0);
    for (int v = 0; v < pn; ++v) {
        const Branch& br = m.vertex_map[v];
        if (!m.host.has_vertex(br.root))
            return bad("branch-structure: root of vertex " + std::to_string(v) +
                       " not a host vertex");
        std::string why;
        auto in = check_branching(m.host, br.root, br.in_edges, true, why);
        if (!in) return bad("branch-structure (in, vertex " + std::to_string(v) + "): " + why);
        auto out = check_branching(m.host, br.root, br.out_edges, false, why);
        if (!out) return bad("branch-structure (out, vertex " + std::to_string(v) + "): " + why);
        if ((*in & *out) != bit(br.root))
            return bad("branch-structure: in- and out-branching of vertex " +
                       std::to_string(v) + " share more than their common root");
        in_mask[v] = *in;
        out_mask[v] = *out;
        branch_mask[v] = *in | *out;
    }
    for (int u = 0; u < pn; ++u)
        for (int v = u + 1; v < pn; ++v)
            if (branch_mask[u] & branch_mask[v])
                return bad("disjointness: branch sets of " + std::to_string(u) + " and " +
                           std::to_string(v) + " intersect");

    uint64_t all_branches = 0;
    for (int v = 0; v < pn; ++v) all_branches |= branch_mask[v];

    std::vector<uint64_t> interior_mask(m.edge_map.size(), 0);
    for (size_t i = 0; i < m.edge_map.size(); ++i) {
        auto [s, t] = m.pattern.edges()[i];
        const auto& path = m.edge_map[i];
        if (path.size() < 2)
            return bad("bridge-endpoints: path for " + edge_str(s, t) +
                       " must have length >= 1");
        uint64_t seen = 0;
        for (size_t j = 0; j < path.size(); ++j) {
            if (!m.host.has_vertex(path[j]))
                return bad("bridge " + edge_str(s, t) + ": vertex out of range");
            if (seen & bit(path[j]))
                return bad("bridge " + edge_str(s, t) + ": repeated vertex");
            seen |= bit(path[j]);
            if (j + 1 < path.size() && !m.host.has_edge(path[j], path[j + 1]))
                return bad("bridge " + edge_str(s, t) + ": edge " +
                           edge_str(path[j], path[j + 1]) + " not in host");
        }
        if (!(out_mask[s] & bit(path.front())))
            return bad("bridge-endpoints: path for " + edge_str(s, t) +
                       " does not start in the out-branching of " + std::to_string(s));
        if (!(in_mask[t] & bit(path.back())))
            return bad("bridge-endpoints: path for " + edge_str(s, t) +
                       " does not end in the in-branching of " + std::to_string(t));
        uint64_t interior = seen & ~bit(path.front()) & ~bit(path.back());
        if (interior & all_branches)
            return bad("bridge-internal-disjointness: interior of " + edge_str(s, t) +
                       " meets a branch set");
        interior_mask[i] = interior;
    }
    // interiors must avoid every other bridge entirely (endpoints included)
    for (size_t i = 0; i < m.edge_map.size(); ++i) {
        for (size_t j = 0; j < m.edge_map.size(); ++j) {
            if (i == j) continue;
            uint64_t other = 0;
            for (int v : m.edge_map[j]) other |= bit(v);
            if (interior_mask[i] & other) {
                auto [s, t] = m.pattern.edges()[i];
                return bad("bridge-internal-disjointness: interior of " + edge_str(s, t) +
                           " meets another bridge");
            }
        }
    }
    return ModelCheck{};
}

// ---------------------------------------------------------------------------
// Expansion search
// ---------------------------------------------------------------------------

namespace {

struct ExpansionSearch {
    const Digraph& pattern;
    const Digraph& host;
    const ExpansionSearchOptions& opts;

    uint64_t allowed = 0;          // vertices the model may use
    bool exact = false;
    std::set<Edge> exact_set;      // when exact: the edges to cover, exactly

    std::vector<int> vertex_order; // pattern vertices, most constrained first
    std::vector<int> roots;
    std::vector<uint64_t> set_in, set_out;
    uint64_t used = 0;             // vertices in branch sets
    uint64_t path_vertices = 0;    // vertices on already-routed bridges
    std::vector<std::vector<int>> paths;  // per pattern edge index
    int budget = 0;

    std::optional<ButterflyModel> result;

    ExpansionSearch(const Digraph& h, const Digraph& d, const ExpansionSearchOptions& o)
        : pattern(h), host(d), opts(o) {
        allowed = o.allowed_vertices ? (o.allowed_vertices & d.vertex_mask()) : d.vertex_mask();
        if (o.exact_edges) {
            exact = true;
            uint64_t incident = 0;
            for (auto e : *o.exact_edges) {
                exact_set.insert(e);
                incident |= bit(e.first) | bit(e.second);
            }
            allowed = incident;
        }
        budget = std::popcount(allowed) - h.order();
        vertex_order.resize(h.order());
        for (int i = 0; i < h.order(); ++i) vertex_order[i] = i;
        std::sort(vertex_order.begin(), vertex_order.end(), [&](int a, int b) {
            int da = h.out_degree(a) + h.in_degree(a);
            int db = h.out_degree(b) + h.in_degree(b);
            if (da != db) return da > db;
            return a < b;
        });
        roots.assign(h.order(), -1);
        set_in.assign(h.order(), 0);
        set_out.assign(h.order(), 0);
        paths.resize(h.edges().size());
    }

    bool edge_ok(int a, int b) const {
        if (!host.has_edge(a, b)) return false;
        if (!(allowed >> a & 1) || !(allowed >> b & 1)) return false;
        if (exact && !exact_set.count({a, b})) return false;
        return true;
    }

    uint64_t out_row(int v) const {
        uint64_t row = host.out_mask(v) & allowed;
        if (!exact) return row;
        uint64_t filtered = 0;
        uint64_t rest = row;
        while (rest) {
            int w = std::countr_zero(rest);
            rest &= rest - 1;
            if (exact_set.count({v, w})) filtered |= bit(w);
        }
        return filtered;
    }

    uint64_t in_row(int v) const {
        uint64_t row = host.in_mask(v) & allowed;
        if (!exact) return row;
        uint64_t filtered = 0;
        uint64_t rest = row;
        while (rest) {
            int w = std::countr_zero(rest);
            rest &= rest - 1;
            if (exact_set.count({w, v})) filtered |= bit(w);
        }
        return filtered;
    }

    // All subsets S with r in S, S \ {r} within `pool`, |S| <= 1+extra, such
    // that every vertex of S reaches r inside the induced subgraph (along
    // `rows`, which maps each vertex to its "toward root" neighbors).
    // Enumerated by ascending size then ascending mask for determinism.
    std::vector<uint64_t> connected_sets(int r, uint64_t pool, int extra, bool toward_root) {
        std::vector<uint64_t> result{bit(r)};
        std::vector<uint64_t> frontier{bit(r)};
        for (int size = 1; size <= extra; ++size) {
            std::vector<uint64_t> next;
            std::set<uint64_t> dedup;
            for (uint64_t s : frontier) {
                // grow by any pool vertex adjacent into the set
                uint64_t rest = pool & ~s;
                while (rest) {
                    int v = std::countr_zero(rest);
                    rest &= rest - 1;
                    uint64_t reach = toward_root ? out_row(v) : in_row(v);
                    if (reach & s) {
                        uint64_t grown = s | bit(v);
                        if (dedup.insert(grown).second) next.push_back(grown);
                    }
                }
            }
            std::sort(next.begin(), next.end());
            result.insert(result.end(), next.begin(), next.end());
            frontier = std::move(next);
            if (frontier.empty()) break;
        }
        return result;
    }

    // Extracts a deterministic spanning arborescence of `mask` rooted at r
    // (toward the root when toward_root). BFS, smallest vertex first.
    std::vector<Edge> spanning_edges(int r, uint64_t mask, bool toward_root) {
        std::vector<Edge> edges;
        uint64_t done = bit(r);
        while (done != mask) {
            bool progressed = false;
            uint64_t rest = mask & ~done;
            while (rest) {
                int v = std::countr_zero(rest);
                rest &= rest - 1;
                uint64_t reach = (toward_root ? out_row(v) : in_row(v)) & done;
                if (reach) {
                    int p = std::countr_zero(reach);
                    edges.emplace_back(toward_root ? Edge{v, p} : Edge{p, v});
                    done |= bit(v);
                    progressed = true;
                }
            }
            if (!progressed) return {};  // caller guarantees connectivity
        }
        std::sort(edges.begin(), edges.end());
        return edges;
    }

    // In exact mode the branching edge sets are forced: all covered edges
    // inside the vertex set. Checks they form a spanning arborescence.
    std::optional<std::vector<Edge>> exact_branch_edges(int r, uint64_t mask, bool toward_root) {
        std::vector<Edge> edges;
        for (auto e : exact_set)
            if ((mask >> e.first & 1) && (mask >> e.second & 1)) edges.push_back(e);
        // validate: each non-root vertex has exactly one link toward the root
        std::map<int, int> link;
        for (auto [a, b] : edges) {
            int child = toward_root ? a : b;
            int parent = toward_root ? b : a;
            if (child == r) return std::nullopt;
            if (link.count(child)) return std::nullopt;
            link[child] = parent;
        }
        uint64_t rest = mask & ~bit(r);
        while (rest) {
            int v = std::countr_zero(rest);
            rest &= rest - 1;
            int cur = v, steps = 0;
            while (cur != r) {
                auto it = link.find(cur);
                if (it == link.end()) return std::nullopt;
                cur = it->second;
                if (++steps > std::popcount(mask)) return std::nullopt;
            }
        }
        if (static_cast<int>(edges.size()) != std::popcount(mask) - 1) return std::nullopt;
        return edges;
    }

    bool assign_vertex(size_t idx) {
        if (idx == vertex_order.size()) return route_edge(0);
        int pv = vertex_order[idx];
        uint64_t free = allowed & ~used;
        std::vector<int> root_candidates = mask_to_vector(free);
        for (int r : root_candidates) {
            uint64_t pool = free & ~bit(r);
            for (uint64_t sout : connected_sets(r, pool, budget, false)) {
                int cost_out = std::popcount(sout) - 1;
                uint64_t pool_in = pool & ~sout;
                for (uint64_t sin : connected_sets(r, pool_in, budget - cost_out, true)) {
                    int cost = cost_out + std::popcount(sin) - 1;
                    // enough distinct host edges must leave/enter the sets
                    uint64_t outside = allowed & ~(sout | sin);
                    int exits = 0, entries = 0;
                    uint64_t rest = sout;
                    while (rest) {
                        int v = std::countr_zero(rest);
                        rest &= rest - 1;
                        exits += std::popcount(out_row(v) & outside);
                    }
                    rest = sin;
                    while (rest) {
                        int v = std::countr_zero(rest);
                        rest &= rest - 1;
                        entries += std::popcount(in_row(v) & outside);
                    }
                    if (exits < pattern.out_degree(pv) || entries < pattern.in_degree(pv))
                        continue;
                    roots[pv] = r;
                    set_out[pv] = sout;
                    set_in[pv] = sin;
                    used |= sout | sin;
                    budget -= cost;
                    if (assign_vertex(idx + 1)) return true;
                    budget += cost;
                    used &= ~(sout | sin);
                    roots[pv] = -1;
                }
            }
        }
        return false;
    }

    bool route_edge(size_t edge_idx) {
        if (edge_idx == pattern.edges().size()) return finish();
        auto [s, t] = pattern.edges()[edge_idx];
        std::vector<int> starts = mask_to_vector(set_out[s]);
        std::vector<int> path;
        for (int a : starts) {
            path.assign(1, a);
            if (extend_path(edge_idx, t, path, bit(a))) return true;
        }
        return false;
    }

    // DFS continuation of a partial bridge path; tries completions into the
    // target in-branching first, then detours through free vertices.
    bool extend_path(size_t edge_idx, int target, std::vector<int>& path, uint64_t on_path) {
        int cur = path.back();
        uint64_t row = out_row(cur);
        // complete
        uint64_t ends = row & set_in[target] & ~on_path;
        while (ends) {
            int b = std::countr_zero(ends);
            ends &= ends - 1;
            path.push_back(b);
            paths[edge_idx] = path;
            uint64_t interior = on_path & ~bit(path.front());
            path_vertices |= interior;
            int interior_count = std::popcount(interior);
            budget -= interior_count;
            if (route_edge(edge_idx + 1)) return true;
            budget += interior_count;
            path_vertices &= ~interior;
            paths[edge_idx].clear();
            path.pop_back();
        }
        if (budget - std::popcount(on_path & ~bit(path.front())) <= 0) return false;
        uint64_t frees = row & allowed & ~used & ~path_vertices & ~on_path;
        while (frees) {
            int w = std::countr_zero(frees);
            frees &= frees - 1;
            path.push_back(w);
            if (extend_path(edge_idx, target, path, on_path | bit(w))) return true;
            path.pop_back();
        }
        return false;
    }

    bool finish() {
        ButterflyModel m;
        m.host = host;
        m.pattern = pattern;
        m.vertex_map.resize(pattern.order());
        for (int v = 0; v < pattern.order(); ++v) {
            Branch& br = m.vertex_map[v];
            br.root = roots[v];
            if (exact) {
                auto in = exact_branch_edges(roots[v], set_in[v], true);
                auto out = exact_branch_edges(roots[v], set_out[v], false);
                if (!in || !out) return false;
                br.in_edges = std::move(*in);
                br.out_edges = std::move(*out);
            } else {
                br.in_edges = spanning_edges(roots[v], set_in[v], true);
                br.out_edges = spanning_edges(roots[v], set_out[v], false);
            }
        }
        m.edge_map = paths;
        if (exact) {
            auto used_edges = m.expansion_edges();
            std::vector<Edge> want(exact_set.begin(), exact_set.end());
            if (used_edges != want) return false;
            if (m.expansion_vertices() != allowed) return false;
        }
        assert(validate_model(m).ok);
        result = std::move(m);
        return true;
    }
};

}  // namespace

std::optional<ButterflyModel> find_expansion(const Digraph& h, const Digraph& d,
                                             const ExpansionSearchOptions& opts) {
    if (d.order() > opts.max_n)
        fail(errc::size_bound_exceeded,
             "expansion search bounded to n <= " + std::to_string(opts.max_n));
    if (h.order() == 0) {
        if (opts.exact_edges && !opts.exact_edges->empty()) return std::nullopt;
        ButterflyModel m;
        m.host = d;
        m.pattern = h;
        return m;
    }
    if (h.order() > d.order() || h.edge_count() > d.edge_count()) return std::nullopt;
    ExpansionSearch search(h, d, opts);
    if (search.budget < 0) return std::nullopt;
    search.assign_vertex(0);
    return search.result;
}

// ---------------------------------------------------------------------------
// Decoration
// ---------------------------------------------------------------------------

namespace {

struct ExpansionView {
    uint64_t vertices = 0;
    std::vector<uint64_t> out, in;  // adjacency within the expansion

    int out_degree(int v) const { return std::popcount(out[v]); }
    int in_degree(int v) const { return std::popcount(in[v]); }
};

// The grow loop shared by in- and out-stars. For an in-star, growth follows
// out-degree-one vertices whose unique expansion out-edge enters the star,
// and the root advances along its unique out-edge while it has one.
Subtree grow_star(const ExpansionView& J, Subtree tree, bool in_star) {
    Subtree star = std::move(tree);
    auto deg = [&](int v) { return in_star ? J.out_degree(v) : J.in_degree(v); };
    auto next_of = [&](int v) {
        uint64_t row = in_star ? J.out[v] : J.in[v];
        return std::countr_zero(row);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        // root extension
        if (deg(star.root) == 1) {
            int z = next_of(star.root);
            if (!star.contains(z)) {
                star.edges.push_back(in_star ? Edge{star.root, z} : Edge{z, star.root});
                star.mask |= bit(z);
                star.root = z;
                changed = true;
            }
        }
        // pull in degree-one corridors pointing at the star
        uint64_t rest = J.vertices & ~star.mask;
        while (rest) {
            int x = std::countr_zero(rest);
            rest &= rest - 1;
            if (deg(x) != 1) continue;
            int y = next_of(x);
            if (star.contains(y)) {
                star.edges.push_back(in_star ? Edge{x, y} : Edge{y, x});
                star.mask |= bit(x);
                changed = true;
            }
        }
    }
    std::sort(star.edges.begin(), star.edges.end());
    return star;
}

Subpath order_path(uint64_t mask, const std::vector<Edge>& edges, const std::string& what) {
    Subpath path;
    path.mask = mask;
    auto verts = mask_to_vector(mask);
    if (verts.empty()) fail(errc::invalid_model, what + " is empty");
    if (edges.empty()) {
        if (verts.size() != 1)
            fail(errc::invalid_model, what + " has several vertices but no edges");
        path.vertices = verts;
        return path;
    }
    std::map<int, int> next;
    std::set<int> has_in;
    for (auto [a, b] : edges) {
        if (next.count(a)) fail(errc::invalid_model, what + " is not a path");
        next[a] = b;
        has_in.insert(b);
    }
    int start = -1;
    for (int v : verts)
        if (!has_in.count(v)) {
            if (start != -1) fail(errc::invalid_model, what + " is not a path");
            start = v;
        }
    if (start == -1) fail(errc::invalid_model, what + " contains a cycle");
    int cur = start;
    path.vertices.push_back(cur);
    while (next.count(cur)) {
        cur = next[cur];
        path.vertices.push_back(cur);
    }
    if (path.vertices.size() != verts.size())
        fail(errc::invalid_model, what + " is not a single path");
    return path;
}

}  // namespace

int Decoration::expansion_out_degree(int v) const { return std::popcount(exp_out[v]); }
int Decoration::expansion_in_degree(int v) const { return std::popcount(exp_in[v]); }

Decoration decorate(const ButterflyModel& m) {
    ModelCheck check = validate_model(m);
    if (!check.ok) fail(errc::invalid_model, check.violation);

    Decoration dec;
    dec.host = m.host;
    dec.pattern = m.pattern;
    dec.expansion_mask = m.expansion_vertices();
    dec.expansion_edges = m.expansion_edges();

    ExpansionView J;
    J.vertices = dec.expansion_mask;
    J.out.assign(m.host.order(), 0);
    J.in.assign(m.host.order(), 0);
    for (auto [a, b] : dec.expansion_edges) {
        J.out[a] |= bit(b);
        J.in[b] |= bit(a);
    }
    dec.exp_out = J.out;
    dec.exp_in = J.in;

    int pn = m.pattern.order();
    dec.in_tree.resize(pn);
    dec.out_tree.resize(pn);
    dec.in_star.resize(pn);
    dec.out_star.resize(pn);
    dec.root_path.resize(pn);
    dec.branchset.resize(pn);

    for (int v = 0; v < pn; ++v) {
        const Branch& br = m.vertex_map[v];
        uint64_t branch_vertices = 0;
        for (int x : br.vertices()) branch_vertices |= bit(x);

        // Minimal arborescences spanning the high-degree vertices of the
        // branch set: collect the tree paths from each such vertex to the
        // branch root, then trim the root side while it is redundant.
        auto minimal_tree = [&](bool in_side) {
            Subtree tree;
            uint64_t high = 0;
            uint64_t rest = branch_vertices;
            while (rest) {
                int x = std::countr_zero(rest);
                rest &= rest - 1;
                int deg = in_side ? J.in_degree(x) : J.out_degree(x);
                if (deg >= 2) high |= bit(x);
            }
            if (!high) {
                tree.root = br.root;
                tree.mask = bit(br.root);
                return tree;
            }
            const auto& tree_edges = in_side ? br.in_edges : br.out_edges;
            std::map<int, int> parent;  // child -> parent along the branching
            for (auto [a, b] : tree_edges) parent[in_side ? a : b] = in_side ? b : a;
            uint64_t mark = 0;
            std::set<Edge> kept;
            uint64_t hrest = high;
            while (hrest) {
                int x = std::countr_zero(hrest);
                hrest &= hrest - 1;
                int cur = x;
                mark |= bit(cur);
                while (cur != br.root) {
                    int p = parent.at(cur);
                    Edge e = in_side ? Edge{cur, p} : Edge{p, cur};
                    if (!kept.insert(e).second) break;  // already walked from here up
                    mark |= bit(p);
                    cur = p;
                }
            }
            // trim from the root end
            std::map<int, std::vector<int>> children;
            for (auto [a, b] : kept) {
                int child = in_side ? a : b;
                int par = in_side ? b : a;
                children[par].push_back(child);
            }
            int root = br.root;
            while (!(high & bit(root)) && children[root].size() == 1) {
                int child = children[root][0];
                kept.erase(in_side ? Edge{child, root} : Edge{root, child});
                mark &= ~bit(root);
                children.erase(root);
                root = child;
            }
            tree.root = root;
            tree.mask = mark;
            tree.edges.assign(kept.begin(), kept.end());
            return tree;
        };

        dec.in_tree[v] = minimal_tree(true);
        dec.out_tree[v] = minimal_tree(false);
        dec.in_star[v] = grow_star(J, dec.in_tree[v], true);
        dec.out_star[v] = grow_star(J, dec.out_tree[v], false);

        uint64_t r_mask = dec.in_star[v].mask & dec.out_star[v].mask;
        std::vector<Edge> r_edges;
        {
            std::set<Edge> in_edges(dec.in_star[v].edges.begin(), dec.in_star[v].edges.end());
            for (auto e : dec.out_star[v].edges)
                if (in_edges.count(e)) r_edges.push_back(e);
        }
        dec.root_path[v] =
            order_path(r_mask, r_edges, "root path of vertex " + std::to_string(v));
        dec.branchset[v] = dec.out_tree[v].mask | dec.in_tree[v].mask | r_mask;
    }

    dec.bridge.resize(m.pattern.edges().size());
    for (size_t i = 0; i < m.pattern.edges().size(); ++i) {
        auto [u, v] = m.pattern.edges()[i];
        uint64_t verts = 0;
        std::vector<Edge> edges;
        for (auto [a, b] : dec.expansion_edges) {
            if ((dec.out_star[u].mask >> a & 1) && (dec.in_star[v].mask >> b & 1)) {
                edges.emplace_back(a, b);
                verts |= bit(a) | bit(b);
            }
        }
        dec.bridge[i] = order_path(verts, edges, "bridge of " + edge_str(u, v));
    }
    return dec;
}

}  // namespace d2gen

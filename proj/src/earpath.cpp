#include "d2gen/earpath.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

namespace d2gen {

namespace {

uint64_t bit(int v) { return uint64_t{1} << v; }

std::vector<Edge> path_edges(const std::vector<int>& path) {
    std::vector<Edge> out;
    for (size_t i = 0; i + 1 < path.size(); ++i) out.emplace_back(path[i], path[i + 1]);
    return out;
}

// Kahn's algorithm on a small explicit edge set.
bool edge_set_acyclic(const std::vector<Edge>& edges) {
    std::map<int, int> indeg;
    std::map<int, std::vector<int>> adj;
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        indeg[b] += 1;
        indeg.try_emplace(a, 0);
    }
    std::vector<int> stack;
    for (auto& [v, deg] : indeg)
        if (deg == 0) stack.push_back(v);
    size_t removed = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++removed;
        for (int w : adj[v])
            if (--indeg[w] == 0) stack.push_back(w);
    }
    return removed == indeg.size();
}

bool edge_set_reaches(const std::vector<Edge>& edges, int from, int to) {
    if (from == to) return true;
    uint64_t reach = bit(from);
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto [a, b] : edges) {
            if ((reach >> a & 1) && !(reach >> b & 1)) {
                reach |= bit(b);
                grew = true;
            }
        }
    }
    return reach >> to & 1;
}

std::vector<Edge> shared_edges(const std::vector<Edge>& a, const std::vector<Edge>& b) {
    std::vector<Edge> sa = a, sb = b, out;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
    return out;
}

// Orders an edge set that should be a directed path; nullopt otherwise.
std::optional<std::vector<int>> try_order_path(uint64_t mask, const std::vector<Edge>& edges) {
    auto verts = [&]() {
        std::vector<int> vs;
        uint64_t rest = mask;
        while (rest) {
            vs.push_back(std::countr_zero(rest));
            rest &= rest - 1;
        }
        return vs;
    }();
    if (verts.empty()) return std::nullopt;
    if (edges.empty()) {
        if (verts.size() != 1) return std::nullopt;
        return std::vector<int>{verts[0]};
    }
    std::map<int, int> next;
    std::set<int> has_in;
    for (auto [a, b] : edges) {
        if (next.count(a)) return std::nullopt;
        next[a] = b;
        has_in.insert(b);
    }
    int start = -1;
    for (int v : verts)
        if (!has_in.count(v)) {
            if (start != -1) return std::nullopt;
            start = v;
        }
    if (start == -1) return std::nullopt;
    std::vector<int> order{start};
    int cur = start;
    while (next.count(cur)) {
        cur = next[cur];
        order.push_back(cur);
    }
    if (order.size() != verts.size()) return std::nullopt;
    return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

bool is_earpath(const Digraph& host, const Decoration& dec, const EarPath& p) {
    const auto& vs = p.vertices;
    if (vs.size() < 2) return false;
    uint64_t seen = 0;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (!host.has_vertex(vs[i])) return false;
        if (seen & bit(vs[i])) return false;
        seen |= bit(vs[i]);
        if (i + 1 < vs.size() && !host.has_edge(vs[i], vs[i + 1])) return false;
    }
    if (!dec.in_expansion(vs.front()) || !dec.in_expansion(vs.back())) return false;
    for (size_t i = 1; i + 1 < vs.size(); ++i)
        if (dec.in_expansion(vs[i])) return false;
    if (vs.size() == 2 && dec.has_expansion_edge(vs[0], vs[1])) return false;
    return true;
}

std::vector<EarPath> enumerate_earpaths(const Digraph& host, const Decoration& dec) {
    std::vector<EarPath> out;
    // single edges first
    for (auto [a, b] : host.edges())
        if (dec.in_expansion(a) && dec.in_expansion(b) && !dec.has_expansion_edge(a, b))
            out.push_back(EarPath{{a, b}});
    // paths through the complement of the expansion
    std::vector<int> path;
    auto dfs = [&](auto&& self, int cur, uint64_t visited) -> void {
        for (int w : host.out_neighbors(cur)) {
            if (dec.in_expansion(w)) {
                if (w == path.front()) continue;  // closed walks are not paths
                path.push_back(w);
                out.push_back(EarPath{path});
                path.pop_back();
            } else if (!(visited & bit(w))) {
                path.push_back(w);
                self(self, w, visited | bit(w));
                path.pop_back();
            }
        }
    };
    uint64_t exp = dec.expansion_mask;
    uint64_t rest = exp;
    while (rest) {
        int s = std::countr_zero(rest);
        rest &= rest - 1;
        for (int w : host.out_neighbors(s)) {
            if (exp >> w & 1) continue;
            path = {s, w};
            dfs(dfs, w, bit(w));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

const char* earpath_kind_name(EarPathKind k) {
    switch (k) {
        case EarPathKind::switching: return "switching";
        case EarPathKind::bad: return "bad";
        case EarPathKind::augmenting: return "augmenting";
    }
    return "?";
}

const char* aug_variant_name(AugVariant v) {
    switch (v) {
        case AugVariant::a1: return "A1";
        case AugVariant::a2: return "A2";
        case AugVariant::a3: return "A3";
        case AugVariant::a4: return "A4";
    }
    return "?";
}

namespace {

size_t pattern_edge_index(const Decoration& dec, Edge e) {
    const auto& edges = dec.pattern.edges();
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    assert(it != edges.end() && *it == e);
    return static_cast<size_t>(it - edges.begin());
}

// out_star(u) + in_star(v) + the (u,v) bridge, as one edge list
std::vector<Edge> switching_context_edges(const Decoration& dec, Edge pe) {
    auto [u, v] = pe;
    std::vector<Edge> edges = dec.out_star[u].edges;
    edges.insert(edges.end(), dec.in_star[v].edges.begin(), dec.in_star[v].edges.end());
    auto bridge = path_edges(dec.bridge[pattern_edge_index(dec, pe)].vertices);
    edges.insert(edges.end(), bridge.begin(), bridge.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace

bool is_switching_for(const Decoration& dec, const EarPath& p, Edge pattern_edge) {
    auto [u, v] = pattern_edge;
    if (!dec.pattern.has_edge(u, v)) return false;
    int s = p.start(), e = p.end();
    uint64_t s_ok = dec.out_star[u].mask | dec.in_tree[v].mask | dec.root_path[v].mask;
    uint64_t e_ok = dec.root_path[u].mask | dec.out_tree[u].mask | dec.in_star[v].mask;
    if (!(s_ok >> s & 1) || !(e_ok >> e & 1)) return false;  // S1
    if (!(dec.out_star[u].mask >> s & 1) && !(dec.in_star[v].mask >> e & 1)) return false;  // S2
    auto ctx = switching_context_edges(dec, pattern_edge);
    auto pe = path_edges(p.vertices);
    ctx.insert(ctx.end(), pe.begin(), pe.end());
    return edge_set_acyclic(ctx);  // S3
}

bool is_parallel_switching(const Decoration& dec, const EarPath& p, Edge pattern_edge) {
    return edge_set_reaches(switching_context_edges(dec, pattern_edge), p.start(), p.end());
}

bool is_bad_for(const Decoration& dec, const EarPath& p, int w) {
    uint64_t stars = dec.in_star[w].mask | dec.out_star[w].mask;
    if (!(stars >> p.start() & 1) || !(stars >> p.end() & 1)) return false;
    std::vector<Edge> edges = dec.in_star[w].edges;
    edges.insert(edges.end(), dec.out_star[w].edges.begin(), dec.out_star[w].edges.end());
    auto pe = path_edges(p.vertices);
    edges.insert(edges.end(), pe.begin(), pe.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return !edge_set_acyclic(edges);
}

bool is_bad_any(const Decoration& dec, const EarPath& p) {
    for (int w = 0; w < dec.pattern.order(); ++w)
        if (is_bad_for(dec, p, w)) return true;
    return false;
}

namespace {

struct AugWitness {
    AugVariant variant;
    int u, v;
};

std::optional<AugWitness> augmenting_witness(const Decoration& dec, const EarPath& p) {
    int s = p.start(), e = p.end();
    int pn = dec.pattern.order();
    for (int u = 0; u < pn; ++u) {
        uint64_t sout_u = dec.out_star[u].mask;
        uint64_t tin_u = dec.in_tree[u].mask & ~dec.root_path[u].mask;
        bool s_in_sout = sout_u >> s & 1;
        bool s_in_tin = tin_u >> s & 1;
        if (!s_in_sout && !s_in_tin) continue;
        for (int v = 0; v < pn; ++v) {
            uint64_t sin_v = dec.in_star[v].mask;
            uint64_t tout_v = dec.out_tree[v].mask & ~dec.root_path[v].mask;
            if (s_in_sout && (sin_v >> e & 1) && u != v && !dec.pattern.has_edge(u, v))
                return AugWitness{AugVariant::a1, u, v};
            if (s_in_tin && (tout_v >> e & 1)) return AugWitness{AugVariant::a2, u, v};
            if (s_in_tin && (sin_v >> e & 1) && u != v) return AugWitness{AugVariant::a3, u, v};
            if (s_in_sout && (tout_v >> e & 1) && u != v) return AugWitness{AugVariant::a4, u, v};
        }
    }
    return std::nullopt;
}

std::optional<Edge> switching_witness(const Decoration& dec, const EarPath& p) {
    for (auto pe : dec.pattern.edges())
        if (is_switching_for(dec, p, pe)) return pe;
    return std::nullopt;
}

std::optional<int> bad_witness(const Decoration& dec, const EarPath& p) {
    for (int w = 0; w < dec.pattern.order(); ++w)
        if (is_bad_for(dec, p, w)) return w;
    return std::nullopt;
}

}  // namespace

EarPathFlags earpath_flags(const Decoration& dec, const EarPath& p) {
    EarPathFlags flags;
    flags.switching = switching_witness(dec, p).has_value();
    flags.bad = bad_witness(dec, p).has_value();
    flags.augmenting = augmenting_witness(dec, p).has_value();
    return flags;
}

EarPathClass classify_earpath(const EarPath& p, const Decoration& dec, const Digraph& host) {
    if (!is_earpath(host, dec, p))
        fail(errc::not_an_earpath, "path " + serialize_path(p.vertices));
    if (auto sw = switching_witness(dec, p)) {
        EarPathClass cls;
        cls.kind = EarPathKind::switching;
        cls.pattern_edge = *sw;
        cls.parallel = is_parallel_switching(dec, p, *sw);
        return cls;
    }
    if (auto w = bad_witness(dec, p)) {
        EarPathClass cls;
        cls.kind = EarPathKind::bad;
        cls.witness_vertex = *w;
        return cls;
    }
    if (auto aug = augmenting_witness(dec, p)) {
        EarPathClass cls;
        cls.kind = EarPathKind::augmenting;
        cls.variant = aug->variant;
        cls.aug_u = aug->u;
        cls.aug_v = aug->v;
        return cls;
    }
    fail(errc::precondition_violated,
         "ear-path " + serialize_path(p.vertices) + " matches no class");
}

// ---------------------------------------------------------------------------
// Laced paths
// ---------------------------------------------------------------------------

namespace {

struct Intersection {
    // component id per shared vertex, components indexed by first-path order
    std::map<int, int> comp_of;
    int count = 0;
};

Intersection path_intersection(const std::vector<int>& p, const std::vector<int>& q) {
    std::set<int> pv(p.begin(), p.end());
    std::set<int> shared;
    for (int v : q)
        if (pv.count(v)) shared.insert(v);
    auto pe = path_edges(p);
    auto qe = path_edges(q);
    std::set<Edge> qset(qe.begin(), qe.end());
    std::map<int, int> parent;
    for (int v : shared) parent[v] = v;
    auto find = [&](auto&& self, int v) -> int {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto e : pe)
        if (qset.count(e) && shared.count(e.first) && shared.count(e.second))
            parent[find(find, e.first)] = find(find, e.second);
    // components numbered by order of first appearance along p
    Intersection out;
    std::map<int, int> id_of_root;
    for (int v : p) {
        if (!shared.count(v)) continue;
        int root = find(find, v);
        auto [it, fresh] = id_of_root.try_emplace(root, out.count);
        if (fresh) ++out.count;
        out.comp_of[v] = it->second;
    }
    return out;
}

}  // namespace

int lace_component_count(const std::vector<int>& p, const std::vector<int>& q) {
    return path_intersection(p, q).count;
}

bool paths_laced(const std::vector<int>& p, const std::vector<int>& q) {
    Intersection inter = path_intersection(p, q);
    if (inter.count <= 1) return true;
    // components must appear along q contiguously and in reverse p-order
    std::vector<int> runs;
    for (int v : q) {
        auto it = inter.comp_of.find(v);
        if (it == inter.comp_of.end()) continue;
        if (runs.empty() || runs.back() != it->second) runs.push_back(it->second);
    }
    if (static_cast<int>(runs.size()) != inter.count) return false;
    for (size_t i = 0; i + 1 < runs.size(); ++i)
        if (runs[i] <= runs[i + 1]) return false;
    return true;
}

bool properly_laced(const std::vector<int>& p, const std::vector<int>& q) {
    return paths_laced(p, q) && lace_component_count(p, q) > 0;
}

std::vector<int> lace(const std::vector<int>& p, const std::vector<int>& q) {
    if (p.empty() || q.empty()) fail(errc::precondition_violated, "lace of empty path");
    // union adjacency, ascending targets for lexicographic enumeration
    std::map<int, std::set<int>> adj;
    for (auto [a, b] : path_edges(p)) adj[a].insert(b);
    for (auto [a, b] : path_edges(q)) adj[a].insert(b);
    int s = q.front(), t = q.back();

    std::vector<int> best;
    int best_count = -1;
    std::vector<int> cur{s};
    std::set<int> on_path{s};
    auto dfs = [&](auto&& self, int v) -> void {
        if (v == t) {
            int count = lace_component_count(p, cur);
            if (best_count < 0 || count < best_count ||
                (count == best_count && cur < best)) {
                best_count = count;
                best = cur;
            }
            return;
        }
        for (int w : adj[v]) {
            if (on_path.count(w)) continue;
            cur.push_back(w);
            on_path.insert(w);
            self(self, w);
            on_path.erase(w);
            cur.pop_back();
        }
    };
    if (s == t) return {s};
    dfs(dfs, s);
    assert(!best.empty());
    assert(paths_laced(p, best));
    return best;
}

// ---------------------------------------------------------------------------
// Switching onto a path
// ---------------------------------------------------------------------------

namespace {

ButterflyModel rebuild_from_expansion(const ButterflyModel& m, std::set<Edge> new_edges) {
    std::vector<Edge> edges(new_edges.begin(), new_edges.end());
    ExpansionSearchOptions opts;
    opts.exact_edges = &edges;
    auto rebuilt = find_expansion(m.pattern, m.host, opts);
    if (!rebuilt)
        fail(errc::invalid_model, "switching did not produce an expansion of the pattern");
    return *rebuilt;
}

ButterflyModel switch_onto_for(const ButterflyModel& m, const Decoration& dec,
                               const EarPath& p, Edge pattern_edge) {
    auto [u, v] = pattern_edge;
    int s = p.start(), e = p.end();
    bool start_in_sout = dec.out_star[u].mask >> s & 1;
    bool end_in_sin = dec.in_star[v].mask >> e & 1;

    if (!start_in_sout) {
        // mirror case: treat the reversed path against the inverted model
        ButterflyModel im = invert_model(m);
        Decoration idec = decorate(im);
        EarPath rp{std::vector<int>(p.vertices.rbegin(), p.vertices.rend())};
        ButterflyModel swapped = switch_onto_for(im, idec, rp, Edge{v, u});
        return invert_model(swapped);
    }

    std::set<Edge> edges(dec.expansion_edges.begin(), dec.expansion_edges.end());
    for (auto pe : path_edges(p.vertices)) edges.insert(pe);

    std::vector<int> segment;
    if (end_in_sin) {
        // replace part of the (u,v) bridge
        const auto& bridge = dec.bridge[pattern_edge_index(dec, pattern_edge)].vertices;
        auto pos = [&](int x) {
            auto it = std::find(bridge.begin(), bridge.end(), x);
            return it == bridge.end() ? -1 : static_cast<int>(it - bridge.begin());
        };
        int i1 = pos(s) >= 0 ? pos(s) : 0;
        int i2 = pos(e) >= 0 ? pos(e) : static_cast<int>(bridge.size()) - 1;
        if (i1 >= i2)
            fail(errc::invalid_model, "switching segment on the bridge is degenerate");
        segment.assign(bridge.begin() + i1, bridge.begin() + i2 + 1);
    } else {
        // the path ends on the out-side of u; replace the tail of the unique
        // root-to-end path in root_path(u) + out_tree(u)
        std::vector<Edge> tree = path_edges(dec.root_path[u].vertices);
        tree.insert(tree.end(), dec.out_tree[u].edges.begin(), dec.out_tree[u].edges.end());
        std::sort(tree.begin(), tree.end());
        tree.erase(std::unique(tree.begin(), tree.end()), tree.end());
        int start_r = dec.root_path[u].vertices.front();
        if (start_r == e)
            fail(errc::invalid_model, "switching path ends at the root-path start");
        // unique path start_r -> e through the tree
        std::vector<int> route{start_r};
        std::set<int> seen{start_r};
        auto walk = [&](auto&& self, int cur) -> bool {
            if (cur == e) return true;
            for (auto [a, b] : tree) {
                if (a != cur || seen.count(b)) continue;
                route.push_back(b);
                seen.insert(b);
                if (self(self, b)) return true;
                route.pop_back();
                seen.erase(b);
            }
            return false;
        };
        if (!walk(walk, start_r))
            fail(errc::invalid_model, "switching path end not reachable in the out-tree");
        int cut = -1;
        for (size_t i = 0; i + 1 < route.size(); ++i) {
            if (route[i] == s || dec.expansion_out_degree(route[i]) >= 2)
                cut = static_cast<int>(i);
        }
        if (cut < 0) fail(errc::invalid_model, "no anchor vertex on the replaced path");
        segment.assign(route.begin() + cut, route.end());
    }

    // remove the segment's edges and its interior vertices with everything
    // incident to them
    for (auto se : path_edges(segment)) edges.erase(se);
    std::set<int> interior(segment.begin() + 1, segment.end() - 1);
    for (auto it = edges.begin(); it != edges.end();) {
        if (interior.count(it->first) || interior.count(it->second))
            it = edges.erase(it);
        else
            ++it;
    }
    return rebuild_from_expansion(m, std::move(edges));
}

}  // namespace

ButterflyModel switch_onto(const ButterflyModel& m, const EarPath& p) {
    Decoration dec = decorate(m);
    if (!is_earpath(m.host, dec, p))
        fail(errc::not_switching, "not an ear-path: " + serialize_path(p.vertices));
    auto witness = switching_witness(dec, p);
    if (!witness)
        fail(errc::not_switching, "ear-path is not switching: " + serialize_path(p.vertices));
    return switch_onto_for(m, dec, p, *witness);
}

// ---------------------------------------------------------------------------
// Blocking vertices
// ---------------------------------------------------------------------------

bool is_blocking_vertex(const Digraph& host, const Decoration& dec, int pattern_vertex, int r) {
    if (pattern_vertex < 0 || pattern_vertex >= dec.pattern.order())
        fail(errc::not_a_vertex, "pattern vertex " + std::to_string(pattern_vertex));
    const auto& rp = dec.root_path[pattern_vertex].vertices;
    auto it = std::find(rp.begin(), rp.end(), r);
    if (it == rp.end())
        fail(errc::not_on_root_path,
             "vertex " + std::to_string(r) + " is not on the root path of " +
                 std::to_string(pattern_vertex));
    uint64_t prefix = 0, suffix = 0;
    for (auto jt = rp.begin(); jt <= it; ++jt) prefix |= bit(*jt);
    for (auto jt = it; jt != rp.end(); ++jt) suffix |= bit(*jt);
    uint64_t strict_prefix = prefix & ~bit(r);
    uint64_t strict_suffix = suffix & ~bit(r);
    uint64_t exp = dec.expansion_mask;

    for (const auto& p : enumerate_earpaths(host, dec)) {
        if (!switching_witness(dec, p)) continue;
        int s = p.start(), e = p.end();
        if ((strict_prefix >> s & 1) && ((exp & ~prefix) >> e & 1)) return false;
        if (((exp & ~suffix) >> s & 1) && (strict_suffix >> e & 1)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Escapes
// ---------------------------------------------------------------------------

EscapeCheck validate_escape(const Escape& esc, const Decoration& dec, const Digraph& host) {
    auto no = [](std::string clause) { return EscapeCheck{false, std::move(clause)}; };
    int nseg = static_cast<int>(esc.segments.size());
    if (nseg < 3 || nseg % 2 == 0)
        return no("duration: need an odd number of segments P_0..P_2k with k >= 1");
    auto [u, v] = esc.pattern_edge;
    if (!dec.pattern.has_edge(u, v)) return no("pattern-edge: (u,v) not a pattern edge");

    // structure: every segment a host walk, consecutive segments chained,
    // concatenation a directed path
    std::vector<int> full;
    for (int i = 0; i < nseg; ++i) {
        const auto& seg = esc.segments[i];
        if (seg.empty()) return no("structure: empty segment");
        for (size_t j = 0; j + 1 < seg.size(); ++j)
            if (!host.has_edge(seg[j], seg[j + 1]))
                return no("structure: missing host edge in segment " + std::to_string(i));
        if (i > 0 && esc.segments[i - 1].back() != seg.front())
            return no("structure: segments " + std::to_string(i - 1) + " and " +
                      std::to_string(i) + " do not share an endpoint");
        full.insert(full.end(), seg.begin() + (i > 0 ? 1 : 0), seg.end());
    }
    {
        std::set<int> dedup(full.begin(), full.end());
        if (dedup.size() != full.size()) return no("structure: concatenation is not a path");
    }

    // the corridor in_star(v) /\ out_star(u)
    uint64_t cor_mask = dec.in_star[v].mask & dec.out_star[u].mask;
    auto cor_edges = shared_edges(dec.in_star[v].edges, dec.out_star[u].edges);
    auto corridor = try_order_path(cor_mask, cor_edges);
    if (!corridor) return no("corridor: in_star(v) /\\ out_star(u) is not a path");
    auto in_corridor = [&](int x) { return cor_mask >> x & 1; };
    auto corridor_pos = [&](int x) {
        auto it = std::find(corridor->begin(), corridor->end(), x);
        return it == corridor->end() ? -1 : static_cast<int>(it - corridor->begin());
    };

    // per-segment clauses, in segment order
    for (int i = 0; i < nseg; ++i) {
        const auto& seg = esc.segments[i];
        if (i == 0) {
            if (!in_corridor(seg.back())) return no("a: End(P_0) not on the corridor");
            bool ok = false;
            EarPath ear{seg};
            if (is_earpath(host, dec, ear)) {
                for (auto pe : dec.pattern.edges()) {
                    if (pe.second != v || pe == Edge{u, v}) continue;
                    uint64_t starts = (dec.out_star[pe.first].mask | dec.in_tree[v].mask) &
                                      ~dec.root_path[v].mask;
                    if ((starts >> seg.front() & 1) && is_switching_for(dec, ear, pe) &&
                        !is_parallel_switching(dec, ear, pe)) {
                        ok = true;
                        break;
                    }
                }
                if (!ok && is_bad_any(dec, ear)) {
                    uint64_t starts = dec.in_tree[v].mask | dec.out_star[v].mask;
                    if (starts >> seg.front() & 1) ok = true;
                }
            }
            if (!ok) return no("a: P_0 is neither a qualifying switching nor bad ear-path");
        } else if (i == nseg - 1) {
            if (!in_corridor(seg.front())) return no("d: Start(P_2k) not on the corridor");
            bool ok = false;
            EarPath ear{seg};
            if (is_earpath(host, dec, ear)) {
                for (auto pe : dec.pattern.edges()) {
                    if (pe.first != u || pe == Edge{u, v}) continue;
                    uint64_t ends = (dec.in_star[pe.second].mask | dec.out_tree[u].mask) &
                                    ~dec.root_path[u].mask;
                    if ((ends >> seg.back() & 1) && is_switching_for(dec, ear, pe) &&
                        !is_parallel_switching(dec, ear, pe)) {
                        ok = true;
                        break;
                    }
                }
                if (!ok && is_bad_any(dec, ear)) {
                    uint64_t ends = dec.in_star[u].mask | dec.out_tree[u].mask;
                    if (ends >> seg.back() & 1) ok = true;
                }
            }
            if (!ok) return no("d: P_2k is neither a qualifying switching nor bad ear-path");
        } else if (i % 2 == 0) {
            // even interior: bad ear-paths between corridor vertices
            EarPath ear{seg};
            if (!in_corridor(seg.front()) || !in_corridor(seg.back()))
                return no("c: P_" + std::to_string(i) + " endpoints leave the corridor");
            if (!is_earpath(host, dec, ear) || !is_bad_any(dec, ear))
                return no("c: P_" + std::to_string(i) + " is not a bad ear-path");
        } else {
            // odd: (possibly trivial) subpaths of the corridor
            for (int x : seg)
                if (!in_corridor(x))
                    return no("b: P_" + std::to_string(i) + " leaves the corridor");
            for (size_t j = 0; j + 1 < seg.size(); ++j)
                if (corridor_pos(seg[j + 1]) != corridor_pos(seg[j]) + 1)
                    return no("b: P_" + std::to_string(i) + " is not a corridor subpath");
        }
    }

    // (e)
    if (!properly_laced(full, *corridor))
        return no("e: escape path not properly laced with the corridor");

    // (f)
    {
        uint64_t sin_only = dec.in_star[v].mask & ~dec.out_star[u].mask;
        uint64_t sout_only = dec.out_star[u].mask & ~dec.in_star[v].mask;
        int start0 = esc.segments.front().front();
        int end2k = esc.segments.back().back();
        if (!((sin_only >> start0 & 1) || (sout_only >> end2k & 1)))
            return no("f: neither endpoint leaves the corridor on the required side");
    }
    return EscapeCheck{};
}

// ---------------------------------------------------------------------------
// Text forms
// ---------------------------------------------------------------------------

std::string serialize_path(const std::vector<int>& path) {
    std::string out;
    for (size_t i = 0; i < path.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(path[i]);
    }
    return out;
}

std::vector<int> parse_path(std::string_view text) {
    std::vector<int> out;
    std::istringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    if (out.empty()) fail(errc::bad_format, "empty path");
    return out;
}

std::string serialize_escape(const Escape& esc) {
    std::string out;
    for (size_t i = 0; i < esc.segments.size(); ++i) {
        if (i) out += '|';
        out += serialize_path(esc.segments[i]);
    }
    return out;
}

std::vector<std::vector<int>> parse_segments(std::string_view text) {
    std::vector<std::vector<int>> out;
    std::string buf{text};
    std::istringstream in(buf);
    std::string item;
    while (std::getline(in, item, '|')) out.push_back(parse_path(item));
    if (out.empty()) fail(errc::bad_format, "empty segment list");
    return out;
}

}  // namespace d2gen

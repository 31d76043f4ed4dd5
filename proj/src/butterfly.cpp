#include "d2gen/butterfly.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <sstream>

namespace d2gen {

bool is_contractible(const Digraph& d, Edge e) {
    auto [u, v] = e;
    if (!d.has_edge(u, v)) return false;
    return d.out_degree(u) == 1 || d.in_degree(v) == 1;
}

std::vector<Edge> contractible_edges(const Digraph& d) {
    std::vector<Edge> out;
    for (auto e : d.edges())
        if (is_contractible(d, e)) out.push_back(e);
    return out;
}

ContractResult butterfly_contract(const Digraph& d, Edge e) {
    auto [u, v] = e;
    if (!d.has_edge(u, v))
        fail(errc::edge_absent,
             "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    if (!is_contractible(d, e))
        fail(errc::not_contractible,
             "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    int keep = std::min(u, v);
    int drop = std::max(u, v);
    std::vector<int> old_to_new(d.order());
    for (int w = 0; w < d.order(); ++w) {
        int target = (w == u || w == v) ? keep : w;
        old_to_new[w] = target - (target > drop ? 1 : 0);
    }
    std::vector<Edge> edges;
    for (auto [a, b] : d.edges()) {
        int na = old_to_new[a], nb = old_to_new[b];
        if (na == nb) continue;  // the contracted edge and any resulting loop
        edges.emplace_back(na, nb);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return ContractResult{Digraph(d.order() - 1, std::move(edges)), std::move(old_to_new)};
}

DeleteVertexResult delete_vertex(const Digraph& d, int v) {
    if (!d.has_vertex(v)) fail(errc::not_a_vertex, "vertex " + std::to_string(v));
    std::vector<int> old_to_new(d.order());
    for (int w = 0; w < d.order(); ++w)
        old_to_new[w] = (w == v) ? -1 : w - (w > v ? 1 : 0);
    std::vector<Edge> edges;
    for (auto [a, b] : d.edges()) {
        if (a == v || b == v) continue;
        edges.emplace_back(old_to_new[a], old_to_new[b]);
    }
    return DeleteVertexResult{Digraph(d.order() - 1, std::move(edges)), std::move(old_to_new)};
}

Digraph delete_edge(const Digraph& d, Edge e) {
    if (!d.has_edge(e.first, e.second))
        fail(errc::edge_absent,
             "edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    std::vector<Edge> edges;
    edges.reserve(d.edges().size() - 1);
    for (auto f : d.edges())
        if (f != e) edges.push_back(f);
    return Digraph(d.order(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Witness scripts
// ---------------------------------------------------------------------------

std::string WitnessScript::serialize() const {
    std::ostringstream os;
    for (const auto& op : ops) {
        switch (op.kind) {
            case WitnessOp::Kind::delete_edge: os << "D " << op.u << ' ' << op.v << '\n'; break;
            case WitnessOp::Kind::delete_vertex: os << "DV " << op.v << '\n'; break;
            case WitnessOp::Kind::contract: os << "C " << op.u << ' ' << op.v << '\n'; break;
        }
    }
    return os.str();
}

WitnessScript WitnessScript::parse(std::string_view text) {
    WitnessScript script;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;  // blank line
        if (tag == "#") continue;
        WitnessOp op;
        if (tag == "D") {
            op.kind = WitnessOp::Kind::delete_edge;
            if (!(ls >> op.u >> op.v))
                fail(errc::bad_format, "witness line " + std::to_string(lineno));
        } else if (tag == "DV") {
            op.kind = WitnessOp::Kind::delete_vertex;
            if (!(ls >> op.v))
                fail(errc::bad_format, "witness line " + std::to_string(lineno));
        } else if (tag == "C") {
            op.kind = WitnessOp::Kind::contract;
            if (!(ls >> op.u >> op.v))
                fail(errc::bad_format, "witness line " + std::to_string(lineno));
        } else {
            fail(errc::bad_format,
                 "witness line " + std::to_string(lineno) + ": unknown op '" + tag + "'");
        }
        script.ops.push_back(op);
    }
    return script;
}

Digraph WitnessScript::replay(const Digraph& start) const {
    Digraph cur = start;
    for (const auto& op : ops) {
        switch (op.kind) {
            case WitnessOp::Kind::delete_edge:
                cur = delete_edge(cur, {op.u, op.v});
                break;
            case WitnessOp::Kind::delete_vertex:
                cur = delete_vertex(cur, op.v).graph;
                break;
            case WitnessOp::Kind::contract:
                cur = butterfly_contract(cur, {op.u, op.v}).graph;
                break;
        }
    }
    return cur;
}

// ---------------------------------------------------------------------------
// MinorIndex
// ---------------------------------------------------------------------------

uint32_t MinorIndex::intern(const CanonicalForm& form) {
    auto [it, inserted] = id_by_key_.try_emplace(form.key(), static_cast<uint32_t>(forms_.size()));
    if (inserted) {
        forms_.push_back(form);
        succ_.emplace_back();
        succ_ready_.push_back(0);
    }
    return it->second;
}

const std::vector<uint32_t>& MinorIndex::successors(uint32_t id) {
    if (!succ_ready_[id]) {
        Digraph d = from_form(forms_[id]);
        std::vector<uint32_t> out;
        for (auto e : d.edges()) out.push_back(intern(canonical_form(delete_edge(d, e))));
        for (int v = 0; v < d.order(); ++v)
            out.push_back(intern(canonical_form(delete_vertex(d, v).graph)));
        for (auto e : contractible_edges(d))
            out.push_back(intern(canonical_form(butterfly_contract(d, e).graph)));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        succ_[id] = std::move(out);
        succ_ready_[id] = 1;
    }
    return succ_[id];
}

bool MinorIndex::is_minor(const Digraph& h, const Digraph& d) {
    if (h.order() > d.order() || h.edge_count() > d.edge_count()) return false;
    uint32_t target = intern(canonical_form(h));
    uint32_t start = intern(canonical_form(d));
    if (start == target) return true;
    std::unordered_set<uint32_t> seen{start};
    std::deque<uint32_t> queue{start};
    while (!queue.empty()) {
        uint32_t id = queue.front();
        queue.pop_front();
        for (uint32_t next : successors(id)) {
            if (next == target) return true;
            const CanonicalForm& f = forms_[next];
            if (f.n < h.order()) continue;
            if (static_cast<int>(std::count(f.bits.begin(), f.bits.end(), '1')) < h.edge_count())
                continue;
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return false;
}

std::vector<uint32_t> MinorIndex::minor_closure(const Digraph& d) {
    uint32_t start = intern(canonical_form(d));
    std::unordered_set<uint32_t> seen{start};
    std::deque<uint32_t> queue{start};
    while (!queue.empty()) {
        uint32_t id = queue.front();
        queue.pop_front();
        for (uint32_t next : successors(id))
            if (seen.insert(next).second) queue.push_back(next);
    }
    std::vector<uint32_t> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool is_butterfly_minor(const Digraph& h, const Digraph& d, MinorIndex& index) {
    return index.is_minor(h, d);
}

bool is_butterfly_minor(const Digraph& h, const Digraph& d) {
    MinorIndex index;
    return index.is_minor(h, d);
}

std::optional<WitnessScript> find_minor_witness(const Digraph& h, const Digraph& d) {
    if (h.order() > d.order() || h.edge_count() > d.edge_count()) return std::nullopt;
    CanonicalForm target = canonical_form(h);

    struct State {
        Digraph graph;
        WitnessScript script;
    };
    std::unordered_set<std::string> seen;
    std::deque<State> queue;
    queue.push_back({d, {}});
    seen.insert(canonical_form(d).key());
    if (canonical_form(d) == target) return WitnessScript{};

    auto push = [&](Digraph next, WitnessScript script, WitnessOp op) -> std::optional<State> {
        CanonicalForm form = canonical_form(next);
        if (form.n < h.order() || next.edge_count() < h.edge_count()) return std::nullopt;
        script.ops.push_back(op);
        if (form == target) return State{std::move(next), std::move(script)};
        if (seen.insert(form.key()).second)
            queue.push_back({std::move(next), std::move(script)});
        return std::nullopt;
    };

    while (!queue.empty()) {
        State state = std::move(queue.front());
        queue.pop_front();
        const Digraph& g = state.graph;
        for (auto e : g.edges()) {
            if (auto hit = push(delete_edge(g, e), state.script,
                                {WitnessOp::Kind::delete_edge, e.first, e.second}))
                return hit->script;
        }
        for (int v = 0; v < g.order(); ++v) {
            if (auto hit = push(delete_vertex(g, v).graph, state.script,
                                {WitnessOp::Kind::delete_vertex, 0, v}))
                return hit->script;
        }
        for (auto e : contractible_edges(g)) {
            if (auto hit = push(butterfly_contract(g, e).graph, state.script,
                                {WitnessOp::Kind::contract, e.first, e.second}))
                return hit->script;
        }
    }
    return std::nullopt;
}

}  // namespace d2gen

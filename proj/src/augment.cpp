#include "d2gen/augment.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <sstream>

namespace d2gen {

namespace {

std::string vset_str(const std::vector<int>& vs) {
    std::string s;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(vs[i]);
    }
    return s;
}

bool is_subset(const std::vector<int>& sub, const std::vector<int>& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool contains(const std::vector<int>& vs, int v) {
    return std::binary_search(vs.begin(), vs.end(), v);
}

std::vector<int> sorted(std::vector<int> vs) {
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

}  // namespace

SplitResult split(const Digraph& d, const SplitSpec& s) {
    if (!d.has_vertex(s.vertex)) fail(errc::not_a_vertex, "vertex " + std::to_string(s.vertex));
    const auto& nbrs = s.out ? d.out_neighbors(s.vertex) : d.in_neighbors(s.vertex);
    std::vector<int> exposed = sorted(s.exposed);
    if (!is_subset(exposed, nbrs))
        fail(errc::degree_too_small, "exposed set is not a subset of the neighborhood of " +
                                         std::to_string(s.vertex));
    int base_count = static_cast<int>(nbrs.size() - exposed.size());
    if (exposed.size() < 2 || base_count < 1)
        fail(errc::degree_too_small,
             "split at " + std::to_string(s.vertex) + " needs |N_e| >= 2 and |N_b| >= 1 (degree " +
                 std::to_string(nbrs.size()) + ")");
    int v = s.vertex;
    int ex = d.order();
    std::vector<Edge> edges;
    edges.reserve(d.edges().size() + 1);
    for (auto [a, b] : d.edges()) {
        if (s.out) {
            if (a == v)
                edges.emplace_back(contains(exposed, b) ? ex : v, b);
            else
                edges.emplace_back(a, b);  // in-edges of v keep heading to the base
        } else {
            if (b == v)
                edges.emplace_back(a, contains(exposed, a) ? ex : v);
            else
                edges.emplace_back(a, b);
        }
    }
    if (s.out)
        edges.emplace_back(v, ex);
    else
        edges.emplace_back(ex, v);
    return SplitResult{Digraph(d.order() + 1, std::move(edges)), v, ex};
}

Digraph add_chain(const Digraph& d, Edge e, int x, int y, int len) {
    auto [u, v] = e;
    if (!d.has_edge(u, v)) fail(errc::edge_absent, "carrier edge (" + std::to_string(u) + "," +
                                                       std::to_string(v) + ")");
    if (!d.has_vertex(x)) fail(errc::not_a_vertex, "x = " + std::to_string(x));
    if (!d.has_vertex(y)) fail(errc::not_a_vertex, "y = " + std::to_string(y));
    if (len < 1) fail(errc::precondition_violated, "chain length must be >= 1");
    if (len == 1 && (x == u || y == v))
        fail(errc::simplicity_violation,
             "length-1 chain with x = tail or y = head would duplicate a path edge");
    int n = d.order();
    std::vector<Edge> edges;
    for (auto f : d.edges())
        if (f != e) edges.push_back(f);
    // forward path u -> z_1 -> ... -> z_len -> v
    int first = n, last = n + len - 1;
    edges.emplace_back(u, first);
    for (int i = 0; i + 1 < len; ++i) edges.emplace_back(n + i, n + i + 1);
    edges.emplace_back(last, v);
    // return path x -> z_len -> ... -> z_1 -> y
    edges.emplace_back(x, last);
    for (int i = len - 1; i > 0; --i) edges.emplace_back(n + i, n + i - 1);
    edges.emplace_back(first, y);
    return Digraph(n + len, std::move(edges));
}

SubdivideResult subdivide_edge(const Digraph& d, Edge e) {
    auto [u, v] = e;
    if (!d.has_edge(u, v))
        fail(errc::edge_absent, "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    int z = d.order();
    std::vector<Edge> edges;
    for (auto f : d.edges())
        if (f != e) edges.push_back(f);
    edges.emplace_back(u, z);
    edges.emplace_back(z, v);
    return SubdivideResult{Digraph(d.order() + 1, std::move(edges)), z};
}

// ---------------------------------------------------------------------------
// Descriptor text
// ---------------------------------------------------------------------------

std::string format_augmentation(const Augmentation& a) {
    std::ostringstream os;
    if (const auto* basic = std::get_if<BasicAug>(&a)) {
        os << "(basic u=" << basic->u << " v=" << basic->v;
        if (basic->out_split)
            os << " out-split=(" << basic->u << ";" << vset_str(*basic->out_split) << ")";
        if (basic->in_split)
            os << " in-split=(" << basic->v << ";" << vset_str(*basic->in_split) << ")";
        os << ")";
    } else if (const auto* dbl = std::get_if<BasicDoubleAug>(&a)) {
        os << "(basic-double w=" << dbl->w << " out-split=(" << dbl->w << ";"
           << vset_str(dbl->out_exposed) << ") in-split=(" << dbl->w << ";"
           << vset_str(dbl->in_exposed) << "))";
    } else if (const auto* chain = std::get_if<ChainAug>(&a)) {
        os << "(chain u=" << chain->u << " v=" << chain->v;
        if (chain->out_split)
            os << " out-split=(" << chain->u << ";" << vset_str(*chain->out_split) << ")";
        if (chain->in_split)
            os << " in-split=(" << chain->v << ";" << vset_str(*chain->in_split) << ")";
        os << " carrier=(";
        if (!chain->out_split)
            os << "u";
        else
            os << (chain->tail_slot == ClusterSlot::base ? "b(u)" : "e(u)");
        os << ",";
        if (!chain->in_split)
            os << "v";
        else
            os << (chain->head_slot == ClusterSlot::base ? "b(v)" : "e(v)");
        os << ") len=" << chain->len << ")";
    } else if (const auto* col = std::get_if<CollaretteAug>(&a)) {
        os << "(collarette u=" << col->u << " v=" << col->v << " len=" << col->len << ")";
    } else {
        const auto& br = std::get<BraceletAug>(a);
        os << "(bracelet w=" << br.w << " x=" << br.x << " a=" << br.a << " y=" << br.y
           << " b=" << br.b << " side=" << (br.subdivide_in ? "in" : "out") << ")";
    }
    return os.str();
}

namespace {

struct DescriptorScanner {
    std::string text;
    size_t pos = 0;

    explicit DescriptorScanner(std::string_view sv) : text(sv) {}

    void skip_ws() {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            fail(errc::bad_format, "descriptor: expected '" + std::string(1, c) + "' at offset " +
                                       std::to_string(pos) + " in " + text);
    }
    std::string word() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && (isalnum(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '-' || text[pos] == '(' || text[pos] == ')'))
            if (text[pos] == '(' || text[pos] == ')')
                break;
            else
                ++pos;
        return text.substr(start, pos - start);
    }
    int number() {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() && text[pos] == '-') ++pos;
        while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail(errc::bad_format, "descriptor: expected number in " + text);
        return std::stoi(text.substr(start, pos - start));
    }
    // key=value pairs; returns key, leaves pos at the value
    std::optional<std::string> key() {
        skip_ws();
        if (pos >= text.size() || text[pos] == ')') return std::nullopt;
        size_t start = pos;
        while (pos < text.size() && text[pos] != '=') ++pos;
        if (pos >= text.size()) fail(errc::bad_format, "descriptor: expected key= in " + text);
        std::string k = text.substr(start, pos - start);
        ++pos;  // '='
        return k;
    }
    std::vector<int> split_value(int expected_vertex) {
        expect('(');
        int vertex = number();
        if (vertex != expected_vertex)
            fail(errc::bad_format, "descriptor: split names vertex " + std::to_string(vertex) +
                                       ", expected " + std::to_string(expected_vertex));
        expect(';');
        std::vector<int> out;
        out.push_back(number());
        while (eat(',')) out.push_back(number());
        expect(')');
        return sorted(out);
    }
};

}  // namespace

Augmentation parse_augmentation(std::string_view text) {
    DescriptorScanner sc(text);
    sc.expect('(');
    std::string kind = sc.word();
    if (kind == "basic") {
        BasicAug a;
        bool have_u = false, have_v = false;
        while (auto k = sc.key()) {
            if (*k == "u") {
                a.u = sc.number();
                have_u = true;
            } else if (*k == "v") {
                a.v = sc.number();
                have_v = true;
            } else if (*k == "out-split")
                a.out_split = sc.split_value(a.u);
            else if (*k == "in-split")
                a.in_split = sc.split_value(a.v);
            else
                fail(errc::bad_format, "descriptor: unknown key '" + *k + "'");
        }
        sc.expect(')');
        if (!have_u || !have_v) fail(errc::bad_format, "descriptor: basic needs u and v");
        return a;
    }
    if (kind == "basic-double") {
        BasicDoubleAug a;
        bool have_w = false;
        while (auto k = sc.key()) {
            if (*k == "w") {
                a.w = sc.number();
                have_w = true;
            } else if (*k == "out-split")
                a.out_exposed = sc.split_value(a.w);
            else if (*k == "in-split")
                a.in_exposed = sc.split_value(a.w);
            else
                fail(errc::bad_format, "descriptor: unknown key '" + *k + "'");
        }
        sc.expect(')');
        if (!have_w || a.out_exposed.empty() || a.in_exposed.empty())
            fail(errc::bad_format, "descriptor: basic-double needs w and both splits");
        return a;
    }
    if (kind == "chain") {
        ChainAug a;
        bool have_len = false;
        while (auto k = sc.key()) {
            if (*k == "u")
                a.u = sc.number();
            else if (*k == "v")
                a.v = sc.number();
            else if (*k == "out-split")
                a.out_split = sc.split_value(a.u);
            else if (*k == "in-split")
                a.in_split = sc.split_value(a.v);
            else if (*k == "len") {
                a.len = sc.number();
                have_len = true;
            } else if (*k == "carrier") {
                sc.expect('(');
                std::string tail = sc.word();
                if (tail == "b" || tail == "e") {
                    sc.expect('(');
                    sc.word();
                    sc.expect(')');
                }
                sc.expect(',');
                std::string head = sc.word();
                if (head == "b" || head == "e") {
                    sc.expect('(');
                    sc.word();
                    sc.expect(')');
                }
                sc.expect(')');
                a.tail_slot = (tail == "e") ? ClusterSlot::exposed : ClusterSlot::base;
                a.head_slot = (head == "e") ? ClusterSlot::exposed : ClusterSlot::base;
            } else
                fail(errc::bad_format, "descriptor: unknown key '" + *k + "'");
        }
        sc.expect(')');
        if (!have_len) fail(errc::bad_format, "descriptor: chain needs len");
        return a;
    }
    if (kind == "collarette") {
        CollaretteAug a;
        while (auto k = sc.key()) {
            if (*k == "u")
                a.u = sc.number();
            else if (*k == "v")
                a.v = sc.number();
            else if (*k == "len")
                a.len = sc.number();
            else
                fail(errc::bad_format, "descriptor: unknown key '" + *k + "'");
        }
        sc.expect(')');
        return a;
    }
    if (kind == "bracelet") {
        BraceletAug a;
        while (auto k = sc.key()) {
            if (*k == "w")
                a.w = sc.number();
            else if (*k == "x")
                a.x = sc.number();
            else if (*k == "a")
                a.a = sc.number();
            else if (*k == "y")
                a.y = sc.number();
            else if (*k == "b")
                a.b = sc.number();
            else if (*k == "side") {
                std::string side = sc.word();
                if (side != "in" && side != "out")
                    fail(errc::bad_format, "descriptor: side must be in or out");
                a.subdivide_in = side == "in";
            } else
                fail(errc::bad_format, "descriptor: unknown key '" + *k + "'");
        }
        sc.expect(')');
        return a;
    }
    fail(errc::bad_format, "descriptor: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

namespace {

struct SplitState {
    Digraph graph;
    int e_u, e_v;  // current names of e(u) and e(v)
    int b_u, b_v;
};

// Performs the optional out-split at u and in-split at v shared by basic
// and chain augmentations. Split specs are written against d's names; after
// the out-split, v's in-neighbor u may have been renamed to e(u), which the
// in-split has to account for.
SplitState perform_splits(const Digraph& d, int u, int v,
                          const std::optional<std::vector<int>>& out_exposed,
                          const std::optional<std::vector<int>>& in_exposed) {
    if (u == v) fail(errc::precondition_violated, "u and v must be distinct");
    if (!d.has_vertex(u)) fail(errc::not_a_vertex, "u = " + std::to_string(u));
    if (!d.has_vertex(v)) fail(errc::not_a_vertex, "v = " + std::to_string(v));
    SplitState st{d, u, v, u, v};
    bool u_to_exposed = false;
    if (out_exposed) {
        auto res = split(st.graph, SplitSpec{u, true, *out_exposed});
        u_to_exposed = contains(sorted(*out_exposed), v);
        st.graph = std::move(res.graph);
        st.e_u = res.exposed;
        st.b_u = res.base;
    }
    if (in_exposed) {
        // translate original names: if (u,v) went through the exposed side
        // of the out-split, v's in-neighbor is now e(u)
        std::vector<int> exposed = sorted(*in_exposed);
        if (!is_subset(exposed, d.in_neighbors(v)))
            fail(errc::degree_too_small,
                 "in-split exposed set is not a subset of the in-neighborhood of " +
                     std::to_string(v));
        if (u_to_exposed)
            for (int& w : exposed)
                if (w == u) w = st.e_u;
        auto res = split(st.graph, SplitSpec{v, false, sorted(exposed)});
        st.graph = std::move(res.graph);
        st.e_v = res.exposed;
        st.b_v = res.base;
    }
    return st;
}

void check_bracelet(const Digraph& d, const BraceletAug& a) {
    if (!d.has_vertex(a.w)) fail(errc::not_a_vertex, "w = " + std::to_string(a.w));
    std::vector<int> in_set = sorted({a.x, a.a});
    std::vector<int> out_set = sorted({a.y, a.b});
    if (a.x == a.a || a.y == a.b || d.in_neighbors(a.w) != in_set ||
        d.out_neighbors(a.w) != out_set)
        fail(errc::precondition_violated,
             "bracelet: w must have in-neighborhood {x,a} and out-neighborhood {y,b}");
    bool left = a.a == a.y || (d.has_edge(a.x, a.a) && d.has_edge(a.a, a.y));
    if (!left)
        fail(errc::precondition_violated, "bracelet: need a=y or (x,a),(a,y) present");
    bool right = a.x == a.b || (d.has_edge(a.x, a.b) && d.has_edge(a.b, a.y));
    if (!right)
        fail(errc::precondition_violated, "bracelet: need x=b or (x,b),(b,y) present");
}

Digraph add_edge(const Digraph& d, Edge e) {
    std::vector<Edge> edges = d.edges();
    edges.push_back(e);
    return Digraph(d.order(), std::move(edges));
}

}  // namespace

Digraph apply_augmentation(const Digraph& d, const Augmentation& a) {
    if (const auto* basic = std::get_if<BasicAug>(&a)) {
        SplitState st =
            perform_splits(d, basic->u, basic->v, basic->out_split, basic->in_split);
        if (st.graph.has_edge(st.e_v, st.e_u))
            fail(errc::precondition_violated,
                 "basic: edge (e(v),e(u)) already present, clause \"(e(v),e(u)) not in E\"");
        return add_edge(st.graph, {st.e_v, st.e_u});
    }
    if (const auto* dbl = std::get_if<BasicDoubleAug>(&a)) {
        if (!d.has_vertex(dbl->w)) fail(errc::not_a_vertex, "w = " + std::to_string(dbl->w));
        auto first = split(d, SplitSpec{dbl->w, true, dbl->out_exposed});
        auto second = split(first.graph, SplitSpec{dbl->w, false, dbl->in_exposed});
        return add_edge(second.graph, {second.exposed, first.exposed});
    }
    if (const auto* chain = std::get_if<ChainAug>(&a)) {
        if (!chain->out_split && chain->tail_slot == ClusterSlot::exposed)
            fail(errc::precondition_violated, "chain: carrier tail e(u) without an out-split");
        if (!chain->in_split && chain->head_slot == ClusterSlot::exposed)
            fail(errc::precondition_violated, "chain: carrier head e(v) without an in-split");
        SplitState st =
            perform_splits(d, chain->u, chain->v, chain->out_split, chain->in_split);
        int tail = chain->tail_slot == ClusterSlot::exposed ? st.e_u : st.b_u;
        int head = chain->head_slot == ClusterSlot::exposed ? st.e_v : st.b_v;
        return add_chain(st.graph, {tail, head}, st.e_v, st.e_u, chain->len);
    }
    if (const auto* col = std::get_if<CollaretteAug>(&a)) {
        if (col->u == col->v) fail(errc::precondition_violated, "collarette: u = v");
        if (!d.has_edge(col->u, col->v) || !d.has_edge(col->v, col->u))
            fail(errc::precondition_violated, "collarette: (u,v),(v,u) must form a digon");
        if (col->len < 0) fail(errc::precondition_violated, "collarette: negative length");
        auto sub_x = subdivide_edge(d, {col->v, col->u});
        auto sub_y = subdivide_edge(sub_x.graph, {col->u, col->v});
        int x = sub_x.middle, y = sub_y.middle;
        Digraph with_edge = add_edge(sub_y.graph, {x, y});
        // a length-0 chain through (x,y) keeps the edge and weaves back the
        // single edge (y,x)
        if (col->len == 0) return add_edge(with_edge, {y, x});
        return add_chain(with_edge, {x, y}, y, x, col->len);
    }
    const auto& br = std::get<BraceletAug>(a);
    check_bracelet(d, br);
    Edge target = br.subdivide_in ? Edge{br.a, br.w} : Edge{br.w, br.b};
    auto sub = subdivide_edge(d, target);
    Digraph g = add_edge(sub.graph, {br.x, sub.middle});
    return add_edge(g, {sub.middle, br.y});
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

// all exposed subsets: size >= 2, leaving at least one base neighbor
std::vector<std::vector<int>> exposed_subsets(const std::vector<int>& nbrs) {
    std::vector<std::vector<int>> out;
    int n = static_cast<int>(nbrs.size());
    if (n < 3) return out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int size = std::popcount(mask);
        if (size < 2 || size > n - 1) continue;
        std::vector<int> subset;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) subset.push_back(nbrs[i]);
        out.push_back(std::move(subset));
    }
    return out;
}

}  // namespace

std::vector<std::pair<Augmentation, Digraph>> enumerate_augmentations(const Digraph& d,
                                                                      int vertex_budget) {
    std::vector<std::pair<Augmentation, Digraph>> out;
    int n = d.order();
    auto emit = [&](Augmentation a) { out.emplace_back(std::move(a), Digraph{}); };

    for (int u = 0; u < n; ++u) {
        std::vector<std::optional<std::vector<int>>> out_opts{std::nullopt};
        for (auto& s : exposed_subsets(d.out_neighbors(u))) out_opts.push_back(s);
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            std::vector<std::optional<std::vector<int>>> in_opts{std::nullopt};
            for (auto& s : exposed_subsets(d.in_neighbors(v))) in_opts.push_back(s);
            for (const auto& os : out_opts) {
                for (const auto& is : in_opts) {
                    int splits = (os ? 1 : 0) + (is ? 1 : 0);
                    if (n + splits <= vertex_budget && (splits > 0 || !d.has_edge(v, u)))
                        emit(BasicAug{u, v, os, is});
                    // chain: carrier requires the original edge (u,v)
                    if (d.has_edge(u, v)) {
                        int max_len = vertex_budget - n - splits;
                        ClusterSlot tail = ClusterSlot::base;
                        ClusterSlot head = ClusterSlot::base;
                        if (os && contains(*os, v)) tail = ClusterSlot::exposed;
                        if (is && contains(*is, u)) head = ClusterSlot::exposed;
                        for (int len = 1; len <= max_len; ++len)
                            emit(ChainAug{u, v, os, is, tail, head, len});
                    }
                }
            }
            // collarette on the ordered digon (u,v); length 0 is the
            // degenerate form that just adds the digon (x,y),(y,x)
            if (d.has_edge(u, v) && d.has_edge(v, u)) {
                int max_len = vertex_budget - n - 2;
                for (int len = 0; len <= max_len; ++len) emit(CollaretteAug{u, v, len});
            }
        }
    }
    // bracelet
    if (n + 1 <= vertex_budget) {
        for (int w = 0; w < n; ++w) {
            if (d.in_degree(w) != 2 || d.out_degree(w) != 2) continue;
            const auto& ins = d.in_neighbors(w);
            const auto& outs = d.out_neighbors(w);
            for (int i = 0; i < 2; ++i) {
                int x = ins[i], a = ins[1 - i];
                for (int j = 0; j < 2; ++j) {
                    int y = outs[j], b = outs[1 - j];
                    bool left = a == y || (d.has_edge(x, a) && d.has_edge(a, y));
                    bool right = x == b || (d.has_edge(x, b) && d.has_edge(b, y));
                    if (!left || !right) continue;
                    emit(BraceletAug{w, x, a, y, b, true});
                    emit(BraceletAug{w, x, a, y, b, false});
                }
            }
        }
    }
    // basic-double
    if (n + 2 <= vertex_budget) {
        for (int w = 0; w < n; ++w) {
            if (d.out_degree(w) < 3 || d.in_degree(w) < 3) continue;
            for (auto& oe : exposed_subsets(d.out_neighbors(w)))
                for (auto& ie : exposed_subsets(d.in_neighbors(w)))
                    emit(BasicDoubleAug{w, oe, ie});
        }
    }

    for (auto& [aug, result] : out) result = apply_augmentation(d, aug);
    std::sort(out.begin(), out.end(), [](const auto& lhs, const auto& rhs) {
        return format_augmentation(lhs.first) < format_augmentation(rhs.first);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

Augmentation invert_augmentation(const Augmentation& a) {
    if (const auto* basic = std::get_if<BasicAug>(&a))
        return BasicAug{basic->v, basic->u, basic->in_split, basic->out_split};
    if (const auto* dbl = std::get_if<BasicDoubleAug>(&a))
        return BasicDoubleAug{dbl->w, dbl->in_exposed, dbl->out_exposed};
    if (const auto* chain = std::get_if<ChainAug>(&a))
        return ChainAug{chain->v,       chain->u,         chain->in_split, chain->out_split,
                        chain->head_slot, chain->tail_slot, chain->len};
    if (const auto* col = std::get_if<CollaretteAug>(&a))
        return CollaretteAug{col->v, col->u, col->len};
    const auto& br = std::get<BraceletAug>(a);
    return BraceletAug{br.w, br.y, br.b, br.x, br.a, !br.subdivide_in};
}

// ---------------------------------------------------------------------------
// Minor witness
// ---------------------------------------------------------------------------

WitnessScript augmentation_witness(const Digraph& d, const Augmentation& a) {
    WitnessScript script;
    auto del = [&](int u, int v) {
        script.ops.push_back({WitnessOp::Kind::delete_edge, u, v});
    };
    auto con = [&](int u, int v) { script.ops.push_back({WitnessOp::Kind::contract, u, v}); };
    int n = d.order();

    if (const auto* basic = std::get_if<BasicAug>(&a)) {
        int e_u = basic->out_split ? n : basic->u;
        int e_v = basic->in_split ? (basic->out_split ? n + 1 : n) : basic->v;
        del(e_v, e_u);
        if (basic->in_split) con(e_v, basic->v);
        if (basic->out_split) con(basic->u, e_u);
        return script;
    }
    if (const auto* dbl = std::get_if<BasicDoubleAug>(&a)) {
        del(n + 1, n);
        con(n + 1, dbl->w);
        con(dbl->w, n);
        return script;
    }
    if (const auto* chain = std::get_if<ChainAug>(&a)) {
        int splits = (chain->out_split ? 1 : 0) + (chain->in_split ? 1 : 0);
        int e_u = chain->out_split ? n : chain->u;
        int e_v = chain->in_split ? (chain->out_split ? n + 1 : n) : chain->v;
        int first = n + splits;                   // z_1
        int last = n + splits + chain->len - 1;   // z_len
        del(e_v, last);
        for (int i = last; i > first; --i) del(i, i - 1);
        del(first, e_u);
        int tail = chain->tail_slot == ClusterSlot::exposed ? e_u : chain->u;
        for (int i = 0; i < chain->len; ++i) con(tail, first);
        if (chain->in_split) con(e_v, chain->v);
        if (chain->out_split) con(chain->u, e_u);
        return script;
    }
    if (const auto* col = std::get_if<CollaretteAug>(&a)) {
        int x = n, y = n + 1, first = n + 2, last = n + 1 + col->len;
        if (col->len == 0) {
            del(y, x);
        } else {
            del(y, last);
            for (int i = last; i > first; --i) del(i, i - 1);
            del(first, x);
            for (int i = 0; i < col->len; ++i) con(x, first);
        }
        del(x, y);
        con(x, col->u);   // x was subdividing (v,u)
        con(col->u, x);   // y, now renamed to x's slot, was subdividing (u,v)
        return script;
    }
    const auto& br = std::get<BraceletAug>(a);
    del(br.x, n);
    del(n, br.y);
    if (br.subdivide_in)
        con(br.a, n);
    else
        con(n, br.b);
    return script;
}

}  // namespace d2gen

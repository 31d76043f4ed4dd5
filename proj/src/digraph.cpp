#include "d2gen/digraph.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace d2gen {

const char* errc_name(errc c) {
    switch (c) {
        case errc::malformed_header: return "MalformedHeader";
        case errc::duplicate_edge: return "DuplicateEdge";
        case errc::loop_edge: return "LoopEdge";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::size_bound_exceeded: return "SizeBoundExceeded";
        case errc::not_contractible: return "NotContractible";
        case errc::degree_too_small: return "DegreeTooSmall";
        case errc::not_a_vertex: return "NotAVertex";
        case errc::edge_absent: return "EdgeAbsent";
        case errc::simplicity_violation: return "SimplicityViolation";
        case errc::precondition_violated: return "PreconditionViolated";
        case errc::invalid_model: return "InvalidModel";
        case errc::not_an_earpath: return "NotAnEarPath";
        case errc::not_switching: return "NotSwitching";
        case errc::not_on_root_path: return "NotOnRootPath";
        case errc::not_a_minor: return "NotAMinor";
        case errc::not_strongly_2_connected: return "NotStrongly2Connected";
        case errc::no_successor: return "NoSuccessor";
        case errc::bad_format: return "BadFormat";
    }
    return "UnknownError";
}

void fail(errc code, const std::string& msg) {
    throw error(code, std::string(errc_name(code)) + ": " + msg);
}

Digraph::Digraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) fail(errc::index_out_of_range, "negative vertex count");
    if (n_ > max_vertices)
        fail(errc::size_bound_exceeded,
             "vertex count " + std::to_string(n_) + " exceeds supported bound " +
                 std::to_string(max_vertices));
    std::sort(edges_.begin(), edges_.end());
    for (size_t i = 0; i < edges_.size(); ++i) {
        auto [u, v] = edges_[i];
        if (u < 0 || u >= n_ || v < 0 || v >= n_)
            fail(errc::index_out_of_range,
                 "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
        if (u == v)
            fail(errc::loop_edge, "loop at vertex " + std::to_string(u));
        if (i > 0 && edges_[i] == edges_[i - 1])
            fail(errc::duplicate_edge,
                 "duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    out_bits_.assign(n_, 0);
    in_bits_.assign(n_, 0);
    out_adj_.assign(n_, {});
    in_adj_.assign(n_, {});
    for (auto [u, v] : edges_) {
        out_bits_[u] |= uint64_t{1} << v;
        in_bits_[v] |= uint64_t{1} << u;
        out_adj_[u].push_back(v);
        in_adj_[v].push_back(u);
    }
    for (int v = 0; v < n_; ++v) {
        std::sort(in_adj_[v].begin(), in_adj_[v].end());
        // Matrix bits and neighbor lists are built independently from the
        // edge list; they must agree.
        assert(std::popcount(out_bits_[v]) == static_cast<int>(out_adj_[v].size()));
        assert(std::popcount(in_bits_[v]) == static_cast<int>(in_adj_[v].size()));
    }
}

void Digraph::check_vertex(int v) const {
    if (!has_vertex(v)) fail(errc::not_a_vertex, "vertex " + std::to_string(v));
}

const std::vector<int>& Digraph::out_neighbors(int v) const {
    check_vertex(v);
    return out_adj_[v];
}

const std::vector<int>& Digraph::in_neighbors(int v) const {
    check_vertex(v);
    return in_adj_[v];
}

uint64_t Digraph::out_mask(int v) const {
    check_vertex(v);
    return out_bits_[v];
}

uint64_t Digraph::in_mask(int v) const {
    check_vertex(v);
    return in_bits_[v];
}

// ---------------------------------------------------------------------------
// d2c parsing
// ---------------------------------------------------------------------------

namespace {

struct Lines {
    std::vector<std::string_view> lines;
    explicit Lines(std::string_view text) {
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) {
                lines.push_back(text.substr(pos));
                break;
            }
            lines.push_back(text.substr(pos, nl - pos));
            pos = nl + 1;
        }
    }
};

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

bool is_comment(std::string_view s) {
    size_t i = s.find_first_not_of(" \t\r");
    return i != std::string_view::npos && s[i] == '#';
}

std::vector<long long> parse_ints(std::string_view line, int lineno, errc on_bad) {
    std::vector<long long> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        long long value = 0;
        auto res = std::from_chars(line.data() + i, line.data() + j, value);
        if (res.ec != std::errc{} || res.ptr != line.data() + j)
            fail(on_bad, "line " + std::to_string(lineno) + ": expected integer, got '" +
                             std::string(line.substr(i, j - i)) + "'");
        out.push_back(value);
        i = j;
    }
    return out;
}

// Parses one record starting at lines[idx]; advances idx past the record.
Digraph parse_record(const std::vector<std::string_view>& lines, size_t& idx) {
    // skip leading blanks/comments
    while (idx < lines.size() && (is_blank(lines[idx]) || is_comment(lines[idx]))) ++idx;
    if (idx >= lines.size())
        fail(errc::malformed_header, "line " + std::to_string(idx + 1) + ": missing header");
    int header_line = static_cast<int>(idx + 1);
    auto header = parse_ints(lines[idx], header_line, errc::malformed_header);
    if (header.size() != 2)
        fail(errc::malformed_header,
             "line " + std::to_string(header_line) + ": expected 'n m'");
    long long n = header[0], m = header[1];
    if (n < 0 || m < 0)
        fail(errc::malformed_header,
             "line " + std::to_string(header_line) + ": negative count");
    if (n > Digraph::max_vertices)
        fail(errc::size_bound_exceeded,
             "line " + std::to_string(header_line) + ": vertex count " + std::to_string(n) +
                 " exceeds supported bound " + std::to_string(Digraph::max_vertices));
    ++idx;

    std::vector<Edge> edges;
    edges.reserve(static_cast<size_t>(m));
    std::vector<uint64_t> seen(static_cast<size_t>(std::max<long long>(n, 1)), 0);
    while (static_cast<long long>(edges.size()) < m) {
        while (idx < lines.size() && is_comment(lines[idx])) ++idx;
        if (idx >= lines.size() || is_blank(lines[idx]))
            fail(errc::malformed_header,
                 "line " + std::to_string(idx + 1) + ": record truncated, expected " +
                     std::to_string(m) + " edges");
        int lineno = static_cast<int>(idx + 1);
        auto nums = parse_ints(lines[idx], lineno, errc::malformed_header);
        if (nums.size() != 2)
            fail(errc::malformed_header, "line " + std::to_string(lineno) + ": expected 'u v'");
        long long u = nums[0], v = nums[1];
        if (u < 0 || u >= n || v < 0 || v >= n)
            fail(errc::index_out_of_range,
                 "line " + std::to_string(lineno) + ": edge (" + std::to_string(u) + "," +
                     std::to_string(v) + ") out of range for n=" + std::to_string(n));
        if (u == v)
            fail(errc::loop_edge,
                 "line " + std::to_string(lineno) + ": loop at vertex " + std::to_string(u));
        if (seen[static_cast<size_t>(u)] >> v & 1)
            fail(errc::duplicate_edge,
                 "line " + std::to_string(lineno) + ": duplicate edge (" + std::to_string(u) +
                     "," + std::to_string(v) + ")");
        seen[static_cast<size_t>(u)] |= uint64_t{1} << v;
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        ++idx;
    }
    return Digraph(static_cast<int>(n), std::move(edges));
}

}  // namespace

Digraph parse_d2c(std::string_view text) {
    Lines split(text);
    size_t idx = 0;
    Digraph d = parse_record(split.lines, idx);
    while (idx < split.lines.size()) {
        if (!is_blank(split.lines[idx]) && !is_comment(split.lines[idx]))
            fail(errc::malformed_header,
                 "line " + std::to_string(idx + 1) + ": trailing content after record");
        ++idx;
    }
    return d;
}

std::vector<Digraph> parse_d2c_stream(std::string_view text) {
    Lines split(text);
    std::vector<Digraph> out;
    size_t idx = 0;
    for (;;) {
        while (idx < split.lines.size() &&
               (is_blank(split.lines[idx]) || is_comment(split.lines[idx])))
            ++idx;
        if (idx >= split.lines.size()) break;
        out.push_back(parse_record(split.lines, idx));
    }
    return out;
}

std::string serialize_d2c(const Digraph& d) {
    std::ostringstream os;
    os << d.order() << ' ' << d.edge_count() << '\n';
    for (auto [u, v] : d.edges()) os << u << ' ' << v << '\n';
    return os.str();
}

Digraph read_d2c_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::bad_format, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_d2c(buf.str());
}

// ---------------------------------------------------------------------------
// Connectivity
// ---------------------------------------------------------------------------

bool is_strongly_connected_within(const Digraph& d, uint64_t keep) {
    keep &= d.vertex_mask();
    if (std::popcount(keep) <= 1) return true;
    int start = std::countr_zero(keep);
    // forward closure
    uint64_t reach = uint64_t{1} << start;
    for (;;) {
        uint64_t frontier = reach;
        uint64_t next = reach;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= d.out_mask(v) & keep;
        }
        if (next == reach) break;
        reach = next;
    }
    if (reach != keep) return false;
    // backward closure
    reach = uint64_t{1} << start;
    for (;;) {
        uint64_t frontier = reach;
        uint64_t next = reach;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= d.in_mask(v) & keep;
        }
        if (next == reach) break;
        reach = next;
    }
    return reach == keep;
}

bool is_strongly_connected(const Digraph& d) {
    if (d.order() <= 1) return true;
    return is_strongly_connected_within(d, d.vertex_mask());
}

namespace {

bool strongly_connected_minus_subsets(const Digraph& d, uint64_t deleted, int first,
                                      int remaining) {
    if (!is_strongly_connected_within(d, d.vertex_mask() & ~deleted)) return false;
    if (remaining == 0) return true;
    for (int v = first; v < d.order(); ++v) {
        if (!strongly_connected_minus_subsets(d, deleted | (uint64_t{1} << v), v + 1,
                                              remaining - 1))
            return false;
    }
    return true;
}

}  // namespace

bool is_strongly_k_connected(const Digraph& d, int k) {
    if (k < 1) fail(errc::precondition_violated, "k must be >= 1");
    if (d.order() < k + 1) return false;
    return strongly_connected_minus_subsets(d, 0, 0, k - 1);
}

// ---------------------------------------------------------------------------
// Relabeling / inversion
// ---------------------------------------------------------------------------

Digraph relabel(const Digraph& d, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != d.order())
        fail(errc::precondition_violated, "permutation size mismatch");
    std::vector<Edge> edges;
    edges.reserve(d.edges().size());
    for (auto [u, v] : d.edges()) edges.emplace_back(perm[u], perm[v]);
    return Digraph(d.order(), std::move(edges));
}

Digraph invert(const Digraph& d) {
    std::vector<Edge> edges;
    edges.reserve(d.edges().size());
    for (auto [u, v] : d.edges()) edges.emplace_back(v, u);
    return Digraph(d.order(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

namespace {

struct CanonSearch {
    const Digraph& d;
    int n;
    std::string best;           // current best full bit string
    std::vector<int> pos;       // pos[p] = vertex at position p
    std::vector<char> used;
    std::vector<int> order;     // candidate exploration order

    explicit CanonSearch(const Digraph& dd) : d(dd), n(dd.order()) {
        best.assign(static_cast<size_t>(n) * n, '1');
        pos.assign(n, -1);
        used.assign(n, 0);
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        // Low-degree vertices first tends to find a good incumbent early.
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            auto ka = std::make_tuple(dd.out_degree(a), dd.in_degree(a), a);
            auto kb = std::make_tuple(dd.out_degree(b), dd.in_degree(b), b);
            return ka < kb;
        });
    }

    // Sound prune: true iff every completion of the current partial
    // assignment (positions 0..k-1 fixed) is lexicographically worse than
    // `best`. Unknown bits are resolved pessimistically for `best`: an
    // unknown position where best has '0' can only tie (0) or lose (1), so
    // scanning may continue; where best has '1' the completion could win,
    // so nothing can be concluded.
    bool certainly_worse(int k) const {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                char b = best[static_cast<size_t>(i) * n + j];
                if (i >= k || j >= k) {
                    if (b == '1') return false;
                    continue;
                }
                char bit = d.has_edge(pos[i], pos[j]) ? '1' : '0';
                if (bit < b) return false;
                if (bit > b) return true;
            }
        }
        return false;
    }

    void run(int k) {
        if (k == n) {
            std::string s(static_cast<size_t>(n) * n, '0');
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (d.has_edge(pos[i], pos[j])) s[static_cast<size_t>(i) * n + j] = '1';
            if (s < best) best = s;
            return;
        }
        for (int v : order) {
            if (used[v]) continue;
            pos[k] = v;
            used[v] = 1;
            if (!certainly_worse(k + 1)) run(k + 1);
            used[v] = 0;
        }
        pos[k] = -1;
    }
};

}  // namespace

CanonicalForm canonical_form(const Digraph& d, int max_n) {
    if (d.order() > max_n)
        fail(errc::size_bound_exceeded, "canonical form bounded to n <= " +
                                            std::to_string(max_n) + ", got n = " +
                                            std::to_string(d.order()));
    if (d.order() == 0) return CanonicalForm{0, ""};
    CanonSearch search(d);
    search.run(0);
    return CanonicalForm{d.order(), std::move(search.best)};
}

std::string CanonicalForm::hash() const {
    uint64_t h = 1469598103934665603ull;
    std::string k = key();
    for (unsigned char c : k) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

Digraph from_form(const CanonicalForm& form) {
    if (static_cast<size_t>(form.n) * form.n != form.bits.size())
        fail(errc::bad_format, "canonical form bit count does not match n^2");
    std::vector<Edge> edges;
    for (int i = 0; i < form.n; ++i)
        for (int j = 0; j < form.n; ++j)
            if (form.bits[static_cast<size_t>(i) * form.n + j] == '1') edges.emplace_back(i, j);
    return Digraph(form.n, std::move(edges));
}

bool isomorphic(const Digraph& a, const Digraph& b, int max_n) {
    if (a.order() != b.order() || a.edge_count() != b.edge_count()) return false;
    return canonical_form(a, max_n) == canonical_form(b, max_n);
}

}  // namespace d2gen

#include "d2gen/generate.hpp"

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace d2gen {

Digraph bidirected_cycle(int k) {
    if (k < 3) fail(errc::precondition_violated, "bidirected cycle needs k >= 3");
    std::vector<Edge> edges;
    for (int i = 0; i < k; ++i) {
        edges.emplace_back(i, (i + 1) % k);
        edges.emplace_back((i + 1) % k, i);
    }
    return Digraph(k, std::move(edges));
}

Digraph diagonal_four_cycle() {
    return Digraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {2, 0}, {1, 3}, {3, 1}});
}

std::vector<BaseMember> base_class(int max_order) {
    if (max_order < 3) fail(errc::precondition_violated, "base class needs max_order >= 3");
    std::vector<BaseMember> out;
    for (int k = 3; k <= max_order; ++k) {
        out.push_back({"bidirected-C" + std::to_string(k), bidirected_cycle(k)});
        if (k == 4) out.push_back({"A4", diagonal_four_cycle()});
    }
    return out;
}

std::map<int, int> ClosureSet::counts_by_order() const {
    std::map<int, int> counts;
    for (const auto& [form, member] : members) counts[form.n] += 1;
    return counts;
}

// ---------------------------------------------------------------------------
// Small fork/join helper; deterministic by merging in index order.
// ---------------------------------------------------------------------------
namespace {

template <typename Fn>
void parallel_chunks(size_t count, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        fn(0, count, 0);
        return;
    }
    size_t chunk = (count + jobs - 1) / jobs;
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) {
        size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
    }
    for (auto& th : threads) th.join();
}

}  // namespace

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

ClosureSet generate_closure(int max_order, int jobs, int bound) {
    if (max_order < 3) fail(errc::precondition_violated, "max_order >= 3 required");
    if (max_order > bound)
        fail(errc::size_bound_exceeded,
             "generation bounded to max_order <= " + std::to_string(bound));
    ClosureSet closure;
    closure.max_order = max_order;

    std::vector<CanonicalForm> worklist;
    for (const auto& base : base_class(max_order)) {
        CanonicalForm form = canonical_form(base.graph);
        closure.members.emplace(form, ClosureMember{base.graph, std::nullopt, ""});
        worklist.push_back(form);
    }
    std::sort(worklist.begin(), worklist.end());

    struct Found {
        CanonicalForm form;
        Digraph rep;
        CanonicalForm parent;
        std::string descriptor;
    };

    while (!worklist.empty()) {
        std::vector<CanonicalForm> frontier = std::move(worklist);
        worklist.clear();
        std::sort(frontier.begin(), frontier.end());

        std::vector<std::vector<Found>> results(frontier.size());
        parallel_chunks(frontier.size(), jobs, [&](size_t lo, size_t hi, int) {
            for (size_t i = lo; i < hi; ++i) {
                const Digraph& parent_rep = closure.members.at(frontier[i]).rep;
                for (auto& [aug, res] : enumerate_augmentations(parent_rep, max_order)) {
                    // every augmentation of a strongly 2-connected digraph
                    // stays strongly 2-connected
                    if (!is_strongly_k_connected(res, 2))
                        fail(errc::precondition_violated,
                             "augmentation broke strong 2-connectivity: " +
                                 format_augmentation(aug));
                    results[i].push_back(Found{canonical_form(res), res, frontier[i],
                                               format_augmentation(aug)});
                }
            }
        });

        for (auto& found_list : results) {
            for (auto& f : found_list) {
                auto it = closure.members.find(f.form);
                if (it == closure.members.end()) {
                    closure.members.emplace(
                        f.form, ClosureMember{f.rep, f.parent, f.descriptor});
                    worklist.push_back(f.form);
                } else if (it->second.parent) {
                    // keep the smallest (parent form, descriptor) provenance
                    auto cand = std::make_pair(f.parent, f.descriptor);
                    auto have = std::make_pair(*it->second.parent, it->second.descriptor);
                    if (cand < have) {
                        it->second.parent = f.parent;
                        it->second.descriptor = f.descriptor;
                    }
                }
            }
        }
    }
    return closure;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

// strong connectivity on raw adjacency rows restricted to `keep`
bool rows_strongly_connected(const uint32_t* out_rows, const uint32_t* in_rows, int n,
                             uint32_t keep) {
    if (std::popcount(keep) <= 1) return true;
    int start = std::countr_zero(keep);
    uint32_t reach = uint32_t{1} << start;
    for (;;) {
        uint32_t next = reach;
        uint32_t frontier = reach;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= out_rows[v] & keep;
        }
        if (next == reach) break;
        reach = next;
    }
    if (reach != keep) return false;
    reach = uint32_t{1} << start;
    for (;;) {
        uint32_t next = reach;
        uint32_t frontier = reach;
        while (frontier) {
            int v = std::countr_zero(frontier);
            frontier &= frontier - 1;
            next |= in_rows[v] & keep;
        }
        if (next == reach) break;
        reach = next;
    }
    return reach == keep;
}

bool rows_strongly_2_connected(const uint32_t* out_rows, const uint32_t* in_rows, int n) {
    uint32_t all = (uint32_t{1} << n) - 1;
    if (!rows_strongly_connected(out_rows, in_rows, n, all)) return false;
    for (int v = 0; v < n; ++v)
        if (!rows_strongly_connected(out_rows, in_rows, n, all & ~(uint32_t{1} << v)))
            return false;
    return true;
}

Digraph rows_to_digraph(const uint32_t* out_rows, int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        uint32_t row = out_rows[i];
        while (row) {
            int j = std::countr_zero(row);
            row &= row - 1;
            edges.emplace_back(i, j);
        }
    }
    return Digraph(n, std::move(edges));
}

// exhaustive scan over all labeled digraphs of the given order
void oracle_order_exhaustive(int n, int jobs, std::set<CanonicalForm>& out) {
    int bits = n * (n - 1);
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) slots.emplace_back(i, j);
    uint64_t total = uint64_t{1} << bits;

    int workers = std::max(1, jobs);
    std::vector<std::set<CanonicalForm>> local(workers);
    parallel_chunks(static_cast<size_t>(total), workers, [&](size_t lo, size_t hi, int t) {
        uint32_t out_rows[8], in_rows[8];
        for (uint64_t mask = lo; mask < hi; ++mask) {
            for (int i = 0; i < n; ++i) out_rows[i] = in_rows[i] = 0;
            uint64_t rest = mask;
            while (rest) {
                int k = std::countr_zero(rest);
                rest &= rest - 1;
                auto [i, j] = slots[k];
                out_rows[i] |= uint32_t{1} << j;
                in_rows[j] |= uint32_t{1} << i;
            }
            bool degrees_ok = true;
            for (int i = 0; i < n && degrees_ok; ++i)
                degrees_ok = std::popcount(out_rows[i]) >= 2 && std::popcount(in_rows[i]) >= 2;
            if (!degrees_ok) continue;
            if (!rows_strongly_2_connected(out_rows, in_rows, n)) continue;
            local[t].insert(canonical_form(rows_to_digraph(out_rows, n)));
        }
    });
    for (auto& s : local) out.merge(s);
}

// order-6 slice: depth-first over per-vertex out-neighborhoods (each of size
// >= 2) with in-degree feasibility pruning, then the full connectivity
// filter. Exhaustive, just arranged to cut early.
void oracle_order_six(int jobs, std::set<CanonicalForm>& out) {
    const int n = 6;
    std::vector<uint32_t> row_choices;
    for (uint32_t row = 0; row < (1u << n); ++row)
        if (std::popcount(row) >= 2) row_choices.push_back(row);
    // per-vertex choices exclude the diagonal bit
    std::vector<std::vector<uint32_t>> choices(n);
    for (int v = 0; v < n; ++v)
        for (uint32_t row : row_choices)
            if (!(row >> v & 1)) choices[v].push_back(row);

    int workers = std::max(1, jobs);
    std::vector<std::set<CanonicalForm>> local(workers);
    parallel_chunks(choices[0].size(), workers, [&](size_t lo, size_t hi, int t) {
        uint32_t out_rows[6], in_cnt[6];
        auto rec = [&](auto&& self, int v) -> void {
            if (v == n) {
                uint32_t in_rows[6] = {0, 0, 0, 0, 0, 0};
                for (int i = 0; i < n; ++i) {
                    uint32_t row = out_rows[i];
                    while (row) {
                        int j = std::countr_zero(row);
                        row &= row - 1;
                        in_rows[j] |= uint32_t{1} << i;
                    }
                }
                if (!rows_strongly_2_connected(out_rows, in_rows, n)) return;
                local[t].insert(canonical_form(rows_to_digraph(out_rows, n)));
                return;
            }
            for (uint32_t row : choices[v]) {
                out_rows[v] = row;
                bool feasible = true;
                for (int j = 0; j < n && feasible; ++j) {
                    int have = static_cast<int>(in_cnt[j]) + ((row >> j) & 1);
                    int remaining = n - 1 - v - (j > v ? 1 : 0);
                    feasible = have + remaining >= 2;
                }
                if (!feasible) continue;
                for (int j = 0; j < n; ++j) in_cnt[j] += (row >> j) & 1;
                self(self, v + 1);
                for (int j = 0; j < n; ++j) in_cnt[j] -= (row >> j) & 1;
            }
        };
        for (size_t c = lo; c < hi; ++c) {
            for (int j = 0; j < n; ++j) in_cnt[j] = 0;
            out_rows[0] = choices[0][c];
            for (int j = 0; j < n; ++j) in_cnt[j] += (out_rows[0] >> j) & 1;
            rec(rec, 1);
        }
    });
    for (auto& s : local) out.merge(s);
}

}  // namespace

std::vector<CanonicalForm> oracle_enumerate(int max_order, int jobs) {
    if (max_order < 3) fail(errc::precondition_violated, "max_order >= 3 required");
    if (max_order > 6)
        fail(errc::size_bound_exceeded, "oracle enumeration bounded to max_order <= 6");
    std::set<CanonicalForm> forms;
    for (int n = 3; n <= std::min(max_order, 5); ++n) oracle_order_exhaustive(n, jobs, forms);
    if (max_order >= 6) oracle_order_six(jobs, forms);
    return {forms.begin(), forms.end()};
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

std::string GenerationReport::to_string() const {
    std::ostringstream os;
    for (const auto& [order, count] : oracle_counts) {
        auto it = closure_counts.find(order);
        os << "order " << order << ": oracle " << count << ", generated "
           << (it == closure_counts.end() ? 0 : it->second) << '\n';
    }
    os << "verify-generation: " << (equal ? "equal" : "not-equal");
    if (!equal)
        os << " (missing " << missing.size() << ", extra " << extra.size() << ")";
    os << '\n';
    return os.str();
}

GenerationReport verify_generation(int max_order, int jobs) {
    GenerationReport report;
    ClosureSet closure = generate_closure(max_order, jobs);
    std::vector<CanonicalForm> oracle = oracle_enumerate(max_order, jobs);
    report.closure_counts = closure.counts_by_order();
    for (const auto& form : oracle) report.oracle_counts[form.n] += 1;
    std::set<CanonicalForm> generated;
    for (const auto& [form, member] : closure.members) generated.insert(form);
    for (const auto& form : oracle)
        if (!generated.count(form)) report.missing.push_back(form);
    std::set<CanonicalForm> oracle_set(oracle.begin(), oracle.end());
    for (const auto& form : generated)
        if (!oracle_set.count(form)) report.extra.push_back(form);
    report.equal = report.missing.empty() && report.extra.empty();
    return report;
}

std::optional<std::string> contains_base_minor(const Digraph& d, MinorIndex& index) {
    if (d.order() < 3) return std::nullopt;
    for (const auto& base : base_class(d.order()))
        if (index.is_minor(base.graph, d)) return base.name;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void write_closure_dir(const ClosureSet& closure, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream members(fs::path(dir) / "members.d2c");
        bool first = true;
        for (const auto& [form, member] : closure.members) {
            if (!first) members << '\n';
            first = false;
            members << serialize_d2c(member.rep);
        }
    }
    {
        std::ofstream prov(fs::path(dir) / "provenance.tsv");
        for (const auto& [form, member] : closure.members) {
            prov << form.hash() << '\t'
                 << (member.parent ? member.parent->hash() : std::string("-")) << '\t'
                 << (member.descriptor.empty() ? std::string("-") : member.descriptor) << '\n';
        }
    }
    {
        std::ofstream meta(fs::path(dir) / "meta");
        meta << "max_order " << closure.max_order << '\n';
        meta << "count " << closure.members.size() << '\n';
        for (const auto& [order, count] : closure.counts_by_order())
            meta << "count_order_" << order << ' ' << count << '\n';
    }
}

ClosureSet read_closure_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) fail(errc::bad_format, "cannot open '" + p.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    ClosureSet closure;
    {
        std::istringstream meta(slurp(fs::path(dir) / "meta"));
        std::string key;
        while (meta >> key) {
            if (key == "max_order")
                meta >> closure.max_order;
            else {
                int ignored;
                meta >> ignored;
            }
        }
    }
    std::map<std::string, CanonicalForm> by_hash;
    for (const auto& rep : parse_d2c_stream(slurp(fs::path(dir) / "members.d2c"))) {
        CanonicalForm form = canonical_form(rep);
        by_hash.emplace(form.hash(), form);
        closure.members.emplace(form, ClosureMember{rep, std::nullopt, ""});
    }
    std::istringstream prov(slurp(fs::path(dir) / "provenance.tsv"));
    std::string line;
    while (std::getline(prov, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string hash, parent_hash;
        ls >> hash >> parent_hash;
        std::string descriptor;
        std::getline(ls, descriptor);
        if (!descriptor.empty() && descriptor[0] == '\t') descriptor.erase(0, 1);
        while (!descriptor.empty() && descriptor.front() == ' ') descriptor.erase(0, 1);
        auto it = by_hash.find(hash);
        if (it == by_hash.end()) fail(errc::bad_format, "provenance names unknown member");
        if (parent_hash != "-") {
            auto parent = by_hash.find(parent_hash);
            if (parent == by_hash.end()) fail(errc::bad_format, "provenance names unknown parent");
            auto& member = closure.members.at(it->second);
            member.parent = parent->second;
            member.descriptor = descriptor == "-" ? "" : descriptor;
        }
    }
    return closure;
}

}  // namespace d2gen

#include "d2gen/splitter.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace d2gen {

AugmentationSequence find_sequence(const Digraph& h, const Digraph& d, MinorIndex& index,
                                   int max_order) {
    if (d.order() > max_order)
        fail(errc::size_bound_exceeded,
             "splitter search bounded to |V(D)| <= " + std::to_string(max_order));
    if (!is_strongly_k_connected(h, 2))
        fail(errc::not_strongly_2_connected, "pattern is not strongly 2-connected");
    if (!is_strongly_k_connected(d, 2))
        fail(errc::not_strongly_2_connected, "host is not strongly 2-connected");

    auto closure = index.minor_closure(d);
    std::unordered_set<uint32_t> minors(closure.begin(), closure.end());
    CanonicalForm target = canonical_form(d);
    if (!minors.count(index.intern(canonical_form(h))))
        fail(errc::not_a_minor, "pattern is not a butterfly-minor of the host");

    AugmentationSequence seq;
    seq.graphs.push_back(h);
    Digraph cur = h;
    CanonicalForm cur_form = canonical_form(cur);
    int guard = d.edge_count() - h.edge_count();
    while (!(cur_form == target)) {
        if (guard-- < 0)
            fail(errc::no_successor, "edge budget exhausted without reaching the host");
        struct Candidate {
            CanonicalForm form;
            std::string descriptor;
            Augmentation aug;
            Digraph result;
        };
        std::optional<Candidate> best;
        for (auto& [aug, res] : enumerate_augmentations(cur, d.order())) {
            CanonicalForm form = canonical_form(res);
            if (!minors.count(index.intern(form))) continue;
            std::string descriptor = format_augmentation(aug);
            if (!best || std::tie(form, descriptor) < std::tie(best->form, best->descriptor))
                best = Candidate{std::move(form), std::move(descriptor), aug, res};
        }
        if (!best)
            fail(errc::no_successor,
                 "no augmentation of the current digraph stays a butterfly-minor of the host");
        seq.steps.push_back(best->aug);
        seq.graphs.push_back(best->result);
        cur = best->result;
        cur_form = best->form;
    }
    return seq;
}

SequenceCheck validate_sequence(const AugmentationSequence& s, const Digraph& h,
                                const Digraph& d, MinorIndex& index) {
    auto no = [](std::string what) { return SequenceCheck{false, std::move(what)}; };
    if (s.graphs.empty()) return no("sequence has no graphs");
    if (s.graphs.size() != s.steps.size() + 1)
        return no("graph count does not match step count");
    if (!isomorphic(s.graphs.front(), h)) return no("D_0 is not isomorphic to the pattern");
    if (!isomorphic(s.graphs.back(), d)) return no("D_n is not isomorphic to the host");
    for (size_t i = 0; i < s.graphs.size(); ++i) {
        if (!is_strongly_k_connected(s.graphs[i], 2))
            return no("step " + std::to_string(i) + ": not strongly 2-connected");
        if (!index.is_minor(s.graphs[i], d))
            return no("step " + std::to_string(i) + ": not a butterfly-minor of the host");
    }
    for (size_t i = 0; i < s.steps.size(); ++i) {
        Digraph reapplied;
        try {
            reapplied = apply_augmentation(s.graphs[i], s.steps[i]);
        } catch (const error& e) {
            return no("step " + std::to_string(i + 1) + ": descriptor invalid (" + e.what() +
                      ")");
        }
        if (!isomorphic(reapplied, s.graphs[i + 1]))
            return no("step " + std::to_string(i + 1) +
                      ": re-applied descriptor does not give the recorded digraph");
        if (s.graphs[i + 1].edge_count() <= s.graphs[i].edge_count())
            return no("step " + std::to_string(i + 1) + ": edge count did not grow");
        if (!index.is_minor(s.graphs[i], s.graphs[i + 1]))
            return no("step " + std::to_string(i + 1) +
                      ": previous digraph is not a butterfly-minor of it");
    }
    return SequenceCheck{};
}

std::string serialize_sequence(const AugmentationSequence& s) {
    std::ostringstream os;
    os << "splitter v1\n";
    for (size_t i = 0; i < s.graphs.size(); ++i) {
        os << serialize_d2c(s.graphs[i]);
        if (i < s.steps.size()) os << format_augmentation(s.steps[i]) << '\n';
    }
    return os.str();
}

AugmentationSequence parse_sequence(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_content = [&]() -> std::optional<std::string> {
        while (std::getline(in, line)) {
            ++lineno;
            size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos) continue;
            if (line[i] == '#') continue;
            return line;
        }
        return std::nullopt;
    };
    auto header = next_content();
    if (!header || *header != "splitter v1")
        fail(errc::bad_format, "sequence: missing 'splitter v1' header");

    AugmentationSequence seq;
    for (;;) {
        auto content = next_content();
        if (!content) break;
        size_t i = content->find_first_not_of(" \t\r");
        if ((*content)[i] == '(') {
            if (seq.graphs.empty())
                fail(errc::bad_format, "sequence: descriptor before the first record");
            seq.steps.push_back(parse_augmentation(*content));
            continue;
        }
        // a d2c record: "n m" on this line, m edge lines following
        std::istringstream hs(*content);
        int n = 0, m = 0;
        if (!(hs >> n >> m))
            fail(errc::malformed_header, "sequence line " + std::to_string(lineno));
        std::ostringstream record;
        record << n << ' ' << m << '\n';
        for (int k = 0; k < m; ++k) {
            auto edge_line = next_content();
            if (!edge_line)
                fail(errc::malformed_header, "sequence: truncated record at line " +
                                                 std::to_string(lineno));
            record << *edge_line << '\n';
        }
        seq.graphs.push_back(parse_d2c(record.str()));
    }
    if (seq.graphs.size() != seq.steps.size() + 1)
        fail(errc::bad_format, "sequence: record/descriptor alternation broken");
    return seq;
}

}  // namespace d2gen

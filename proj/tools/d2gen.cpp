// Command-line front end: every library capability behind one binary with
// line-oriented, machine-parseable reports. Exit status 0 = success or
// property verified, 1 = verification failure, 2 = usage or input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "d2gen/augment.hpp"
#include "d2gen/butterfly.hpp"
#include "d2gen/digraph.hpp"
#include "d2gen/earpath.hpp"
#include "d2gen/generate.hpp"
#include "d2gen/splitter.hpp"

using namespace d2gen;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::bad_format, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail(errc::bad_format, "cannot write '" + path + "'");
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generation calculus for strongly 2-connected digraphs"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- canon
    std::string canon_file;
    auto* canon_cmd = app.add_subcommand("canon", "canonical form of a digraph");
    canon_cmd->add_option("file", canon_file)->required();
    canon_cmd->callback([&] {
        CanonicalForm form = canonical_form(read_d2c_file(canon_file));
        std::cout << "canonical-form: " << form.n << ' '
                  << (form.bits.empty() ? "-" : form.bits) << '\n';
        std::cout << "form-hash: " << form.hash() << '\n';
    });

    // ---- check2
    std::string check_file;
    int check_k = 2;
    auto* check_cmd = app.add_subcommand("check2", "strong k-connectivity check");
    check_cmd->add_option("file", check_file)->required();
    check_cmd->add_option("--k", check_k, "connectivity order (default 2)");
    check_cmd->callback([&] {
        bool ok = is_strongly_k_connected(read_d2c_file(check_file), check_k);
        std::cout << "strongly-" << check_k << "-connected: " << (ok ? "yes" : "no") << '\n';
        exit_code = ok ? 0 : 1;
    });

    // ---- invert
    std::string invert_file;
    auto* invert_cmd = app.add_subcommand("invert", "invert all edges");
    invert_cmd->add_option("file", invert_file)->required();
    invert_cmd->callback(
        [&] { std::cout << serialize_d2c(invert(read_d2c_file(invert_file))); });

    // ---- contract
    std::string contract_file;
    int contract_u = 0, contract_v = 0;
    auto* contract_cmd = app.add_subcommand("contract", "butterfly-contract an edge");
    contract_cmd->add_option("file", contract_file)->required();
    contract_cmd->add_option("u", contract_u)->required();
    contract_cmd->add_option("v", contract_v)->required();
    contract_cmd->callback([&] {
        auto res = butterfly_contract(read_d2c_file(contract_file), {contract_u, contract_v});
        std::cout << serialize_d2c(res.graph);
    });

    // ---- minor
    std::string minor_h, minor_d, minor_witness_out;
    auto* minor_cmd = app.add_subcommand("minor", "butterfly-minor test");
    minor_cmd->add_option("pattern", minor_h)->required();
    minor_cmd->add_option("host", minor_d)->required();
    minor_cmd->add_option("--witness", minor_witness_out, "write a delete/contract script");
    minor_cmd->callback([&] {
        Digraph h = read_d2c_file(minor_h), d = read_d2c_file(minor_d);
        if (minor_witness_out.empty()) {
            MinorIndex index;
            bool yes = index.is_minor(h, d);
            std::cout << "butterfly-minor: " << (yes ? "yes" : "no") << '\n';
            exit_code = yes ? 0 : 1;
        } else {
            auto witness = find_minor_witness(h, d);
            std::cout << "butterfly-minor: " << (witness ? "yes" : "no") << '\n';
            if (witness)
                write_file(minor_witness_out, witness->serialize());
            else
                exit_code = 1;
        }
    });

    // ---- expand
    std::string expand_h, expand_d;
    auto* expand_cmd = app.add_subcommand("expand", "find a butterfly-model");
    expand_cmd->add_option("pattern", expand_h)->required();
    expand_cmd->add_option("host", expand_d)->required();
    expand_cmd->callback([&] {
        auto model = find_expansion(read_d2c_file(expand_h), read_d2c_file(expand_d));
        if (model) {
            std::cout << model->serialize();
        } else {
            std::cout << "expansion: none\n";
            exit_code = 1;
        }
    });

    // ---- augment
    std::string augment_file, augment_descriptor;
    auto* augment_cmd = app.add_subcommand("augment", "apply one augmentation");
    augment_cmd->add_option("file", augment_file)->required();
    augment_cmd->add_option("--descriptor", augment_descriptor)->required();
    augment_cmd->callback([&] {
        Digraph d = read_d2c_file(augment_file);
        std::cout << serialize_d2c(
            apply_augmentation(d, parse_augmentation(augment_descriptor)));
    });

    // ---- enumerate-aug
    std::string enum_file;
    int enum_budget = 0;
    auto* enum_cmd = app.add_subcommand("enumerate-aug", "list every valid augmentation");
    enum_cmd->add_option("file", enum_file)->required();
    enum_cmd->add_option("--budget", enum_budget, "max result order")->required();
    enum_cmd->callback([&] {
        Digraph d = read_d2c_file(enum_file);
        for (const auto& [aug, result] : enumerate_augmentations(d, enum_budget))
            std::cout << format_augmentation(aug) << '\t' << result.order() << ' '
                      << result.edge_count() << '\n';
    });

    // ---- earpaths
    std::string ear_file, ear_model;
    auto* ear_cmd = app.add_subcommand("earpaths", "list ear-paths of an expansion");
    ear_cmd->add_option("file", ear_file)->required();
    ear_cmd->add_option("--model", ear_model, "model file")->required();
    ear_cmd->callback([&] {
        Digraph d = read_d2c_file(ear_file);
        ButterflyModel m = ButterflyModel::parse(slurp(ear_model), d);
        ModelCheck check = validate_model(m);
        if (!check.ok) fail(errc::invalid_model, check.violation);
        Decoration dec = decorate(m);
        for (const auto& ear : enumerate_earpaths(d, dec))
            std::cout << serialize_path(ear.vertices) << '\n';
    });

    // ---- classify
    std::string classify_file, classify_model, classify_path;
    auto* classify_cmd = app.add_subcommand("classify", "classify one ear-path");
    classify_cmd->add_option("file", classify_file)->required();
    classify_cmd->add_option("--model", classify_model)->required();
    classify_cmd->add_option("--path", classify_path, "comma-separated vertex list")
        ->required();
    classify_cmd->callback([&] {
        Digraph d = read_d2c_file(classify_file);
        ButterflyModel m = ButterflyModel::parse(slurp(classify_model), d);
        Decoration dec = decorate(m);
        EarPath ear{parse_path(classify_path)};
        EarPathClass cls = classify_earpath(ear, dec, d);
        std::cout << "class: " << earpath_kind_name(cls.kind);
        switch (cls.kind) {
            case EarPathKind::switching:
                std::cout << " edge=(" << cls.pattern_edge.first << ','
                          << cls.pattern_edge.second
                          << ") parallel=" << (cls.parallel ? "true" : "false");
                break;
            case EarPathKind::bad:
                std::cout << " witness=" << cls.witness_vertex;
                break;
            case EarPathKind::augmenting:
                std::cout << " variant=" << aug_variant_name(cls.variant) << " u=" << cls.aug_u
                          << " v=" << cls.aug_v;
                break;
        }
        std::cout << '\n';
    });

    // ---- gen
    int gen_order = 0, gen_jobs = 1;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "generation closure from the base class");
    gen_cmd->add_option("--max-order", gen_order)->required();
    gen_cmd->add_option("--out", gen_out, "closure directory");
    gen_cmd->add_option("--jobs", gen_jobs, "worker count");
    gen_cmd->callback([&] {
        ClosureSet closure = generate_closure(gen_order, gen_jobs);
        for (const auto& [order, count] : closure.counts_by_order())
            std::cout << "order " << order << ": " << count << '\n';
        if (!gen_out.empty()) write_closure_dir(closure, gen_out);
    });

    // ---- oracle
    int oracle_order = 0, oracle_jobs = 1;
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force census");
    oracle_cmd->add_option("--max-order", oracle_order)->required();
    oracle_cmd->add_option("--jobs", oracle_jobs);
    oracle_cmd->callback([&] {
        std::map<int, int> counts;
        for (const auto& form : oracle_enumerate(oracle_order, oracle_jobs))
            counts[form.n] += 1;
        for (const auto& [order, count] : counts)
            std::cout << "order " << order << ": " << count << '\n';
    });

    // ---- verify-gen
    int verify_order = 0, verify_jobs = 1;
    auto* verify_cmd = app.add_subcommand("verify-gen", "closure vs oracle equality");
    verify_cmd->add_option("--max-order", verify_order)->required();
    verify_cmd->add_option("--jobs", verify_jobs);
    verify_cmd->callback([&] {
        GenerationReport report = verify_generation(verify_order, verify_jobs);
        std::cout << report.to_string();
        for (const auto& form : report.missing)
            std::cout << "missing:\n" << serialize_d2c(from_form(form));
        exit_code = report.equal ? 0 : 1;
    });

    // ---- base-minor
    std::string base_file;
    auto* base_cmd = app.add_subcommand("base-minor", "find a base-class butterfly-minor");
    base_cmd->add_option("file", base_file)->required();
    base_cmd->callback([&] {
        MinorIndex index;
        auto witness = contains_base_minor(read_d2c_file(base_file), index);
        if (witness) {
            std::cout << "base-minor: yes witness=" << *witness << '\n';
        } else {
            std::cout << "base-minor: no\n";
            exit_code = 1;
        }
    });

    // ---- splitter
    std::string split_h, split_d, split_out;
    auto* split_cmd = app.add_subcommand("splitter", "augmentation sequence between minors");
    split_cmd->add_option("pattern", split_h)->required();
    split_cmd->add_option("host", split_d)->required();
    split_cmd->add_option("--out", split_out, "sequence file");
    split_cmd->callback([&] {
        MinorIndex index;
        AugmentationSequence seq =
            find_sequence(read_d2c_file(split_h), read_d2c_file(split_d), index);
        std::cout << "splitter: " << seq.length() << " steps\n";
        if (!split_out.empty()) write_file(split_out, serialize_sequence(seq));
    });

    // ---- validate-seq
    std::string vseq_file, vseq_h, vseq_d;
    auto* vseq_cmd = app.add_subcommand("validate-seq", "re-check a sequence file");
    vseq_cmd->add_option("sequence", vseq_file)->required();
    vseq_cmd->add_option("pattern", vseq_h)->required();
    vseq_cmd->add_option("host", vseq_d)->required();
    vseq_cmd->callback([&] {
        MinorIndex index;
        AugmentationSequence seq = parse_sequence(slurp(vseq_file));
        SequenceCheck check =
            validate_sequence(seq, read_d2c_file(vseq_h), read_d2c_file(vseq_d), index);
        if (check.ok) {
            std::cout << "validate-seq: ok\n";
        } else {
            std::cout << "validate-seq: failed (" << check.report << ")\n";
            exit_code = 1;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        // failed verifications and falsification alarms are status 1,
        // malformed input is status 2
        return (e.code() == errc::no_successor || e.code() == errc::not_a_minor) ? 1 : 2;
    }
    return exit_code;
}

// peglr command line: parse inputs against PEG grammar files, validate
// grammars, and benchmark parser linearity.
//
// Exit codes: 0 clean parse, 1 parse recovered with errors, 2 bad usage,
// unreadable file, or invalid grammar.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "peglr/bench.hpp"
#include "peglr/engine.hpp"
#include "peglr/grammar_text.hpp"
#include "peglr/tree_io.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

peglr::Grammar load_grammar_file(const std::string& path) {
    return peglr::load_grammar({read_file(path), path});
}

int run_parse(const std::string& grammar_path, const std::string& input_path,
              const std::string& text, bool has_text, const std::string& format, bool raw,
              bool no_recover, int max_skip) {
    peglr::Grammar grammar = load_grammar_file(grammar_path);
    std::string input = has_text ? text : read_file(input_path);

    peglr::RecoveryConfig config;
    config.enabled = !no_recover;
    config.max_skip = max_skip;

    peglr::ParseSession session(grammar, input, config);
    const peglr::Match* root = session.parse();

    peglr::SerializeOptions opts;
    opts.format = format == "json" ? peglr::TreeFormat::Json : peglr::TreeFormat::SExpr;
    opts.raw = raw;
    std::cout << peglr::serialize_tree(root, input, grammar, opts) << "\n";

    auto errors = peglr::collect_errors(root);
    for (const peglr::ErrorSpan& e : errors) {
        std::cerr << "error: pos " << e.pos << " len " << e.len << " ("
                  << peglr::error_kind_name(e.kind) << ")";
        if (e.len > 0) {
            std::cerr << " \"" << input.substr(static_cast<size_t>(e.pos),
                                               static_cast<size_t>(e.len))
                      << "\"";
        }
        std::cerr << "\n";
    }
    return (root->is_complete && errors.empty()) ? 0 : 1;
}

int run_bench(const std::string& grammar_path, const std::string& sizes_arg,
              double error_rate) {
    peglr::Grammar grammar = load_grammar_file(grammar_path);
    std::vector<int> sizes;
    std::stringstream ss(sizes_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) sizes.push_back(std::stoi(item));
    }
    if (sizes.empty()) throw std::runtime_error("no sizes given");
    peglr::BenchReport report =
        peglr::bench_linearity(grammar, peglr::make_arithmetic_input, sizes, error_rate);
    std::cout << peglr::bench_report_csv(report);
    return 0;
}

int run_check(const std::string& grammar_path) {
    peglr::Grammar grammar = load_grammar_file(grammar_path);
    std::cout << grammar_path << ": ok (" << grammar.rules.size() << " rules, size "
              << grammar.size() << "), start rule '" << grammar.start().name << "'\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEG packrat parser with left recursion and error recovery"};
    app.require_subcommand(1);

    std::string grammar_path, input_path, text, format = "sexpr", sizes;
    bool raw = false, no_recover = false;
    int max_skip = 64;
    double error_rate = 0.0;

    CLI::App* parse = app.add_subcommand("parse", "parse input against a grammar");
    parse->add_option("-g,--grammar", grammar_path, "grammar file")->required();
    auto* opt_input = parse->add_option("-i,--input", input_path, "input file");
    auto* opt_text = parse->add_option("-t,--text", text, "inline input text");
    opt_input->excludes(opt_text);
    parse->add_option("-f,--format", format, "output format: sexpr|json")
        ->check(CLI::IsMember({"sexpr", "json"}));
    parse->add_flag("--raw", raw, "raw tree (no rule-wrapper flattening)");
    parse->add_flag("--no-recover", no_recover, "disable error recovery");
    parse->add_option("--max-skip", max_skip, "recovery skip bound (chars)")
        ->check(CLI::PositiveNumber);

    CLI::App* bench = app.add_subcommand("bench", "benchmark linear scaling");
    bench->add_option("-g,--grammar", grammar_path, "grammar file")->required();
    bench->add_option("-s,--sizes", sizes, "comma-separated input sizes")->required();
    bench->add_option("-e,--error-rate", error_rate, "fraction of characters mutated")
        ->check(CLI::Range(0.0, 1.0));

    CLI::App* check = app.add_subcommand("check-grammar", "validate a grammar file");
    check->add_option("-g,--grammar", grammar_path, "grammar file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (parse->parsed()) {
            if (opt_input->count() == 0 && opt_text->count() == 0) {
                std::cerr << "parse: one of --input or --text is required\n";
                return 2;
            }
            return run_parse(grammar_path, input_path, text, opt_text->count() > 0, format,
                             raw, no_recover, max_skip);
        }
        if (bench->parsed()) return run_bench(grammar_path, sizes, error_rate);
        if (check->parsed()) return run_check(grammar_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

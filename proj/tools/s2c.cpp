// s2c — SPARQL to Cypher translation, batch dataset processing and
// differential evaluation against the in-memory sandbox or external stores.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "s2c/ast.hpp"
#include "s2c/errors.hpp"
#include "s2c/pipeline.hpp"

using namespace s2c;

namespace {

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::stringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

struct CommonFlags {
    std::string explicit_rels;
    bool optional_after_where = false;
    bool strict_prefixes = false;
    std::string default_prefix = "ROOT";
    bool s2ctrans_compat = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--explicit-rels", explicit_rels,
                        "comma-separated predicates forced to map as relationships (e.g. :knows,ex:owns)");
        cmd->add_flag("--optional-after-where", optional_after_where,
                      "place OPTIONAL MATCH after the first WHERE");
        cmd->add_flag("--strict-prefixes", strict_prefixes,
                      "reject prefixed names without a declaration");
        cmd->add_option("--default-prefix", default_prefix,
                        "label substituted for the empty prefix ':'");
        cmd->add_flag("--s2ctrans-compat", s2ctrans_compat,
                      "report COUNT(*) projections as COUNT_ALL failures");
    }

    RunConfig config() const {
        RunConfig cfg;
        std::string token;
        std::stringstream in(explicit_rels);
        while (std::getline(in, token, ','))
            if (!token.empty()) cfg.explicit_rels.predicates.insert(token);
        cfg.optional_placement = optional_after_where ? OptionalPlacement::AfterWhere
                                                      : OptionalPlacement::BeforeWhere;
        cfg.strict_prefixes = strict_prefixes;
        cfg.default_prefix_label = default_prefix;
        cfg.s2ctrans_compat = s2ctrans_compat;
        cfg.validate();
        return cfg;
    }
};

int cmd_translate(const std::string& input, const std::string& output, const CommonFlags& flags,
                  bool emit_ast, bool as_json) {
    std::string text = read_input(input);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        std::cerr << "empty input\n";
        return 1;
    }
    RunConfig config = flags.config();
    if (as_json) config.output_format = RunConfig::OutputFormat::Json;
    TranslationResult result = translate_query(text, config);
    if (!result.ok()) {
        nlohmann::json failure{{"category", result.failure->name()},
                               {"detail", result.failure->detail}};
        std::cout << failure.dump(2) << "\n";
        return result.failure->kind == FailureKind::Syntax ? 1 : 2;
    }
    std::string rendered;
    if (config.output_format == RunConfig::OutputFormat::Json) {
        nlohmann::ordered_json out;
        out["cypher"] = result.cypher->text;
        if (emit_ast) out["ast"] = ast_to_json(*result.ast);
        rendered = out.dump(2) + "\n";
    } else {
        rendered = result.cypher->text + "\n";
        if (emit_ast) rendered += ast_to_json(*result.ast).dump(2) + "\n";
    }
    if (output.empty()) std::cout << rendered;
    else write_file(output, rendered);
    return 0;
}

int cmd_batch(const std::string& input, const std::string& output, const CommonFlags& flags) {
    nlohmann::ordered_json dataset = nlohmann::ordered_json::parse(read_input(input));
    nlohmann::ordered_json translated;
    BatchSummary summary = run_batch(dataset, translated, flags.config());
    write_file(output, translated.dump(2) + "\n");

    std::cout << "entries: " << summary.total << "\ntranslated: " << summary.translated << "\n";
    for (const char* cat : {"COUNT_ALL", "NS2", "NS1", "OTHER", "SYNTAX"}) {
        auto it = summary.failures.find(cat);
        std::cout << cat << ": " << (it == summary.failures.end() ? 0 : it->second) << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& dataset_path, const std::string& graphs_dir,
                 const std::string& backend_name, const std::string& report_path,
                 const std::string& csv_path, const std::string& per_entry_path,
                 const std::string& name, const CommonFlags& flags) {
    nlohmann::ordered_json dataset = nlohmann::ordered_json::parse(read_input(dataset_path));

    std::unique_ptr<QueryBackend> backend;
    if (backend_name == "sandbox")
        backend = std::make_unique<SandboxBackend>(graphs_dir, flags.config());
    else if (backend_name == "external")
        backend = HttpBackend::from_environment();
    else
        throw Error("unknown backend '" + backend_name + "' (use sandbox or external)");

    Evaluation evaluation = run_evaluate(dataset, *backend, flags.config(), name);
    if (!report_path.empty())
        write_file(report_path, report_to_json(evaluation.report).dump(2) + "\n");
    if (!csv_path.empty()) write_file(csv_path, render_report_csv({evaluation.report}));
    if (!per_entry_path.empty()) write_file(per_entry_path, evaluation.per_entry.dump(2) + "\n");

    std::cout << render_report_table({evaluation.report});
    if (evaluation.skipped > 0) std::cout << "skipped (SPARQL side unavailable): " << evaluation.skipped << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& paths, bool as_csv) {
    std::vector<Report> reports;
    for (const std::string& path : paths)
        reports.push_back(report_from_json(nlohmann::json::parse(read_input(path))));
    std::cout << (as_csv ? render_report_csv(reports) : render_report_table(reports));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPARQL to Cypher translator with a differential verification sandbox"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* translate = app.add_subcommand("translate", "translate one SPARQL query");
    std::string translate_input, translate_output;
    bool emit_ast = false, as_json = false;
    translate->add_option("input", translate_input, "query file ('-' or omitted reads stdin)");
    translate->add_option("-o,--output", translate_output, "write to a file instead of stdout");
    translate->add_flag("--emit-ast", emit_ast, "also print the AST as JSON");
    translate->add_flag("--json", as_json, "wrap output in a JSON object");
    flags.attach(translate);

    auto* batch = app.add_subcommand("batch", "translate a dataset JSON file");
    std::string batch_input, batch_output;
    batch->add_option("--input", batch_input, "dataset JSON (array of entries)")->required();
    batch->add_option("--output", batch_output, "translated dataset destination")->required();
    flags.attach(batch);

    auto* evaluate = app.add_subcommand("evaluate", "differential evaluation of a dataset");
    std::string eval_dataset, eval_graphs, eval_backend = "sandbox";
    std::string eval_report, eval_csv, eval_entries, eval_name = "run";
    evaluate->add_option("--dataset", eval_dataset, "dataset JSON")->required();
    evaluate->add_option("--graphs", eval_graphs, "directory with <db_id>.ttl files");
    evaluate->add_option("--backend", eval_backend, "sandbox | external");
    evaluate->add_option("--output", eval_report, "report JSON destination");
    evaluate->add_option("--csv", eval_csv, "report CSV destination");
    evaluate->add_option("--per-entry", eval_entries, "per-entry outcomes JSON destination");
    evaluate->add_option("--name", eval_name, "report column name");
    flags.attach(evaluate);

    auto* report = app.add_subcommand("report", "render stored report JSONs side by side");
    std::vector<std::string> report_paths;
    bool report_csv = false;
    report->add_option("reports", report_paths, "one or two report JSON files")->required();
    report->add_flag("--csv", report_csv, "emit CSV instead of a text table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (translate->parsed())
            return cmd_translate(translate_input, translate_output, flags, emit_ast, as_json);
        if (batch->parsed()) return cmd_batch(batch_input, batch_output, flags);
        if (evaluate->parsed())
            return cmd_evaluate(eval_dataset, eval_graphs, eval_backend, eval_report, eval_csv,
                                eval_entries, eval_name, flags);
        if (report->parsed()) return cmd_report(report_paths, report_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "s2c/pipeline.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "s2c/ast_builder.hpp"
#include "s2c/cypher_eval.hpp"
#include "s2c/errors.hpp"
#include "s2c/parser.hpp"
#include "s2c/property_graph.hpp"
#include "s2c/sparql_eval.hpp"
#include "s2c/triple_store.hpp"

namespace s2c {

NamingOptions RunConfig::naming() const {
    NamingOptions opts;
    opts.default_prefix_label = default_prefix_label;
    opts.strict = strict_prefixes;
    return opts;
}

void RunConfig::validate() const {
    bool ok = !default_prefix_label.empty() &&
              std::isalpha(static_cast<unsigned char>(default_prefix_label[0]));
    for (char c : default_prefix_label)
        if (!std::isalnum(static_cast<unsigned char>(c))) ok = false;
    if (!ok)
        throw Error("default prefix label '" + default_prefix_label +
                    "' must match [A-Za-z][A-Za-z0-9]*");
}

TranslationResult translate_query(const std::string& text, const RunConfig& config) {
    config.validate();
    TranslationResult result;
    try {
        ParseTree tree = parse_sparql_text(text);
        if (config.s2ctrans_compat) {
            if (auto category = classify_count_all(tree)) {
                result.failure = *category;
                return result;
            }
        }
        Ast ast = build_ast(tree, config.explicit_rels, config.naming());
        CypherQuery cypher = assemble(ast, config.optional_placement);
        result.ast = std::move(ast);
        result.cypher = std::move(cypher);
    } catch (const Error& e) {
        result.failure = classify_error(e);
    }
    return result;
}

CypherQuery parse_cypher_text(const std::string& text) {
    CypherQuery q;
    q.text = text;
    bool seen_with = false;
    std::string line;
    std::istringstream in(text);
    auto upper_prefix = [](const std::string& s, const char* word) {
        return to_upper(s).rfind(word, 0) == 0;
    };
    while (std::getline(in, line)) {
        // trim
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);

        ClauseKind kind;
        if (upper_prefix(line, "OPTIONAL MATCH")) kind = ClauseKind::OptionalMatch;
        else if (upper_prefix(line, "MATCH")) kind = ClauseKind::Match;
        else if (upper_prefix(line, "WHERE")) kind = seen_with ? ClauseKind::WhereWith : ClauseKind::Where;
        else if (upper_prefix(line, "WITH")) { kind = ClauseKind::With; seen_with = true; }
        else if (upper_prefix(line, "UNWIND")) kind = ClauseKind::Unwind;
        else if (upper_prefix(line, "RETURN")) kind = ClauseKind::Return;
        else if (upper_prefix(line, "ORDER BY")) kind = ClauseKind::OrderBy;
        else if (upper_prefix(line, "LIMIT")) kind = ClauseKind::Limit;
        else if (upper_prefix(line, "SKIP")) kind = ClauseKind::Skip;
        else throw CypherEvalError(CypherEvalError::Kind::Syntax, "unrecognized clause: " + line);

        // consecutive lines of the same kind merge into one clause entry
        if (!q.clauses.empty() && q.clauses.back().first == kind)
            q.clauses.back().second += "\n" + line;
        else
            q.clauses.emplace_back(kind, line);
    }
    return q;
}

// ---- sandbox backend -----------------------------------------------------------

struct SandboxBackend::Loaded {
    TripleStore store;
    PropertyGraph graph;
};

SandboxBackend::SandboxBackend(std::string graphs_dir, RunConfig config)
    : graphs_dir_(std::move(graphs_dir)), config_(std::move(config)) {}

SandboxBackend::~SandboxBackend() = default;

const SandboxBackend::Loaded& SandboxBackend::load(const std::string& db_id) {
    auto it = cache_.find(db_id);
    if (it != cache_.end()) return *it->second;

    std::string path = graphs_dir_ + "/" + db_id + ".ttl";
    std::ifstream in(path);
    if (!in) throw Error("graph file not found: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    auto loaded = std::make_unique<Loaded>();
    loaded->store = load_turtle(buffer.str());
    loaded->graph = materialize(loaded->store, config_.explicit_rels, config_.naming());
    const Loaded& ref = *loaded;
    cache_[db_id] = std::move(loaded);
    return ref;
}

ResultTable SandboxBackend::run_sparql(const std::string& db_id, const std::string& sparql) {
    const Loaded& data = load(db_id);
    ParseTree tree = parse_sparql_text(sparql);
    return eval_sparql(data.store, tree);
}

ResultTable SandboxBackend::run_cypher(const std::string& db_id, const std::string& cypher) {
    const Loaded& data = load(db_id);
    return eval_cypher(data.graph, parse_cypher_text(cypher));
}

// ---- HTTP backend ---------------------------------------------------------------

HttpBackend::HttpBackend(std::string sparql_endpoint, std::string graph_endpoint)
    : sparql_endpoint_(std::move(sparql_endpoint)), graph_endpoint_(std::move(graph_endpoint)) {}

std::unique_ptr<HttpBackend> HttpBackend::from_environment() {
    const char* sparql = std::getenv("S2C_SPARQL_ENDPOINT");
    const char* graph = std::getenv("S2C_GRAPH_ENDPOINT");
    if (!sparql || !graph)
        throw Error("external backend needs S2C_SPARQL_ENDPOINT and S2C_GRAPH_ENDPOINT");
    return std::make_unique<HttpBackend>(sparql, graph);
}

ResultTable HttpBackend::post(const std::string& endpoint, const std::string& db_id,
                              const std::string& query) {
    auto split = endpoint.find('/', endpoint.find("//") + 2);
    std::string host = split == std::string::npos ? endpoint : endpoint.substr(0, split);
    std::string path = split == std::string::npos ? "/" : endpoint.substr(split);

    httplib::Client client(host);
    client.set_read_timeout(30, 0);
    nlohmann::json body{{"db_id", db_id}, {"query", query}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw Error("no response from " + endpoint);
    if (res->status != 200)
        throw Error("endpoint " + endpoint + " returned status " + std::to_string(res->status) +
                    ": " + res->body);
    return result_table_from_json(nlohmann::json::parse(res->body));
}

ResultTable HttpBackend::run_sparql(const std::string& db_id, const std::string& sparql) {
    return post(sparql_endpoint_, db_id, sparql);
}

ResultTable HttpBackend::run_cypher(const std::string& db_id, const std::string& cypher) {
    return post(graph_endpoint_, db_id, cypher);
}

// ---- batch -----------------------------------------------------------------------

BatchSummary run_batch(const nlohmann::ordered_json& input, nlohmann::ordered_json& output,
                       const RunConfig& config) {
    if (!input.is_array()) throw Error("dataset must be a JSON array");
    BatchSummary summary;
    output = nlohmann::ordered_json::array();
    for (const auto& entry : input) {
        nlohmann::ordered_json out = entry;
        ++summary.total;
        std::string sparql = entry.value("sparql", "");
        if (sparql.empty()) {
            out["status"] = "SYNTAX";
            ++summary.failures["SYNTAX"];
            output.push_back(std::move(out));
            continue;
        }
        TranslationResult result = translate_query(sparql, config);
        if (result.ok()) {
            out["cypher"] = result.cypher->text;
            out["status"] = "ok";
            ++summary.translated;
        } else {
            out["status"] = result.failure->name();
            ++summary.failures[result.failure->name()];
        }
        output.push_back(std::move(out));
    }
    return summary;
}

// ---- evaluate --------------------------------------------------------------------

Evaluation run_evaluate(const nlohmann::ordered_json& dataset, QueryBackend& backend,
                        const RunConfig& config, const std::string& report_name) {
    if (!dataset.is_array()) throw Error("dataset must be a JSON array");
    Evaluation evaluation;
    std::vector<MatchOutcome> outcomes;
    std::vector<FailureCategory> parse_failures;
    long long counted = 0;

    for (const auto& entry : dataset) {
        nlohmann::json record;
        std::string db_id = entry.value("db_id", "");
        std::string sparql = entry.value("sparql", "");
        record["db_id"] = db_id;

        TranslationResult translated = translate_query(sparql, config);

        // valid SPARQL outside the subset counts as a parse failure; the
        // oracle is not consulted because no Cypher side exists to compare
        if (!translated.ok() && translated.failure->kind != FailureKind::Syntax) {
            ++counted;
            parse_failures.push_back(*translated.failure);
            record["status"] = "parse_error";
            record["category"] = translated.failure->name();
            record["detail"] = translated.failure->detail;
            evaluation.per_entry.push_back(std::move(record));
            continue;
        }

        // malformed queries and entries whose SPARQL side cannot run are
        // excluded from the totals entirely
        ResultTable sparql_result;
        try {
            if (!translated.ok()) throw Error(translated.failure->detail);
            sparql_result = backend.run_sparql(db_id, sparql);
        } catch (const std::exception& e) {
            ++evaluation.skipped;
            record["status"] = "skipped";
            record["reason"] = e.what();
            evaluation.per_entry.push_back(std::move(record));
            continue;
        }
        ++counted;
        record["cypher"] = translated.cypher->text;

        MatchOutcome outcome;
        try {
            ResultTable cypher_result = backend.run_cypher(db_id, translated.cypher->text);
            outcome = compare(sparql_result, cypher_result);
        } catch (const std::exception& e) {
            outcome = compare_with_error(sparql_result, e.what());
        }
        record["status"] = match_outcome_name(outcome.kind);
        if (!outcome.detail.empty()) record["detail"] = outcome.detail;
        evaluation.per_entry.push_back(std::move(record));
        outcomes.push_back(std::move(outcome));
    }

    evaluation.report = aggregate_metrics(outcomes, counted, parse_failures);
    evaluation.report.name = report_name;
    return evaluation;
}

}  // namespace s2c

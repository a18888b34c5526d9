#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s2c/ast.hpp"
#include "s2c/classifier.hpp"
#include "s2c/emitter.hpp"
#include "s2c/prefixes.hpp"
#include "s2c/report.hpp"
#include "s2c/result_table.hpp"

namespace s2c {

/// Knobs shared by every pipeline command.
struct RunConfig {
    ExplicitRels explicit_rels;
    OptionalPlacement optional_placement = OptionalPlacement::BeforeWhere;
    bool strict_prefixes = false;
    std::string default_prefix_label = "ROOT";
    enum class OutputFormat { Text, Json } output_format = OutputFormat::Text;
    bool s2ctrans_compat = false;  // flag COUNT(*) projections the way the reference tools do

    NamingOptions naming() const;
    /// Throws Error when default_prefix_label is not [A-Za-z][A-Za-z0-9]*.
    void validate() const;
};

/// One query through the whole front half. Exactly one of `cypher` and
/// `failure` is set; `ast` accompanies a successful translation.
struct TranslationResult {
    std::optional<CypherQuery> cypher;
    std::optional<Ast> ast;
    std::optional<FailureCategory> failure;

    bool ok() const { return cypher.has_value(); }
};

TranslationResult translate_query(const std::string& text, const RunConfig& config);

/// Re-derives the structured clause list from emitted Cypher text, so
/// text-based transports can feed the sandbox evaluator.
CypherQuery parse_cypher_text(const std::string& text);

/// Execution seam: the sandbox evaluators and external stores expose the
/// same two signatures. Implementations throw on execution failure.
class QueryBackend {
public:
    virtual ~QueryBackend() = default;
    virtual ResultTable run_sparql(const std::string& db_id, const std::string& sparql) = 0;
    virtual ResultTable run_cypher(const std::string& db_id, const std::string& cypher) = 0;
};

/// Twin in-memory evaluators over Turtle files (`<graphs_dir>/<db_id>.ttl`).
class SandboxBackend : public QueryBackend {
public:
    SandboxBackend(std::string graphs_dir, RunConfig config);
    ~SandboxBackend() override;
    ResultTable run_sparql(const std::string& db_id, const std::string& sparql) override;
    ResultTable run_cypher(const std::string& db_id, const std::string& cypher) override;

private:
    struct Loaded;
    const Loaded& load(const std::string& db_id);
    std::string graphs_dir_;
    RunConfig config_;
    std::map<std::string, std::unique_ptr<Loaded>> cache_;
};

/// Remote stores behind HTTP endpoints taken from the environment
/// (S2C_SPARQL_ENDPOINT, S2C_GRAPH_ENDPOINT). Each query is POSTed as
/// {"db_id": ..., "query": ...} and the response is a result-table JSON.
class HttpBackend : public QueryBackend {
public:
    HttpBackend(std::string sparql_endpoint, std::string graph_endpoint);
    /// Reads both endpoints from the environment; throws if either is unset.
    static std::unique_ptr<HttpBackend> from_environment();
    ResultTable run_sparql(const std::string& db_id, const std::string& sparql) override;
    ResultTable run_cypher(const std::string& db_id, const std::string& cypher) override;

private:
    ResultTable post(const std::string& endpoint, const std::string& db_id,
                     const std::string& query);
    std::string sparql_endpoint_;
    std::string graph_endpoint_;
};

/// Batch translation over a Spider4SSC-style JSON array. Entries keep every
/// input field; `cypher` is filled on success and `status` records "ok" or
/// the failure group. Per-entry failures never abort the batch.
struct BatchSummary {
    long long total = 0;
    long long translated = 0;
    std::map<std::string, long long> failures;  // category name -> count
};
BatchSummary run_batch(const nlohmann::ordered_json& input, nlohmann::ordered_json& output,
                       const RunConfig& config);

/// Differential evaluation of a dataset against a backend. Entries whose
/// SPARQL side cannot run (missing graph, oracle error) are excluded from
/// the totals, mirroring how reference comparisons drop SPARQL-side errors.
struct Evaluation {
    Report report;
    nlohmann::json per_entry = nlohmann::json::array();
    long long skipped = 0;
};
Evaluation run_evaluate(const nlohmann::ordered_json& dataset, QueryBackend& backend,
                        const RunConfig& config, const std::string& report_name = "run");

}  // namespace s2c

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "s2c/errors.hpp"
#include "s2c/pipeline.hpp"

using namespace s2c;
using nlohmann::ordered_json;

#ifndef S2C_DATA_DIR
#define S2C_DATA_DIR "data"
#endif
#ifndef S2C_CLI_PATH
#define S2C_CLI_PATH ""
#endif

namespace {

std::string data_path(const std::string& rel) { return std::string(S2C_DATA_DIR) + "/" + rel; }

ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return ordered_json::parse(in);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig config;
    CHECK_NOTHROW(config.validate());
    config.default_prefix_label = "Ns0";
    CHECK_NOTHROW(config.validate());
    config.default_prefix_label = "0bad";
    CHECK_THROWS_AS(config.validate(), Error);
    config.default_prefix_label = "with space";
    CHECK_THROWS_AS(config.validate(), Error);
    config.default_prefix_label = "";
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("translate_query outcome classes") {
    RunConfig config;
    CHECK(translate_query("SELECT ?x WHERE { ?x a :T . }", config).ok());
    auto nested = translate_query("SELECT ?x WHERE { { SELECT ?y WHERE { ?y a :T . } } }", config);
    REQUIRE(nested.failure.has_value());
    CHECK(nested.failure->kind == FailureKind::Ns2);
    auto syntax = translate_query("SELECT WHERE {", config);
    REQUIRE(syntax.failure.has_value());
    CHECK(syntax.failure->kind == FailureKind::Syntax);
    RunConfig compat;
    compat.s2ctrans_compat = true;
    auto flagged = translate_query("SELECT (COUNT(*) AS ?n) WHERE { ?x a :T . }", compat);
    REQUIRE(flagged.failure.has_value());
    CHECK(flagged.failure->kind == FailureKind::CountAll);
    // without compat mode the same query translates
    CHECK(translate_query("SELECT (COUNT(*) AS ?n) WHERE { ?x a :T . }", config).ok());
}

TEST_CASE("parse_cypher_text recovers the clause structure") {
    const char* text =
        "MATCH (a:L)\nMATCH (b:M)\nOPTIONAL MATCH (a)-[:r]->(c:N)\nWHERE a.p > 1\n"
        "WITH COUNT(*) AS n\nWHERE n > 2\nRETURN n\nORDER BY n ASC\nLIMIT 3\nSKIP 1";
    CypherQuery q = parse_cypher_text(text);
    std::vector<ClauseKind> kinds;
    for (const auto& [k, t] : q.clauses) {
        (void)t;
        kinds.push_back(k);
    }
    CHECK(kinds == std::vector<ClauseKind>{ClauseKind::Match, ClauseKind::OptionalMatch,
                                           ClauseKind::Where, ClauseKind::With,
                                           ClauseKind::WhereWith, ClauseKind::Return,
                                           ClauseKind::OrderBy, ClauseKind::Limit,
                                           ClauseKind::Skip});
    CHECK(*q.clause(ClauseKind::Match) == "MATCH (a:L)\nMATCH (b:M)");
}

TEST_CASE("batch fills cypher and counts failures per category") {
    ordered_json input = ordered_json::array();
    input.push_back({{"db_id", "d"}, {"question", "q1"},
                     {"sparql", "SELECT ?x WHERE { ?x a :T . }"}, {"namespaces", {"a"}}});
    input.push_back({{"db_id", "d"}, {"question", "q2"},
                     {"sparql", "SELECT ?x WHERE { { SELECT ?y WHERE { ?y a :T . } } }"}});
    input.push_back({{"db_id", "d"}, {"question", "q3"},
                     {"sparql", "SELECT ?y WHERE { ?x a :T . ?x :p ?y . }"}});

    ordered_json output;
    BatchSummary summary = run_batch(input, output, RunConfig{});
    CHECK(summary.total == 3);
    CHECK(summary.translated == 2);
    CHECK(summary.failures.at("NS2") == 1);
    REQUIRE(output.size() == 3);
    CHECK(output[0]["status"] == "ok");
    CHECK(output[0]["cypher"].is_string());
    CHECK(output[1]["status"] == "NS2");
    CHECK_FALSE(output[1].contains("cypher"));
    CHECK(output[2]["status"] == "ok");
    // untouched fields survive byte-identically
    CHECK(output[0]["namespaces"] == input[0]["namespaces"]);
    CHECK(output[0]["question"] == "q1");
}

TEST_CASE("batch on the empty dataset") {
    ordered_json output;
    BatchSummary summary = run_batch(ordered_json::array(), output, RunConfig{});
    CHECK(summary.total == 0);
    CHECK(output.empty());
}

TEST_CASE("batch round-trips an entry except cypher and status") {
    ordered_json input = load_json(data_path("toy_dataset.json"));
    ordered_json output;
    run_batch(input, output, RunConfig{});
    REQUIRE(output.size() == input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        ordered_json stripped = output[i];
        stripped.erase("status");
        stripped["cypher"] = input[i]["cypher"];
        CHECK(stripped.dump() == input[i].dump());
    }
}

TEST_CASE("batch determinism") {
    ordered_json input = load_json(data_path("toy_dataset.json"));
    ordered_json a, b;
    run_batch(input, a, RunConfig{});
    run_batch(input, b, RunConfig{});
    CHECK(a.dump() == b.dump());
}

TEST_CASE("evaluate the bundled toy dataset at full accuracy") {
    ordered_json dataset = load_json(data_path("toy_dataset.json"));
    SandboxBackend backend(data_path("graphs"), RunConfig{});
    Evaluation evaluation = run_evaluate(dataset, backend, RunConfig{}, "toy");
    CHECK(evaluation.report.n == 5);
    CHECK(evaluation.report.parsed == 5);
    CHECK(evaluation.report.matched == 5);
    REQUIRE(evaluation.report.exec_acc.has_value());
    CHECK(*evaluation.report.exec_acc == doctest::Approx(1.0));
    CHECK(evaluation.skipped == 0);
}

TEST_CASE("evaluate counts execution failures without aborting") {
    ordered_json dataset = ordered_json::array();
    // grouping by a plain node variable leaves it out of WITH scope: the
    // emitted query references an undefined identifier and fails to execute
    dataset.push_back(
        {{"db_id", "pet_shelter"},
         {"sparql",
          "SELECT ?x (COUNT(?y) AS ?c) WHERE { ?x a :Person . ?x person:hasPet ?y . "
          "?y a :Pet . } GROUP BY ?x"}});
    dataset.push_back({{"db_id", "pet_shelter"},
                       {"sparql", "SELECT ?name WHERE { ?x a :Person . ?x person:name ?name . }"}});

    SandboxBackend backend(data_path("graphs"), RunConfig{});
    Evaluation evaluation = run_evaluate(dataset, backend, RunConfig{}, "exec");
    CHECK(evaluation.report.n == 2);
    CHECK(evaluation.report.errors.at("N4j_EXEC") == 1);
    CHECK(evaluation.report.matched == 1);
    REQUIRE(evaluation.report.exec_acc.has_value());
    CHECK(*evaluation.report.exec_acc == doctest::Approx(0.5));
}

TEST_CASE("evaluate skips entries whose graph is missing") {
    ordered_json dataset = ordered_json::array();
    dataset.push_back({{"db_id", "no_such_db"},
                       {"sparql", "SELECT ?x WHERE { ?x a :T . }"}});
    dataset.push_back({{"db_id", "pet_shelter"},
                       {"sparql", "SELECT ?name WHERE { ?x a :Person . ?x person:name ?name . }"}});
    SandboxBackend backend(data_path("graphs"), RunConfig{});
    Evaluation evaluation = run_evaluate(dataset, backend, RunConfig{}, "skips");
    CHECK(evaluation.skipped == 1);
    CHECK(evaluation.report.n == 1);
    CHECK(evaluation.report.matched == 1);
}

TEST_CASE("evaluate counts parse failures against total accuracy") {
    ordered_json dataset = ordered_json::array();
    dataset.push_back({{"db_id", "pet_shelter"},
                       {"sparql", "SELECT ?name WHERE { ?x a :Person . ?x person:name ?name . }"}});
    dataset.push_back({{"db_id", "pet_shelter"},
                       {"sparql", "SELECT ?x WHERE { ?x a :Person . MINUS { ?x :p 1 . } }"}});
    SandboxBackend backend(data_path("graphs"), RunConfig{});
    Evaluation evaluation = run_evaluate(dataset, backend, RunConfig{}, "parse");
    CHECK(evaluation.report.n == 2);
    CHECK(evaluation.report.parsed == 1);
    CHECK(evaluation.report.errors.at("NS2") == 1);
    REQUIRE(evaluation.report.total_acc.has_value());
    CHECK(*evaluation.report.total_acc == doctest::Approx(0.5));
}

TEST_CASE("optional placement flips the outcome on the miniature fixture") {
    ordered_json dataset = ordered_json::array();
    dataset.push_back({{"db_id", "bsbm_mini"},
                       {"sparql", read_file(data_path("optional_relationship.rq"))}});

    RunConfig before;  // reference placement
    SandboxBackend backend_before(data_path("graphs"), before);
    Evaluation with_before = run_evaluate(dataset, backend_before, before, "before");
    CHECK(with_before.report.errors.at("VAL") == 1);
    CHECK(with_before.report.matched == 0);

    RunConfig after;
    after.optional_placement = OptionalPlacement::AfterWhere;
    SandboxBackend backend_after(data_path("graphs"), after);
    Evaluation with_after = run_evaluate(dataset, backend_after, after, "after");
    CHECK(with_after.report.matched == 1);
}

TEST_CASE("http backend round-trips through a stub endpoint") {
    httplib::Server server;
    server.Post("/sparql", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        REQUIRE(body.contains("db_id"));
        REQUIRE(body.contains("query"));
        nlohmann::json table{{"columns", {"x"}}, {"rows", {{1}, {2}}}};
        res.set_content(table.dump(), "application/json");
    });
    server.Post("/cypher", [](const httplib::Request& req, httplib::Response& res) {
        (void)req;
        nlohmann::json table{{"columns", {"y"}},
                             {"rows", {{nlohmann::json{{"uri", "http://ex/n1"}}}}}};
        res.set_content(table.dump(), "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&server]() { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpBackend backend("http://127.0.0.1:" + std::to_string(port) + "/sparql",
                        "http://127.0.0.1:" + std::to_string(port) + "/cypher");
    ResultTable sparql_rows = backend.run_sparql("db", "SELECT ?x WHERE { ?x a :T . }");
    CHECK(sparql_rows.rows.size() == 2);
    CHECK(std::get<std::int64_t>(sparql_rows.rows[0][0]) == 1);
    ResultTable cypher_rows = backend.run_cypher("db", "MATCH (y) RETURN y");
    REQUIRE(cypher_rows.rows.size() == 1);
    CHECK(std::get<Iri>(cypher_rows.rows[0][0]).uri == "http://ex/n1");

    server.stop();
    worker.join();
}

TEST_CASE("http backend configuration from the environment") {
    unsetenv("S2C_SPARQL_ENDPOINT");
    unsetenv("S2C_GRAPH_ENDPOINT");
    CHECK_THROWS_AS(HttpBackend::from_environment(), Error);
    setenv("S2C_SPARQL_ENDPOINT", "http://127.0.0.1:1/s", 1);
    setenv("S2C_GRAPH_ENDPOINT", "http://127.0.0.1:1/c", 1);
    CHECK_NOTHROW(HttpBackend::from_environment());
    unsetenv("S2C_SPARQL_ENDPOINT");
    unsetenv("S2C_GRAPH_ENDPOINT");
}

#if defined(S2C_CLI_PATH)
TEST_CASE("cli exit codes are a total function of the outcome class") {
    std::string cli = S2C_CLI_PATH;
    if (cli.empty()) return;
    auto run = [&](const std::string& query) {
        std::string cmd = "printf '%s' \"" + query + "\" | " + cli + " translate >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("SELECT ?x WHERE { ?x a :T . }") == 0);
    CHECK(run("SELECT WHERE {") == 1);
    CHECK(run("SELECT ?x WHERE { ?x a :T . MINUS { ?x :p 1 . } }") == 2);
    CHECK(run("") == 1);
}
#endif

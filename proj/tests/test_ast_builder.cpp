#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <set>

#include "s2c/ast_builder.hpp"
#include "s2c/errors.hpp"
#include "s2c/parser.hpp"

using namespace s2c;
using nlohmann::ordered_json;

namespace {

const char* kPetQuery = R"(SELECT ?petName (AVG(?personAge) AS ?avgPersonAge)
WHERE {
  ?x rdf:type :Person .
  ?x person:age ?personAge .
  ?x person:hasPet ?pet .
  ?pet a :Pet .
  ?pet pet:name ?petName .
  FILTER CONTAINS(?petName, 'b')
}
GROUP BY ?petName
HAVING (AVG(?personAge) > 30)
ORDER BY DESC(?avgPersonAge)
OFFSET 1
LIMIT 10)";

// golden container contents for the query above
const char* kPetAstJson = R"json({
  "vars": ["pet", "avgPersonAge", "x", "petName", "personAge"],
  "iri": {},
  "nodes": {
    "x": {"label": "ROOT__Person"},
    "pet": {"label": "ROOT__Pet"}
  },
  "props": {
    "personAge": "x.person__age",
    "petName": "pet.pet__name"
  },
  "rels": [
    {"s": "x", "r": ":person__hasPet", "o": "pet", "optional": false, "inverse": false}
  ],
  "rel_types": [":person__hasPet"],
  "aggregates": {"avgPersonAge": "AVG(x.person__age)"},
  "WHERE": ["pet.pet__name CONTAINS 'b'"],
  "WITH": {
    "avgPersonAge": "AVG(x.person__age) AS avgPersonAge",
    "petName": "pet.pet__name AS petName"
  },
  "WHERE_WITH": [["avgPersonAge", ">", "30"]],
  "RETURN": ["petName, avgPersonAge"],
  "ORDER BY": {"avgPersonAge": "DESC"},
  "LIMIT": 10,
  "OFFSET": 1
})json";

AstBuilder builder_for(const ParseTree& tree, ExplicitRels re = {}) {
    return AstBuilder(resolve_prefixes(tree), std::move(re));
}

Ast build_text(const char* text, ExplicitRels re = {}) {
    ParseTree tree = parse_sparql_text(text);
    return build_ast(tree, re);
}

}  // namespace

TEST_CASE("init_ast is empty, deterministic and schema-complete") {
    Ast a = init_ast();
    Ast b = init_ast();
    ordered_json ja = ast_to_json(a);
    CHECK(ja == ast_to_json(b));
    CHECK(ja.size() == 16);
    for (const char* key : {"vars", "iri", "nodes", "props", "rels", "rel_types", "aggregates",
                            "subgraphs", "WHERE", "WITH", "WHERE_WITH", "UNWIND", "RETURN",
                            "ORDER BY", "LIMIT", "OFFSET"})
        CHECK(ja.contains(key));
    CHECK(ja["LIMIT"].is_null());
    CHECK(ja["OFFSET"].is_null());
    CHECK(ja["vars"].empty());
    CHECK(ja["nodes"].empty());
}

TEST_CASE("ast json round-trips") {
    Ast ast = build_text(kPetQuery);
    ordered_json j = ast_to_json(ast);
    Ast back = ast_from_json(j);
    CHECK(ast_to_json(back) == j);
}

TEST_CASE("first pass labels typed subjects") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?x WHERE { ?x rdf:type :Person . ?pet a :Pet . ?x :name 'Emma' . }");
    AstBuilder b = builder_for(tree);
    auto triples = b.extract_triples(*tree.first("selectQuery")->first("whereClause"));
    REQUIRE(triples.size() == 3);
    b.find_labelled_nodes(triples);
    CHECK(*b.ast().nodes.at("x").label == "ROOT__Person");
    CHECK(*b.ast().nodes.at("pet").label == "ROOT__Pet");
    CHECK(triples[0].consumed);
    CHECK(triples[1].consumed);
    CHECK_FALSE(triples[2].consumed);
}

TEST_CASE("first pass without type triples changes nothing") {
    ParseTree tree = parse_sparql_text("SELECT ?x WHERE { ?x :name 'Emma' . }");
    AstBuilder b = builder_for(tree);
    auto triples = b.extract_triples(*tree.first("selectQuery")->first("whereClause"));
    b.find_labelled_nodes(triples);
    CHECK(b.ast().nodes.empty());
}

TEST_CASE("conflicting labels raise") {
    ParseTree tree = parse_sparql_text("SELECT ?x WHERE { ?x a :Person . ?x a :Robot . }");
    AstBuilder b = builder_for(tree);
    auto triples = b.extract_triples(*tree.first("selectQuery")->first("whereClause"));
    CHECK_THROWS_AS(b.find_labelled_nodes(triples), ConflictError);
}

TEST_CASE("second pass categorises relationship, constraint and property") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?x WHERE { ?x a :Person . ?y a :Person . ?x :knows ?y . "
        "?x :name 'Emma' . ?x person:age ?personAge . }");
    AstBuilder b = builder_for(tree);
    auto triples = b.extract_triples(*tree.first("selectQuery")->first("whereClause"));
    b.find_labelled_nodes(triples);
    b.categorise_triples(triples);
    const Ast& ast = b.ast();

    REQUIRE(ast.rels.size() == 1);
    CHECK(ast.rels[0].subject == "x");
    CHECK(ast.rels[0].path == ":ROOT__knows");
    CHECK(ast.rels[0].object == "y");
    CHECK_FALSE(ast.rels[0].optional);
    CHECK_FALSE(ast.rels[0].inverse);
    CHECK(ast.rel_types == std::vector<std::string>{":ROOT__knows"});

    CHECK(ast.nodes.at("x").constraints.at("ROOT__name") == "'Emma'");
    CHECK(ast.props.at("personAge") == "x.person__age");
}

TEST_CASE("second pass totality: every triple lands in exactly one bucket") {
    ParseTree tree = parse_sparql_text(
        "SELECT * WHERE { ?a a :T . ?b a :U . ?a :r ?b . ?a :v 7 . ?a :w ?w . ?b :z 'q' . "
        "?b :y ?y . ?w :odd ?o . }");
    AstBuilder b = builder_for(tree);
    auto triples = b.extract_triples(*tree.first("selectQuery")->first("whereClause"));
    b.find_labelled_nodes(triples);
    std::size_t remaining = 0;
    for (const auto& t : triples)
        if (!t.consumed) ++remaining;
    std::size_t constraints_before = 0;
    b.categorise_triples(triples);
    const Ast& ast = b.ast();
    std::size_t constraints_after = 0;
    for (const auto& [var, node] : ast.nodes) {
        (void)var;
        constraints_after += node.constraints.size();
    }
    CHECK(ast.rels.size() + (constraints_after - constraints_before) + ast.props.size() ==
          remaining);
}

TEST_CASE("explicit relationship types override categorisation") {
    const char* text = "SELECT ?y WHERE { ?x a :Person . ?x :knows ?y . }";
    Ast without = build_text(text);
    CHECK(without.rels.empty());
    CHECK(without.props.at("y") == "x.ROOT__knows");

    ExplicitRels re;
    re.predicates.insert(":knows");
    Ast with = build_text(text, re);
    REQUIRE(with.rels.size() == 1);
    CHECK(with.rels[0].subject == "x");
    CHECK(with.rels[0].object == "y");
    CHECK(with.props.empty());
    CHECK(with.nodes.contains("y"));           // endpoint recorded
    CHECK_FALSE(with.nodes.at("y").label);     // but stays unlabelled
}

TEST_CASE("filter constraints land in WHERE") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?x WHERE { ?x a :T . ?x :p ?v . FILTER ?v IN (10, 20, 30) }");
    Ast ast = build_ast(tree, {});
    REQUIRE(ast.where.size() == 1);
    auto triple = std::get<std::array<std::string, 3>>(ast.where[0]);
    CHECK(triple[0] == "x.ROOT__p");
    CHECK(triple[1] == "IN");
    CHECK(triple[2] == "(10, 20, 30)");
}

TEST_CASE("having constraints alias aggregates into WITH") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?g WHERE { ?x a :T . ?x :p ?y . ?x :g ?g . } GROUP BY ?g HAVING (AVG(?y) < 10)");
    Ast ast = build_ast(tree, {});
    REQUIRE(ast.where_with.size() == 1);
    auto triple = std::get<std::array<std::string, 3>>(ast.where_with[0]);
    CHECK(triple[0] == "agg__0");
    CHECK(triple[1] == "<");
    CHECK(triple[2] == "10");
    CHECK(ast.with_items.at("agg__0") == "AVG(x.ROOT__p) AS agg__0");
    CHECK(ast.aggregates.at("agg__0") == "AVG(x.ROOT__p)");
}

TEST_CASE("filter with aggregate routes to grouped constraints") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?g WHERE { ?x a :T . ?x :p ?y . ?x :g ?g . FILTER(SUM(?y) > 5) } GROUP BY ?g");
    Ast ast = build_ast(tree, {});
    CHECK(ast.where.empty());
    REQUIRE(ast.where_with.size() == 1);
}

TEST_CASE("select projects variables and aliases") {
    Ast ast = build_text(kPetQuery);
    REQUIRE(ast.return_items.size() == 1);
    CHECK(ast.return_items[0] == "petName, avgPersonAge");
}

TEST_CASE("select distinct prefixes the next projection") {
    Ast ast = build_text("SELECT DISTINCT ?label WHERE { ?p a :T . ?p :label ?label . }");
    REQUIRE(ast.return_items.size() == 1);
    CHECK(ast.return_items[0] == "DISTINCT label");
}

TEST_CASE("select star records the star for expansion") {
    Ast ast = build_text("SELECT * WHERE { ?x a :T . ?x :p ?y . }");
    REQUIRE(ast.return_items.size() == 1);
    CHECK(ast.return_items[0] == "*");
    CHECK(ast.vars == std::vector<std::string>{"x", "y"});
}

TEST_CASE("group condition registers namespaced grouping variable") {
    ParseTree tree = parse_sparql_text(kPetQuery);
    Ast ast = build_ast(tree, {});
    CHECK(ast.with_items.at("petName") == "pet.pet__name AS petName");
}

TEST_CASE("group condition guard keeps existing keys") {
    ParseTree tree = parse_sparql_text("SELECT ?b WHERE { ?x a :T . ?x :p ?a . } GROUP BY ?a");
    AstBuilder b = builder_for(tree);
    Ast first = b.build(tree);
    auto keys_before = first.with_items.keys();

    // a second condition aliasing an already registered key changes nothing
    ParseTree tree2 =
        parse_sparql_text("SELECT ?b WHERE { ?x a :T . ?x :p ?a . } GROUP BY ?a (?a AS ?b)");
    Ast second = build_ast(tree2, {});
    CHECK(second.with_items.keys() == keys_before);
}

TEST_CASE("group condition with function alias") {
    ParseTree tree = parse_sparql_text(
        "SELECT ?y WHERE { ?x a :T . ?x :d ?d . } GROUP BY (YEAR(?d) AS ?y)");
    Ast ast = build_ast(tree, {});
    // frozen by hand-walking the grouping algorithm on this input
    CHECK(ast.with_items.at("y") == "YEAR(d) AS y");
}

TEST_CASE("order condition direction and defaults") {
    Ast desc = build_text(kPetQuery);
    REQUIRE(desc.order_by.size() == 1);
    CHECK(desc.order_by.at("avgPersonAge") == "DESC");

    Ast asc = build_text("SELECT ?x ?y WHERE { ?x a :T . ?x :p ?y . } ORDER BY ?x");
    CHECK(asc.order_by.at("x") == "ASC");
}

TEST_CASE("order key rewrites to the namespaced property without WITH") {
    Ast ast = build_text(
        "SELECT DISTINCT ?label WHERE { ?p a :T . ?p rdfs:label ?label . } ORDER BY(?label) LIMIT 10");
    REQUIRE(ast.order_by.size() == 1);
    CHECK(ast.order_by.at("p.rdfs__label") == "ASC");
}

TEST_CASE("limit offset and absence") {
    Ast ast = build_text(kPetQuery);
    CHECK(ast.limit == 10);
    CHECK(ast.skip == 1);
    Ast bare = build_text("SELECT ?x WHERE { ?x a :T . }");
    CHECK_FALSE(bare.limit.has_value());
    CHECK_FALSE(bare.skip.has_value());
}

TEST_CASE("visit_var cleans, registers and namespaces in aggregates") {
    AstBuilder b(PrefixMap{}, {});
    CHECK(b.visit_var("$y", false) == "y");
    CHECK(b.ast().vars == std::vector<std::string>{"y"});
    b.visit_var("?y", false);
    CHECK(b.ast().vars.size() == 1);

    b.ast().props.set("personAge", "x.person__age");
    CHECK(b.visit_var("?personAge", true) == "x.person__age");
    CHECK(b.visit_var("?personAge", false) == "personAge");
}

TEST_CASE("visit_aggregate aliases and dense implicit names") {
    AstBuilder b(PrefixMap{}, {});
    CHECK(b.visit_aggregate("AVG(x.person__age)", "avgPersonAge") == "avgPersonAge");
    CHECK(b.ast().aggregates.at("avgPersonAge") == "AVG(x.person__age)");
    CHECK(b.ast().with_items.at("avgPersonAge") == "AVG(x.person__age) AS avgPersonAge");

    CHECK(b.visit_aggregate("AVG(y)", std::nullopt) == "agg__0");
    CHECK(b.visit_aggregate("SUM(z)", std::nullopt) == "agg__1");
    // reusing an expression returns the existing alias instead of a new one
    CHECK(b.visit_aggregate("AVG(y)", std::nullopt) == "agg__0");
    CHECK_THROWS_AS(b.visit_aggregate("MAX(q)", "avgPersonAge"), ConflictError);

    // implicit aliases form a dense zero-based range
    std::set<std::string> implicit;
    for (const auto& [alias, expr] : b.ast().aggregates) {
        (void)expr;
        if (alias.rfind("agg__", 0) == 0) implicit.insert(alias);
    }
    CHECK(implicit == std::set<std::string>{"agg__0", "agg__1"});
}

TEST_CASE("golden ast for the worked pet-owner query") {
    Ast ast = build_text(kPetQuery);
    ordered_json mine = ast_to_json(ast);
    ordered_json expected = ordered_json::parse(kPetAstJson);

    // vars is a set; the reference serialisation uses hash order
    std::set<std::string> my_vars(mine["vars"].begin(), mine["vars"].end());
    std::set<std::string> want_vars(expected["vars"].begin(), expected["vars"].end());
    CHECK(my_vars == want_vars);

    for (const char* key : {"iri", "nodes", "props", "rels", "rel_types", "aggregates", "WHERE",
                            "WITH", "WHERE_WITH", "RETURN", "ORDER BY", "LIMIT", "OFFSET"}) {
        INFO(key);
        CHECK(mine.at(key) == expected.at(key));
    }
}

TEST_CASE("minimal query ast") {
    Ast ast = build_text("SELECT ?x WHERE { ?x a :Person . }");
    CHECK(ast.vars == std::vector<std::string>{"x"});
    REQUIRE(ast.nodes.size() == 1);
    CHECK(*ast.nodes.at("x").label == "ROOT__Person");
    CHECK(ast.return_items == std::vector<std::string>{"x"});
    CHECK(ast.props.empty());
    CHECK(ast.rels.empty());
    CHECK(ast.where.empty());
    CHECK(ast.with_items.empty());
    CHECK(ast.where_with.empty());
    CHECK(ast.order_by.empty());
}

TEST_CASE("optional triples tag relationships") {
    Ast ast = build_text(
        "SELECT ?label WHERE { ?r a :Review . ?r :for ?p . ?p a :Product . "
        "OPTIONAL { ?p :pub ?q . ?q a :Producer . } }");
    REQUIRE(ast.rels.size() == 2);
    CHECK_FALSE(ast.rels[0].optional);
    CHECK(ast.rels[1].optional);
    CHECK(*ast.nodes.at("q").label == "ROOT__Producer");
}

TEST_CASE("inverse path flips the flag") {
    Ast ast = build_text("SELECT ?x WHERE { ?x a :T . ?y a :U . ?x ^:owns ?y . }");
    REQUIRE(ast.rels.size() == 1);
    CHECK(ast.rels[0].inverse);
}

TEST_CASE("property path keeps segment order") {
    Ast ast = build_text("SELECT ?y WHERE { ?x a :T . ?y a :U . ?x :p1/:p2 ?y . }");
    REQUIRE(ast.rels.size() == 1);
    CHECK(ast.rels[0].path == ":ROOT__p1/:ROOT__p2");
    CHECK(ast.rel_types == std::vector<std::string>{":ROOT__p1", ":ROOT__p2"});
}

TEST_CASE("build_ast is deterministic") {
    Ast a = build_text(kPetQuery);
    Ast b = build_text(kPetQuery);
    CHECK(ast_to_json(a) == ast_to_json(b));
}

TEST_CASE("every referenced variable is registered") {
    Ast ast = build_text(kPetQuery);
    auto has = [&](const std::string& v) { return ast.has_var(v); };
    for (const auto& [var, node] : ast.nodes) {
        (void)node;
        CHECK(has(var));
    }
    for (const auto& [var, prop] : ast.props) {
        (void)prop;
        CHECK(has(var));
    }
    for (const auto& rel : ast.rels) {
        CHECK(has(rel.subject));
        CHECK(has(rel.object));
    }
    for (const auto& [alias, expr] : ast.aggregates) {
        (void)expr;
        CHECK(has(alias));
    }
}

TEST_CASE("first pass is independent of triple order") {
    const char* base = "SELECT ?x WHERE { ?x a :Person . ?y a :Pet . ?x :name 'e' . ?x :has ?y . }";
    const char* shuffled =
        "SELECT ?x WHERE { ?x :has ?y . ?x :name 'e' . ?y a :Pet . ?x a :Person . }";
    Ast a = build_text(base);
    Ast b = build_text(shuffled);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (const auto& [var, node] : a.nodes) {
        const NodeEntry* other = b.nodes.find(var);
        REQUIRE(other != nullptr);
        CHECK(node.label == other->label);
    }
}

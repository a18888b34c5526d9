#include "s2c/ast.hpp"

#include <nlohmann/json.hpp>

namespace s2c {

using nlohmann::ordered_json;

Ast init_ast() { return Ast{}; }

namespace {

ordered_json constraint_to_json(const ConstraintTerm& term) {
    if (const auto* s = std::get_if<std::string>(&term)) return *s;
    const auto& triple = std::get<std::array<std::string, 3>>(term);
    return ordered_json::array({triple[0], triple[1], triple[2]});
}

ConstraintTerm constraint_from_json(const ordered_json& j) {
    if (j.is_string()) return j.get<std::string>();
    return std::array<std::string, 3>{j.at(0).get<std::string>(), j.at(1).get<std::string>(),
                                      j.at(2).get<std::string>()};
}

ordered_json string_map_to_json(const OrderedMap<std::string>& map) {
    ordered_json out = ordered_json::object();
    for (const auto& [k, v] : map) out[k] = v;
    return out;
}

void string_map_from_json(const ordered_json& j, OrderedMap<std::string>& map) {
    for (auto it = j.begin(); it != j.end(); ++it) map.set(it.key(), it.value().get<std::string>());
}

}  // namespace

ordered_json ast_to_json(const Ast& ast) {
    ordered_json j = ordered_json::object();
    j["vars"] = ast.vars;
    j["iri"] = string_map_to_json(ast.iri);

    ordered_json nodes = ordered_json::object();
    for (const auto& [var, node] : ast.nodes) {
        ordered_json n = ordered_json::object();
        if (node.label) n["label"] = *node.label;
        for (const auto& [prop, lit] : node.constraints) n[prop] = lit;
        nodes[var] = std::move(n);
    }
    j["nodes"] = std::move(nodes);

    j["props"] = string_map_to_json(ast.props);

    ordered_json rels = ordered_json::array();
    for (const auto& rel : ast.rels) {
        rels.push_back(ordered_json{{"s", rel.subject},
                                    {"r", rel.path},
                                    {"o", rel.object},
                                    {"optional", rel.optional},
                                    {"inverse", rel.inverse}});
    }
    j["rels"] = std::move(rels);
    j["rel_types"] = ast.rel_types;
    j["aggregates"] = string_map_to_json(ast.aggregates);
    j["subgraphs"] = string_map_to_json(ast.subgraphs);

    ordered_json where = ordered_json::array();
    for (const auto& t : ast.where) where.push_back(constraint_to_json(t));
    j["WHERE"] = std::move(where);

    j["WITH"] = string_map_to_json(ast.with_items);

    ordered_json ww = ordered_json::array();
    for (const auto& t : ast.where_with) ww.push_back(constraint_to_json(t));
    j["WHERE_WITH"] = std::move(ww);

    j["UNWIND"] = string_map_to_json(ast.unwind);
    j["RETURN"] = ast.return_items;
    j["ORDER BY"] = string_map_to_json(ast.order_by);
    j["LIMIT"] = ast.limit ? ordered_json(*ast.limit) : ordered_json(nullptr);
    j["OFFSET"] = ast.skip ? ordered_json(*ast.skip) : ordered_json(nullptr);
    return j;
}

Ast ast_from_json(const ordered_json& j) {
    Ast ast = init_ast();
    for (const auto& v : j.at("vars")) ast.vars.push_back(v.get<std::string>());
    if (j.contains("iri")) string_map_from_json(j.at("iri"), ast.iri);

    for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) {
        NodeEntry node;
        for (auto pit = it.value().begin(); pit != it.value().end(); ++pit) {
            if (pit.key() == "label")
                node.label = pit.value().get<std::string>();
            else
                node.constraints.set(pit.key(), pit.value().get<std::string>());
        }
        ast.nodes.set(it.key(), std::move(node));
    }

    string_map_from_json(j.at("props"), ast.props);

    for (const auto& r : j.at("rels")) {
        RelEntry rel;
        rel.subject = r.at("s").get<std::string>();
        rel.path = r.at("r").get<std::string>();
        rel.object = r.at("o").get<std::string>();
        rel.optional = r.value("optional", false);
        rel.inverse = r.value("inverse", false);
        ast.rels.push_back(std::move(rel));
    }
    for (const auto& t : j.at("rel_types")) ast.rel_types.push_back(t.get<std::string>());
    string_map_from_json(j.at("aggregates"), ast.aggregates);
    if (j.contains("subgraphs")) string_map_from_json(j.at("subgraphs"), ast.subgraphs);

    for (const auto& t : j.at("WHERE")) ast.where.push_back(constraint_from_json(t));
    string_map_from_json(j.at("WITH"), ast.with_items);
    for (const auto& t : j.at("WHERE_WITH")) ast.where_with.push_back(constraint_from_json(t));
    if (j.contains("UNWIND")) string_map_from_json(j.at("UNWIND"), ast.unwind);
    for (const auto& t : j.at("RETURN")) ast.return_items.push_back(t.get<std::string>());
    string_map_from_json(j.at("ORDER BY"), ast.order_by);
    if (j.contains("LIMIT") && !j.at("LIMIT").is_null()) ast.limit = j.at("LIMIT").get<long long>();
    if (j.contains("OFFSET") && !j.at("OFFSET").is_null()) ast.skip = j.at("OFFSET").get<long long>();
    return ast;
}

}  // namespace s2c

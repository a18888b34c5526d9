#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "s2c/ordered_map.hpp"

namespace s2c {

/// A relationship pattern between two node variables. `path` keeps each
/// segment with a leading ':' and '/' separators, e.g. ":person__hasPet".
struct RelEntry {
    std::string subject;
    std::string path;
    std::string object;
    bool optional = false;
    bool inverse = false;

    bool operator==(const RelEntry&) const = default;
};

/// A node variable: optional class label plus inline property constraints.
/// `optional_only` marks nodes introduced exclusively inside OPTIONAL blocks;
/// they surface in OPTIONAL MATCH lines only and are not serialized.
struct NodeEntry {
    std::optional<std::string> label;
    OrderedMap<std::string> constraints;  // property name -> literal text, verbatim
    bool optional_only = false;

    bool operator==(const NodeEntry&) const = default;
};

/// One WHERE term: either a preformatted expression string or an
/// [lhs, op, rhs] triple for relational-set expressions.
using ConstraintTerm = std::variant<std::string, std::array<std::string, 3>>;

/// Set of predicates forced to map as relationships regardless of the
/// default pattern categorisation.
struct ExplicitRels {
    std::set<std::string> predicates;  // prefixed-name strings, e.g. ":knows"

    bool contains(const std::string& predicate) const { return predicates.count(predicate) > 0; }
};

/// The intermediate container structure between the SPARQL parse tree and
/// Cypher emission. Field layout matches the JSON schema used by golden tests.
struct Ast {
    std::vector<std::string> vars;                  // unique, insertion-ordered
    OrderedMap<std::string> iri;                    // reserved, always empty
    OrderedMap<NodeEntry> nodes;                    // var -> node
    OrderedMap<std::string> props;                  // var -> "node.property"
    std::vector<RelEntry> rels;
    std::vector<std::string> rel_types;
    OrderedMap<std::string> aggregates;             // alias -> expression
    OrderedMap<std::string> subgraphs;              // reserved, always empty
    std::vector<ConstraintTerm> where;
    OrderedMap<std::string> with_items;             // alias -> "expr AS alias"
    std::vector<ConstraintTerm> where_with;
    OrderedMap<std::string> unwind;                 // var -> collection expression
    std::vector<std::string> return_items;
    OrderedMap<std::string> order_by;               // key -> "ASC" | "DESC"
    std::optional<long long> limit;
    std::optional<long long> skip;

    /// Registers a variable, keeping first-seen order and uniqueness.
    void add_var(const std::string& name) {
        for (const auto& v : vars)
            if (v == name) return;
        vars.push_back(name);
    }

    bool has_var(const std::string& name) const {
        for (const auto& v : vars)
            if (v == name) return true;
        return false;
    }
};

/// Empty AST with all containers initialised and limit/skip unset.
Ast init_ast();

/// JSON in the golden-test shape: all 16 keys always present, LIMIT/OFFSET
/// null when unset.
nlohmann::ordered_json ast_to_json(const Ast& ast);
Ast ast_from_json(const nlohmann::ordered_json& j);

}  // namespace s2c

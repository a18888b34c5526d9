#pragma once

#include <string>
#include <utility>
#include <vector>

#include "s2c/ast.hpp"

namespace s2c {

/// Where OPTIONAL MATCH lines are placed relative to the first WHERE.
/// BeforeWhere reproduces the reference behavior; AfterWhere is the
/// placement that keeps OPTIONAL/FILTER interaction faithful to SPARQL.
enum class OptionalPlacement { BeforeWhere, AfterWhere };

enum class ClauseKind { Match, OptionalMatch, Where, With, WhereWith, Unwind, Return, OrderBy, Limit, Skip };

const char* clause_kind_name(ClauseKind kind);

/// Emitted query text plus its structured clause list. `text` equals the
/// non-empty clause texts joined by newlines, in assembly order.
struct CypherQuery {
    std::string text;
    std::vector<std::pair<ClauseKind, std::string>> clauses;

    const std::string* clause(ClauseKind kind) const {
        for (const auto& [k, t] : clauses)
            if (k == kind) return &t;
        return nullptr;
    }
};

/// MATCH and OPTIONAL MATCH texts (each possibly multiple lines).
/// One line per relationship; node-only variables get their own MATCH lines.
/// Throws EmptyPatternError when the AST binds no nodes and no relationships.
std::pair<std::string, std::string> build_match(const Ast& ast);

/// `WHERE ...` with `||`/`&&` converted to OR/AND; aggregate aliases are
/// substituted by their expressions. Empty input yields "".
std::string build_where(const Ast& ast);

/// `WITH ...` over the registered items in insertion order, or "".
std::string build_with(const Ast& ast);

/// Second `WHERE ...` applied after WITH (grouped-result constraints), or "".
std::string build_where_with(const Ast& ast);

/// `RETURN ...`; `*` expands to the ordered variable list, and props-backed
/// variables not projected through WITH are rendered as `node.prop AS var`.
/// Throws EmptyProjectionError when nothing remains to project.
std::string build_return(const Ast& ast);

/// ORDER BY / LIMIT / SKIP lines, in that order, omitting unset parts.
std::string build_solution_modifiers(const Ast& ast);

/// Concatenates all builder outputs in assembly order.
CypherQuery assemble(const Ast& ast, OptionalPlacement placement = OptionalPlacement::BeforeWhere);

}  // namespace s2c

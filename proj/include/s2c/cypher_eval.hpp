#pragma once

#include "s2c/emitter.hpp"
#include "s2c/property_graph.hpp"
#include "s2c/result_table.hpp"

namespace s2c {

/// Evaluates an emitted Cypher query over an in-memory property graph by
/// exhaustive pattern-homomorphism enumeration. Supports exactly the clause
/// kinds the emitter produces: MATCH / OPTIONAL MATCH chains, clause-attached
/// WHERE, WITH with implicit grouping, a second WHERE on grouped rows,
/// UNWIND, RETURN (DISTINCT), ORDER BY, SKIP and LIMIT.
///
/// Scope follows store semantics: WITH resets the visible identifiers, and a
/// reference to an identifier that is not in scope raises
/// CypherEvalError(Kind::Syntax); type-level misuse raises Kind::Runtime.
ResultTable eval_cypher(const PropertyGraph& graph, const CypherQuery& query);

}  // namespace s2c

#pragma once

#include "s2c/parse_tree.hpp"
#include "s2c/result_table.hpp"
#include "s2c/triple_store.hpp"

namespace s2c {

/// Brute-force SPARQL-subset evaluation by direct definition: exhaustive
/// binding enumeration over the basic graph pattern, then OPTIONAL left
/// joins, FILTER, grouping, aggregates, HAVING, projection, DISTINCT,
/// ORDER BY and OFFSET/LIMIT. Serves as the oracle side of the differential
/// harness; no indexes, no shortcuts.
///
/// Throws EvalError on unbound projection variables or expressions outside
/// the evaluable subset.
ResultTable eval_sparql(const TripleStore& store, const ParseTree& tree);

}  // namespace s2c

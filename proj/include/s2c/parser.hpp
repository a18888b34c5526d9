#pragma once

#include <string>
#include <vector>

#include "s2c/parse_tree.hpp"
#include "s2c/token.hpp"

namespace s2c {

/// Parses a token stream into a parse tree for the supported SPARQL 1.1
/// subset (SELECT queries with BGPs, property paths `p1/p2`, inverse paths
/// `^p`, OPTIONAL, FILTER, GROUP BY, HAVING, ORDER BY, LIMIT, OFFSET,
/// DISTINCT, aggregates, SELECT *).
///
/// Throws SyntaxError for malformed input and UnsupportedError for
/// well-formed SPARQL outside the subset (nested SELECT, MINUS, NOT EXISTS,
/// UNION, ...), carrying the failure group for the classifier.
ParseTree parse_sparql(const std::vector<Token>& tokens);

/// Convenience wrapper: tokenize + parse.
ParseTree parse_sparql_text(const std::string& text);

}  // namespace s2c

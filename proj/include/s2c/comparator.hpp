#pragma once

#include <optional>
#include <string>

#include "s2c/result_table.hpp"

namespace s2c {

/// Result of comparing one SPARQL/Cypher output pair.
struct MatchOutcome {
    enum class Kind { Match, NumRes, Val, Exec } kind = Kind::Match;
    std::string detail;

    bool matched() const { return kind == Kind::Match; }
};

const char* match_outcome_name(MatchOutcome::Kind kind);

/// Float tolerance for value comparison.
inline constexpr double kFloatTolerance = 1e-6;

/// Canonical form for comparison: node references collapse to their URI
/// strings, null cells become 0, rows are sorted by canonical value order and
/// column names are replaced by positional ones. Idempotent.
ResultTable normalize(const ResultTable& table);

/// Compares two normalized tables cell by cell: numbers within 1e-6 are
/// equal; differing row counts win over differing values; two empty tables
/// always match.
MatchOutcome compare(const ResultTable& sparql_result, const ResultTable& cypher_result);

/// Cypher side failed to execute: the comparison is an execution mismatch.
MatchOutcome compare_with_error(const ResultTable& sparql_result, const std::string& cypher_error);

}  // namespace s2c

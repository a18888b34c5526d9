#include "s2c/comparator.hpp"

#include <algorithm>
#include <cmath>

namespace s2c {

const char* match_outcome_name(MatchOutcome::Kind kind) {
    switch (kind) {
        case MatchOutcome::Kind::Match: return "MATCH";
        case MatchOutcome::Kind::NumRes: return "NUM_RES";
        case MatchOutcome::Kind::Val: return "VAL";
        case MatchOutcome::Kind::Exec: return "N4j_EXEC";
    }
    return "";
}

namespace {

Value canonical_value(const Value& v) {
    if (const Iri* iri = std::get_if<Iri>(&v)) return iri->uri;  // node identity is its URI
    if (is_null(v)) return static_cast<std::int64_t>(0);         // 0 and null are equivalent
    return v;
}

bool cells_equal(const Value& a, const Value& b) {
    if (is_numeric(a) && is_numeric(b)) return std::fabs(as_double(a) - as_double(b)) <= kFloatTolerance;
    if (value_class(a) != value_class(b)) return false;
    return values_equal(a, b);
}

}  // namespace

ResultTable normalize(const ResultTable& table) {
    ResultTable out;
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out.columns.push_back("c" + std::to_string(i));
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::vector<Value> canon;
        canon.reserve(row.size());
        for (const Value& v : row) canon.push_back(canonical_value(v));
        out.rows.push_back(std::move(canon));
    }
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const std::vector<Value>& a, const std::vector<Value>& b) {
                         for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                             int cmp = compare_values(a[i], b[i]);
                             if (cmp != 0) return cmp < 0;
                         }
                         return a.size() < b.size();
                     });
    return out;
}

MatchOutcome compare(const ResultTable& sparql_result, const ResultTable& cypher_result) {
    ResultTable a = normalize(sparql_result);
    ResultTable b = normalize(cypher_result);

    if (a.rows.empty() && b.rows.empty()) return {MatchOutcome::Kind::Match, "both empty"};
    if (a.rows.size() != b.rows.size())
        return {MatchOutcome::Kind::NumRes,
                std::to_string(a.rows.size()) + " vs " + std::to_string(b.rows.size()) + " rows"};

    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        if (ra.size() != rb.size())
            return {MatchOutcome::Kind::Val, "row " + std::to_string(i) + ": arity differs"};
        for (std::size_t j = 0; j < ra.size(); ++j) {
            if (!cells_equal(ra[j], rb[j]))
                return {MatchOutcome::Kind::Val,
                        "row " + std::to_string(i) + ", column " + std::to_string(j) + ": " +
                            value_to_display(ra[j]) + " vs " + value_to_display(rb[j])};
        }
    }
    return {MatchOutcome::Kind::Match, ""};
}

MatchOutcome compare_with_error(const ResultTable& sparql_result, const std::string& cypher_error) {
    (void)sparql_result;
    return {MatchOutcome::Kind::Exec, cypher_error};
}

}  // namespace s2c

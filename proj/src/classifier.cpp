#include "s2c/classifier.hpp"

namespace s2c {

FailureCategory classify_error(const UnsupportedError& error) {
    return {error.kind, error.construct};
}

FailureCategory classify_error(const SyntaxError& error) {
    return {FailureKind::Syntax, error.what()};
}

FailureCategory classify_error(const LexError& error) {
    return {FailureKind::Syntax, error.what()};
}

FailureCategory classify_error(const Error& error) {
    if (const auto* e = dynamic_cast<const UnsupportedError*>(&error)) return classify_error(*e);
    if (const auto* e = dynamic_cast<const SyntaxError*>(&error)) return classify_error(*e);
    if (const auto* e = dynamic_cast<const LexError*>(&error)) return classify_error(*e);
    return {FailureKind::Other, error.what()};
}

namespace {

bool aggregate_is_count_star(const ParseTree& agg) {
    auto toks = agg.tokens();
    if (toks.empty() || to_upper(toks[0]->text) != "COUNT") return false;
    for (const Token* t : toks)
        if (t->is_op("*")) return true;
    return false;
}

bool contains_count_star(const ParseTree& node) {
    if (node.rule == "aggregate" && aggregate_is_count_star(node)) return true;
    for (const ParseTree* child : node.nodes())
        if (contains_count_star(*child)) return true;
    return false;
}

}  // namespace

std::optional<FailureCategory> classify_count_all(const ParseTree& tree) {
    const ParseTree* query = tree.first("selectQuery");
    if (!query) return std::nullopt;
    const ParseTree* select = query->first("selectClause");
    if (select && contains_count_star(*select))
        return FailureCategory{FailureKind::CountAll, "COUNT(*) aggregator in SELECT clause"};
    return std::nullopt;
}

}  // namespace s2c

#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "s2c/token.hpp"

namespace s2c {

/// Ordered syntax tree of a query: non-terminals are grammar rules, leaves are
/// tokens. Rule names mirror the SPARQL 1.1 production hierarchy for the
/// supported subset.
struct ParseTree {
    using Child = std::variant<std::unique_ptr<ParseTree>, Token>;

    std::string rule;
    std::vector<Child> children;

    explicit ParseTree(std::string rule_) : rule(std::move(rule_)) {}

    ParseTree* add_node(std::string rule_) {
        children.emplace_back(std::make_unique<ParseTree>(std::move(rule_)));
        return std::get<std::unique_ptr<ParseTree>>(children.back()).get();
    }

    void add_token(Token t) { children.emplace_back(std::move(t)); }

    /// Child subtrees in order (tokens skipped).
    std::vector<const ParseTree*> nodes() const {
        std::vector<const ParseTree*> out;
        for (const auto& c : children)
            if (const auto* n = std::get_if<std::unique_ptr<ParseTree>>(&c)) out.push_back(n->get());
        return out;
    }

    /// Child tokens in order (subtrees skipped).
    std::vector<const Token*> tokens() const {
        std::vector<const Token*> out;
        for (const auto& c : children)
            if (const auto* t = std::get_if<Token>(&c)) out.push_back(t);
        return out;
    }

    const ParseTree* first(const std::string& rule_name) const {
        for (const auto& c : children)
            if (const auto* n = std::get_if<std::unique_ptr<ParseTree>>(&c))
                if ((*n)->rule == rule_name) return n->get();
        return nullptr;
    }

    std::vector<const ParseTree*> all(const std::string& rule_name) const {
        std::vector<const ParseTree*> out;
        for (const auto& c : children)
            if (const auto* n = std::get_if<std::unique_ptr<ParseTree>>(&c))
                if ((*n)->rule == rule_name) out.push_back(n->get());
        return out;
    }

    /// In-order leaf tokens of the whole subtree, Eof excluded.
    void collect_leaves(std::vector<Token>& out) const {
        for (const auto& c : children) {
            if (const auto* t = std::get_if<Token>(&c)) {
                if (t->kind != TokenKind::Eof) out.push_back(*t);
            } else {
                std::get<std::unique_ptr<ParseTree>>(c)->collect_leaves(out);
            }
        }
    }

    std::vector<Token> leaves() const {
        std::vector<Token> out;
        collect_leaves(out);
        return out;
    }

    /// Leaf texts joined by single spaces; re-lexing this string yields the
    /// original token stream (round-trip modulo whitespace and comments).
    std::string leaf_text() const {
        std::string out;
        for (const Token& t : leaves()) {
            if (!out.empty()) out += ' ';
            out += t.text;
        }
        return out;
    }
};

}  // namespace s2c

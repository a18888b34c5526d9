#pragma once

#include <optional>
#include <string>
#include <vector>

#include "s2c/ast.hpp"
#include "s2c/parse_tree.hpp"
#include "s2c/prefixes.hpp"

namespace s2c {

/// A WHERE-block triple in document order. Predicates are kept as prefixed
/// names; `path` holds one entry per '/'-separated segment.
struct TriplePattern {
    enum class TermKind { Var, Name, Literal };
    struct Term {
        TermKind kind = TermKind::Var;
        Token token;
    };

    Term subject;
    bool is_type = false;           // predicate was `a` or rdf:type
    std::vector<std::string> path;  // prefixed-name segments
    bool inverse = false;
    Term object;
    bool optional = false;          // triple came from an OPTIONAL block
    bool consumed = false;          // claimed by the first pass
};

/// Walks a parse tree and populates the AST containers: two-pass WHERE
/// analysis, constraint categorisation, projection and solution modifiers.
class AstBuilder {
public:
    enum class ConstraintContext { Filter, Having };

    AstBuilder(PrefixMap prefixes, ExplicitRels explicit_rels, NamingOptions naming = {});

    /// Full pipeline over a parsed query.
    Ast build(const ParseTree& tree);

    // Individual passes, exposed for targeted tests. All operate on ast_.
    std::vector<TriplePattern> extract_triples(const ParseTree& where_clause);
    void find_labelled_nodes(std::vector<TriplePattern>& triples);
    void categorise_triples(std::vector<TriplePattern>& triples);
    void visit_constraint(const ParseTree& constraint, ConstraintContext context);
    void visit_select(const ParseTree& select_clause);
    std::string visit_group_condition(const ParseTree& condition);
    void visit_order_condition(const ParseTree& condition);
    void visit_limit(long long n) { ast_.limit = n; }
    void visit_offset(long long n) { ast_.skip = n; }

    /// Cleans a variable token ('?'/'$' stripped), registers it, and inside an
    /// aggregate resolves it to its namespaced node property when one exists.
    std::string visit_var(const std::string& raw, bool in_aggregate);

    /// Registers an aggregate expression under `alias` (or the next implicit
    /// `agg__N` alias) in the WITH and aggregate containers; returns the alias.
    /// An unaliased expression that is already registered reuses its alias.
    std::string visit_aggregate(const std::string& expr, const std::optional<std::string>& alias);

    Ast& ast() { return ast_; }
    const PrefixMap& prefixes() const { return prefixes_; }

private:
    struct RenderCtx {
        bool namespaced = false;         // resolve vars through props
        bool aggregate_to_alias = true;  // replace aggregate calls by their alias
    };

    std::string render(const ParseTree& node, const RenderCtx& ctx);
    std::string render_children(const ParseTree& node, const RenderCtx& ctx,
                                const std::string& joiner);
    std::string render_aggregate_expr(const ParseTree& agg);
    std::string clean_var(const std::string& raw) const;
    std::string term_key(const TriplePattern::Term& term) const;
    std::string path_pg(const std::vector<std::string>& path, bool with_colons) const;
    ConstraintTerm constraint_to_term(const ParseTree& expr, ConstraintContext context);

    PrefixMap prefixes_;
    ExplicitRels explicit_rels_;
    NamingOptions naming_;
    Ast ast_;
};

/// Orchestrated translation front half: prefixes resolved from the tree, then
/// the visitor fills every container.
Ast build_ast(const ParseTree& tree, const ExplicitRels& explicit_rels,
              const NamingOptions& naming = {});

/// Canonical literal text: strings single-quoted with escapes normalized,
/// numbers verbatim, booleans lowercase.
std::string canonical_literal(const Token& token);

}  // namespace s2c

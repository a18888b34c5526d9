#include "s2c/parser.hpp"

#include <set>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

const std::set<std::string> kAggregates = {"COUNT", "SUM", "AVG", "MIN", "MAX"};

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    ParseTree parse() {
        ParseTree root("queryUnit");
        parse_prologue(root);
        if (cur().is_keyword("SELECT")) {
            parse_select_query(root);
        } else if (cur().is_keyword("CONSTRUCT") || cur().is_keyword("ASK") ||
                   cur().is_keyword("DESCRIBE")) {
            throw UnsupportedError(FailureKind::Other, to_upper(cur().text) + " query form",
                                   "only SELECT queries are supported");
        } else {
            fail("SELECT");
        }
        if (!cur().is(TokenKind::Eof)) fail("end of query");
        root.add_token(eat());
        return root;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n = 1) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    Token eat() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& expected) const {
        throw SyntaxError(expected, cur().is(TokenKind::Eof) ? "<eof>" : cur().text, cur().line,
                          cur().col);
    }

    Token expect_punct(const char* p) {
        if (!cur().is_punct(p)) fail(std::string("'") + p + "'");
        return eat();
    }

    Token expect_keyword(const char* kw) {
        if (!cur().is_keyword(kw)) fail(kw);
        return eat();
    }

    // ---- prologue ----------------------------------------------------------

    void parse_prologue(ParseTree& root) {
        if (!cur().is_keyword("PREFIX") && !cur().is_keyword("BASE")) return;
        ParseTree* prologue = root.add_node("prologue");
        while (cur().is_keyword("PREFIX") || cur().is_keyword("BASE")) {
            if (cur().is_keyword("BASE"))
                throw UnsupportedError(FailureKind::Other, "BASE declaration",
                                       "base IRIs are not supported");
            ParseTree* decl = prologue->add_node("prefixDecl");
            decl->add_token(eat());
            if (!cur().is(TokenKind::PrefixedName) || cur().text.back() != ':')
                fail("prefix label ending in ':'");
            decl->add_token(eat());
            if (!cur().is(TokenKind::Iri)) fail("IRI");
            decl->add_token(eat());
        }
    }

    // ---- select query ------------------------------------------------------

    void parse_select_query(ParseTree& root) {
        ParseTree* q = root.add_node("selectQuery");
        parse_select_clause(*q);
        parse_where_clause(*q);
        parse_solution_modifier(*q);
    }

    void parse_select_clause(ParseTree& q) {
        ParseTree* sel = q.add_node("selectClause");
        sel->add_token(expect_keyword("SELECT"));
        in_select_ = true;
        if (cur().is_keyword("DISTINCT") || cur().is_keyword("REDUCED")) sel->add_token(eat());
        bool any = false;
        for (;;) {
            if (cur().is_op("*")) {
                sel->add_token(eat());
                any = true;
                continue;
            }
            if (cur().is(TokenKind::Variable)) {
                ParseTree* v = sel->add_node("var");
                v->add_token(eat());
                any = true;
                continue;
            }
            if (cur().is_punct("(")) {
                parse_select_expression(*sel);
                any = true;
                continue;
            }
            if (cur().is(TokenKind::Keyword) && kAggregates.count(to_upper(cur().text))) {
                // bare aggregate, optionally aliased without enclosing parens
                ParseTree* item = sel->add_node("selectExpression");
                parse_aggregate(*item);
                if (cur().is_keyword("AS")) {
                    item->add_token(eat());
                    if (!cur().is(TokenKind::Variable)) fail("variable after AS");
                    ParseTree* v = item->add_node("var");
                    v->add_token(eat());
                }
                any = true;
                continue;
            }
            break;
        }
        if (!any) fail("projection variable, expression or '*'");
        in_select_ = false;
    }

    /// '(' expression (AS var)? ')'
    void parse_select_expression(ParseTree& sel) {
        ParseTree* item = sel.add_node("selectExpression");
        item->add_token(expect_punct("("));
        parse_expression(*item);
        if (cur().is_keyword("AS")) {
            item->add_token(eat());
            if (!cur().is(TokenKind::Variable)) fail("variable after AS");
            ParseTree* v = item->add_node("var");
            v->add_token(eat());
        }
        item->add_token(expect_punct(")"));
    }

    // ---- where clause ------------------------------------------------------

    void parse_where_clause(ParseTree& q) {
        ParseTree* wc = q.add_node("whereClause");
        if (cur().is_keyword("WHERE")) wc->add_token(eat());
        parse_group_graph_pattern(*wc, /*allow_subpatterns=*/true);
    }

    void parse_group_graph_pattern(ParseTree& parent, bool allow_subpatterns) {
        ParseTree* group = parent.add_node("groupGraphPattern");
        group->add_token(expect_punct("{"));
        ParseTree* block = nullptr;
        while (!cur().is_punct("}")) {
            if (cur().is(TokenKind::Eof)) fail("'}'");
            if (cur().is_punct("{")) {
                if (peek().is_keyword("SELECT"))
                    throw UnsupportedError(FailureKind::Ns2, "nested SELECT",
                                           "sub-queries are not supported");
                throw UnsupportedError(FailureKind::Other, "nested group pattern",
                                       "bare group patterns are not supported");
            }
            if (cur().is_keyword("MINUS"))
                throw UnsupportedError(FailureKind::Ns2, "MINUS", "MINUS is not supported");
            if (cur().is_keyword("UNION"))
                throw UnsupportedError(FailureKind::Other, "UNION", "UNION is not supported");
            if (cur().is_keyword("VALUES") || cur().is_keyword("BIND") ||
                cur().is_keyword("SERVICE") || cur().is_keyword("GRAPH"))
                throw UnsupportedError(FailureKind::Other, to_upper(cur().text),
                                       "construct is not supported");
            if (cur().is_keyword("OPTIONAL")) {
                if (!allow_subpatterns)
                    throw UnsupportedError(FailureKind::Other, "nested OPTIONAL",
                                           "OPTIONAL inside OPTIONAL is not supported");
                block = nullptr;
                ParseTree* opt = group->add_node("optionalGraphPattern");
                opt->add_token(eat());
                parse_group_graph_pattern(*opt, /*allow_subpatterns=*/false);
                continue;
            }
            if (cur().is_keyword("FILTER")) {
                if (!allow_subpatterns)
                    throw UnsupportedError(FailureKind::Other, "FILTER inside OPTIONAL",
                                           "filters inside OPTIONAL are not supported");
                block = nullptr;
                ParseTree* f = group->add_node("filter");
                f->add_token(eat());
                parse_constraint(*f);
                continue;
            }
            if (!block) block = group->add_node("triplesBlock");
            parse_triple(*block);
            if (cur().is_punct(".")) block->add_token(eat());
        }
        group->add_token(expect_punct("}"));
    }

    /// One subject with its predicate-object list: `s p o (, o)* (; p o...)*`.
    void parse_triple(ParseTree& block) {
        ParseTree* triple = block.add_node("triple");
        parse_var_or_term(*triple, /*allow_literal=*/false);
        for (;;) {
            parse_path(*triple);
            parse_var_or_term(*triple, /*allow_literal=*/true);
            while (cur().is_punct(",")) {
                triple->add_token(eat());
                parse_var_or_term(*triple, /*allow_literal=*/true);
            }
            if (cur().is_punct(";")) {
                triple->add_token(eat());
                continue;
            }
            break;
        }
    }

    void parse_var_or_term(ParseTree& triple, bool allow_literal) {
        if (cur().is(TokenKind::Variable)) {
            ParseTree* v = triple.add_node("var");
            v->add_token(eat());
            return;
        }
        if (cur().is(TokenKind::PrefixedName)) {
            ParseTree* t = triple.add_node("iri");
            t->add_token(eat());
            return;
        }
        if (allow_literal &&
            (cur().is(TokenKind::LiteralString) || cur().is(TokenKind::LiteralNumber) ||
             cur().is_keyword("TRUE") || cur().is_keyword("FALSE"))) {
            ParseTree* t = triple.add_node("rdfLiteral");
            t->add_token(eat());
            return;
        }
        if (cur().is(TokenKind::Iri))
            throw UnsupportedError(FailureKind::Other, "full IRI term",
                                   "use prefixed names in graph patterns");
        fail(allow_literal ? "variable, prefixed name or literal" : "variable or prefixed name");
    }

    /// `a` | pathEltOrInverse ('/' pathEltOrInverse)*
    void parse_path(ParseTree& triple) {
        ParseTree* path = triple.add_node("path");
        if (cur().is(TokenKind::Keyword) && cur().text == "a") {
            path->add_token(eat());
            return;
        }
        parse_path_elt(*path);
        while (cur().is_op("/")) {
            path->add_token(eat());
            parse_path_elt(*path);
        }
        if (cur().is_op("*") || cur().is_op("+"))
            throw UnsupportedError(FailureKind::Other, "property path operator '" + cur().text + "'",
                                   "only '/' and '^' path operators are supported");
    }

    void parse_path_elt(ParseTree& path) {
        ParseTree* elt = path.add_node("pathElt");
        if (cur().is_op("^")) elt->add_token(eat());
        if (cur().is(TokenKind::Variable))
            throw UnsupportedError(FailureKind::Other, "variable predicate",
                                   "predicates must be named");
        if (!cur().is(TokenKind::PrefixedName)) fail("prefixed name predicate");
        elt->add_token(eat());
    }

    // ---- constraints and expressions ----------------------------------------

    void parse_constraint(ParseTree& parent) {
        ParseTree* c = parent.add_node("constraint");
        if (cur().is_punct("(")) {
            ParseTree* br = c->add_node("brackettedExpression");
            br->add_token(eat());
            parse_expression(*br);
            br->add_token(expect_punct(")"));
            return;
        }
        // Bare `?x IN (...)` style constraints are accepted leniently.
        if (cur().is(TokenKind::Variable)) {
            parse_expression(*c);
            return;
        }
        if (cur().is(TokenKind::Keyword)) {
            if (to_upper(cur().text) == "NOT" && peek().is_keyword("EXISTS"))
                throw UnsupportedError(FailureKind::Ns1, "NOT EXISTS",
                                       "existence constraints are not supported");
            if (cur().is_keyword("EXISTS"))
                throw UnsupportedError(FailureKind::Ns1, "EXISTS",
                                       "existence constraints are not supported");
            parse_call_like(*c);
            return;
        }
        fail("bracketted expression or function call");
    }

    void parse_expression(ParseTree& parent) { parse_or_expression(parent); }

    void parse_or_expression(ParseTree& parent) {
        ParseTree scratch("conditionalOrExpression");
        parse_and_expression(scratch);
        if (!cur().is_op("||")) {
            adopt_single(parent, scratch);
            return;
        }
        ParseTree* node = parent.add_node("conditionalOrExpression");
        move_children(*node, scratch);
        while (cur().is_op("||")) {
            node->add_token(eat());
            parse_and_expression(*node);
        }
    }

    void parse_and_expression(ParseTree& parent) {
        ParseTree scratch("conditionalAndExpression");
        parse_relational_expression(scratch);
        if (!cur().is_op("&&")) {
            adopt_single(parent, scratch);
            return;
        }
        ParseTree* node = parent.add_node("conditionalAndExpression");
        move_children(*node, scratch);
        while (cur().is_op("&&")) {
            node->add_token(eat());
            parse_relational_expression(*node);
        }
    }

    void parse_relational_expression(ParseTree& parent) {
        ParseTree scratch("relationalExpression");
        parse_additive_expression(scratch);
        bool has_op = cur().is_op("=") || cur().is_op("!=") || cur().is_op("<") ||
                      cur().is_op(">") || cur().is_op("<=") || cur().is_op(">=");
        bool has_in = cur().is_keyword("IN") || (cur().is_keyword("NOT") && peek().is_keyword("IN"));
        if (!has_op && !has_in) {
            adopt_single(parent, scratch);
            return;
        }
        ParseTree* node = parent.add_node("relationalExpression");
        move_children(*node, scratch);
        if (has_op) {
            node->add_token(eat());
            parse_additive_expression(*node);
            return;
        }
        if (cur().is_keyword("NOT")) node->add_token(eat());
        node->add_token(eat());  // IN
        parse_expression_list(*node);
    }

    void parse_expression_list(ParseTree& node) {
        ParseTree* list = node.add_node("expressionList");
        list->add_token(expect_punct("("));
        if (cur().is_keyword("SELECT"))
            throw UnsupportedError(FailureKind::Ns1, "IN over sub-select",
                                   "IN is supported only over literal lists");
        if (!cur().is_punct(")")) {
            parse_expression(*list);
            while (cur().is_punct(",")) {
                list->add_token(eat());
                parse_expression(*list);
            }
        }
        list->add_token(expect_punct(")"));
    }

    void parse_additive_expression(ParseTree& parent) {
        ParseTree scratch("additiveExpression");
        parse_multiplicative_expression(scratch);
        if (!cur().is_op("+") && !cur().is_op("-")) {
            adopt_single(parent, scratch);
            return;
        }
        ParseTree* node = parent.add_node("additiveExpression");
        move_children(*node, scratch);
        while (cur().is_op("+") || cur().is_op("-")) {
            node->add_token(eat());
            parse_multiplicative_expression(*node);
        }
    }

    void parse_multiplicative_expression(ParseTree& parent) {
        ParseTree scratch("multiplicativeExpression");
        parse_unary_expression(scratch);
        if (!cur().is_op("*") && !cur().is_op("/")) {
            adopt_single(parent, scratch);
            return;
        }
        ParseTree* node = parent.add_node("multiplicativeExpression");
        move_children(*node, scratch);
        while (cur().is_op("*") || cur().is_op("/")) {
            node->add_token(eat());
            parse_unary_expression(*node);
        }
    }

    void parse_unary_expression(ParseTree& parent) {
        if (cur().is_op("!") || cur().is_op("-") || cur().is_op("+")) {
            ParseTree* node = parent.add_node("unaryExpression");
            node->add_token(eat());
            parse_primary_expression(*node);
            return;
        }
        parse_primary_expression(parent);
    }

    void parse_primary_expression(ParseTree& parent) {
        if (cur().is_punct("(")) {
            ParseTree* br = parent.add_node("brackettedExpression");
            br->add_token(eat());
            parse_expression(*br);
            br->add_token(expect_punct(")"));
            return;
        }
        if (cur().is(TokenKind::Variable)) {
            ParseTree* v = parent.add_node("var");
            v->add_token(eat());
            return;
        }
        if (cur().is(TokenKind::LiteralString) || cur().is(TokenKind::LiteralNumber)) {
            ParseTree* lit = parent.add_node("rdfLiteral");
            lit->add_token(eat());
            return;
        }
        if (cur().is(TokenKind::PrefixedName)) {
            ParseTree* t = parent.add_node("iri");
            t->add_token(eat());
            return;
        }
        if (cur().is(TokenKind::Keyword)) {
            std::string kw = to_upper(cur().text);
            if (kw == "NOT" && peek().is_keyword("EXISTS"))
                throw UnsupportedError(FailureKind::Ns1, "NOT EXISTS",
                                       "existence constraints are not supported");
            if (kw == "EXISTS")
                throw UnsupportedError(FailureKind::Ns1, "EXISTS",
                                       "existence constraints are not supported");
            if (kw == "TRUE" || kw == "FALSE") {
                ParseTree* lit = parent.add_node("rdfLiteral");
                lit->add_token(eat());
                return;
            }
            parse_call_like(parent);
            return;
        }
        fail("expression");
    }

    /// Aggregate, builtin or generic function call: KEYWORD '(' args ')'.
    void parse_call_like(ParseTree& parent) {
        std::string kw = to_upper(cur().text);
        if (kAggregates.count(kw)) {
            parse_aggregate(parent);
            return;
        }
        ParseTree* call = parent.add_node(kw == "CONTAINS" ? "builtInCall" : "functionCall");
        call->add_token(eat());
        call->add_token(expect_punct("("));
        if (!cur().is_punct(")")) {
            parse_expression(*call);
            while (cur().is_punct(",")) {
                call->add_token(eat());
                parse_expression(*call);
            }
        }
        call->add_token(expect_punct(")"));
    }

    void parse_aggregate(ParseTree& parent) {
        ParseTree* agg = parent.add_node("aggregate");
        std::string kw = to_upper(cur().text);
        agg->add_token(eat());
        agg->add_token(expect_punct("("));
        if (cur().is_op("*")) {
            if (kw != "COUNT") fail("expression");
            if (!in_select_)
                throw UnsupportedError(FailureKind::Ns2, "COUNT(*) outside of projection",
                                       "COUNT(*) is supported only in the SELECT clause");
            agg->add_token(eat());
        } else {
            if (cur().is_keyword("DISTINCT"))
                throw UnsupportedError(FailureKind::Other, "DISTINCT inside aggregate",
                                       "set aggregates are not supported");
            parse_expression(*agg);
        }
        agg->add_token(expect_punct(")"));
    }

    // ---- solution modifiers --------------------------------------------------

    void parse_solution_modifier(ParseTree& q) {
        if (cur().is_keyword("GROUP")) {
            ParseTree* g = q.add_node("groupClause");
            g->add_token(eat());
            g->add_token(expect_keyword("BY"));
            int n = 0;
            while (parse_group_condition(*g)) ++n;
            if (n == 0) fail("group condition");
        }
        if (cur().is_keyword("HAVING")) {
            ParseTree* h = q.add_node("havingClause");
            h->add_token(eat());
            int n = 0;
            while (cur().is_punct("(") || (cur().is(TokenKind::Keyword) && !at_modifier_keyword())) {
                parse_constraint(*h);
                ++n;
            }
            if (n == 0) fail("having condition");
        }
        if (cur().is_keyword("ORDER")) {
            ParseTree* o = q.add_node("orderClause");
            o->add_token(eat());
            o->add_token(expect_keyword("BY"));
            int n = 0;
            while (parse_order_condition(*o)) ++n;
            if (n == 0) fail("order condition");
        }
        bool saw_limit = false, saw_offset = false;
        while (cur().is_keyword("LIMIT") || cur().is_keyword("OFFSET")) {
            bool is_limit = cur().is_keyword("LIMIT");
            if ((is_limit && saw_limit) || (!is_limit && saw_offset)) fail("end of query");
            ParseTree* node = q.add_node(is_limit ? "limitClause" : "offsetClause");
            node->add_token(eat());
            if (!cur().is(TokenKind::LiteralNumber) || cur().text.find('.') != std::string::npos)
                fail("non-negative integer");
            node->add_token(eat());
            (is_limit ? saw_limit : saw_offset) = true;
        }
    }

    bool at_modifier_keyword() const {
        return cur().is_keyword("GROUP") || cur().is_keyword("HAVING") ||
               cur().is_keyword("ORDER") || cur().is_keyword("LIMIT") ||
               cur().is_keyword("OFFSET");
    }

    bool parse_group_condition(ParseTree& g) {
        if (cur().is(TokenKind::Variable)) {
            ParseTree* c = g.add_node("groupCondition");
            ParseTree* v = c->add_node("var");
            v->add_token(eat());
            return true;
        }
        if (cur().is_punct("(")) {
            ParseTree* c = g.add_node("groupCondition");
            c->add_token(eat());
            parse_expression(*c);
            if (cur().is_keyword("AS")) {
                c->add_token(eat());
                if (!cur().is(TokenKind::Variable)) fail("variable after AS");
                ParseTree* v = c->add_node("var");
                v->add_token(eat());
            }
            c->add_token(expect_punct(")"));
            return true;
        }
        if (cur().is(TokenKind::Keyword) && !at_modifier_keyword()) {
            ParseTree* c = g.add_node("groupCondition");
            parse_call_like(*c);
            return true;
        }
        return false;
    }

    bool parse_order_condition(ParseTree& o) {
        if (cur().is_keyword("ASC") || cur().is_keyword("DESC")) {
            ParseTree* c = o.add_node("orderCondition");
            c->add_token(eat());
            ParseTree* br = c->add_node("brackettedExpression");
            br->add_token(expect_punct("("));
            parse_expression(*br);
            br->add_token(expect_punct(")"));
            return true;
        }
        if (cur().is(TokenKind::Variable)) {
            ParseTree* c = o.add_node("orderCondition");
            ParseTree* v = c->add_node("var");
            v->add_token(eat());
            return true;
        }
        if (cur().is_punct("(")) {
            ParseTree* c = o.add_node("orderCondition");
            ParseTree* br = c->add_node("brackettedExpression");
            br->add_token(eat());
            parse_expression(*br);
            br->add_token(expect_punct(")"));
            return true;
        }
        if (cur().is(TokenKind::Keyword) && !at_modifier_keyword()) {
            ParseTree* c = o.add_node("orderCondition");
            parse_call_like(*c);
            return true;
        }
        return false;
    }

    /// Moves all children of `from` into a fresh node under `parent`, or, when
    /// `from` holds exactly one subtree, splices that subtree directly.
    static void adopt_single(ParseTree& parent, ParseTree& scratch) {
        for (auto& c : scratch.children) parent.children.push_back(std::move(c));
    }

    static void move_children(ParseTree& node, ParseTree& scratch) {
        for (auto& c : scratch.children) node.children.push_back(std::move(c));
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    bool in_select_ = false;
};

}  // namespace

ParseTree parse_sparql(const std::vector<Token>& tokens) {
    if (tokens.empty() || tokens[0].is(TokenKind::Eof))
        throw SyntaxError("SELECT", "<eof>", 1, 1);
    return Parser(tokens).parse();
}

ParseTree parse_sparql_text(const std::string& text) { return parse_sparql(tokenize(text)); }

const char* failure_kind_name(FailureKind kind) {
    switch (kind) {
        case FailureKind::CountAll: return "COUNT_ALL";
        case FailureKind::Ns2: return "NS2";
        case FailureKind::Ns1: return "NS1";
        case FailureKind::Other: return "OTHER";
        case FailureKind::Syntax: return "SYNTAX";
    }
    return "OTHER";
}

}  // namespace s2c

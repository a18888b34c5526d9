#include "s2c/ast_builder.hpp"

#include <algorithm>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

bool subtree_has_rule(const ParseTree& node, const std::string& rule) {
    if (node.rule == rule) return true;
    for (const ParseTree* child : node.nodes())
        if (subtree_has_rule(*child, rule)) return true;
    return false;
}

/// constraint → its payload; one redundant outer bracket level is dropped.
const ParseTree& unwrap_constraint(const ParseTree& constraint) {
    const ParseTree& payload =
        constraint.rule == "constraint" && constraint.nodes().size() == 1 ? *constraint.nodes()[0]
                                                                          : constraint;
    if (payload.rule == "brackettedExpression" && payload.nodes().size() == 1)
        return *payload.nodes()[0];
    return payload;
}

std::string unescape_string_token(const std::string& text) {
    // text includes the surrounding quotes
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        char c = text[i];
        if (c == '\\' && i + 2 < text.size()) {
            char next = text[++i];
            switch (next) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += next; break;
            }
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::string canonical_literal(const Token& token) {
    if (token.kind == TokenKind::LiteralString) {
        std::string content = unescape_string_token(token.text);
        std::string out = "'";
        for (char c : content) {
            if (c == '\\') out += "\\\\";
            else if (c == '\'') out += "\\'";
            else out += c;
        }
        out += "'";
        return out;
    }
    if (token.kind == TokenKind::Keyword) return to_upper(token.text) == "TRUE" ? "true" : "false";
    return token.text;
}

AstBuilder::AstBuilder(PrefixMap prefixes, ExplicitRels explicit_rels, NamingOptions naming)
    : prefixes_(std::move(prefixes)), explicit_rels_(std::move(explicit_rels)),
      naming_(std::move(naming)), ast_(init_ast()) {}

std::string AstBuilder::clean_var(const std::string& raw) const {
    std::string out;
    for (char c : raw)
        if (c != '?' && c != '$' && c != ' ') out += c;
    return out;
}

std::string AstBuilder::visit_var(const std::string& raw, bool in_aggregate) {
    std::string name = clean_var(raw);
    ast_.add_var(name);
    if (in_aggregate) {
        if (const std::string* prop = ast_.props.find(name)) return *prop;
    }
    return name;
}

std::string AstBuilder::visit_aggregate(const std::string& expr,
                                        const std::optional<std::string>& alias) {
    std::string name;
    if (alias) {
        name = *alias;
        if (const std::string* existing = ast_.aggregates.find(name); existing && *existing != expr)
            throw ConflictError("alias '" + name + "' already bound to " + *existing);
    } else {
        for (const auto& [a, e] : ast_.aggregates)
            if (e == expr) return a;
        // implicit aliases stay densely indexed from zero regardless of how
        // many explicit aliases are registered
        std::size_t implicit = 0;
        for (const auto& [a, e] : ast_.aggregates) {
            (void)e;
            if (a.rfind("agg__", 0) == 0) ++implicit;
        }
        name = "agg__" + std::to_string(implicit);
    }
    ast_.with_items.set(name, expr + " AS " + name);
    ast_.aggregates.set(name, expr);
    return name;
}

// ---- WHERE block ------------------------------------------------------------

std::string AstBuilder::term_key(const TriplePattern::Term& term) const {
    if (term.kind == TriplePattern::TermKind::Var) return clean_var(term.token.text);
    if (term.kind == TriplePattern::TermKind::Name)
        return pg_name(term.token.text, prefixes_, naming_);
    return canonical_literal(term.token);
}

std::string AstBuilder::path_pg(const std::vector<std::string>& path, bool with_colons) const {
    std::string out;
    for (const std::string& seg : path) {
        if (!out.empty()) out += '/';
        if (with_colons) out += ':';
        out += seg == "a" || seg == "rdf:type" ? "rdf__type" : pg_name(seg, prefixes_, naming_);
    }
    return out;
}

std::vector<TriplePattern> AstBuilder::extract_triples(const ParseTree& where_clause) {
    std::vector<TriplePattern> out;

    auto term_of = [](const ParseTree& node) {
        TriplePattern::Term t;
        const Token& tok = *node.tokens()[0];
        t.token = tok;
        t.kind = node.rule == "var"          ? TriplePattern::TermKind::Var
                 : node.rule == "iri"        ? TriplePattern::TermKind::Name
                                             : TriplePattern::TermKind::Literal;
        return t;
    };

    auto walk_triple = [&](const ParseTree& triple, bool optional) {
        // children: subject-term, then (path, object (',' object)*)+ with ';' tokens
        auto nodes = triple.nodes();
        if (nodes.empty()) return;
        TriplePattern::Term subject = term_of(*nodes[0]);
        if (subject.kind == TriplePattern::TermKind::Var)
            ast_.add_var(clean_var(subject.token.text));
        std::size_t i = 1;
        while (i < nodes.size()) {
            const ParseTree& path_node = *nodes[i++];
            TriplePattern base;
            base.subject = subject;
            base.optional = optional;
            auto path_tokens = path_node.tokens();
            if (path_tokens.size() == 1 && path_tokens[0]->kind == TokenKind::Keyword) {
                base.is_type = true;  // `a`
            } else {
                for (const ParseTree* elt : path_node.all("pathElt")) {
                    auto toks = elt->tokens();
                    if (toks.size() == 2) base.inverse = true;  // leading '^'
                    base.path.push_back(toks.back()->text);
                }
                if (base.inverse && base.path.size() > 1)
                    throw UnsupportedError(FailureKind::Other, "inverse inside path sequence",
                                           "'^' is supported on single predicates only");
                if (base.path.size() == 1 && base.path[0] == "rdf:type") base.is_type = true;
            }
            // one or more objects for this predicate
            while (i < nodes.size() && nodes[i]->rule != "path") {
                TriplePattern tp = base;
                tp.object = term_of(*nodes[i++]);
                if (tp.object.kind == TriplePattern::TermKind::Var)
                    ast_.add_var(clean_var(tp.object.token.text));
                out.push_back(std::move(tp));
            }
        }
    };

    auto walk_group = [&](const ParseTree& group, bool optional, auto&& self) -> void {
        for (const ParseTree* child : group.nodes()) {
            if (child->rule == "triplesBlock") {
                for (const ParseTree* triple : child->all("triple")) walk_triple(*triple, optional);
            } else if (child->rule == "optionalGraphPattern") {
                if (const ParseTree* inner = child->first("groupGraphPattern"))
                    self(*inner, true, self);
            }
        }
    };

    if (const ParseTree* group = where_clause.first("groupGraphPattern"))
        walk_group(*group, false, walk_group);
    return out;
}

void AstBuilder::find_labelled_nodes(std::vector<TriplePattern>& triples) {
    for (TriplePattern& t : triples) {
        if (!t.is_type) continue;
        if (t.object.kind != TriplePattern::TermKind::Name) continue;  // variable class, pass 2
        std::string subject = term_key(t.subject);
        std::string label = pg_name(t.object.token.text, prefixes_, naming_);
        bool fresh = !ast_.nodes.contains(subject);
        NodeEntry& node = ast_.nodes[subject];
        if (node.label && *node.label != label)
            throw ConflictError("node '" + subject + "' labelled both '" + *node.label +
                                "' and '" + label + "'");
        node.label = label;
        if (fresh) node.optional_only = t.optional;
        else if (!t.optional) node.optional_only = false;
        t.consumed = true;
    }
}

void AstBuilder::categorise_triples(std::vector<TriplePattern>& triples) {
    for (TriplePattern& t : triples) {
        if (t.consumed) continue;
        t.consumed = true;
        std::string subject = term_key(t.subject);
        bool object_is_var = t.object.kind == TriplePattern::TermKind::Var;
        std::string object = object_is_var ? clean_var(t.object.token.text) : "";

        bool forced = object_is_var && t.path.size() == 1 && explicit_rels_.contains(t.path[0]);
        bool both_nodes =
            object_is_var && ast_.nodes.contains(subject) && ast_.nodes.contains(object);

        if (both_nodes || forced) {
            // explicit-rel endpoints may be missing from nodes; record them unlabelled
            for (const std::string& endpoint : {subject, object}) {
                bool fresh = !ast_.nodes.contains(endpoint);
                NodeEntry& node = ast_.nodes[endpoint];
                if (fresh) node.optional_only = t.optional;
                else if (!t.optional) node.optional_only = false;
            }
            RelEntry rel;
            rel.subject = subject;
            rel.object = object;
            rel.path = path_pg(t.path, /*with_colons=*/true);
            rel.optional = t.optional;
            rel.inverse = t.inverse;
            std::string seg;
            for (char c : rel.path + "/") {
                if (c == '/') {
                    if (!seg.empty() &&
                        std::find(ast_.rel_types.begin(), ast_.rel_types.end(), seg) ==
                            ast_.rel_types.end())
                        ast_.rel_types.push_back(seg);
                    seg.clear();
                } else {
                    seg += c;
                }
            }
            ast_.rels.push_back(std::move(rel));
        } else if (!object_is_var) {
            std::string prop = t.is_type ? "rdf__type" : path_pg(t.path, false);
            bool fresh = !ast_.nodes.contains(subject);
            NodeEntry& node = ast_.nodes[subject];
            if (fresh) node.optional_only = t.optional;
            else if (!t.optional) node.optional_only = false;
            node.constraints.set(prop, canonical_literal(t.object.token));
        } else {
            std::string prop = t.is_type ? "rdf__type" : path_pg(t.path, false);
            ast_.props.set(object, subject + "." + prop);
        }
    }
}

// ---- expression rendering ----------------------------------------------------

std::string AstBuilder::render_children(const ParseTree& node, const RenderCtx& ctx,
                                        const std::string& joiner) {
    std::string out;
    for (const ParseTree* child : node.nodes()) {
        if (!out.empty()) out += joiner;
        out += render(*child, ctx);
    }
    return out;
}

std::string AstBuilder::render_aggregate_expr(const ParseTree& agg) {
    std::string fn = to_upper(agg.tokens()[0]->text);
    auto args = agg.nodes();
    if (args.empty()) return fn + "(*)";
    RenderCtx inner{/*namespaced=*/true, /*aggregate_to_alias=*/false};
    return fn + "(" + render(*args[0], inner) + ")";
}

std::string AstBuilder::render(const ParseTree& node, const RenderCtx& ctx) {
    const std::string& rule = node.rule;
    if (rule == "var") {
        std::string name = visit_var(node.tokens()[0]->text, false);
        if (ctx.namespaced)
            if (const std::string* prop = ast_.props.find(name)) return *prop;
        return name;
    }
    if (rule == "rdfLiteral") return canonical_literal(*node.tokens()[0]);
    if (rule == "iri") return node.tokens()[0]->text;
    if (rule == "brackettedExpression") return "(" + render_children(node, ctx, " ") + ")";
    if (rule == "aggregate") {
        std::string expr = render_aggregate_expr(node);
        if (ctx.aggregate_to_alias) return visit_aggregate(expr, std::nullopt);
        return expr;
    }
    if (rule == "builtInCall") {
        auto args = node.nodes();
        std::string fn = to_upper(node.tokens()[0]->text);
        if (fn == "CONTAINS" && args.size() == 2) {
            RenderCtx inner = ctx;
            inner.namespaced = true;
            return render(*args[0], inner) + " CONTAINS " + render(*args[1], inner);
        }
        return fn + "(" + render_children(node, ctx, ", ") + ")";
    }
    if (rule == "functionCall")
        return to_upper(node.tokens()[0]->text) + "(" + render_children(node, ctx, ", ") + ")";
    if (rule == "expressionList") return "(" + render_children(node, ctx, ", ") + ")";
    if (rule == "conditionalOrExpression") return render_children(node, ctx, " || ");
    if (rule == "conditionalAndExpression") return render_children(node, ctx, " && ");
    if (rule == "relationalExpression") {
        auto kids = node.nodes();
        auto toks = node.tokens();
        bool is_in = std::any_of(toks.begin(), toks.end(),
                                 [](const Token* t) { return t->is_keyword("IN"); });
        if (is_in) {
            bool negated = std::any_of(toks.begin(), toks.end(),
                                       [](const Token* t) { return t->is_keyword("NOT"); });
            return render(*kids[0], ctx) + (negated ? " NOT IN " : " IN ") + render(*kids[1], ctx);
        }
        return render(*kids[0], ctx) + " " + toks[0]->text + " " + render(*kids[1], ctx);
    }
    if (rule == "additiveExpression" || rule == "multiplicativeExpression") {
        std::string out;
        std::size_t op_index = 0;
        auto toks = node.tokens();
        for (const ParseTree* child : node.nodes()) {
            if (!out.empty() && op_index < toks.size())
                out += " " + toks[op_index++]->text + " ";
            out += render(*child, ctx);
        }
        return out;
    }
    if (rule == "unaryExpression") return node.tokens()[0]->text + render(*node.nodes()[0], ctx);
    // fall back to rendering children, e.g. constraint wrappers
    return render_children(node, ctx, " ");
}

// ---- constraints --------------------------------------------------------------

ConstraintTerm AstBuilder::constraint_to_term(const ParseTree& expr, ConstraintContext context) {
    RenderCtx ctx{/*namespaced=*/true, /*aggregate_to_alias=*/true};
    if (expr.rule == "relationalExpression") {
        auto kids = expr.nodes();
        auto toks = expr.tokens();
        bool is_in = std::any_of(toks.begin(), toks.end(),
                                 [](const Token* t) { return t->is_keyword("IN"); });
        if (is_in) {
            bool negated = std::any_of(toks.begin(), toks.end(),
                                       [](const Token* t) { return t->is_keyword("NOT"); });
            return std::array<std::string, 3>{render(*kids[0], ctx),
                                              negated ? "NOT IN" : "IN",
                                              render(*kids[1], ctx)};
        }
        if (context == ConstraintContext::Having)
            return std::array<std::string, 3>{render(*kids[0], ctx), toks[0]->text,
                                              render(*kids[1], ctx)};
    }
    return render(expr, ctx);
}

void AstBuilder::visit_constraint(const ParseTree& constraint, ConstraintContext context) {
    const ParseTree& expr = unwrap_constraint(constraint);
    // FILTER constraints that aggregate belong with the grouped-result filters
    bool grouped = context == ConstraintContext::Having || subtree_has_rule(expr, "aggregate");
    ConstraintTerm term = constraint_to_term(
        expr, grouped ? ConstraintContext::Having : ConstraintContext::Filter);
    if (grouped)
        ast_.where_with.push_back(std::move(term));
    else
        ast_.where.push_back(std::move(term));
}

// ---- projection ----------------------------------------------------------------

void AstBuilder::visit_select(const ParseTree& select_clause) {
    std::vector<std::string> items;
    bool distinct_pending = false;

    auto push = [&](std::string item) {
        if (distinct_pending) {
            item = "DISTINCT " + item;
            distinct_pending = false;
        }
        items.push_back(std::move(item));
    };

    for (const auto& child : select_clause.children) {
        if (const Token* tok = std::get_if<Token>(&child)) {
            if (tok->is_keyword("DISTINCT")) distinct_pending = true;
            else if (tok->is_op("*")) push("*");
            continue;
        }
        const ParseTree& node = *std::get<std::unique_ptr<ParseTree>>(child);
        if (node.rule == "var") {
            push(visit_var(node.tokens()[0]->text, false));
            continue;
        }
        // selectExpression: expression, optionally aliased
        auto kids = node.nodes();
        std::optional<std::string> alias;
        const ParseTree* payload = kids.empty() ? nullptr : kids[0];
        for (const Token* tok : node.tokens())
            if (tok->is_keyword("AS") && kids.size() >= 2) alias = kids.back()->tokens()[0]->text;
        if (!payload) continue;
        if (alias) *alias = visit_var(*alias, false);
        if (payload->rule == "aggregate") {
            std::string expr = render_aggregate_expr(*payload);
            push(visit_aggregate(expr, alias));
            continue;
        }
        RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
        std::string expr = render(*payload, ctx);
        push(alias ? expr + " AS " + *alias : expr);
    }

    std::string joined;
    for (const std::string& item : items) {
        if (!joined.empty()) joined += ", ";
        joined += item;
    }
    ast_.return_items.push_back(joined);
}

// ---- solution modifiers ----------------------------------------------------------

std::string AstBuilder::visit_group_condition(const ParseTree& condition) {
    auto kids = condition.nodes();
    bool has_alias = false;
    for (const Token* tok : condition.tokens())
        if (tok->is_keyword("AS")) has_alias = true;

    if (has_alias && kids.size() >= 2) {
        RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
        std::string expr = render(*kids[0], ctx);
        std::string alias = visit_var(kids.back()->tokens()[0]->text, false);
        if (!ast_.with_items.contains(expr))
            ast_.with_items.set(alias, expr + " AS " + alias);
        if (ast_.props.contains(expr) && !ast_.with_items.contains(expr))
            ast_.with_items.set(expr, ast_.props.at(expr) + " AS " + expr);
        return alias;
    }

    // plain variable, possibly bracketted, or a function call
    if (kids.size() == 1 && kids[0]->rule == "var") {
        std::string name = visit_var(kids[0]->tokens()[0]->text, false);
        if (ast_.props.contains(name) && !ast_.with_items.contains(name))
            ast_.with_items.set(name, ast_.props.at(name) + " AS " + name);
        return name;
    }
    RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
    std::string rendered = render_children(condition, ctx, " ");
    if (ast_.props.contains(rendered) && !ast_.with_items.contains(rendered))
        ast_.with_items.set(rendered, ast_.props.at(rendered) + " AS " + rendered);
    return rendered;
}

void AstBuilder::visit_order_condition(const ParseTree& condition) {
    std::string key;
    std::string direction = "ASC";

    auto toks = condition.tokens();
    auto kids = condition.nodes();
    if (!toks.empty() && (toks[0]->is_keyword("ASC") || toks[0]->is_keyword("DESC"))) {
        direction = to_upper(toks[0]->text);
        RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
        // bracketted expression: order key is its inner expression
        const ParseTree& br = *kids[0];
        key = br.nodes().size() == 1 ? render(*br.nodes()[0], ctx) : render(br, ctx);
    } else if (kids.size() == 1 && kids[0]->rule == "var") {
        key = visit_var(kids[0]->tokens()[0]->text, false);
    } else if (kids.size() == 1 && kids[0]->rule == "brackettedExpression") {
        RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
        const ParseTree& br = *kids[0];
        key = br.nodes().size() == 1 ? render(*br.nodes()[0], ctx) : render(br, ctx);
    } else {
        RenderCtx ctx{/*namespaced=*/false, /*aggregate_to_alias=*/true};
        key = render_children(condition, ctx, " ");
    }

    std::string resolved = key;
    if (ast_.with_items.empty()) {
        bool in_return = std::find(ast_.return_items.begin(), ast_.return_items.end(), key) !=
                         ast_.return_items.end();
        if (!in_return) {
            if (const std::string* prop = ast_.props.find(key)) resolved = *prop;
        } else if (const std::string* prop = ast_.props.find(key)) {
            ast_.with_items.set(key, *prop + " AS " + key);
        }
    } else if (!ast_.with_items.contains(key)) {
        if (const std::string* prop = ast_.props.find(key))
            ast_.with_items.set(key, *prop + " AS " + key);
    }
    ast_.order_by.set(resolved, direction);
}

// ---- orchestration -----------------------------------------------------------------

Ast AstBuilder::build(const ParseTree& tree) {
    const ParseTree* query = tree.first("selectQuery");
    if (!query) throw Error("parse tree has no select query");

    const ParseTree* where_clause = query->first("whereClause");
    std::vector<TriplePattern> triples;
    if (where_clause) triples = extract_triples(*where_clause);
    find_labelled_nodes(triples);
    categorise_triples(triples);

    if (where_clause) {
        if (const ParseTree* group = where_clause->first("groupGraphPattern"))
            for (const ParseTree* filter : group->all("filter"))
                if (const ParseTree* c = filter->first("constraint"))
                    visit_constraint(*c, ConstraintContext::Filter);
    }

    if (const ParseTree* select_clause = query->first("selectClause"))
        visit_select(*select_clause);

    if (const ParseTree* group_clause = query->first("groupClause"))
        for (const ParseTree* c : group_clause->all("groupCondition")) visit_group_condition(*c);

    if (const ParseTree* having = query->first("havingClause"))
        for (const ParseTree* c : having->all("constraint"))
            visit_constraint(*c, ConstraintContext::Having);

    if (const ParseTree* order_clause = query->first("orderClause"))
        for (const ParseTree* c : order_clause->all("orderCondition")) visit_order_condition(*c);

    auto clause_int = [](const ParseTree& clause) {
        const Token& tok = *clause.tokens()[1];
        try {
            return std::stoll(tok.text);
        } catch (const std::exception&) {
            throw SyntaxError("a representable integer", tok.text, tok.line, tok.col);
        }
    };
    if (const ParseTree* limit = query->first("limitClause")) visit_limit(clause_int(*limit));
    if (const ParseTree* offset = query->first("offsetClause")) visit_offset(clause_int(*offset));

    return ast_;
}

Ast build_ast(const ParseTree& tree, const ExplicitRels& explicit_rels,
              const NamingOptions& naming) {
    AstBuilder builder(resolve_prefixes(tree), explicit_rels, naming);
    return builder.build(tree);
}

}  // namespace s2c

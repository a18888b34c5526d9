#include "s2c/sparql_eval.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

using Binding = std::map<std::string, Value>;

struct FilterError {};  // expression error inside a filter: the row fails

bool subtree_contains(const ParseTree& node, const std::string& rule) {
    if (node.rule == rule) return true;
    for (const ParseTree* child : node.nodes())
        if (subtree_contains(*child, rule)) return true;
    return false;
}

// ---- pattern model ------------------------------------------------------------

struct PatTerm {
    enum class Kind { Var, Resource, Literal } kind = Kind::Var;
    std::string var;
    Iri iri;
    Value literal;
};

struct AtomicPattern {
    PatTerm subject;
    Iri predicate;
    PatTerm object;
};

struct WhereBlock {
    std::vector<AtomicPattern> required;
    std::vector<std::vector<AtomicPattern>> optionals;
    std::vector<const ParseTree*> filters;  // constraint nodes
    std::vector<std::string> vars;          // first-appearance order, user vars only
};

Value literal_value(const Token& token) {
    if (token.kind == TokenKind::LiteralNumber) {
        if (token.text.find('.') != std::string::npos ||
            token.text.find('e') != std::string::npos ||
            token.text.find('E') != std::string::npos)
            return std::stod(token.text);
        return static_cast<std::int64_t>(std::stoll(token.text));
    }
    if (token.kind == TokenKind::Keyword) return to_upper(token.text) == "TRUE";
    // string literal: strip quotes, resolve escapes
    std::string out;
    for (std::size_t i = 1; i + 1 < token.text.size(); ++i) {
        char c = token.text[i];
        if (c == '\\' && i + 2 < token.text.size()) {
            char e = token.text[++i];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += e; break;
            }
        } else {
            out += c;
        }
    }
    return out;
}

class Evaluator {
public:
    Evaluator(const TripleStore& store, const ParseTree& tree) : store_(store), tree_(tree) {
        prefixes_ = resolve_prefixes(tree);
    }

private:
    // ---- name resolution ----
    Iri resolve(const std::string& prefixed) const {
        if (prefixed == "rdf:type") {
            auto [label, local] = split_prefixed_name(prefixed);
            if (!prefixes_.has(label) && !store_.prefixes.has(label)) return Iri{kRdfTypeIri};
        }
        auto [label, local] = split_prefixed_name(prefixed);
        if (const std::string* base = prefixes_.iri_base(label)) return Iri{*base + local};
        if (const std::string* base = store_.prefixes.iri_base(label)) return Iri{*base + local};
        throw EvalError("prefix '" + label + ":' is not declared by query or store");
    }

    std::string clean_var(const std::string& raw) const {
        std::string out;
        for (char c : raw)
            if (c != '?' && c != '$') out += c;
        return out;
    }

    void note_var(WhereBlock& block, const std::string& name) {
        if (std::find(block.vars.begin(), block.vars.end(), name) == block.vars.end())
            block.vars.push_back(name);
    }

    // ---- pattern collection ----
    PatTerm term_of(WhereBlock& block, const ParseTree& node) {
        PatTerm t;
        const Token& tok = *node.tokens()[0];
        if (node.rule == "var") {
            t.kind = PatTerm::Kind::Var;
            t.var = clean_var(tok.text);
            note_var(block, t.var);
        } else if (node.rule == "iri") {
            t.kind = PatTerm::Kind::Resource;
            t.iri = resolve(tok.text);
        } else {
            t.kind = PatTerm::Kind::Literal;
            t.literal = literal_value(tok);
        }
        return t;
    }

    void collect_triples(WhereBlock& block, const ParseTree& triple,
                         std::vector<AtomicPattern>& out) {
        auto nodes = triple.nodes();
        if (nodes.empty()) return;
        PatTerm subject = term_of(block, *nodes[0]);
        std::size_t i = 1;
        while (i < nodes.size()) {
            const ParseTree& path = *nodes[i++];
            // read path segments
            std::vector<Iri> segments;
            bool inverse = false;
            auto path_tokens = path.tokens();
            if (path_tokens.size() == 1 && path_tokens[0]->kind == TokenKind::Keyword) {
                segments.push_back(Iri{kRdfTypeIri});
            } else {
                for (const ParseTree* elt : path.all("pathElt")) {
                    auto toks = elt->tokens();
                    if (toks.size() == 2) inverse = true;
                    const std::string& name = toks.back()->text;
                    segments.push_back(name == "rdf:type" ? Iri{kRdfTypeIri} : resolve(name));
                }
            }
            while (i < nodes.size() && nodes[i]->rule != "path") {
                PatTerm object = term_of(block, *nodes[i++]);
                PatTerm from = subject, to = object;
                if (inverse) std::swap(from, to);
                // expand a '/' sequence through fresh intermediate variables
                PatTerm current = from;
                for (std::size_t k = 0; k < segments.size(); ++k) {
                    PatTerm next;
                    if (k + 1 == segments.size()) {
                        next = to;
                    } else {
                        next.kind = PatTerm::Kind::Var;
                        next.var = "__path" + std::to_string(fresh_++);
                    }
                    out.push_back({current, segments[k], next});
                    current = next;
                }
            }
        }
    }

    WhereBlock collect_where() {
        WhereBlock block;
        const ParseTree* query = tree_.first("selectQuery");
        if (!query) throw EvalError("not a select query");
        const ParseTree* where = query->first("whereClause");
        if (!where) return block;
        const ParseTree* group = where->first("groupGraphPattern");
        if (!group) return block;
        for (const ParseTree* child : group->nodes()) {
            if (child->rule == "triplesBlock") {
                for (const ParseTree* triple : child->all("triple"))
                    collect_triples(block, *triple, block.required);
            } else if (child->rule == "optionalGraphPattern") {
                std::vector<AtomicPattern> opt;
                if (const ParseTree* inner = child->first("groupGraphPattern"))
                    for (const ParseTree* b : inner->all("triplesBlock"))
                        for (const ParseTree* triple : b->all("triple"))
                            collect_triples(block, *triple, opt);
                block.optionals.push_back(std::move(opt));
            } else if (child->rule == "filter") {
                if (const ParseTree* c = child->first("constraint")) block.filters.push_back(c);
            }
        }
        return block;
    }

    // ---- matching ----
    static bool bind_term(const PatTerm& term, const Value& value, Binding& binding) {
        switch (term.kind) {
            case PatTerm::Kind::Var: {
                auto it = binding.find(term.var);
                if (it != binding.end()) return values_equal(it->second, value);
                binding[term.var] = value;
                return true;
            }
            case PatTerm::Kind::Resource: {
                const Iri* iri = std::get_if<Iri>(&value);
                return iri && iri->uri == term.iri.uri;
            }
            case PatTerm::Kind::Literal:
                return !std::holds_alternative<Iri>(value) && values_equal(term.literal, value);
        }
        return false;
    }

    std::vector<Binding> extend(const std::vector<Binding>& rows, const AtomicPattern& p) const {
        std::vector<Binding> out;
        for (const Binding& row : rows) {
            for (const TripleStore::Triple& t : store_.triples) {
                if (t.predicate.uri != p.predicate.uri) continue;
                Binding candidate = row;
                if (!bind_term(p.subject, Value{t.subject}, candidate)) continue;
                if (!bind_term(p.object, t.object, candidate)) continue;
                out.push_back(std::move(candidate));
            }
        }
        return out;
    }

    std::vector<Binding> solve(const std::vector<AtomicPattern>& patterns,
                               std::vector<Binding> rows) const {
        for (const AtomicPattern& p : patterns) rows = extend(rows, p);
        return rows;
    }

    // ---- expressions ----
    struct ExprCtx {
        const Binding* binding = nullptr;
        const std::vector<Binding>* group = nullptr;
        const std::map<std::string, Value>* aliases = nullptr;
    };

    Value var_value(const std::string& name, const ExprCtx& ctx) const {
        if (ctx.aliases) {
            auto it = ctx.aliases->find(name);
            if (it != ctx.aliases->end()) return it->second;
        }
        if (ctx.binding) {
            auto it = ctx.binding->find(name);
            if (it != ctx.binding->end()) return it->second;
        }
        throw FilterError{};
    }

    static bool effective_boolean(const Value& v) {
        if (const bool* b = std::get_if<bool>(&v)) return *b;
        if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return *i != 0;
        if (const double* d = std::get_if<double>(&v)) return *d != 0.0;
        if (const std::string* s = std::get_if<std::string>(&v)) return !s->empty();
        throw FilterError{};
    }

    static int compare_for_expr(const Value& a, const Value& b) {
        if (is_null(a) || is_null(b)) throw FilterError{};
        if (is_numeric(a) && is_numeric(b)) {
            double x = as_double(a), y = as_double(b);
            return x < y ? -1 : x > y ? 1 : 0;
        }
        if (value_class(a) != value_class(b)) throw FilterError{};
        return compare_values(a, b);
    }

    Value eval_aggregate(const ParseTree& agg, const ExprCtx& ctx) const {
        if (!ctx.group) throw EvalError("aggregate outside a grouped context");
        std::string fn = to_upper(agg.tokens()[0]->text);
        auto args = agg.nodes();
        if (args.empty()) {  // COUNT(*)
            return static_cast<std::int64_t>(ctx.group->size());
        }
        std::vector<Value> values;
        for (const Binding& row : *ctx.group) {
            ExprCtx inner{&row, nullptr, ctx.aliases};
            try {
                Value v = eval_expr(*args[0], inner);
                if (!is_null(v)) values.push_back(std::move(v));
            } catch (const FilterError&) {
                // unbound or erroneous rows are skipped by aggregates
            }
        }
        if (fn == "COUNT") return static_cast<std::int64_t>(values.size());
        if (fn == "SUM" || fn == "AVG") {
            bool all_int = true;
            double total = 0;
            std::int64_t total_int = 0;
            for (const Value& v : values) {
                if (!is_numeric(v)) throw EvalError("numeric aggregate over non-numeric value");
                if (std::holds_alternative<double>(v)) all_int = false;
                total += as_double(v);
                if (all_int) total_int += std::get<std::int64_t>(v);
            }
            if (fn == "SUM") {
                if (values.empty()) return static_cast<std::int64_t>(0);
                return all_int ? Value{total_int} : Value{total};
            }
            if (values.empty()) return Null{};
            return total / static_cast<double>(values.size());
        }
        if (fn == "MIN" || fn == "MAX") {
            if (values.empty()) return Null{};
            const Value* best = &values[0];
            for (const Value& v : values) {
                int cmp = compare_values(v, *best);
                if ((fn == "MIN" && cmp < 0) || (fn == "MAX" && cmp > 0)) best = &v;
            }
            return *best;
        }
        throw EvalError("unsupported aggregate " + fn);
    }

    Value eval_expr(const ParseTree& node, const ExprCtx& ctx) const {
        const std::string& rule = node.rule;
        if (rule == "var") return var_value(clean_var(node.tokens()[0]->text), ctx);
        if (rule == "rdfLiteral") return literal_value(*node.tokens()[0]);
        if (rule == "iri") return resolve(node.tokens()[0]->text);
        if (rule == "brackettedExpression" || rule == "constraint")
            return eval_expr(*node.nodes()[0], ctx);
        if (rule == "aggregate") return eval_aggregate(node, ctx);
        if (rule == "conditionalOrExpression") {
            for (const ParseTree* child : node.nodes())
                if (effective_boolean(eval_expr(*child, ctx))) return true;
            return false;
        }
        if (rule == "conditionalAndExpression") {
            for (const ParseTree* child : node.nodes())
                if (!effective_boolean(eval_expr(*child, ctx))) return false;
            return true;
        }
        if (rule == "relationalExpression") {
            auto kids = node.nodes();
            auto toks = node.tokens();
            bool is_in = std::any_of(toks.begin(), toks.end(),
                                     [](const Token* t) { return t->is_keyword("IN"); });
            if (is_in) {
                bool negated = std::any_of(toks.begin(), toks.end(),
                                           [](const Token* t) { return t->is_keyword("NOT"); });
                Value lhs = eval_expr(*kids[0], ctx);
                bool found = false;
                for (const ParseTree* item : kids[1]->nodes()) {
                    Value rhs = eval_expr(*item, ctx);
                    if (!is_null(lhs) && !is_null(rhs) && value_class(lhs) == value_class(rhs) &&
                        values_equal(lhs, rhs))
                        found = true;
                    else if (is_numeric(lhs) && is_numeric(rhs) && values_equal(lhs, rhs))
                        found = true;
                }
                return negated ? !found : found;
            }
            Value lhs = eval_expr(*kids[0], ctx);
            Value rhs = eval_expr(*kids[1], ctx);
            const std::string& op = toks[0]->text;
            if (op == "=" || op == "!=") {
                bool eq;
                if (is_numeric(lhs) && is_numeric(rhs)) eq = values_equal(lhs, rhs);
                else if (value_class(lhs) != value_class(rhs)) throw FilterError{};
                else eq = values_equal(lhs, rhs);
                return op == "=" ? eq : !eq;
            }
            int cmp = compare_for_expr(lhs, rhs);
            if (op == "<") return cmp < 0;
            if (op == "<=") return cmp <= 0;
            if (op == ">") return cmp > 0;
            if (op == ">=") return cmp >= 0;
            throw EvalError("unknown operator " + op);
        }
        if (rule == "additiveExpression" || rule == "multiplicativeExpression") {
            auto kids = node.nodes();
            auto toks = node.tokens();
            Value acc = eval_expr(*kids[0], ctx);
            for (std::size_t i = 1; i < kids.size(); ++i) {
                Value rhs = eval_expr(*kids[i], ctx);
                if (!is_numeric(acc) || !is_numeric(rhs)) throw FilterError{};
                const std::string& op = toks[i - 1]->text;
                bool both_int = std::holds_alternative<std::int64_t>(acc) &&
                                std::holds_alternative<std::int64_t>(rhs);
                double x = as_double(acc), y = as_double(rhs);
                if (op == "+") acc = both_int ? Value{std::get<std::int64_t>(acc) + std::get<std::int64_t>(rhs)} : Value{x + y};
                else if (op == "-") acc = both_int ? Value{std::get<std::int64_t>(acc) - std::get<std::int64_t>(rhs)} : Value{x - y};
                else if (op == "*") acc = both_int ? Value{std::get<std::int64_t>(acc) * std::get<std::int64_t>(rhs)} : Value{x * y};
                else if (op == "/") {
                    if (y == 0) throw FilterError{};
                    acc = Value{x / y};
                }
            }
            return acc;
        }
        if (rule == "unaryExpression") {
            const std::string& op = node.tokens()[0]->text;
            Value v = eval_expr(*node.nodes()[0], ctx);
            if (op == "!") return !effective_boolean(v);
            if (!is_numeric(v)) throw FilterError{};
            if (op == "-")
                return std::holds_alternative<std::int64_t>(v) ? Value{-std::get<std::int64_t>(v)}
                                                               : Value{-std::get<double>(v)};
            return v;
        }
        if (rule == "builtInCall" || rule == "functionCall") {
            std::string fn = to_upper(node.tokens()[0]->text);
            auto args = node.nodes();
            if (fn == "CONTAINS" && args.size() == 2) {
                Value a = eval_expr(*args[0], ctx);
                Value b = eval_expr(*args[1], ctx);
                const std::string* sa = std::get_if<std::string>(&a);
                const std::string* sb = std::get_if<std::string>(&b);
                if (!sa || !sb) throw FilterError{};
                return sa->find(*sb) != std::string::npos;
            }
            throw EvalError("unsupported function " + fn);
        }
        throw EvalError("unsupported expression form " + rule);
    }

    bool filter_passes(const ParseTree& constraint, const ExprCtx& ctx) const {
        try {
            return effective_boolean(eval_expr(constraint, ctx));
        } catch (const FilterError&) {
            return false;
        }
    }

    // ---- select / modifiers ----
    struct SelectItem {
        const ParseTree* var = nullptr;      // plain variable
        const ParseTree* expr = nullptr;     // expression (aggregate or not)
        std::string name;                    // column name
        bool star = false;
    };

    std::vector<SelectItem> select_items(const ParseTree& select_clause) const {
        std::vector<SelectItem> out;
        for (const auto& child : select_clause.children) {
            if (const Token* tok = std::get_if<Token>(&child)) {
                if (tok->is_op("*")) {
                    SelectItem item;
                    item.star = true;
                    out.push_back(item);
                }
                continue;
            }
            const ParseTree& node = *std::get<std::unique_ptr<ParseTree>>(child);
            SelectItem item;
            if (node.rule == "var") {
                item.var = &node;
                item.name = clean_var(node.tokens()[0]->text);
            } else {
                auto kids = node.nodes();
                if (kids.empty()) continue;
                bool aliased = false;
                for (const Token* tok : node.tokens())
                    if (tok->is_keyword("AS")) aliased = true;
                item.expr = kids[0];
                item.name = aliased && kids.size() >= 2 ? clean_var(kids.back()->tokens()[0]->text)
                                                        : kids[0]->leaf_text();
            }
            out.push_back(item);
        }
        return out;
    }

    const TripleStore& store_;
    const ParseTree& tree_;
    PrefixMap prefixes_;
    int fresh_ = 0;

public:
    friend ResultTable run_query(Evaluator& ev);
};

ResultTable run_query(Evaluator& ev) {
    using ExprCtx = Evaluator::ExprCtx;
    const ParseTree* query = ev.tree_.first("selectQuery");
    const ParseTree* select_clause = query->first("selectClause");
    if (!select_clause) throw EvalError("missing select clause");

    WhereBlock block = ev.collect_where();

    std::vector<Binding> rows = ev.solve(block.required, {Binding{}});
    for (const auto& optional : block.optionals) {
        std::vector<Binding> joined;
        for (const Binding& row : rows) {
            std::vector<Binding> ext = ev.solve(optional, {row});
            if (ext.empty()) joined.push_back(row);
            else for (Binding& e : ext) joined.push_back(std::move(e));
        }
        rows = std::move(joined);
    }
    for (const ParseTree* filter : block.filters) {
        std::vector<Binding> kept;
        for (const Binding& row : rows) {
            ExprCtx ctx{&row, nullptr, nullptr};
            if (ev.filter_passes(*filter, ctx)) kept.push_back(row);
        }
        rows = std::move(kept);
    }

    auto items = ev.select_items(*select_clause);
    bool distinct = false;
    for (const Token* tok : select_clause->tokens())
        if (tok->is_keyword("DISTINCT")) distinct = true;

    const ParseTree* group_clause = query->first("groupClause");
    const ParseTree* having_clause = query->first("havingClause");
    bool has_aggregate_item = false;
    for (const auto& item : items)
        if (item.expr && subtree_contains(*item.expr, "aggregate")) has_aggregate_item = true;
    bool grouped = group_clause || having_clause || has_aggregate_item;

    struct OutRow {
        std::vector<Value> projected;
        Binding scope;                        // row bindings (ungrouped)
        const std::vector<Binding>* group = nullptr;
        std::map<std::string, Value> aliases; // group keys and select aliases
    };
    std::vector<OutRow> output;
    std::vector<std::string> columns;
    for (const auto& item : items) {
        if (item.star) {
            if (grouped) throw EvalError("SELECT * with aggregation is not evaluable");
            for (const std::string& v : block.vars) columns.push_back(v);
        } else {
            columns.push_back(item.name);
        }
    }

    std::deque<std::vector<Binding>> group_storage;

    if (!grouped) {
        for (const Binding& row : rows) {
            OutRow out;
            out.scope = row;
            ExprCtx ctx{&row, nullptr, nullptr};
            for (const auto& item : items) {
                if (item.star) {
                    for (const std::string& v : block.vars) {
                        auto it = row.find(v);
                        out.projected.push_back(it == row.end() ? Value{Null{}} : it->second);
                    }
                    continue;
                }
                if (item.var) {
                    std::string name = ev.clean_var(item.var->tokens()[0]->text);
                    if (std::find(block.vars.begin(), block.vars.end(), name) == block.vars.end())
                        throw EvalError("projection variable '" + name + "' is never bound");
                    auto it = row.find(name);
                    out.projected.push_back(it == row.end() ? Value{Null{}} : it->second);
                    continue;
                }
                try {
                    Value v = ev.eval_expr(*item.expr, ctx);
                    out.aliases[item.name] = v;
                    out.projected.push_back(std::move(v));
                } catch (const FilterError&) {
                    out.aliases[item.name] = Null{};
                    out.projected.push_back(Null{});
                }
            }
            output.push_back(std::move(out));
        }
    } else {
        // group keys from GROUP BY conditions (plain or aliased variables)
        std::vector<std::pair<std::string, const ParseTree*>> keys;  // name, value expr
        if (group_clause) {
            for (const ParseTree* cond : group_clause->all("groupCondition")) {
                auto kids = cond->nodes();
                bool aliased = false;
                for (const Token* tok : cond->tokens())
                    if (tok->is_keyword("AS")) aliased = true;
                if (kids.size() == 1 && kids[0]->rule == "var") {
                    keys.emplace_back(ev.clean_var(kids[0]->tokens()[0]->text), kids[0]);
                } else if (aliased && kids.size() >= 2) {
                    keys.emplace_back(ev.clean_var(kids.back()->tokens()[0]->text), kids[0]);
                } else if (!kids.empty()) {
                    keys.emplace_back(kids[0]->leaf_text(), kids[0]);
                }
            }
        }

        std::vector<std::pair<std::vector<Value>, std::vector<Binding>>> groups;
        for (const Binding& row : rows) {
            std::vector<Value> key;
            ExprCtx ctx{&row, nullptr, nullptr};
            for (const auto& [name, expr] : keys) {
                (void)name;
                try {
                    key.push_back(ev.eval_expr(*expr, ctx));
                } catch (const FilterError&) {
                    key.push_back(Null{});
                }
            }
            bool found = false;
            for (auto& [gk, grows] : groups) {
                bool same = gk.size() == key.size();
                for (std::size_t i = 0; same && i < gk.size(); ++i)
                    if (compare_values(gk[i], key[i]) != 0) same = false;
                if (same) {
                    grows.push_back(row);
                    found = true;
                    break;
                }
            }
            if (!found) groups.emplace_back(key, std::vector<Binding>{row});
        }
        // aggregates over an empty match with no grouping keys: one global group
        if (groups.empty() && keys.empty()) groups.emplace_back();

        for (auto& [key, grows] : groups) {
            group_storage.push_back(std::move(grows));
            const std::vector<Binding>& stored = group_storage.back();
            OutRow out;
            out.group = &stored;
            for (std::size_t i = 0; i < keys.size(); ++i) out.aliases[keys[i].first] = key[i];
            ExprCtx ctx{nullptr, &stored, &out.aliases};
            bool keep = true;
            for (const auto& item : items) {
                if (item.var) {
                    std::string name = ev.clean_var(item.var->tokens()[0]->text);
                    auto it = out.aliases.find(name);
                    if (it == out.aliases.end())
                        throw EvalError("projection variable '" + name + "' is not grouped");
                    out.projected.push_back(it->second);
                    continue;
                }
                try {
                    Value v = ev.eval_expr(*item.expr, ctx);
                    out.aliases[item.name] = v;
                    out.projected.push_back(std::move(v));
                } catch (const FilterError&) {
                    out.aliases[item.name] = Null{};
                    out.projected.push_back(Null{});
                }
            }
            if (having_clause) {
                ExprCtx hctx{nullptr, &stored, &out.aliases};
                for (const ParseTree* c : having_clause->all("constraint"))
                    if (!ev.filter_passes(*c, hctx)) keep = false;
            }
            if (keep) output.push_back(std::move(out));
        }
    }

    if (distinct) {
        std::vector<OutRow> unique;
        for (OutRow& row : output) {
            bool seen = false;
            for (const OutRow& u : unique) {
                bool same = u.projected.size() == row.projected.size();
                for (std::size_t i = 0; same && i < u.projected.size(); ++i)
                    if (compare_values(u.projected[i], row.projected[i]) != 0) same = false;
                if (same) {
                    seen = true;
                    break;
                }
            }
            if (!seen) unique.push_back(std::move(row));
        }
        output = std::move(unique);
    }

    // ORDER BY with canonical tie-break on the projected row
    if (const ParseTree* order_clause = query->first("orderClause")) {
        struct Key {
            const ParseTree* expr;
            bool descending;
        };
        std::vector<Key> order_keys;
        for (const ParseTree* cond : order_clause->all("orderCondition")) {
            auto toks = cond->tokens();
            bool desc = !toks.empty() && toks[0]->is_keyword("DESC");
            auto kids = cond->nodes();
            const ParseTree* expr = kids.empty() ? nullptr : kids[0];
            if (expr && expr->rule == "brackettedExpression" && expr->nodes().size() == 1)
                expr = expr->nodes()[0];
            if (expr) order_keys.push_back({expr, desc});
        }
        auto key_values = [&](const OutRow& row) {
            std::vector<Value> vals;
            for (const Key& k : order_keys) {
                ExprCtx ctx{row.group ? nullptr : &row.scope, row.group, &row.aliases};
                try {
                    vals.push_back(ev.eval_expr(*k.expr, ctx));
                } catch (const FilterError&) {
                    vals.push_back(Null{});
                }
            }
            return vals;
        };
        std::vector<std::pair<std::vector<Value>, std::size_t>> decorated;
        for (std::size_t i = 0; i < output.size(); ++i) decorated.emplace_back(key_values(output[i]), i);
        std::stable_sort(decorated.begin(), decorated.end(), [&](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < order_keys.size(); ++i) {
                int cmp = compare_values(a.first[i], b.first[i]);
                if (order_keys[i].descending) cmp = -cmp;
                if (cmp != 0) return cmp < 0;
            }
            const auto& ra = output[a.second].projected;
            const auto& rb = output[b.second].projected;
            for (std::size_t i = 0; i < std::min(ra.size(), rb.size()); ++i) {
                int cmp = compare_values(ra[i], rb[i]);
                if (cmp != 0) return cmp < 0;
            }
            return false;
        });
        std::vector<OutRow> sorted;
        sorted.reserve(output.size());
        for (const auto& [k, idx] : decorated) {
            (void)k;
            sorted.push_back(std::move(output[idx]));
        }
        output = std::move(sorted);
    } else {
        // canonical order keeps truncation deterministic even without ORDER BY
        std::stable_sort(output.begin(), output.end(), [](const OutRow& a, const OutRow& b) {
            for (std::size_t i = 0; i < std::min(a.projected.size(), b.projected.size()); ++i) {
                int cmp = compare_values(a.projected[i], b.projected[i]);
                if (cmp != 0) return cmp < 0;
            }
            return false;
        });
    }

    long long offset = 0, limit = -1;
    if (const ParseTree* l = query->first("limitClause")) limit = std::stoll(l->tokens()[1]->text);
    if (const ParseTree* o = query->first("offsetClause")) offset = std::stoll(o->tokens()[1]->text);

    ResultTable table;
    table.columns = columns;
    for (std::size_t i = 0; i < output.size(); ++i) {
        if (static_cast<long long>(i) < offset) continue;
        if (limit >= 0 && static_cast<long long>(table.rows.size()) >= limit) break;
        table.rows.push_back(std::move(output[i].projected));
    }
    return table;
}

}  // namespace

ResultTable eval_sparql(const TripleStore& store, const ParseTree& tree) {
    Evaluator ev(store, tree);
    return run_query(ev);
}

}  // namespace s2c

#include "s2c/cypher_eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

using Row = std::map<std::string, Value>;

[[noreturn]] void syntax_error(const std::string& what) {
    throw CypherEvalError(CypherEvalError::Kind::Syntax, what);
}
[[noreturn]] void runtime_error(const std::string& what) {
    throw CypherEvalError(CypherEvalError::Kind::Runtime, what);
}

// ---- lexer ---------------------------------------------------------------------

struct CTok {
    enum class Kind { Ident, Number, String, Sym, End } kind = Kind::End;
    std::string text;
};

class CLexer {
public:
    explicit CLexer(const std::string& text) : text_(text) { advance(); }

    const CTok& cur() const { return cur_; }
    CTok take() {
        CTok t = cur_;
        advance();
        return t;
    }
    bool is_sym(const char* s) const { return cur_.kind == CTok::Kind::Sym && cur_.text == s; }
    bool is_word(const char* w) const {
        return cur_.kind == CTok::Kind::Ident && to_upper(cur_.text) == w;
    }
    void expect_sym(const char* s) {
        if (!is_sym(s)) syntax_error("expected '" + std::string(s) + "', found '" + cur_.text + "'");
        advance();
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) {
            cur_ = {CTok::Kind::End, ""};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                word += text_[pos_++];
            cur_ = {CTok::Kind::Ident, word};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    (text_[pos_] == '.' && pos_ + 1 < text_.size() &&
                     std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))))
                num += text_[pos_++];
            cur_ = {CTok::Kind::Number, num};
            return;
        }
        if (c == '\'' || c == '"') {
            char quote = c;
            ++pos_;
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != quote) {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    ++pos_;
                    char e = text_[pos_++];
                    s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    continue;
                }
                s += text_[pos_++];
            }
            if (pos_ >= text_.size()) syntax_error("unterminated string literal");
            ++pos_;
            cur_ = {CTok::Kind::String, s};
            return;
        }
        // multi-char operators first
        static const char* two[] = {"<=", ">=", "<>", "!=", "->", "<-"};
        for (const char* op : two) {
            if (text_.compare(pos_, 2, op) == 0) {
                pos_ += 2;
                cur_ = {CTok::Kind::Sym, op};
                return;
            }
        }
        ++pos_;
        cur_ = {CTok::Kind::Sym, std::string(1, c)};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    CTok cur_;
};

// ---- expressions ------------------------------------------------------------------

struct CExpr {
    enum class Kind { Literal, Ident, Prop, Call, Star, Binary, Unary, List } kind = Kind::Literal;
    Value literal;
    std::string name;  // identifier / property owner / call name / operator
    std::string prop;
    std::vector<CExpr> args;
};

const std::set<std::string>& aggregate_names() {
    static const std::set<std::string> names = {"COUNT", "SUM", "AVG", "MIN", "MAX"};
    return names;
}

bool contains_aggregate(const CExpr& e) {
    if (e.kind == CExpr::Kind::Call && aggregate_names().count(e.name)) return true;
    for (const CExpr& a : e.args)
        if (contains_aggregate(a)) return true;
    return false;
}

class ExprParser {
public:
    explicit ExprParser(CLexer& lex) : lex_(lex) {}

    CExpr parse() { return parse_or(); }

private:
    CExpr parse_or() {
        CExpr lhs = parse_and();
        while (lex_.is_word("OR")) {
            lex_.take();
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = "OR";
            node.args = {std::move(lhs), parse_and()};
            lhs = std::move(node);
        }
        return lhs;
    }

    CExpr parse_and() {
        CExpr lhs = parse_not();
        while (lex_.is_word("AND")) {
            lex_.take();
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = "AND";
            node.args = {std::move(lhs), parse_not()};
            lhs = std::move(node);
        }
        return lhs;
    }

    CExpr parse_not() {
        if (lex_.is_word("NOT")) {
            lex_.take();
            CExpr node;
            node.kind = CExpr::Kind::Unary;
            node.name = "NOT";
            node.args = {parse_not()};
            return node;
        }
        return parse_comparison();
    }

    CExpr parse_comparison() {
        CExpr lhs = parse_additive();
        static const char* ops[] = {"=", "<>", "!=", "<=", ">=", "<", ">"};
        for (const char* op : ops) {
            if (lex_.is_sym(op)) {
                lex_.take();
                CExpr node;
                node.kind = CExpr::Kind::Binary;
                node.name = op;
                node.args = {std::move(lhs), parse_additive()};
                return node;
            }
        }
        if (lex_.is_word("CONTAINS")) {
            lex_.take();
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = "CONTAINS";
            node.args = {std::move(lhs), parse_additive()};
            return node;
        }
        bool negated = false;
        if (lex_.is_word("NOT")) {
            lex_.take();
            if (!lex_.is_word("IN")) syntax_error("expected IN after NOT");
            negated = true;
        }
        if (lex_.is_word("IN")) {
            lex_.take();
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = negated ? "NOT IN" : "IN";
            node.args = {std::move(lhs), parse_primary()};
            return node;
        }
        return lhs;
    }

    CExpr parse_additive() {
        CExpr lhs = parse_multiplicative();
        while (lex_.is_sym("+") || lex_.is_sym("-")) {
            std::string op = lex_.take().text;
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = op;
            node.args = {std::move(lhs), parse_multiplicative()};
            lhs = std::move(node);
        }
        return lhs;
    }

    CExpr parse_multiplicative() {
        CExpr lhs = parse_unary();
        while (lex_.is_sym("*") || lex_.is_sym("/")) {
            std::string op = lex_.take().text;
            CExpr node;
            node.kind = CExpr::Kind::Binary;
            node.name = op;
            node.args = {std::move(lhs), parse_unary()};
            lhs = std::move(node);
        }
        return lhs;
    }

    CExpr parse_unary() {
        if (lex_.is_sym("-") || lex_.is_sym("+")) {
            std::string op = lex_.take().text;
            CExpr node;
            node.kind = CExpr::Kind::Unary;
            node.name = op;
            node.args = {parse_unary()};
            return node;
        }
        return parse_primary();
    }

    CExpr parse_primary() {
        const CTok& t = lex_.cur();
        if (t.kind == CTok::Kind::Number) {
            CExpr e;
            e.kind = CExpr::Kind::Literal;
            std::string num = lex_.take().text;
            if (num.find('.') != std::string::npos)
                e.literal = std::stod(num);
            else
                e.literal = static_cast<std::int64_t>(std::stoll(num));
            return e;
        }
        if (t.kind == CTok::Kind::String) {
            CExpr e;
            e.kind = CExpr::Kind::Literal;
            e.literal = lex_.take().text;
            return e;
        }
        if (lex_.is_sym("(")) {
            lex_.take();
            if (lex_.is_sym(")")) syntax_error("empty parenthesis");
            // list literal or grouped expression
            CExpr first = parse();
            if (lex_.is_sym(",")) {
                CExpr list;
                list.kind = CExpr::Kind::List;
                list.args.push_back(std::move(first));
                while (lex_.is_sym(",")) {
                    lex_.take();
                    list.args.push_back(parse());
                }
                lex_.expect_sym(")");
                return list;
            }
            lex_.expect_sym(")");
            return first;
        }
        if (lex_.is_sym("[")) {
            lex_.take();
            CExpr list;
            list.kind = CExpr::Kind::List;
            if (!lex_.is_sym("]")) {
                list.args.push_back(parse());
                while (lex_.is_sym(",")) {
                    lex_.take();
                    list.args.push_back(parse());
                }
            }
            lex_.expect_sym("]");
            return list;
        }
        if (t.kind == CTok::Kind::Ident) {
            std::string word = lex_.take().text;
            std::string upper = to_upper(word);
            if (upper == "TRUE" || upper == "FALSE") {
                CExpr e;
                e.kind = CExpr::Kind::Literal;
                e.literal = upper == "TRUE";
                return e;
            }
            if (upper == "NULL") {
                CExpr e;
                e.kind = CExpr::Kind::Literal;
                e.literal = Null{};
                return e;
            }
            if (lex_.is_sym("(")) {
                lex_.take();
                CExpr call;
                call.kind = CExpr::Kind::Call;
                call.name = upper;
                if (lex_.is_sym("*")) {
                    lex_.take();
                    CExpr star;
                    star.kind = CExpr::Kind::Star;
                    call.args.push_back(std::move(star));
                } else if (!lex_.is_sym(")")) {
                    call.args.push_back(parse());
                    while (lex_.is_sym(",")) {
                        lex_.take();
                        call.args.push_back(parse());
                    }
                }
                lex_.expect_sym(")");
                return call;
            }
            if (lex_.is_sym(".")) {
                lex_.take();
                if (lex_.cur().kind != CTok::Kind::Ident) syntax_error("property name expected");
                CExpr e;
                e.kind = CExpr::Kind::Prop;
                e.name = word;
                e.prop = lex_.take().text;
                return e;
            }
            CExpr e;
            e.kind = CExpr::Kind::Ident;
            e.name = word;
            return e;
        }
        syntax_error("unexpected token '" + t.text + "' in expression");
    }

    CLexer& lex_;
};

CExpr parse_expression_text(const std::string& text) {
    CLexer lex(text);
    ExprParser parser(lex);
    CExpr e = parser.parse();
    if (lex.cur().kind != CTok::Kind::End)
        syntax_error("trailing tokens after expression: '" + lex.cur().text + "'");
    return e;
}

// ---- evaluation -----------------------------------------------------------------

struct EvalEnv {
    const PropertyGraph* graph = nullptr;
    const Row* row = nullptr;
    const std::vector<Row>* group = nullptr;  // rows backing an aggregation
};

Value eval_expr(const CExpr& e, const EvalEnv& env);

Value eval_aggregate(const CExpr& call, const EvalEnv& env) {
    if (!env.group) runtime_error("aggregate outside an aggregating projection");
    const std::string& fn = call.name;
    if (call.args.size() == 1 && call.args[0].kind == CExpr::Kind::Star) {
        if (fn != "COUNT") runtime_error(fn + "(*) is not defined");
        return static_cast<std::int64_t>(env.group->size());
    }
    if (call.args.size() != 1) runtime_error(fn + " expects one argument");
    std::vector<Value> values;
    for (const Row& row : *env.group) {
        EvalEnv inner{env.graph, &row, nullptr};
        Value v = eval_expr(call.args[0], inner);
        if (!is_null(v)) values.push_back(std::move(v));
    }
    if (fn == "COUNT") return static_cast<std::int64_t>(values.size());
    if (fn == "SUM" || fn == "AVG") {
        bool all_int = true;
        double total = 0;
        std::int64_t total_int = 0;
        for (const Value& v : values) {
            if (!is_numeric(v)) runtime_error(fn + " over non-numeric value");
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
    runtime_error("unsupported aggregate " + fn);
}

Value eval_expr(const CExpr& e, const EvalEnv& env) {
    switch (e.kind) {
        case CExpr::Kind::Literal: return e.literal;
        case CExpr::Kind::Star: runtime_error("'*' outside COUNT");
        case CExpr::Kind::List: runtime_error("list outside IN");
        case CExpr::Kind::Ident: {
            if (!env.row) syntax_error("identifier '" + e.name + "' out of scope");
            auto it = env.row->find(e.name);
            if (it == env.row->end()) syntax_error("identifier '" + e.name + "' is not defined");
            return it->second;
        }
        case CExpr::Kind::Prop: {
            if (!env.row) syntax_error("identifier '" + e.name + "' out of scope");
            auto it = env.row->find(e.name);
            if (it == env.row->end()) syntax_error("identifier '" + e.name + "' is not defined");
            if (is_null(it->second)) return Null{};
            const Iri* uri = std::get_if<Iri>(&it->second);
            if (!uri) runtime_error("'" + e.name + "' is not a node");
            const PropertyGraph::Node* node = env.graph->find_node(uri->uri);
            if (!node) return Null{};
            auto pit = node->properties.find(e.prop);
            return pit == node->properties.end() ? Value{Null{}} : pit->second;
        }
        case CExpr::Kind::Call: {
            if (aggregate_names().count(e.name)) return eval_aggregate(e, env);
            runtime_error("unsupported function " + e.name + "()");
        }
        case CExpr::Kind::Unary: {
            Value v = eval_expr(e.args[0], env);
            if (e.name == "NOT") {
                if (is_null(v)) return Null{};
                const bool* b = std::get_if<bool>(&v);
                if (!b) runtime_error("NOT over non-boolean");
                return !*b;
            }
            if (is_null(v)) return Null{};
            if (!is_numeric(v)) runtime_error("unary " + e.name + " over non-number");
            if (e.name == "-")
                return std::holds_alternative<std::int64_t>(v) ? Value{-std::get<std::int64_t>(v)}
                                                               : Value{-std::get<double>(v)};
            return v;
        }
        case CExpr::Kind::Binary: break;
    }

    const std::string& op = e.name;
    if (op == "AND" || op == "OR") {
        Value a = eval_expr(e.args[0], env);
        Value b = eval_expr(e.args[1], env);
        auto as_tri = [](const Value& v) -> std::optional<bool> {
            if (is_null(v)) return std::nullopt;
            if (const bool* x = std::get_if<bool>(&v)) return *x;
            runtime_error("logical operator over non-boolean");
        };
        auto ta = as_tri(a), tb = as_tri(b);
        if (op == "AND") {
            if (ta == false || tb == false) return false;
            if (!ta || !tb) return Null{};
            return true;
        }
        if (ta == true || tb == true) return true;
        if (!ta || !tb) return Null{};
        return false;
    }

    Value lhs = eval_expr(e.args[0], env);

    if (op == "IN" || op == "NOT IN") {
        if (e.args[1].kind != CExpr::Kind::List) runtime_error("IN expects a list");
        if (is_null(lhs)) return Null{};
        bool found = false;
        for (const CExpr& item : e.args[1].args) {
            Value rhs = eval_expr(item, env);
            if (is_null(rhs)) continue;
            if (is_numeric(lhs) && is_numeric(rhs) ? values_equal(lhs, rhs)
                                                   : (value_class(lhs) == value_class(rhs) &&
                                                      values_equal(lhs, rhs)))
                found = true;
        }
        return op == "IN" ? Value{found} : Value{!found};
    }

    Value rhs = eval_expr(e.args[1], env);
    if (op == "CONTAINS") {
        if (is_null(lhs) || is_null(rhs)) return Null{};
        const std::string* a = std::get_if<std::string>(&lhs);
        const std::string* b = std::get_if<std::string>(&rhs);
        if (!a || !b) return Null{};
        return a->find(*b) != std::string::npos;
    }

    if (op == "+" || op == "-" || op == "*" || op == "/") {
        if (is_null(lhs) || is_null(rhs)) return Null{};
        if (!is_numeric(lhs) || !is_numeric(rhs)) runtime_error("arithmetic over non-numbers");
        bool both_int = std::holds_alternative<std::int64_t>(lhs) &&
                        std::holds_alternative<std::int64_t>(rhs) && op != "/";
        double x = as_double(lhs), y = as_double(rhs);
        if (op == "+") return both_int ? Value{std::get<std::int64_t>(lhs) + std::get<std::int64_t>(rhs)} : Value{x + y};
        if (op == "-") return both_int ? Value{std::get<std::int64_t>(lhs) - std::get<std::int64_t>(rhs)} : Value{x - y};
        if (op == "*") return both_int ? Value{std::get<std::int64_t>(lhs) * std::get<std::int64_t>(rhs)} : Value{x * y};
        if (y == 0) runtime_error("division by zero");
        return Value{x / y};
    }

    // comparisons: null propagates, cross-class comparison yields null
    if (is_null(lhs) || is_null(rhs)) return Null{};
    bool numeric = is_numeric(lhs) && is_numeric(rhs);
    if (!numeric && value_class(lhs) != value_class(rhs)) return Null{};
    int cmp = compare_values(lhs, rhs);
    if (op == "=") return cmp == 0;
    if (op == "<>" || op == "!=") return cmp != 0;
    if (op == "<") return cmp < 0;
    if (op == "<=") return cmp <= 0;
    if (op == ">") return cmp > 0;
    if (op == ">=") return cmp >= 0;
    runtime_error("unknown operator " + op);
}

bool truthy(const Value& v) {
    const bool* b = std::get_if<bool>(&v);
    return b && *b;
}

// ---- patterns --------------------------------------------------------------------

struct NodePat {
    std::string var;  // empty for anonymous
    std::string label;
    std::vector<std::pair<std::string, Value>> props;
};

struct ChainPat {
    std::vector<NodePat> nodes;
    struct Edge {
        std::string type;
        bool forward = true;
    };
    std::vector<Edge> edges;
};

ChainPat parse_pattern(CLexer& lex) {
    ChainPat chain;
    auto parse_node = [&]() {
        lex.expect_sym("(");
        NodePat node;
        if (lex.cur().kind == CTok::Kind::Ident) node.var = lex.take().text;
        if (lex.is_sym(":")) {
            lex.take();
            if (lex.cur().kind != CTok::Kind::Ident) syntax_error("label expected");
            node.label = lex.take().text;
        }
        if (lex.is_sym("{")) {
            lex.take();
            while (!lex.is_sym("}")) {
                if (lex.cur().kind != CTok::Kind::Ident) syntax_error("property key expected");
                std::string key = lex.take().text;
                lex.expect_sym(":");
                CExpr value = ExprParser(lex).parse();
                EvalEnv env{};
                if (value.kind != CExpr::Kind::Literal && value.kind != CExpr::Kind::Unary)
                    syntax_error("inline property values must be literals");
                node.props.emplace_back(key, eval_expr(value, env));
                if (lex.is_sym(",")) lex.take();
            }
            lex.expect_sym("}");
        }
        lex.expect_sym(")");
        chain.nodes.push_back(std::move(node));
    };

    parse_node();
    for (;;) {
        bool forward;
        if (lex.is_sym("-")) {
            forward = true;
            lex.take();
        } else if (lex.is_sym("<-")) {
            forward = false;
            lex.take();
        } else {
            break;
        }
        lex.expect_sym("[");
        std::string type;
        if (lex.is_sym(":")) {
            lex.take();
            if (lex.cur().kind != CTok::Kind::Ident) syntax_error("relationship type expected");
            type = lex.take().text;
        } else if (lex.cur().kind == CTok::Kind::Ident) {
            lex.take();  // relationship variable, unused
            if (lex.is_sym(":")) {
                lex.take();
                type = lex.take().text;
            }
        }
        lex.expect_sym("]");
        if (forward) {
            lex.expect_sym("->");
        } else {
            lex.expect_sym("-");
        }
        chain.edges.push_back({type, forward});
        parse_node();
    }
    return chain;
}

// ---- stages ----------------------------------------------------------------------

struct ProjItem {
    CExpr expr;
    std::string name;
    std::string source_text;  // expression text, for ORDER BY matching
    bool aggregated = false;
};

struct OrderKey {
    std::string text;
    bool descending = false;
};

struct Plan {
    struct MatchStage {
        ChainPat chain;
        bool optional = false;
        std::optional<CExpr> where;
    };
    struct WithStage {
        std::vector<ProjItem> items;
        std::optional<CExpr> where;
        bool distinct = false;
    };
    struct UnwindStage {
        CExpr collection;
        std::string alias;
    };

    struct Stage {
        enum class Kind { Match, With, Unwind } kind = Kind::Match;
        MatchStage match;
        WithStage with;
        UnwindStage unwind;
    };

    std::vector<Stage> stages;
    WithStage final_projection;
    bool has_return = false;
    std::vector<OrderKey> order_keys;
    std::optional<long long> skip;
    std::optional<long long> limit;
};

std::string trim_copy(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\n\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\n\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string line;
    for (char c : text) {
        if (c == '\n') {
            if (!trim_copy(line).empty()) out.push_back(trim_copy(line));
            line.clear();
        } else {
            line += c;
        }
    }
    if (!trim_copy(line).empty()) out.push_back(trim_copy(line));
    return out;
}

/// Splits a projection list on top-level commas.
std::vector<std::string> split_items(const std::string& text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string item;
    bool in_string = false;
    char quote = 0;
    for (char c : text) {
        if (in_string) {
            item += c;
            if (c == quote) in_string = false;
            continue;
        }
        if (c == '\'' || c == '"') {
            in_string = true;
            quote = c;
            item += c;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim_copy(item));
            item.clear();
            continue;
        }
        item += c;
    }
    if (!trim_copy(item).empty()) out.push_back(trim_copy(item));
    return out;
}

std::vector<ProjItem> parse_projection(const std::string& list_text) {
    std::vector<ProjItem> items;
    for (const std::string& raw : split_items(list_text)) {
        std::string text = raw;
        std::string alias;
        // split on the last top-level " AS "
        int depth = 0;
        std::size_t as_pos = std::string::npos;
        for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
            char c = text[i];
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') --depth;
            if (depth == 0 && text.compare(i, 4, " AS ") == 0) as_pos = i;
        }
        if (as_pos != std::string::npos) {
            alias = trim_copy(text.substr(as_pos + 4));
            text = trim_copy(text.substr(0, as_pos));
        }
        ProjItem item;
        item.source_text = trim_copy(text);
        item.expr = parse_expression_text(item.source_text);
        item.aggregated = contains_aggregate(item.expr);
        item.name = !alias.empty()           ? alias
                    : item.expr.kind == CExpr::Kind::Ident ? item.expr.name
                                                           : item.source_text;
        items.push_back(std::move(item));
    }
    return items;
}

Plan build_plan(const CypherQuery& query) {
    Plan plan;
    auto last_match_or_with = [&plan]() -> Plan::Stage* {
        if (plan.stages.empty()) return nullptr;
        return &plan.stages.back();
    };

    for (const auto& [kind, text] : query.clauses) {
        switch (kind) {
            case ClauseKind::Match:
            case ClauseKind::OptionalMatch: {
                for (const std::string& line : split_lines(text)) {
                    Plan::Stage stage;
                    stage.kind = Plan::Stage::Kind::Match;
                    std::string rest = line;
                    bool optional = false;
                    if (to_upper(rest).rfind("OPTIONAL ", 0) == 0) {
                        optional = true;
                        rest = trim_copy(rest.substr(9));
                    }
                    if (to_upper(rest).rfind("MATCH", 0) != 0) syntax_error("MATCH expected");
                    rest = trim_copy(rest.substr(5));
                    CLexer lex(rest);
                    stage.match.chain = parse_pattern(lex);
                    if (lex.cur().kind != CTok::Kind::End) syntax_error("trailing pattern tokens");
                    stage.match.optional = optional;
                    plan.stages.push_back(std::move(stage));
                }
                break;
            }
            case ClauseKind::Where:
            case ClauseKind::WhereWith: {
                std::string body = trim_copy(text.substr(5));  // drop WHERE
                CExpr expr = parse_expression_text(body);
                Plan::Stage* prev = last_match_or_with();
                if (!prev) syntax_error("WHERE without a preceding clause");
                if (prev->kind == Plan::Stage::Kind::Match && !prev->match.where)
                    prev->match.where = std::move(expr);
                else if (prev->kind == Plan::Stage::Kind::With && !prev->with.where)
                    prev->with.where = std::move(expr);
                else
                    syntax_error("dangling WHERE clause");
                break;
            }
            case ClauseKind::With: {
                Plan::Stage stage;
                stage.kind = Plan::Stage::Kind::With;
                stage.with.items = parse_projection(trim_copy(text.substr(4)));
                plan.stages.push_back(std::move(stage));
                break;
            }
            case ClauseKind::Unwind: {
                for (const std::string& line : split_lines(text)) {
                    std::string body = trim_copy(line.substr(6));
                    std::size_t as_pos = body.rfind(" AS ");
                    if (as_pos == std::string::npos) syntax_error("UNWIND needs AS");
                    Plan::Stage stage;
                    stage.kind = Plan::Stage::Kind::Unwind;
                    stage.unwind.collection = parse_expression_text(trim_copy(body.substr(0, as_pos)));
                    stage.unwind.alias = trim_copy(body.substr(as_pos + 4));
                    plan.stages.push_back(std::move(stage));
                }
                break;
            }
            case ClauseKind::Return: {
                std::string body = trim_copy(text.substr(6));
                if (to_upper(body).rfind("DISTINCT ", 0) == 0) {
                    plan.final_projection.distinct = true;
                    body = trim_copy(body.substr(9));
                }
                plan.final_projection.items = parse_projection(body);
                plan.has_return = true;
                break;
            }
            case ClauseKind::OrderBy: {
                std::string body = trim_copy(text.substr(8));
                for (const std::string& part : split_items(body)) {
                    OrderKey key;
                    key.text = part;
                    std::string upper = to_upper(part);
                    if (upper.size() >= 5 && upper.compare(upper.size() - 5, 5, " DESC") == 0) {
                        key.descending = true;
                        key.text = trim_copy(part.substr(0, part.size() - 5));
                    } else if (upper.size() >= 4 && upper.compare(upper.size() - 4, 4, " ASC") == 0) {
                        key.text = trim_copy(part.substr(0, part.size() - 4));
                    }
                    plan.order_keys.push_back(std::move(key));
                }
                break;
            }
            case ClauseKind::Limit:
                plan.limit = std::stoll(trim_copy(text.substr(5)));
                break;
            case ClauseKind::Skip:
                plan.skip = std::stoll(trim_copy(text.substr(4)));
                break;
        }
    }
    if (!plan.has_return) syntax_error("query has no RETURN clause");
    return plan;
}

// ---- execution ----------------------------------------------------------------------

class Executor {
public:
    Executor(const PropertyGraph& graph, Plan plan) : graph_(graph), plan_(std::move(plan)) {}

    ResultTable run() {
        std::vector<Row> rows = {Row{}};
        for (const Plan::Stage& stage : plan_.stages) {
            switch (stage.kind) {
                case Plan::Stage::Kind::Match: rows = run_match(rows, stage.match); break;
                case Plan::Stage::Kind::With: rows = run_with(rows, stage.with); break;
                case Plan::Stage::Kind::Unwind: rows = run_unwind(rows, stage.unwind); break;
            }
        }
        return run_return(rows);
    }

private:
    bool node_matches(const NodePat& pat, const PropertyGraph::Node& node) const {
        if (!pat.label.empty() && !node.labels.count(pat.label)) return false;
        for (const auto& [key, want] : pat.props) {
            auto it = node.properties.find(key);
            if (it == node.properties.end()) return false;
            bool numeric = is_numeric(want) && is_numeric(it->second);
            if (numeric ? !values_equal(want, it->second)
                        : (value_class(want) != value_class(it->second) ||
                           !values_equal(want, it->second)))
                return false;
        }
        return true;
    }

    /// All chain assignments consistent with `row`, appended to `out`.
    void enumerate_chain(const ChainPat& chain, const Row& row, std::vector<Row>& out,
                         const std::optional<CExpr>& where) const {
        std::vector<std::size_t> picked(chain.nodes.size());
        enumerate_from(chain, row, 0, picked, out, where);
    }

    void enumerate_from(const ChainPat& chain, const Row& row, std::size_t pos,
                        std::vector<std::size_t>& picked, std::vector<Row>& out,
                        const std::optional<CExpr>& where) const {
        if (pos == chain.nodes.size()) {
            Row merged = row;
            for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
                const std::string& var = chain.nodes[i].var;
                if (!var.empty()) merged[var] = Iri{graph_.nodes[picked[i]].uri.uri};
            }
            if (where) {
                EvalEnv env{&graph_, &merged, nullptr};
                if (!truthy(eval_expr(*where, env))) return;
            }
            out.push_back(std::move(merged));
            return;
        }
        const NodePat& pat = chain.nodes[pos];
        auto try_node = [&](std::size_t id) {
            if (!node_matches(pat, graph_.nodes[id])) return;
            if (pos > 0) {
                const ChainPat::Edge& edge = chain.edges[pos - 1];
                std::size_t from = picked[pos - 1], to = id;
                if (!edge.forward) std::swap(from, to);
                bool connected = false;
                for (const PropertyGraph::Edge& e : graph_.edges)
                    if (e.src == from && e.dst == to && (edge.type.empty() || e.type == edge.type))
                        connected = true;
                if (!connected) return;
            }
            picked[pos] = id;
            enumerate_from(chain, row, pos + 1, picked, out, where);
        };

        // bound variables pin the node
        if (!pat.var.empty()) {
            auto it = row.find(pat.var);
            if (it != row.end()) {
                if (is_null(it->second)) return;  // optional miss upstream
                const Iri* uri = std::get_if<Iri>(&it->second);
                if (!uri) runtime_error("'" + pat.var + "' is not a node");
                const auto idx = graph_.index.find(uri->uri);
                if (idx == graph_.index.end()) return;
                try_node(idx->second);
                return;
            }
        }
        for (std::size_t id = 0; id < graph_.nodes.size(); ++id) try_node(id);
    }

    std::vector<Row> run_match(const std::vector<Row>& rows, const Plan::MatchStage& stage) const {
        std::vector<Row> out;
        for (const Row& row : rows) {
            std::vector<Row> matches;
            enumerate_chain(stage.chain, row, matches, stage.where);
            if (matches.empty() && stage.optional) {
                Row padded = row;
                for (const NodePat& node : stage.chain.nodes)
                    if (!node.var.empty() && !padded.count(node.var)) padded[node.var] = Null{};
                out.push_back(std::move(padded));
                continue;
            }
            for (Row& m : matches) out.push_back(std::move(m));
        }
        return out;
    }

    std::vector<Row> run_unwind(const std::vector<Row>& rows, const Plan::UnwindStage& stage) const {
        std::vector<Row> out;
        for (const Row& row : rows) {
            EvalEnv env{&graph_, &row, nullptr};
            if (stage.collection.kind != CExpr::Kind::List)
                runtime_error("UNWIND expects a list expression");
            for (const CExpr& item : stage.collection.args) {
                Row next = row;
                next[stage.alias] = eval_expr(item, env);
                out.push_back(std::move(next));
            }
        }
        return out;
    }

    /// Projection shared by WITH and RETURN: implicit grouping by the
    /// non-aggregate items whenever any item aggregates.
    std::vector<Row> project(const std::vector<Row>& rows, const std::vector<ProjItem>& items,
                             std::vector<Row>* pre_rows) const {
        bool aggregated = false;
        for (const ProjItem& item : items)
            if (item.aggregated) aggregated = true;

        std::vector<Row> out;
        if (!aggregated) {
            for (const Row& row : rows) {
                EvalEnv env{&graph_, &row, nullptr};
                Row projected;
                for (const ProjItem& item : items) projected[item.name] = eval_expr(item.expr, env);
                out.push_back(std::move(projected));
                if (pre_rows) pre_rows->push_back(row);
            }
            return out;
        }

        std::vector<const ProjItem*> keys;
        for (const ProjItem& item : items)
            if (!item.aggregated) keys.push_back(&item);

        struct Group {
            std::vector<Value> key;
            std::vector<Row> rows;
        };
        std::vector<Group> groups;
        for (const Row& row : rows) {
            EvalEnv env{&graph_, &row, nullptr};
            std::vector<Value> key;
            for (const ProjItem* item : keys) key.push_back(eval_expr(item->expr, env));
            bool found = false;
            for (Group& g : groups) {
                bool same = true;
                for (std::size_t i = 0; same && i < key.size(); ++i)
                    if (compare_values(g.key[i], key[i]) != 0) same = false;
                if (same) {
                    g.rows.push_back(row);
                    found = true;
                    break;
                }
            }
            if (!found) groups.push_back(Group{std::move(key), {row}});
        }
        if (groups.empty() && keys.empty()) groups.push_back(Group{});  // global aggregation

        for (const Group& g : groups) {
            Row projected;
            std::size_t key_index = 0;
            const Row* sample = g.rows.empty() ? nullptr : &g.rows.front();
            for (const ProjItem& item : items) {
                if (item.aggregated) {
                    EvalEnv env{&graph_, sample, &g.rows};
                    projected[item.name] = eval_expr(item.expr, env);
                } else {
                    projected[item.name] = g.key[key_index++];
                }
            }
            out.push_back(std::move(projected));
            if (pre_rows) pre_rows->push_back(sample ? *sample : Row{});
        }
        return out;
    }

    std::vector<Row> run_with(const std::vector<Row>& rows, const Plan::WithStage& stage) const {
        std::vector<Row> projected = project(rows, stage.items, nullptr);
        if (!stage.where) return projected;
        std::vector<Row> kept;
        for (const Row& row : projected) {
            EvalEnv env{&graph_, &row, nullptr};
            if (truthy(eval_expr(*stage.where, env))) kept.push_back(row);
        }
        return kept;
    }

    ResultTable run_return(const std::vector<Row>& rows) const {
        const Plan::WithStage& stage = plan_.final_projection;
        bool aggregated = false;
        for (const ProjItem& item : stage.items)
            if (item.aggregated) aggregated = true;

        std::vector<Row> pre_rows;
        std::vector<Row> projected = project(rows, stage.items, &pre_rows);

        // resolve order keys against aliases, projected expressions, or the
        // pre-projection scope when that is still well-defined
        struct ResolvedKey {
            int item_index = -1;
            std::optional<CExpr> expr;
            bool descending = false;
        };
        std::vector<ResolvedKey> keys;
        for (const OrderKey& key : plan_.order_keys) {
            ResolvedKey resolved;
            resolved.descending = key.descending;
            for (std::size_t i = 0; i < stage.items.size(); ++i) {
                if (stage.items[i].name == key.text || stage.items[i].source_text == key.text) {
                    resolved.item_index = static_cast<int>(i);
                    break;
                }
            }
            if (resolved.item_index < 0) {
                if (stage.distinct || aggregated)
                    runtime_error("ORDER BY key '" + key.text +
                                  "' is not part of the DISTINCT/aggregated projection");
                resolved.expr = parse_expression_text(key.text);
            }
            keys.push_back(std::move(resolved));
        }

        struct Decorated {
            std::vector<Value> keys;
            Row projected;
        };
        std::vector<Decorated> decorated;
        for (std::size_t i = 0; i < projected.size(); ++i) {
            Decorated d;
            d.projected = std::move(projected[i]);
            for (const ResolvedKey& key : keys) {
                if (key.item_index >= 0) {
                    d.keys.push_back(d.projected.at(stage.items[key.item_index].name));
                } else {
                    EvalEnv env{&graph_, &pre_rows[i], nullptr};
                    d.keys.push_back(eval_expr(*key.expr, env));
                }
            }
            decorated.push_back(std::move(d));
        }

        if (stage.distinct) {
            std::vector<Decorated> unique;
            for (Decorated& d : decorated) {
                bool seen = false;
                for (const Decorated& u : unique) {
                    bool same = true;
                    for (const ProjItem& item : stage.items) {
                        if (compare_values(u.projected.at(item.name), d.projected.at(item.name)) !=
                            0) {
                            same = false;
                            break;
                        }
                    }
                    if (same) {
                        seen = true;
                        break;
                    }
                }
                if (!seen) unique.push_back(std::move(d));
            }
            decorated = std::move(unique);
        }

        auto row_less = [&](const Decorated& a, const Decorated& b) {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                int cmp = compare_values(a.keys[i], b.keys[i]);
                if (keys[i].descending) cmp = -cmp;
                if (cmp != 0) return cmp < 0;
            }
            for (const ProjItem& item : stage.items) {
                int cmp = compare_values(a.projected.at(item.name), b.projected.at(item.name));
                if (cmp != 0) return cmp < 0;
            }
            return false;
        };
        std::stable_sort(decorated.begin(), decorated.end(), row_less);

        ResultTable table;
        for (const ProjItem& item : stage.items) table.columns.push_back(item.name);
        long long skip = plan_.skip.value_or(0);
        long long limit = plan_.limit.value_or(-1);
        for (std::size_t i = 0; i < decorated.size(); ++i) {
            if (static_cast<long long>(i) < skip) continue;
            if (limit >= 0 && static_cast<long long>(table.rows.size()) >= limit) break;
            std::vector<Value> row;
            for (const ProjItem& item : stage.items) row.push_back(decorated[i].projected.at(item.name));
            table.rows.push_back(std::move(row));
        }
        return table;
    }

    const PropertyGraph& graph_;
    Plan plan_;
};

}  // namespace

ResultTable eval_cypher(const PropertyGraph& graph, const CypherQuery& query) {
    Plan plan = build_plan(query);
    return Executor(graph, std::move(plan)).run();
}

}  // namespace s2c

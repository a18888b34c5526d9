#include "s2c/emitter.hpp"

#include <set>

#include "s2c/errors.hpp"

namespace s2c {

namespace {

std::vector<std::string> split(const std::string& text, const std::string& sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + sep.size();
    }
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\n");
    return s.substr(a, b - a + 1);
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    if (from.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

/// `a > 1 || b > 2 && c` -> `(a > 1) OR (b > 2 AND c)`; terms without logical
/// operators pass through untouched.
std::string convert_logical(const std::string& term) {
    if (term.find("||") == std::string::npos && term.find("&&") == std::string::npos) return term;
    std::string out;
    for (const std::string& or_part : split(term, "||")) {
        if (!out.empty()) out += " OR ";
        std::string group;
        for (const std::string& and_part : split(or_part, "&&")) {
            if (!group.empty()) group += " AND ";
            group += trim(and_part);
        }
        out += "(" + group + ")";
    }
    return out;
}

std::string term_text(const ConstraintTerm& term) {
    if (const auto* triple = std::get_if<std::array<std::string, 3>>(&term))
        return (*triple)[0] + " " + (*triple)[1] + " " + (*triple)[2];
    const std::string& s = std::get<std::string>(term);
    if (s.find("CONTAINS") != std::string::npos) return s;
    return convert_logical(s);
}

/// Renders node atoms, stating label and inline properties on the first
/// occurrence only; OPTIONAL MATCH restates labels but never property maps.
class NodeRenderer {
public:
    explicit NodeRenderer(const Ast& ast) : ast_(ast) {}

    std::string operator()(const std::string& var, bool in_optional) {
        bool first = rendered_.insert(var).second;
        const NodeEntry* entry = ast_.nodes.find(var);
        std::string out = "(" + var;
        if (entry && entry->label && (first || in_optional)) out += ":" + *entry->label;
        if (entry && first && !entry->constraints.empty()) {
            out += " {";
            bool sep = false;
            for (const auto& [prop, lit] : entry->constraints) {
                if (sep) out += ", ";
                out += prop + ": " + lit;
                sep = true;
            }
            out += "}";
        }
        return out + ")";
    }

private:
    const Ast& ast_;
    std::set<std::string> rendered_;
};

std::string render_chain(NodeRenderer& node, const RelEntry& rel, bool in_optional) {
    std::vector<std::string> segments = split(rel.path, "/");
    std::string out = node(rel.subject, in_optional);
    if (rel.inverse) {
        out += "<-[" + segments[0] + "]-";
        out += node(rel.object, in_optional);
        return out;
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out += "-[" + segments[i] + "]->";
        if (i + 1 < segments.size()) out += "()";
    }
    out += node(rel.object, in_optional);
    return out;
}

}  // namespace

const char* clause_kind_name(ClauseKind kind) {
    switch (kind) {
        case ClauseKind::Match: return "MATCH";
        case ClauseKind::OptionalMatch: return "OPTIONAL_MATCH";
        case ClauseKind::Where: return "WHERE";
        case ClauseKind::With: return "WITH";
        case ClauseKind::WhereWith: return "WHERE_WITH";
        case ClauseKind::Unwind: return "UNWIND";
        case ClauseKind::Return: return "RETURN";
        case ClauseKind::OrderBy: return "ORDER_BY";
        case ClauseKind::Limit: return "LIMIT";
        case ClauseKind::Skip: return "SKIP";
    }
    return "";
}

std::pair<std::string, std::string> build_match(const Ast& ast) {
    if (ast.nodes.empty() && ast.rels.empty())
        throw EmptyPatternError("query binds no nodes and no relationships");

    NodeRenderer node(ast);
    std::string match_text, optional_text;
    auto emit = [](std::string& dst, const std::string& line) {
        if (!dst.empty()) dst += "\n";
        dst += line;
    };

    // relationship chains appear first so shared nodes carry their label and
    // constraints in the regular MATCH part
    for (const RelEntry& rel : ast.rels) {
        if (rel.optional) continue;
        emit(match_text, "MATCH " + render_chain(node, rel, false));
    }

    // nodes not anchored by a required relationship still need a MATCH line,
    // unless they only ever appear inside OPTIONAL blocks
    std::set<std::string> in_required_rels;
    for (const RelEntry& rel : ast.rels) {
        if (rel.optional) continue;
        in_required_rels.insert(rel.subject);
        in_required_rels.insert(rel.object);
    }
    for (const auto& [var, entry] : ast.nodes) {
        if (!in_required_rels.count(var) && !entry.optional_only)
            emit(match_text, "MATCH " + node(var, false));
    }

    for (const RelEntry& rel : ast.rels) {
        if (!rel.optional) continue;
        emit(optional_text, "OPTIONAL MATCH " + render_chain(node, rel, true));
    }
    return {match_text, optional_text};
}

std::string build_where(const Ast& ast) {
    std::vector<std::string> parts;
    for (const ConstraintTerm& term : ast.where) {
        if (std::holds_alternative<std::string>(term)) {
            const std::string& s = std::get<std::string>(term);
            if (s.find('{') != std::string::npos)
                throw UnsupportedError(FailureKind::Ns2, "nested SELECT",
                                       "Nested SELECT statements not supported yet.");
        }
        parts.push_back(term_text(term));
    }
    if (parts.empty()) return "";
    std::string out;
    for (std::string part : parts) {
        for (const auto& [alias, expr] : ast.aggregates) part = replace_all(part, alias, expr);
        // joined disjunctions need their own parens to survive AND precedence
        if (parts.size() > 1 && part.find(" OR ") != std::string::npos) part = "(" + part + ")";
        if (!out.empty()) out += " AND ";
        out += part;
    }
    return "WHERE " + out;
}

std::string build_with(const Ast& ast) {
    if (ast.with_items.empty()) return "";
    std::string out;
    for (const auto& [alias, item] : ast.with_items) {
        (void)alias;
        if (!out.empty()) out += ", ";
        out += item;
    }
    return "WITH " + out;
}

std::string build_where_with(const Ast& ast) {
    if (ast.where_with.empty()) return "";
    std::string out;
    for (const ConstraintTerm& term : ast.where_with) {
        std::string part = term_text(term);
        if (ast.where_with.size() > 1 && part.find(" OR ") != std::string::npos)
            part = "(" + part + ")";
        if (!out.empty()) out += " AND ";
        out += part;
    }
    return "WHERE " + out;
}

std::string build_return(const Ast& ast) {
    // the container holds joined projection strings; split back into items
    std::string joined;
    for (const std::string& entry : ast.return_items) {
        if (!joined.empty()) joined += ", ";
        joined += entry;
    }

    auto rewrite = [&](const std::string& raw) -> std::string {
        std::string item = trim(raw);
        std::string prefix;
        if (item.rfind("DISTINCT ", 0) == 0) {
            prefix = "DISTINCT ";
            item = item.substr(prefix.size());
        }
        if (item == "*") {
            std::string expanded;
            for (const std::string& var : ast.vars) {
                if (!expanded.empty()) expanded += ", ";
                const std::string* prop = ast.props.find(var);
                if (prop && !ast.with_items.contains(var))
                    expanded += *prop + " AS " + var;
                else
                    expanded += var;
            }
            return prefix + expanded;
        }
        const std::string* prop = ast.props.find(item);
        if (prop && !ast.with_items.contains(item)) return prefix + *prop + " AS " + item;
        return prefix + item;
    };

    std::vector<std::string> items;
    for (const std::string& part : split(joined, ", "))
        if (!trim(part).empty()) items.push_back(rewrite(part));
    if (items.empty()) throw EmptyProjectionError("no projection items");

    std::string out;
    for (const std::string& item : items) {
        if (!out.empty()) out += ", ";
        out += item;
    }
    return "RETURN " + out;
}

std::string build_solution_modifiers(const Ast& ast) {
    std::vector<std::string> lines;
    if (!ast.order_by.empty()) {
        std::string ob;
        for (const auto& [key, dir] : ast.order_by) {
            if (!ob.empty()) ob += ", ";
            ob += key + " " + dir;
        }
        lines.push_back("ORDER BY " + ob);
    }
    if (ast.limit) lines.push_back("LIMIT " + std::to_string(*ast.limit));
    if (ast.skip) lines.push_back("SKIP " + std::to_string(*ast.skip));
    std::string out;
    for (const std::string& line : lines) {
        if (!out.empty()) out += "\n";
        out += line;
    }
    return out;
}

CypherQuery assemble(const Ast& ast, OptionalPlacement placement) {
    auto [match_text, optional_text] = build_match(ast);
    std::string where = build_where(ast);
    std::string with = build_with(ast);
    std::string where_with = build_where_with(ast);
    std::string ret = build_return(ast);

    std::string unwind;
    for (const auto& [var, expr] : ast.unwind) {
        if (!unwind.empty()) unwind += "\n";
        unwind += "UNWIND " + expr + " AS " + var;
    }

    CypherQuery q;
    auto add = [&q](ClauseKind kind, const std::string& text) {
        if (text.empty()) return;
        if (!q.text.empty()) q.text += "\n";
        q.text += text;
        q.clauses.emplace_back(kind, text);
    };

    add(ClauseKind::Match, match_text);
    if (placement == OptionalPlacement::BeforeWhere) add(ClauseKind::OptionalMatch, optional_text);
    add(ClauseKind::Where, where);
    if (placement == OptionalPlacement::AfterWhere) add(ClauseKind::OptionalMatch, optional_text);
    add(ClauseKind::With, with);
    add(ClauseKind::WhereWith, where_with);
    add(ClauseKind::Unwind, unwind);
    add(ClauseKind::Return, ret);

    if (!ast.order_by.empty()) {
        std::string ob;
        for (const auto& [key, dir] : ast.order_by) {
            if (!ob.empty()) ob += ", ";
            ob += key + " " + dir;
        }
        add(ClauseKind::OrderBy, "ORDER BY " + ob);
    }
    if (ast.limit) add(ClauseKind::Limit, "LIMIT " + std::to_string(*ast.limit));
    if (ast.skip) add(ClauseKind::Skip, "SKIP " + std::to_string(*ast.skip));
    return q;
}

}  // namespace s2c

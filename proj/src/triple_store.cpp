#include "s2c/triple_store.hpp"

#include <cctype>

#include "s2c/errors.hpp"

namespace s2c {

void TripleStore::add(Iri subject, Iri predicate, Value object) {
    Triple t{std::move(subject), std::move(predicate), std::move(object)};
    for (const Triple& existing : triples)
        if (existing == t) return;
    triples.push_back(std::move(t));
}

Iri TripleStore::expand(const std::string& prefixed, const NamingOptions& naming) const {
    auto [label, local] = split_prefixed_name(prefixed);
    const std::string* base = prefixes.iri_base(label);
    if (!base) {
        if (naming.strict)
            throw UndeclaredPrefixError("prefix '" + label + ":' unknown to the store");
        return Iri{"urn:" + (label.empty() ? naming.default_prefix_label : label) + ":" + local};
    }
    return Iri{*base + local};
}

std::string TripleStore::pg_name_of(const Iri& iri, const NamingOptions& naming) const {
    const std::string* best_label = nullptr;
    std::size_t best_len = 0;
    for (const auto& [label, base] : prefixes.entries) {
        if (base.size() > best_len && iri.uri.rfind(base, 0) == 0) {
            best_label = &label;
            best_len = base.size();
        }
    }
    std::string label, local;
    if (best_label) {
        label = *best_label;
        local = iri.uri.substr(best_len);
    } else {
        auto cut = iri.uri.find_last_of("#/:");
        local = cut == std::string::npos ? iri.uri : iri.uri.substr(cut + 1);
    }
    if (label.empty()) label = naming.default_prefix_label;
    for (char& c : label)
        if (c == '-' || c == '.') c = '_';
    return label + "__" + local;
}

// ---- Turtle subset parser -----------------------------------------------------

namespace {

struct TurtleScanner {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1, col = 1;

    explicit TurtleScanner(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& what) const { throw TurtleSyntaxError(what, line, col); }

    char peek(std::size_t ahead = 0) const {
        return pos + ahead < text.size() ? text[pos + ahead] : '\0';
    }
    bool done() const { return pos >= text.size(); }
    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_ws() {
        while (!done()) {
            char c = peek();
            if (c == '#') {
                while (!done() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    bool eat_char(char c) {
        skip_ws();
        if (peek() != c) return false;
        advance();
        return true;
    }

    bool name_char(char c) const {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string read_iri() {
        if (peek() != '<') fail("IRI expected");
        advance();
        std::string out;
        while (!done() && peek() != '>') {
            char c = advance();
            if (std::isspace(static_cast<unsigned char>(c))) fail("whitespace inside IRI");
            out += c;
        }
        if (done()) fail("unterminated IRI");
        advance();
        return out;
    }

    /// `label:local` or `:local`; the '.' terminator never joins the name.
    std::string read_prefixed() {
        std::string out;
        while (name_char(peek()) || (peek() == '.' && name_char(peek(1)))) out += advance();
        if (peek() != ':') fail("prefixed name expected");
        out += advance();
        while (name_char(peek()) || (peek() == '.' && name_char(peek(1)))) out += advance();
        return out;
    }

    std::string read_string() {
        char quote = advance();
        std::string out;
        while (!done()) {
            char c = advance();
            if (c == quote) return out;
            if (c == '\n') fail("unterminated string");
            if (c == '\\' && !done()) {
                char e = advance();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += e; break;
                }
                continue;
            }
            out += c;
        }
        fail("unterminated string");
    }

    bool word_ahead(const char* word) {
        skip_ws();
        std::size_t i = 0;
        while (word[i]) {
            if (std::tolower(static_cast<unsigned char>(peek(i))) != word[i]) return false;
            ++i;
        }
        return !name_char(peek(i));
    }

    void eat_word(const char* word) {
        skip_ws();
        for (std::size_t i = 0; word[i]; ++i) advance();
    }
};

Value typed_literal(const std::string& lexical, const std::string& datatype) {
    auto local = datatype.substr(datatype.find_last_of("#/") + 1);
    if (local == "integer" || local == "int" || local == "long" || local == "short")
        return static_cast<std::int64_t>(std::stoll(lexical));
    if (local == "decimal" || local == "double" || local == "float") return std::stod(lexical);
    if (local == "boolean") return lexical == "true" || lexical == "1";
    return lexical;
}

}  // namespace

TripleStore load_turtle(const std::string& text) {
    TripleStore store;
    TurtleScanner s(text);

    auto resolve = [&](const std::string& prefixed) -> Iri {
        auto [label, local] = split_prefixed_name(prefixed);
        const std::string* base = store.prefixes.iri_base(label);
        if (!base) s.fail("undeclared prefix '" + label + ":'");
        return Iri{*base + local};
    };

    auto read_resource = [&]() -> Iri {
        s.skip_ws();
        if (s.peek() == '<') return Iri{s.read_iri()};
        return resolve(s.read_prefixed());
    };

    auto read_object = [&]() -> Value {
        s.skip_ws();
        char c = s.peek();
        if (c == '<') return Iri{s.read_iri()};
        if (c == '"' || c == '\'') {
            std::string lexical = s.read_string();
            if (s.peek() == '^' && s.peek(1) == '^') {
                s.advance();
                s.advance();
                std::string datatype =
                    s.peek() == '<' ? s.read_iri() : resolve(s.read_prefixed()).uri;
                return typed_literal(lexical, datatype);
            }
            if (s.peek() == '@') {  // language tag, kept as plain string
                s.advance();
                while (s.name_char(s.peek())) s.advance();
            }
            return lexical;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
            std::string num;
            if (c == '-' || c == '+') num += s.advance();
            bool decimal = false;
            while (std::isdigit(static_cast<unsigned char>(s.peek())) ||
                   (s.peek() == '.' && std::isdigit(static_cast<unsigned char>(s.peek(1))))) {
                if (s.peek() == '.') decimal = true;
                num += s.advance();
            }
            if (num.empty() || num == "-" || num == "+") s.fail("number expected");
            if (decimal) return std::stod(num);
            return static_cast<std::int64_t>(std::stoll(num));
        }
        if (s.word_ahead("true")) {
            s.eat_word("true");
            return true;
        }
        if (s.word_ahead("false")) {
            s.eat_word("false");
            return false;
        }
        return resolve(s.read_prefixed());
    };

    for (;;) {
        s.skip_ws();
        if (s.done()) break;

        if (s.peek() == '@' || s.word_ahead("prefix")) {
            bool at_form = s.peek() == '@';
            if (at_form) s.advance();
            if (!s.word_ahead("prefix") && at_form) s.fail("@prefix expected");
            s.eat_word("prefix");
            s.skip_ws();
            std::string name = s.read_prefixed();
            if (name.back() != ':') s.fail("prefix label must end in ':'");
            name.pop_back();
            s.skip_ws();
            std::string iri = s.read_iri();
            store.prefixes.declare(name, iri);
            if (at_form && !s.eat_char('.')) s.fail("'.' after @prefix");
            if (!at_form) s.eat_char('.');  // SPARQL-style PREFIX has no dot
            continue;
        }

        Iri subject = read_resource();
        for (;;) {
            s.skip_ws();
            Iri predicate;
            if (s.peek() == 'a' && !s.name_char(s.peek(1)) && s.peek(1) != ':') {
                s.advance();
                predicate = Iri{kRdfTypeIri};
            } else {
                predicate = read_resource();
            }
            for (;;) {
                store.add(subject, predicate, read_object());
                if (!s.eat_char(',')) break;
            }
            if (s.eat_char(';')) {
                s.skip_ws();
                if (s.peek() == '.') break;  // dangling ';' before terminator
                continue;
            }
            break;
        }
        if (!s.eat_char('.')) s.fail("'.' expected after triple");
    }
    return store;
}

}  // namespace s2c

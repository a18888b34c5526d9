#include "s2c/token.hpp"

#include <cctype>

#include "s2c/errors.hpp"

namespace s2c {

std::string to_upper(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool Token::is_keyword(const char* kw) const {
    return kind == TokenKind::Keyword && to_upper(text) == kw;
}

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Characters allowed inside a prefix label or local name, '.' handled apart.
bool is_pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            int line = line_, col = col_;
            if (at_end()) {
                out.push_back({TokenKind::Eof, "", line, col});
                return out;
            }
            out.push_back(next(line, col));
        }
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    Token next(int line, int col) {
        char c = peek();
        if (c == '?' || c == '$') return variable(line, col);
        if (c == '<' && looks_like_iri()) return iri(line, col);
        if (c == '\'' || c == '"') return string_literal(line, col);
        if (std::isdigit(static_cast<unsigned char>(c))) return number(line, col);
        if (is_name_start(c) || c == ':') return word_or_prefixed(line, col);
        return punct_or_operator(line, col);
    }

    Token variable(int line, int col) {
        std::string text;
        text += advance();  // ? or $
        if (!is_name_start(peek()) && !std::isdigit(static_cast<unsigned char>(peek())))
            throw LexError("variable name expected after '" + text + "'", line, col);
        while (is_name_char(peek())) text += advance();
        return {TokenKind::Variable, text, line, col};
    }

    /// '<' opens an IRI only when a '>' follows with no whitespace in between;
    /// otherwise it is the less-than operator.
    bool looks_like_iri() const {
        for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
            char c = text_[i];
            if (c == '>') return true;
            if (std::isspace(static_cast<unsigned char>(c))) return false;
        }
        return false;
    }

    Token iri(int line, int col) {
        std::string text;
        text += advance();  // <
        while (!at_end() && peek() != '>') {
            char c = advance();
            if (c == '\n' || std::isspace(static_cast<unsigned char>(c)))
                throw LexError("whitespace inside IRI", line, col);
            text += c;
        }
        if (at_end()) throw LexError("unterminated IRI", line, col);
        text += advance();  // >
        return {TokenKind::Iri, text, line, col};
    }

    Token string_literal(int line, int col) {
        char quote = advance();
        std::string text;
        text += quote;
        while (!at_end()) {
            char c = advance();
            if (c == '\n') throw LexError("unterminated string", line, col);
            text += c;
            if (c == '\\') {
                if (at_end()) break;
                text += advance();
                continue;
            }
            if (c == quote) return {TokenKind::LiteralString, text, line, col};
        }
        throw LexError("unterminated string", line, col);
    }

    Token number(int line, int col) {
        std::string text;
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            text += advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            std::string exp;
            exp += advance();
            if (peek() == '+' || peek() == '-') exp += advance();
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                while (std::isdigit(static_cast<unsigned char>(peek()))) exp += advance();
                text += exp;
            } else {
                pos_ = save;  // not an exponent, leave the 'e' for the next token
            }
        }
        return {TokenKind::LiteralNumber, text, line, col};
    }

    /// Bare words become keywords; `label:local`, `:local` and `label:` are
    /// prefixed names. A trailing '.' never belongs to the local part.
    Token word_or_prefixed(int line, int col) {
        std::string text;
        while (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))) text += advance();
        if (peek() == ':') {
            text += advance();
            while (is_pn_char(peek()) || (peek() == '.' && is_pn_char(peek(1)))) text += advance();
            return {TokenKind::PrefixedName, text, line, col};
        }
        if (text.empty()) throw LexError(std::string("illegal character '") + peek() + "'", line, col);
        return {TokenKind::Keyword, text, line, col};
    }

    Token punct_or_operator(int line, int col) {
        char c = advance();
        switch (c) {
            case '(': case ')': case '{': case '}': case ',': case '.': case ';':
                return {TokenKind::Punct, std::string(1, c), line, col};
            case '=':
                return {TokenKind::Operator, "=", line, col};
            case '!':
                if (peek() == '=') { advance(); return {TokenKind::Operator, "!=", line, col}; }
                return {TokenKind::Operator, "!", line, col};
            case '<':
                if (peek() == '=') { advance(); return {TokenKind::Operator, "<=", line, col}; }
                return {TokenKind::Operator, "<", line, col};
            case '>':
                if (peek() == '=') { advance(); return {TokenKind::Operator, ">=", line, col}; }
                return {TokenKind::Operator, ">", line, col};
            case '&':
                if (peek() == '&') { advance(); return {TokenKind::Operator, "&&", line, col}; }
                throw LexError("illegal character '&'", line, col);
            case '|':
                if (peek() == '|') { advance(); return {TokenKind::Operator, "||", line, col}; }
                throw LexError("illegal character '|'", line, col);
            case '*': case '/': case '+': case '-': case '^':
                return {TokenKind::Operator, std::string(1, c), line, col};
            default:
                throw LexError(std::string("illegal character '") + c + "'", line, col);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(const std::string& text) { return Lexer(text).run(); }

}  // namespace s2c

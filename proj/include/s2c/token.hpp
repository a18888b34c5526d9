#pragma once

#include <string>
#include <vector>

namespace s2c {

enum class TokenKind {
    Keyword,        // SELECT, FILTER, COUNT, a, ... plus any bare word (function names)
    Iri,            // <http://...>
    PrefixedName,   // p:local, :local, p:
    Variable,       // ?x or $x, prefix retained in text
    LiteralString,  // quotes retained in text
    LiteralNumber,  // integer or decimal text
    Punct,          // ( ) { } , . ;
    Operator,       // = != < <= > >= && || ! + - * / ^
    Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;
    int line = 1;
    int col = 1;

    bool is(TokenKind k) const { return kind == k; }
    /// Case-insensitive keyword test.
    bool is_keyword(const char* kw) const;
    bool is_punct(const char* p) const { return kind == TokenKind::Punct && text == p; }
    bool is_op(const char* op) const { return kind == TokenKind::Operator && text == op; }
};

/// Splits SPARQL query text into tokens. Comments (`# ...`) are skipped and an
/// Eof sentinel terminates the stream. Throws LexError on unterminated strings
/// or illegal characters.
std::vector<Token> tokenize(const std::string& text);

/// Uppercase copy of ASCII text; keyword matching is case-insensitive.
std::string to_upper(const std::string& s);

}  // namespace s2c

#pragma once

#include <stdexcept>
#include <string>

namespace s2c {

/// Base class for all translation and evaluation errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unterminated string or illegal character in the query text.
struct LexError : Error {
    int line = 0;
    int col = 0;
    LexError(const std::string& what, int line_, int col_)
        : Error(what + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_), col(col_) {}
};

/// Query text violates the grammar of the supported subset.
struct SyntaxError : Error {
    std::string expected;
    std::string found;
    int line = 0;
    int col = 0;
    SyntaxError(std::string expected_, std::string found_, int line_, int col_)
        : Error("expected " + expected_ + ", found '" + found_ + "' at " +
                std::to_string(line_) + ":" + std::to_string(col_)),
          expected(std::move(expected_)), found(std::move(found_)), line(line_), col(col_) {}
};

/// Parsing-failure group a query is assigned to when it cannot be translated.
enum class FailureKind { CountAll, Ns2, Ns1, Other, Syntax };

const char* failure_kind_name(FailureKind kind);

/// Query is well-formed SPARQL but uses a construct outside the supported subset.
struct UnsupportedError : Error {
    FailureKind kind;
    std::string construct;
    UnsupportedError(FailureKind kind_, const std::string& construct_, const std::string& detail)
        : Error(construct_ + ": " + detail), kind(kind_), construct(construct_) {}
};

/// One subject received two different class labels.
struct ConflictError : Error {
    using Error::Error;
};

/// Prefixed name uses a prefix with no declaration (strict mode only).
struct UndeclaredPrefixError : Error {
    using Error::Error;
};

/// The query binds no nodes and no relationships, so no MATCH can be built.
struct EmptyPatternError : Error {
    using Error::Error;
};

/// Nothing to project after expansion.
struct EmptyProjectionError : Error {
    using Error::Error;
};

/// Malformed Turtle input.
struct TurtleSyntaxError : Error {
    int line = 0;
    int col = 0;
    TurtleSyntaxError(const std::string& what, int line_, int col_)
        : Error(what + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_), col(col_) {}
};

/// SPARQL-side evaluation failure (oracle).
struct EvalError : Error {
    using Error::Error;
};

/// Cypher-side evaluation failure; the sandbox analogue of a store rejecting the query.
struct CypherEvalError : Error {
    enum class Kind { Syntax, Runtime };
    Kind kind;
    CypherEvalError(Kind kind_, const std::string& what) : Error(what), kind(kind_) {}
};

}  // namespace s2c

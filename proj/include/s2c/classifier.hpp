#pragma once

#include <optional>
#include <string>

#include "s2c/errors.hpp"
#include "s2c/parse_tree.hpp"

namespace s2c {

/// Failure group plus a short description of the offending construct.
struct FailureCategory {
    FailureKind kind = FailureKind::Other;
    std::string detail;

    const char* name() const { return failure_kind_name(kind); }
};

/// Assigns an error raised during translation to its failure group.
FailureCategory classify_error(const Error& error);
FailureCategory classify_error(const UnsupportedError& error);
FailureCategory classify_error(const SyntaxError& error);
FailureCategory classify_error(const LexError& error);

/// Compatibility pre-check: flags COUNT(*) in the SELECT clause, the way
/// parsers without COUNT(*) support report it. Returns nothing when the
/// query would translate.
std::optional<FailureCategory> classify_count_all(const ParseTree& tree);

}  // namespace s2c

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

namespace s2c {

/// Resource identifier. Distinct from plain strings so node bindings can be
/// told apart from string literals until normalization folds them together.
struct Iri {
    std::string uri;
    bool operator==(const Iri& o) const { return uri == o.uri; }
    bool operator<(const Iri& o) const { return uri < o.uri; }
};

struct Null {
    bool operator==(const Null&) const { return true; }
    bool operator<(const Null&) const { return false; }
};

/// A single cell in a result row or a literal in a graph.
using Value = std::variant<Null, bool, std::int64_t, double, std::string, Iri>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }
inline bool is_numeric(const Value& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}
inline double as_double(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

/// Class rank used by the canonical sort: null, bool, number, string, iri.
inline int value_class(const Value& v) {
    switch (v.index()) {
        case 0: return 0;           // null
        case 1: return 1;           // bool
        case 2: case 3: return 2;   // number
        case 4: return 3;           // string
        default: return 4;          // iri
    }
}

/// Total order over values: class rank first, then within-class order.
/// Numbers compare numerically across int/double.
inline int compare_values(const Value& a, const Value& b) {
    int ca = value_class(a), cb = value_class(b);
    if (ca != cb) return ca < cb ? -1 : 1;
    switch (ca) {
        case 0: return 0;
        case 1: {
            bool x = std::get<bool>(a), y = std::get<bool>(b);
            return x == y ? 0 : (!x ? -1 : 1);
        }
        case 2: {
            double x = as_double(a), y = as_double(b);
            if (x < y) return -1;
            if (x > y) return 1;
            return 0;
        }
        case 3: return std::get<std::string>(a).compare(std::get<std::string>(b)) < 0   ? -1
                       : std::get<std::string>(a) == std::get<std::string>(b)           ? 0
                                                                                        : 1;
        default: return std::get<Iri>(a).uri.compare(std::get<Iri>(b).uri) < 0 ? -1
                        : std::get<Iri>(a).uri == std::get<Iri>(b).uri         ? 0
                                                                                : 1;
    }
}

inline bool values_equal(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

/// Renders a value the way it appears in query text or tabular output.
std::string value_to_display(const Value& v);

}  // namespace s2c

#pragma once

#include <string>
#include <vector>

#include "s2c/prefixes.hpp"
#include "s2c/value.hpp"

namespace s2c {

inline constexpr const char* kRdfTypeIri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// In-memory RDF store: a set of triples plus the prefix table they were
/// loaded with. Objects are either resources (Iri) or typed literals.
struct TripleStore {
    struct Triple {
        Iri subject;
        Iri predicate;
        Value object;

        bool operator==(const Triple& o) const {
            return subject == o.subject && predicate == o.predicate &&
                   values_equal(object, o.object);
        }
    };

    std::vector<Triple> triples;  // no duplicates, insertion order kept
    PrefixMap prefixes;

    void add(Iri subject, Iri predicate, Value object);

    /// Expands `label:local` through the store prefixes.
    Iri expand(const std::string& prefixed, const NamingOptions& naming = {}) const;

    /// Property-graph name of an IRI via longest-prefix match; unmatched IRIs
    /// fall back to the default label with the fragment/last path segment.
    std::string pg_name_of(const Iri& iri, const NamingOptions& naming = {}) const;
};

/// Parses a Turtle subset: @prefix / PREFIX declarations, simple triples,
/// `;` and `,` abbreviations, `a`, plain and typed literals, comments.
/// Throws TurtleSyntaxError on malformed input.
TripleStore load_turtle(const std::string& text);

}  // namespace s2c

#pragma once

#include <string>

#include "s2c/ordered_map.hpp"
#include "s2c/parse_tree.hpp"

namespace s2c {

/// Prefix-label → IRI base mapping from the query prologue. The empty label
/// ("" for ":") is the default prefix.
struct PrefixMap {
    OrderedMap<std::string> entries;

    bool has(const std::string& label) const { return entries.contains(label); }
    const std::string* iri_base(const std::string& label) const { return entries.find(label); }
    /// Last declaration wins.
    void declare(const std::string& label, const std::string& iri) { entries.set(label, iri); }
};

/// Naming behavior for the RDF → property-graph mapping.
struct NamingOptions {
    /// Property-graph label substituted for the empty prefix ":".
    std::string default_prefix_label = "ROOT";
    /// Reject prefixed names whose prefix has no declaration.
    bool strict = false;
};

/// Collects all PREFIX declarations of a parsed query.
PrefixMap resolve_prefixes(const ParseTree& tree);

/// Property-graph name of a prefixed name: `p:local` → `p__local`, the empty
/// prefix maps to the default label (`:singer` → `ROOT__singer`). Hyphens and
/// dots in the prefix label are flattened to underscores (`bsbm-inst:` →
/// `bsbm_inst__`). Throws UndeclaredPrefixError in strict mode for unknown
/// prefixes, and rejects local names containing `__` in strict mode to keep
/// the mapping injective.
std::string pg_name(const std::string& prefixed, const PrefixMap& prefixes,
                    const NamingOptions& opts = {});

/// Splits `p:local` into (label, local). Throws if there is no colon.
std::pair<std::string, std::string> split_prefixed_name(const std::string& prefixed);

}  // namespace s2c

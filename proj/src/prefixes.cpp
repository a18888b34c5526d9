#include "s2c/prefixes.hpp"

#include "s2c/errors.hpp"

namespace s2c {

PrefixMap resolve_prefixes(const ParseTree& tree) {
    PrefixMap map;
    const ParseTree* prologue = tree.first("prologue");
    if (!prologue) return map;
    for (const ParseTree* decl : prologue->all("prefixDecl")) {
        auto toks = decl->tokens();
        // PREFIX label: <iri>
        if (toks.size() != 3) continue;
        std::string label = toks[1]->text;
        label.pop_back();  // trailing ':'
        std::string iri = toks[2]->text;
        if (iri.size() >= 2) iri = iri.substr(1, iri.size() - 2);  // strip <>
        map.declare(label, iri);
    }
    return map;
}

std::pair<std::string, std::string> split_prefixed_name(const std::string& prefixed) {
    auto colon = prefixed.find(':');
    if (colon == std::string::npos)
        throw Error("not a prefixed name: '" + prefixed + "'");
    return {prefixed.substr(0, colon), prefixed.substr(colon + 1)};
}

namespace {

std::string sanitize_label(const std::string& label) {
    std::string out = label;
    for (char& c : out)
        if (c == '-' || c == '.') c = '_';
    return out;
}

}  // namespace

std::string pg_name(const std::string& prefixed, const PrefixMap& prefixes,
                    const NamingOptions& opts) {
    auto [label, local] = split_prefixed_name(prefixed);
    if (opts.strict) {
        if (!label.empty() && !prefixes.has(label))
            throw UndeclaredPrefixError("prefix '" + label + ":' has no declaration");
        if (local.find("__") != std::string::npos)
            throw UndeclaredPrefixError("local name '" + local +
                                        "' contains '__', reverse mapping would be ambiguous");
    }
    std::string head = label.empty() ? opts.default_prefix_label : sanitize_label(label);
    return head + "__" + local;
}

}  // namespace s2c

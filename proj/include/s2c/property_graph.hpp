#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "s2c/ast.hpp"
#include "s2c/triple_store.hpp"
#include "s2c/value.hpp"

namespace s2c {

/// Labeled property graph: nodes carry labels and literal-valued properties,
/// edges are typed and directed.
struct PropertyGraph {
    struct Node {
        Iri uri;
        std::set<std::string> labels;
        std::map<std::string, Value> properties;
    };
    struct Edge {
        std::size_t src = 0;
        std::string type;
        std::size_t dst = 0;
    };

    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::map<std::string, std::size_t> index;  // uri -> node id

    std::size_t ensure_node(const Iri& uri) {
        auto it = index.find(uri.uri);
        if (it != index.end()) return it->second;
        nodes.push_back(Node{uri, {}, {}});
        index[uri.uri] = nodes.size() - 1;
        return nodes.size() - 1;
    }

    const Node* find_node(const std::string& uri) const {
        auto it = index.find(uri);
        return it == index.end() ? nullptr : &nodes[it->second];
    }
};

/// Deterministic RDF → property-graph conversion: rdf:type triples become
/// node labels, literal-object triples become node properties, IRI-object
/// triples become typed edges (endpoints materialise as nodes even without
/// labels). Predicates listed in `re` are relationship-typed by definition,
/// which IRI objects already satisfy.
PropertyGraph materialize(const TripleStore& store, const ExplicitRels& re = {},
                          const NamingOptions& naming = {});

}  // namespace s2c

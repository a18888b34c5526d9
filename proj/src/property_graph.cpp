#include "s2c/property_graph.hpp"

namespace s2c {

PropertyGraph materialize(const TripleStore& store, const ExplicitRels& re,
                          const NamingOptions& naming) {
    (void)re;  // IRI-object triples map to edges unconditionally
    PropertyGraph graph;
    for (const TripleStore::Triple& t : store.triples) {
        std::size_t src = graph.ensure_node(t.subject);
        if (t.predicate.uri == kRdfTypeIri) {
            if (const Iri* cls = std::get_if<Iri>(&t.object)) {
                graph.nodes[src].labels.insert(store.pg_name_of(*cls, naming));
                continue;
            }
        }
        std::string name = store.pg_name_of(t.predicate, naming);
        if (const Iri* object = std::get_if<Iri>(&t.object)) {
            std::size_t dst = graph.ensure_node(*object);
            graph.edges.push_back({src, name, dst});
        } else {
            graph.nodes[src].properties[name] = t.object;
        }
    }
    return graph;
}

}  // namespace s2c

#pragma once

#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eolcycle/eolcycle.hpp"

// Readable values in test failure messages.
namespace eolcycle {
inline void PrintTo(const Term& t, std::ostream* os) { *os << display(t, PrefixMap::defaults()); }
inline void PrintTo(const Triple& t, std::ostream* os) {
    auto px = PrefixMap::defaults();
    *os << "(" << display(t.subject, px) << " " << display(t.predicate, px) << " " << display(t.object, px) << ")";
}
} // namespace eolcycle

namespace support {

inline std::string source_path(const std::string& rel) { return std::string(EOLCYCLE_SOURCE_DIR) + "/" + rel; }

inline std::string read(const std::string& rel) {
    std::ifstream in(source_path(rel), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline eolcycle::Graph load(const std::string& rel) {
    eolcycle::Graph g;
    eolcycle::load_data(g, read(rel));
    return g;
}

inline std::set<eolcycle::Triple> triples(const eolcycle::Graph& g) {
    std::set<eolcycle::Triple> out;
    for (const auto& f : g.facts()) out.insert(f.triple);
    return out;
}

/// A graph with a single schema-free vocabulary: classes C0..Cn and object
/// properties p0..pm over untyped nodes n0..nk. Used by the randomized
/// engine and query properties.
inline eolcycle::Schema toy_schema(int classes = 4, int properties = 4) {
    using namespace eolcycle;
    Schema s;
    for (int i = 0; i < classes; ++i) s.add_class(Term::iri("urn:t:C" + std::to_string(i)));
    for (int i = 0; i < properties; ++i)
        s.add_property(PropertyDef{Term::iri("urn:t:p" + std::to_string(i)), PropertyKind::Object, {}, {},
                                   Datatype::None, std::nullopt});
    s.add_property(PropertyDef{Term::iri("urn:t:v"), PropertyKind::Data, {}, {}, Datatype::Integer, std::nullopt});
    return s;
}

inline eolcycle::PrefixMap toy_prefixes() {
    auto px = eolcycle::PrefixMap::defaults();
    px.add("t", "urn:t:");
    return px;
}

inline eolcycle::Term node(int i) { return eolcycle::Term::iri("urn:t:n" + std::to_string(i)); }
inline eolcycle::Term cls(int i) { return eolcycle::Term::iri("urn:t:C" + std::to_string(i)); }
inline eolcycle::Term prop(int i) { return eolcycle::Term::iri("urn:t:p" + std::to_string(i)); }

/// Random facts over the toy vocabulary: edges, class memberships and small
/// integer values.
inline std::vector<eolcycle::Triple> random_triples(std::mt19937& rng, int count, int nodes = 8,
                                                    int classes = 4, int properties = 4) {
    using namespace eolcycle;
    std::uniform_int_distribution<int> n(0, nodes - 1), c(0, classes - 1), p(0, properties - 1),
        kind(0, 9), val(0, 5);
    std::vector<Triple> out;
    for (int i = 0; i < count; ++i) {
        int k = kind(rng);
        if (k < 6) out.push_back({node(n(rng)), prop(p(rng)), node(n(rng))});
        else if (k < 9) out.push_back({node(n(rng)), rdf_type(), cls(c(rng))});
        else out.push_back({node(n(rng)), Term::iri("urn:t:v"), Term::integer(val(rng))});
    }
    return out;
}

inline eolcycle::Graph toy_graph(const std::vector<eolcycle::Triple>& ts) {
    eolcycle::Graph g(toy_schema(), toy_prefixes());
    for (const auto& t : ts) g.assert_fact(t);
    return g;
}

} // namespace support

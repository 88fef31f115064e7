#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eolcycle/error.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

struct SchemaClass {
    Term name;
    std::vector<Term> parents;
    std::set<Term> disjoint_with;
};

enum class PropertyKind { Object, Data };

/// Domain and range are unions of classes; an empty list means unrestricted.
/// Data properties range over a single datatype tag.
struct PropertyDef {
    Term name;
    PropertyKind kind = PropertyKind::Object;
    std::vector<Term> domain;
    std::vector<Term> range_classes;
    Datatype range_datatype = Datatype::None;
    std::optional<Term> inverse_of;
};

/// Class hierarchy and property definitions. Classes can only name parents
/// that are already registered, so the subclass graph stays acyclic.
class Schema {
public:
    void add_class(const Term& name, std::vector<Term> parents = {}) {
        if (!name.is_iri()) throw Error(ErrorCode::SchemaError, "class name must be an IRI");
        if (classes_.count(name))
            throw Error(ErrorCode::SchemaError, "class " + name.lexical() + " already declared");
        for (const auto& p : parents) {
            if (!classes_.count(p))
                throw Error(ErrorCode::SchemaError,
                            "parent " + p.lexical() + " of " + name.lexical() + " is not declared");
        }
        classes_.emplace(name, SchemaClass{name, std::move(parents), {}});
    }

    void declare_disjoint(const Term& a, const Term& b) {
        require_class(a);
        require_class(b);
        if (a == b) throw Error(ErrorCode::SchemaError, "a class cannot be disjoint with itself");
        classes_.at(a).disjoint_with.insert(b);
        classes_.at(b).disjoint_with.insert(a);
    }

    void add_property(PropertyDef def) {
        if (properties_.count(def.name) || def.name == rdf_type())
            throw Error(ErrorCode::SchemaError, "property " + def.name.lexical() + " already declared");
        for (const auto& c : def.domain) require_class(c);
        if (def.kind == PropertyKind::Object) {
            for (const auto& c : def.range_classes) require_class(c);
            def.range_datatype = Datatype::None;
        } else {
            if (!def.range_classes.empty() || def.range_datatype == Datatype::None)
                throw Error(ErrorCode::SchemaError,
                            "data property " + def.name.lexical() + " needs a datatype range");
            if (def.inverse_of)
                throw Error(ErrorCode::SchemaError, "data properties cannot have inverses");
        }
        if (def.inverse_of) {
            auto it = properties_.find(*def.inverse_of);
            if (it == properties_.end())
                throw Error(ErrorCode::SchemaError,
                            "inverse " + def.inverse_of->lexical() + " is not declared");
            if (it->second.kind != PropertyKind::Object)
                throw Error(ErrorCode::SchemaError, "inverse must be an object property");
            if (it->second.inverse_of && *it->second.inverse_of != def.name)
                throw Error(ErrorCode::SchemaError,
                            it->first.lexical() + " already has a different inverse");
            it->second.inverse_of = def.name;
        }
        properties_.emplace(def.name, std::move(def));
    }

    bool has_class(const Term& c) const { return classes_.count(c) != 0; }

    const SchemaClass* find_class(const Term& c) const {
        auto it = classes_.find(c);
        return it == classes_.end() ? nullptr : &it->second;
    }

    const PropertyDef* find_property(const Term& p) const {
        auto it = properties_.find(p);
        return it == properties_.end() ? nullptr : &it->second;
    }

    /// `c` and every transitive parent, sorted.
    std::vector<Term> ancestors(const Term& c) const {
        std::set<Term> seen;
        std::deque<Term> work{c};
        while (!work.empty()) {
            Term cur = std::move(work.front());
            work.pop_front();
            if (!seen.insert(cur).second) continue;
            if (auto* sc = find_class(cur))
                for (const auto& p : sc->parents) work.push_back(p);
        }
        return {seen.begin(), seen.end()};
    }

    bool is_subclass_of(const Term& c, const Term& ancestor) const {
        auto a = ancestors(c);
        return std::binary_search(a.begin(), a.end(), ancestor);
    }

    bool disjoint(const Term& a, const Term& b) const {
        auto aa = ancestors(a);
        auto bb = ancestors(b);
        for (const auto& x : aa) {
            const auto* sc = find_class(x);
            if (!sc) continue;
            for (const auto& y : bb)
                if (sc->disjoint_with.count(y)) return true;
        }
        return false;
    }

    const std::map<Term, SchemaClass>& classes() const noexcept { return classes_; }
    const std::map<Term, PropertyDef>& properties() const noexcept { return properties_; }

private:
    void require_class(const Term& c) const {
        if (!classes_.count(c))
            throw Error(ErrorCode::SchemaError, "class " + c.lexical() + " is not declared");
    }

    std::map<Term, SchemaClass> classes_;
    std::map<Term, PropertyDef> properties_;
};

/// The eight top classes of the product model; pairwise disjoint.
inline std::vector<Term> top_classes() {
    return {ccpo("Product"),       ccpo("Material"),
            prov("Activity"),      ccpo("Actor"),
            ccpo("OwnershipRecord"), cco("InformationBearingArtifact"),
            dicbm("Property"),     ccpo("Location")};
}

/// Product, provenance and end-of-life vocabulary: the subset of the circular
/// construction product model needed by the bundled data, rules and queries.
inline Schema ccpo_schema() {
    Schema s;
    const auto tops = top_classes();
    for (const auto& c : tops) s.add_class(c);
    for (std::size_t i = 0; i < tops.size(); ++i)
        for (std::size_t j = i + 1; j < tops.size(); ++j) s.declare_disjoint(tops[i], tops[j]);

    const Term product = ccpo("Product"), material = ccpo("Material"), activity = prov("Activity");
    const Term actor = ccpo("Actor"), ownership = ccpo("OwnershipRecord");
    const Term artifact = cco("InformationBearingArtifact"), location = ccpo("Location");
    const Term property = dicbm("Property");

    s.add_class(ccpo("Component"), {product});
    s.add_class(ccpo("GroupedComponent"), {product});
    s.add_class(ccpo("Document"), {artifact});
    s.add_class(ccpo("Barcode"), {artifact});
    s.add_class(ccpo("HealthState"), {property});
    s.add_class(ccpo("MarketDemandLevel"), {property});
    s.add_class(ccpo("EoLRoute"));

    auto object = [&](Term name, std::vector<Term> domain, std::vector<Term> range,
                      std::optional<Term> inverse = std::nullopt) {
        s.add_property(PropertyDef{std::move(name), PropertyKind::Object, std::move(domain),
                                   std::move(range), Datatype::None, std::move(inverse)});
    };
    auto data = [&](Term name, std::vector<Term> domain, Datatype dt) {
        s.add_property(PropertyDef{std::move(name), PropertyKind::Data, std::move(domain), {}, dt,
                                   std::nullopt});
    };

    object(ccpo("hasComponent"), {product}, {ccpo("Component")});
    object(ccpo("isComponentOf"), {ccpo("Component")}, {product}, ccpo("hasComponent"));
    object(ccpo("hasVirginMaterial"), {product}, {material});
    object(ccpo("hasNonVirginMaterial"), {product}, {material});
    object(prov("wasGeneratedBy"), {product, material}, {activity});
    object(prov("generated"), {activity}, {product, material}, prov("wasGeneratedBy"));
    object(prov("used"), {activity}, {product, material});
    object(prov("wasAssociatedWith"), {activity}, {actor});
    object(ccpo("wasInvolvedInActivity"), {product}, {activity});
    object(ccpo("hasOwnershipRecord"), {product}, {ownership});
    object(ccpo("hasOwner"), {ownership}, {actor});
    object(ccpo("hasInformationArtifact"), {product, material}, {artifact});
    object(ccpo("hasLocation"), {artifact}, {location});
    object(ccpo("hasProperty"), {product, material}, {property});
    object(ccpo("hasHealthState"), {product}, {ccpo("HealthState")});
    object(ccpo("hasMarketDemand"), {product}, {ccpo("MarketDemandLevel")});
    object(ccpo("hasEoLStrategy"), {product}, {artifact});
    object(ccpo("suggestedEoLRoute"), {product}, {ccpo("EoLRoute")});

    data(prov("startedAtTime"), {activity, ownership}, Datatype::Timestamp);
    data(prov("endedAtTime"), {activity, ownership}, Datatype::Timestamp);
    data(ccpo("referenceServiceLife"), {product}, Datatype::Integer);
    data(ccpo("actualServiceLife"), {product}, Datatype::Integer);
    data(ccpo("atEoL"), {product}, Datatype::Boolean);
    data(ccpo("eolStrategyExists"), {product}, Datatype::Boolean);
    data(ccpo("designedForDisassembly"), {product}, Datatype::Boolean);
    data(ccpo("initialHealth"), {product}, Datatype::Decimal);
    data(ccpo("healthDeclineRate"), {product}, Datatype::Decimal);
    data(ccpo("url"), {location}, Datatype::String);
    data(rdfs("label"), {}, Datatype::String);
    data(rdfs("comment"), {}, Datatype::String);
    return s;
}

} // namespace eolcycle

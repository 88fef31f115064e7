#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eolcycle/format.hpp"
#include "eolcycle/graph.hpp"

namespace eolcycle {

enum class ValidationMode { Advisory, Strict };

struct ValidationIssue {
    std::string code;
    std::string entity;
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    std::size_t checked = 0;

    bool consistent() const noexcept { return errors.empty(); }
    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

namespace validation_code {
inline constexpr const char* disjoint = "disjoint-classes";
inline constexpr const char* cardinality = "cardinality";
inline constexpr const char* domain = "domain";
inline constexpr const char* range = "range";
inline constexpr const char* temporal = "temporal-order";
inline constexpr const char* missing_generation = "missing-generation";
inline constexpr const char* missing_artifact = "missing-information-artifact";
inline constexpr const char* missing_used = "missing-used";
} // namespace validation_code

/// Closed-world consistency checks over the current graph state:
/// disjoint class membership, the two-component minimum of grouped
/// components, domain/range conformance, start-before-end of timed
/// processes, and the existential axioms (generation, information artifact,
/// activity inputs). Existential gaps are warnings unless `mode` is Strict.
inline ValidationReport validate(const Graph& graph, ValidationMode mode = ValidationMode::Advisory) {
    ValidationReport report;
    const auto& schema = graph.schema();
    const auto& px = graph.prefixes();
    auto name = [&](const Term& t) { return display(t, px); };
    auto error = [&](const char* code, const Term& e, std::string msg) {
        report.errors.push_back({code, name(e), std::move(msg)});
    };
    auto existential = [&](const char* code, const Term& e, std::string msg) {
        auto& sink = mode == ValidationMode::Strict ? report.errors : report.warnings;
        sink.push_back({code, name(e), std::move(msg)});
    };

    std::set<Term> typed;
    for (FactId id : graph.find(std::nullopt, rdf_type(), std::nullopt))
        typed.insert(graph.fact(id).subject());

    auto fits = [&](const Term& entity, const std::vector<Term>& classes) {
        auto types = graph.types_of(entity);
        if (classes.empty() || types.empty()) return true;
        for (const auto& t : types)
            for (const auto& c : classes)
                if (schema.is_subclass_of(t, c)) return true;
        return false;
    };

    // Disjointness.
    for (const auto& e : typed) {
        auto types = graph.types_of(e);
        for (std::size_t i = 0; i < types.size(); ++i) {
            const auto* sc = schema.find_class(types[i]);
            for (std::size_t j = i + 1; j < types.size(); ++j) {
                ++report.checked;
                if (sc && sc->disjoint_with.count(types[j]))
                    error(validation_code::disjoint, e,
                          "typed as both " + name(types[i]) + " and " + name(types[j]) +
                              ", which are disjoint");
            }
        }
    }

    // Grouped components need at least two distinct Component parts.
    const Term component = ccpo("Component"), has_component = ccpo("hasComponent");
    for (FactId id : graph.find(std::nullopt, rdf_type(), ccpo("GroupedComponent"))) {
        const Term& e = graph.fact(id).subject();
        ++report.checked;
        std::size_t parts = 0;
        for (const auto& c : graph.objects(e, has_component))
            if (graph.has_type(c, component)) ++parts;
        if (parts < 2)
            error(validation_code::cardinality, e,
                  "grouped component has " + std::to_string(parts) +
                      " hasComponent part(s) of type Component; at least 2 required");
    }

    // Domain and range.
    for (const auto& f : graph.facts()) {
        if (f.predicate() == rdf_type()) continue;
        const auto* def = schema.find_property(f.predicate());
        if (!def) continue;
        ++report.checked;
        if (!fits(f.subject(), def->domain))
            error(validation_code::domain, f.subject(),
                  "subject of " + name(f.predicate()) + " is outside the property's domain");
        if (def->kind == PropertyKind::Object) {
            ++report.checked;
            if (!fits(f.object(), def->range_classes))
                error(validation_code::range, f.object(),
                      "object of " + name(f.subject()) + " " + name(f.predicate()) +
                          " is outside the property's range");
        }
    }

    // Timed processes end after they start.
    const Term started = prov("startedAtTime"), ended = prov("endedAtTime");
    for (const Term& cls : {prov("Activity"), ccpo("OwnershipRecord")}) {
        for (FactId id : graph.find(std::nullopt, rdf_type(), cls)) {
            const Term& e = graph.fact(id).subject();
            for (const auto& s : graph.objects(e, started)) {
                for (const auto& en : graph.objects(e, ended)) {
                    ++report.checked;
                    auto a = s.as_timestamp_ms(), b = en.as_timestamp_ms();
                    if (a && b && *b < *a)
                        error(validation_code::temporal, e,
                              "ends at " + en.lexical() + " before it starts at " + s.lexical());
                }
            }
        }
    }

    // Existential axioms.
    const Term generated_by = prov("wasGeneratedBy"), artifact = ccpo("hasInformationArtifact");
    for (FactId id : graph.find(std::nullopt, rdf_type(), ccpo("Product"))) {
        const Term& e = graph.fact(id).subject();
        ++report.checked;
        if (graph.objects(e, generated_by).empty())
            existential(validation_code::missing_generation, e,
                        "product has no prov:wasGeneratedBy activity");
    }
    for (const Term& cls : {ccpo("Product"), ccpo("Material")}) {
        for (FactId id : graph.find(std::nullopt, rdf_type(), cls)) {
            const Term& e = graph.fact(id).subject();
            ++report.checked;
            if (graph.objects(e, artifact).empty())
                existential(validation_code::missing_artifact, e,
                            "no hasInformationArtifact link to an information-bearing artifact");
        }
    }
    for (FactId id : graph.find(std::nullopt, rdf_type(), prov("Activity"))) {
        const Term& e = graph.fact(id).subject();
        ++report.checked;
        if (graph.objects(e, prov("used")).empty())
            existential(validation_code::missing_used, e, "activity has no prov:used input");
    }
    return report;
}

inline nlohmann::ordered_json to_json(const ValidationReport& r) {
    auto list = [](const std::vector<ValidationIssue>& issues) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& i : issues)
            arr.push_back({{"code", i.code}, {"entity", i.entity}, {"message", i.message}});
        return arr;
    };
    return {{"errors", list(r.errors)}, {"warnings", list(r.warnings)}, {"checked", r.checked}};
}

inline std::string format_report(const ValidationReport& r, OutputFormat fmt) {
    std::ostringstream out;
    switch (fmt) {
    case OutputFormat::Json: out << to_json(r).dump(2) << '\n'; break;
    case OutputFormat::Tsv:
        out << "severity\tcode\tentity\tmessage\n";
        for (const auto& i : r.errors) out << "error\t" << i.code << '\t' << i.entity << '\t' << i.message << '\n';
        for (const auto& i : r.warnings) out << "warning\t" << i.code << '\t' << i.entity << '\t' << i.message << '\n';
        break;
    case OutputFormat::Pretty:
        out << (r.consistent() ? "consistent" : "INCONSISTENT") << ": " << r.errors.size()
            << " error(s), " << r.warnings.size() << " warning(s), " << r.checked
            << " constraint(s) checked\n";
        for (const auto& i : r.errors) out << "  error   [" << i.code << "] " << i.entity << ": " << i.message << '\n';
        for (const auto& i : r.warnings) out << "  warning [" << i.code << "] " << i.entity << ": " << i.message << '\n';
        break;
    }
    return out.str();
}

} // namespace eolcycle

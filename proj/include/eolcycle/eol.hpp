#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eolcycle/error.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/reasoner.hpp"
#include "eolcycle/rules.hpp"

namespace eolcycle {

// ---------------------------------------------------------------------------
// Health model

struct HealthModelParams {
    double p_h0 = 1.0;   // initial health, (0, 1]
    double alpha = 0.0;  // decline per year, >= 0
    double od = 0.0;     // operating duration in years, >= 0
};

/// P_H = P_H0 * exp(-alpha * OD).
inline double health_value(const HealthModelParams& p) {
    if (!(p.p_h0 > 0.0 && p.p_h0 <= 1.0))
        throw Error(ErrorCode::DomainError, "initial health must lie in (0, 1]");
    if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha))
        throw Error(ErrorCode::DomainError, "decline rate must be finite and non-negative");
    if (!(p.od >= 0.0) || !std::isfinite(p.od))
        throw Error(ErrorCode::DomainError, "operating duration must be finite and non-negative");
    return p.p_h0 * std::exp(-p.alpha * p.od);
}

/// RICS condition rating: green = 1, amber = 2, red = 3.
enum class HealthRating { Green = 1, Amber = 2, Red = 3 };

inline int rics_rating(HealthRating h) noexcept { return static_cast<int>(h); }

inline HealthRating rating_from_rics(int r) {
    if (r < 1 || r > 3) throw Error(ErrorCode::DomainError, "RICS rating must be 1, 2 or 3");
    return static_cast<HealthRating>(r);
}

inline std::string_view rating_name(HealthRating h) noexcept {
    switch (h) {
    case HealthRating::Green: return "green";
    case HealthRating::Amber: return "amber";
    case HealthRating::Red: return "red";
    }
    return "red";
}

inline Term rating_term(HealthRating h) { return ccpo(rating_name(h)); }

inline std::optional<HealthRating> rating_from_term(const Term& t) {
    for (auto h : {HealthRating::Green, HealthRating::Amber, HealthRating::Red})
        if (t == rating_term(h)) return h;
    return std::nullopt;
}

struct HealthThresholds {
    double green_min = 0.7;
    double amber_min = 0.4;
};

inline HealthRating classify_health(double value, HealthThresholds t = {}) {
    if (!(t.green_min <= 1.0 && t.green_min > t.amber_min && t.amber_min >= 0.0))
        throw Error(ErrorCode::InvalidThresholds,
                    "thresholds must satisfy 1 >= green-min > amber-min >= 0");
    if (value >= t.green_min) return HealthRating::Green;
    if (value >= t.amber_min) return HealthRating::Amber;
    return HealthRating::Red;
}

// ---------------------------------------------------------------------------
// Routes and product state

enum class EoLRoute {
    StrongReuse,
    WeakReuse,
    CannotReuse,
    FollowStrategy,
    Recycle,
    DoNotRecycle,
    Landfill,
};

inline constexpr std::array<EoLRoute, 7> kAllRoutes{
    EoLRoute::StrongReuse, EoLRoute::WeakReuse,    EoLRoute::CannotReuse, EoLRoute::FollowStrategy,
    EoLRoute::Recycle,     EoLRoute::DoNotRecycle, EoLRoute::Landfill};

inline constexpr int kIntermediateRank = 99;

inline std::string_view route_name(EoLRoute r) noexcept {
    switch (r) {
    case EoLRoute::StrongReuse: return "StrongReuseSuggestion";
    case EoLRoute::WeakReuse: return "WeakReuse_ConsiderRefurbishmentSoon";
    case EoLRoute::CannotReuse: return "CannotReuseDueToPoorProductHealth";
    case EoLRoute::FollowStrategy: return "FollowManufacturerEoLStrategy";
    case EoLRoute::Recycle: return "RecycleDueToHighMarketDemand";
    case EoLRoute::DoNotRecycle: return "DoNotRecycleDueToLowDemand";
    case EoLRoute::Landfill: return "SendToLandfill";
    }
    return "";
}

/// Waste-hierarchy rank: reuse 1, manufacturer strategy 2, recycle 3,
/// landfill 4. Intermediate classifications never win.
inline int route_rank(EoLRoute r) noexcept {
    switch (r) {
    case EoLRoute::StrongReuse:
    case EoLRoute::WeakReuse: return 1;
    case EoLRoute::FollowStrategy: return 2;
    case EoLRoute::Recycle: return 3;
    case EoLRoute::Landfill: return 4;
    default: return kIntermediateRank;
    }
}

inline bool is_intermediate(EoLRoute r) noexcept { return route_rank(r) == kIntermediateRank; }

inline Term route_term(EoLRoute r) { return ccpo(route_name(r)); }

inline std::optional<EoLRoute> route_from_term(const Term& t) {
    for (auto r : kAllRoutes)
        if (t == route_term(r)) return r;
    return std::nullopt;
}

inline std::optional<EoLRoute> route_from_name(std::string_view name) {
    for (auto r : kAllRoutes)
        if (route_name(r) == name) return r;
    return std::nullopt;
}

/// Lowest-rank non-intermediate route; nullopt when only intermediates.
inline std::optional<EoLRoute> select_final(const std::set<EoLRoute>& routes) {
    std::optional<EoLRoute> best;
    for (auto r : routes) {
        if (is_intermediate(r)) continue;
        if (!best || route_rank(r) < route_rank(*best)) best = r;
    }
    return best;
}

enum class MarketDemand { High, Avg, Low };

inline std::string_view demand_name(MarketDemand d) noexcept {
    switch (d) {
    case MarketDemand::High: return "high";
    case MarketDemand::Avg: return "avg";
    case MarketDemand::Low: return "low";
    }
    return "low";
}

inline Term demand_term(MarketDemand d) { return ccpo(demand_name(d)); }

struct ProductState {
    HealthRating health = HealthRating::Green;
    std::int64_t rsl = 0;
    std::int64_t asl = 0;
    bool strategy_exists = false;
    MarketDemand demand = MarketDemand::Low;
    bool dfd = false;
};

struct OracleDecision {
    bool at_eol = false;
    std::optional<EoLRoute> route;

    friend bool operator==(const OracleDecision&, const OracleDecision&) = default;
};

/// Direct transcription of the decision algorithm, with no rule engine.
/// Weak reuse is only reachable for non-red products; the recycle branch
/// reads as high OR (avg AND dfd).
inline OracleDecision oracle_decision(const ProductState& s, std::int64_t eol_window = 1) {
    OracleDecision d;
    d.at_eol = s.rsl - s.asl <= eol_window;
    if (!d.at_eol) return d;
    const bool red = s.health == HealthRating::Red;
    const bool green = s.health == HealthRating::Green;
    const bool amber = s.health == HealthRating::Amber;
    const bool strong = green && s.asl < s.rsl;
    const bool weak = !red && !strong && (amber || s.asl >= s.rsl);
    if (strong) d.route = EoLRoute::StrongReuse;
    else if (weak) d.route = EoLRoute::WeakReuse;
    else if (s.strategy_exists) d.route = EoLRoute::FollowStrategy;
    else if (s.demand == MarketDemand::High || (s.demand == MarketDemand::Avg && s.dfd))
        d.route = EoLRoute::Recycle;
    else d.route = EoLRoute::Landfill;
    return d;
}

/// Asserts the facts describing `s` for `product`; a strategy is modelled as
/// a linked document.
inline void assert_state(Graph& g, const Term& product, const ProductState& s) {
    g.assert_fact(Triple{product, rdf_type(), ccpo("Product")});
    g.assert_fact(Triple{product, ccpo("referenceServiceLife"), Term::integer(s.rsl)});
    g.assert_fact(Triple{product, ccpo("actualServiceLife"), Term::integer(s.asl)});
    g.assert_fact(Triple{product, ccpo("hasHealthState"), rating_term(s.health)});
    g.assert_fact(Triple{product, ccpo("hasMarketDemand"), demand_term(s.demand)});
    g.assert_fact(Triple{product, ccpo("designedForDisassembly"), Term::boolean(s.dfd)});
    if (s.strategy_exists) {
        Term doc = Term::iri(product.lexical() + "_strategy");
        g.assert_fact(Triple{doc, rdf_type(), ccpo("Document")});
        g.assert_fact(Triple{product, ccpo("hasEoLStrategy"), doc});
    }
}

// ---------------------------------------------------------------------------
// Ruleset

struct RulesetOptions {
    bool reconciliation = true;
    std::int64_t eol_window = 1;
};

inline constexpr std::string_view kReconPrefix = "recon:";

inline std::string default_ruleset_text(RulesetOptions opt = {}) {
    std::string text =
        "Rule1: Product(?p) ^ referenceServiceLife(?p, ?r) ^ actualServiceLife(?p, ?a) ^ "
        "swrlb:subtract(?diff, ?r, ?a) ^ swrlb:lessThanOrEqual(?diff, " +
        std::to_string(opt.eol_window) + ") -> atEoL(?p, true)\n" +
        R"(Rule2.i: Product(?p) ^ atEoL(?p, true) ^ hasHealthState(?p, green) ^ actualServiceLife(?p, ?a) ^ referenceServiceLife(?p, ?r) ^ swrlb:subtract(?diff, ?r, ?a) ^ swrlb:greaterThan(?diff, 0) -> suggestedEoLRoute(?p, StrongReuseSuggestion)
Rule2.ii: Product(?p) ^ atEoL(?p, true) ^ hasHealthState(?p, amber) -> suggestedEoLRoute(?p, WeakReuse_ConsiderRefurbishmentSoon)
Rule2.iii: Product(?p) ^ atEoL(?p, true) ^ hasHealthState(?p, red) -> suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth)
Rule3.i: Product(?p) ^ hasEoLStrategy(?p, ?s) -> eolStrategyExists(?p, true)
Rule3.ii: Product(?p) ^ atEoL(?p, true) ^ suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth) ^ eolStrategyExists(?p, true) -> suggestedEoLRoute(?p, FollowManufacturerEoLStrategy)
Rule3.iii: Product(?p) ^ atEoL(?p, true) ^ hasMarketDemand(?p, high) ^ suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth) -> suggestedEoLRoute(?p, RecycleDueToHighMarketDemand)
Rule3.iv: Product(?p) ^ atEoL(?p, true) ^ suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth) ^ hasMarketDemand(?p, low) -> suggestedEoLRoute(?p, DoNotRecycleDueToLowDemand)
Rule4: Product(?p) ^ atEoL(?p, true) ^ suggestedEoLRoute(?p, DoNotRecycleDueToLowDemand) -> suggestedEoLRoute(?p, SendToLandfill)
)";
    if (opt.reconciliation)
        text += R"(recon:R2.iv: Product(?p) ^ atEoL(?p, true) ^ hasHealthState(?p, green) ^ actualServiceLife(?p, ?a) ^ referenceServiceLife(?p, ?r) ^ swrlb:subtract(?diff, ?r, ?a) ^ swrlb:lessThanOrEqual(?diff, 0) -> suggestedEoLRoute(?p, WeakReuse_ConsiderRefurbishmentSoon)
recon:R3.v: Product(?p) ^ atEoL(?p, true) ^ suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth) ^ hasMarketDemand(?p, avg) ^ designedForDisassembly(?p, true) -> suggestedEoLRoute(?p, RecycleDueToHighMarketDemand)
recon:R3.vi: Product(?p) ^ atEoL(?p, true) ^ suggestedEoLRoute(?p, CannotReuseDueToPoorProductHealth) ^ hasMarketDemand(?p, avg) ^ designedForDisassembly(?p, false) -> suggestedEoLRoute(?p, DoNotRecycleDueToLowDemand)
)";
    return text;
}

inline std::vector<Rule> default_ruleset(RulesetOptions opt = {}) {
    return parse_rules(default_ruleset_text(opt));
}

/// Drops the reconciliation rules from a ruleset.
inline std::vector<Rule> without_reconciliation(std::vector<Rule> rules) {
    std::erase_if(rules, [](const Rule& r) { return r.name.starts_with(kReconPrefix); });
    return rules;
}

// ---------------------------------------------------------------------------
// Decision

struct DecisionReport {
    Term product;
    bool at_eol = false;
    std::set<EoLRoute> derived_routes;
    std::optional<EoLRoute> final_route;
    std::vector<std::string> fired_rules;
    std::vector<TraceStep> trace;  // steps whose produced fact is about the product
    std::size_t rounds = 0;
};

/// Checks that `product` names a Product in `graph`.
inline void require_product(const Graph& graph, const Term& product) {
    if (!graph.mentions(product))
        throw Error(ErrorCode::UnknownProduct,
                    graph.prefixes().compact(product.lexical()) + " does not occur in the data");
    if (!graph.has_type(product, ccpo("Product")))
        throw Error(ErrorCode::NotAProduct,
                    graph.prefixes().compact(product.lexical()) + " is not typed ccpo:Product");
}

/// Runs the ruleset over `graph` in place and reads the outcome for `product`.
inline DecisionReport decide_in_place(Graph& graph, const Term& product, const std::vector<Rule>& rules,
                                      InferenceLimits limits = {}) {
    require_product(graph, product);
    auto result = forward_chain(graph, rules, limits);
    DecisionReport report;
    report.product = product;
    report.rounds = result.rounds;
    report.at_eol = graph.contains({product, ccpo("atEoL"), Term::boolean(true)});
    for (const auto& t : graph.objects(product, ccpo("suggestedEoLRoute")))
        if (auto r = route_from_term(t)) report.derived_routes.insert(*r);
    if (report.at_eol) report.final_route = select_final(report.derived_routes);
    for (const auto& step : result.trace.steps) {
        if (step.duplicate) continue;
        if (std::find(report.fired_rules.begin(), report.fired_rules.end(), step.rule) ==
            report.fired_rules.end())
            report.fired_rules.push_back(step.rule);
        if (step.produced.subject == product) report.trace.push_back(step);
    }
    return report;
}

/// As decide_in_place() but leaves `graph` untouched.
inline DecisionReport decide(const Graph& graph, const Term& product, const std::vector<Rule>& rules,
                             InferenceLimits limits = {}) {
    Graph work = graph;
    return decide_in_place(work, product, rules, limits);
}

inline std::string describe_triple(const Triple& t, const PrefixMap& px) {
    return display(t.subject, px) + " " + display(t.predicate, px) + " " + display(t.object, px);
}

inline nlohmann::ordered_json to_json(const DecisionReport& r, const PrefixMap& px) {
    nlohmann::ordered_json j;
    j["product"] = px.compact(r.product.lexical());
    j["atEoL"] = r.at_eol;
    auto routes = nlohmann::ordered_json::array();
    for (auto route : r.derived_routes) routes.push_back(route_name(route));
    j["derivedRoutes"] = routes;
    j["final"] = r.final_route ? nlohmann::ordered_json(route_name(*r.final_route)) : nlohmann::ordered_json();
    j["firedRules"] = r.fired_rules;
    auto trace = nlohmann::ordered_json::array();
    for (const auto& s : r.trace) {
        nlohmann::ordered_json b = nlohmann::ordered_json::object();
        for (const auto& [k, v] : s.binding) b[k] = display(v, px);
        trace.push_back({{"round", s.iteration}, {"rule", s.rule}, {"bindings", b},
                         {"produced", describe_triple(s.produced, px)}});
    }
    j["trace"] = trace;
    return j;
}

/// Adds hasHealthState for products that carry initialHealth,
/// healthDeclineRate and actualServiceLife but no asserted state. Returns
/// the number of states added.
inline std::size_t derive_health_states(Graph& g, HealthThresholds t = {}) {
    std::vector<Triple> pending;
    for (FactId id : g.find(std::nullopt, rdf_type(), ccpo("Product"))) {
        const Term& p = g.fact(id).subject();
        if (!g.objects(p, ccpo("hasHealthState")).empty()) continue;
        auto h0 = g.objects(p, ccpo("initialHealth"));
        auto rate = g.objects(p, ccpo("healthDeclineRate"));
        auto asl = g.objects(p, ccpo("actualServiceLife"));
        if (h0.empty() || rate.empty() || asl.empty()) continue;
        auto num = [](const Term& x) {
            auto n = x.as_numeric();
            return n ? std::visit([](auto v) { return static_cast<double>(v); }, *n) : -1.0;
        };
        double v = health_value({num(h0.front()), num(rate.front()), num(asl.front())});
        pending.push_back({p, ccpo("hasHealthState"), rating_term(classify_health(v, t))});
    }
    for (const auto& tr : pending) g.assert_fact(tr, Origin::asserted());
    return pending.size();
}

} // namespace eolcycle

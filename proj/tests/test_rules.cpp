#include <gtest/gtest.h>

#include <random>

#include "checks.hpp"

using namespace eolcycle;

namespace {

const std::string kRule1 =
    "Rule1: Product(?p) ^ referenceServiceLife(?p, ?r) ^ actualServiceLife(?p, ?a) ^ "
    "swrlb:subtract(?diff, ?r, ?a) ^ swrlb:lessThanOrEqual(?diff, 1) -> atEoL(?p, true)";

ErrorCode rule_error(std::string_view text) {
    try {
        (void)parse_rules(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorCode::IoError;
}

std::optional<Term> num(std::int64_t v) { return Term::integer(v); }

BuiltinResult call(Builtin b, std::vector<std::optional<Term>> args) { return evaluate_builtin(b, args); }

Graph iwp() { return support::load("fixtures/iwp.ttl"); }

} // namespace

TEST(ParseRules, Rule1Shape) {
    auto rules = parse_rules(kRule1);
    ASSERT_EQ(rules.size(), 1u);
    const auto& r = rules[0];
    EXPECT_EQ(r.name, "Rule1");
    ASSERT_EQ(r.body.size(), 5u);
    EXPECT_EQ(r.body[0].kind, AtomKind::Class);
    EXPECT_EQ(r.body[1].kind, AtomKind::Property);
    EXPECT_EQ(r.body[2].kind, AtomKind::Property);
    EXPECT_EQ(r.body[3].builtin, Builtin::Subtract);
    EXPECT_EQ(r.body[4].builtin, Builtin::LessThanOrEqual);
    EXPECT_EQ(r.body[4].args[1], Term::integer(1));
    EXPECT_EQ(r.head.predicate, ccpo("atEoL"));
    EXPECT_EQ(r.head.args, (std::vector<Term>{Term::variable("p"), Term::boolean(true)}));
}

TEST(ParseRules, Rule1RoundTrips) {
    auto rules = parse_rules(kRule1);
    EXPECT_EQ(format_rule(rules[0]), kRule1);
}

TEST(ParseRules, UnsafeRules) {
    EXPECT_EQ(rule_error("R: Product(?p) -> suggestedEoLRoute(?q, Reuse)"), ErrorCode::UnsafeRule);
    try {
        (void)parse_rules("R: swrlb:subtract(?d,?r,?a) -> atEoL(?p,true)");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsafeRule);
        std::string msg = e.what();
        EXPECT_NE(msg.find("?p"), std::string::npos) << msg;
        EXPECT_NE(msg.find("?r, ?a"), std::string::npos) << msg;
    }
}

TEST(ParseRules, Errors) {
    EXPECT_EQ(rule_error("R: Product(?p) ^ swrlb:frobnicate(?p) -> atEoL(?p, true)"), ErrorCode::UnknownBuiltin);
    EXPECT_EQ(rule_error("R: Product(?p) ^ swrlb:lessThan(?p) -> atEoL(?p, true)"),
              ErrorCode::BuiltinArityMismatch);
    EXPECT_EQ(rule_error("R: Product(?p) -> swrlb:equal(?p, ?p)"), ErrorCode::SyntaxError);
    EXPECT_EQ(rule_error("R: Product(?p) ^ -> atEoL(?p, true)"), ErrorCode::SyntaxError);
    EXPECT_EQ(rule_error("R: zz:Thing(?p) -> atEoL(?p, true)"), ErrorCode::UnknownPrefix);
    try {
        (void)parse_rules("# comment\nR: Product(?p) -> atEoL(?p true)\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
        ASSERT_TRUE(e.where());
        EXPECT_EQ(e.where()->line, 2u);
    }
}

TEST(ParseRules, BundledFileMatchesDefaultRuleset) {
    auto from_file = parse_rules(support::read("rules/eol.rules"));
    EXPECT_EQ(from_file, default_ruleset());
    for (const auto& r : from_file) EXPECT_EQ(parse_rules(format_rule(r)), std::vector<Rule>{r}) << r.name;
}

TEST(Builtins, Examples) {
    EXPECT_EQ(std::get<Term>(call(Builtin::Subtract, {std::nullopt, num(25), num(24)})), Term::integer(1));
    EXPECT_TRUE(std::get<bool>(call(Builtin::Subtract, {num(1), num(25), num(24)})));
    EXPECT_FALSE(std::get<bool>(call(Builtin::Subtract, {num(2), num(25), num(24)})));
    EXPECT_TRUE(std::get<bool>(call(Builtin::LessThanOrEqual, {num(1), num(1)})));
    EXPECT_FALSE(std::get<bool>(call(Builtin::GreaterThan, {num(0), num(0)})));
}

TEST(Builtins, NumericPromotionAndExactIntegers) {
    EXPECT_EQ(std::get<Term>(call(Builtin::Add, {std::nullopt, num(2), Term::decimal(0.5)})), Term::decimal(2.5));
    EXPECT_EQ(std::get<Term>(call(Builtin::Multiply, {std::nullopt, num(3037000499), num(3037000499)})),
              Term::integer(9223372030926249001));
    EXPECT_TRUE(std::get<bool>(call(Builtin::Equal, {num(1), Term::decimal(1.0)})));
    EXPECT_TRUE(std::get<bool>(call(Builtin::LessThan, {Term::literal("2001-01-01", Datatype::Timestamp),
                                                       Term::literal("2001-01-02", Datatype::Timestamp)})));
}

TEST(Builtins, Errors) {
    auto code = [](Builtin b, std::vector<std::optional<Term>> args) {
        try {
            (void)evaluate_builtin(b, args);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    EXPECT_EQ(code(Builtin::Subtract, {std::nullopt, std::nullopt, num(1)}), ErrorCode::UnboundArgument);
    EXPECT_EQ(code(Builtin::LessThan, {num(1), std::nullopt}), ErrorCode::UnboundArgument);
    EXPECT_EQ(code(Builtin::Subtract, {std::nullopt, Term::string_literal("25"), num(1)}),
              ErrorCode::NonNumericArgument);
    EXPECT_EQ(code(Builtin::LessThan, {num(1), ccpo("x")}), ErrorCode::NonNumericArgument);
    EXPECT_EQ(code(Builtin::LessThan, {num(1)}), ErrorCode::BuiltinArityMismatch);
}

TEST(ForwardChain, FixtureRule1ThenRule2i) {
    auto g = iwp();
    auto rules = parse_rules(support::read("rules/eol.rules"));
    std::erase_if(rules, [](const Rule& r) { return r.name != "Rule1" && r.name != "Rule2.i"; });
    ASSERT_EQ(rules.size(), 2u);
    auto result = forward_chain(g, rules);
    EXPECT_EQ(result.rounds, 3u);
    std::vector<Triple> want{{ccpo("iwp1"), ccpo("atEoL"), Term::boolean(true)},
                             {ccpo("iwp1"), ccpo("suggestedEoLRoute"), ccpo("StrongReuseSuggestion")}};
    EXPECT_EQ(result.inferred, want);
    ASSERT_EQ(result.trace.steps.size(), 2u);
    EXPECT_EQ(result.trace.steps[0].rule, "Rule1");
    EXPECT_EQ(result.trace.steps[0].iteration, 1u);
    EXPECT_EQ(result.trace.steps[0].binding.at("diff"), Term::integer(1));
    EXPECT_EQ(result.trace.steps[1].rule, "Rule2.i");
    EXPECT_EQ(result.trace.steps[1].iteration, 2u);
}

TEST(ForwardChain, EmptyRulesetTakesOneRound) {
    auto g = iwp();
    auto size = g.size();
    auto result = forward_chain(g, {});
    EXPECT_TRUE(result.inferred.empty());
    EXPECT_EQ(result.rounds, 1u);
    EXPECT_EQ(g.size(), size);
}

TEST(ForwardChain, MutualRulesTerminate) {
    Graph g(support::toy_schema(), support::toy_prefixes());
    g.assert_fact(Triple{support::node(0), rdf_type(), support::cls(0)});
    g.assert_fact(Triple{support::node(1), rdf_type(), support::cls(1)});
    auto px = support::toy_prefixes();
    auto rules = parse_rules("A: t:C0(?x) -> t:C1(?x)\nB: t:C1(?x) -> t:C0(?x)\n", px, "urn:t:");
    auto result = forward_chain(g, rules);
    EXPECT_EQ(result.inferred.size(), 2u);
    EXPECT_LE(result.rounds, 3u);
    EXPECT_TRUE(g.has_type(support::node(0), support::cls(1)));
    EXPECT_TRUE(g.has_type(support::node(1), support::cls(0)));
}

TEST(ForwardChain, DuplicateDerivationsAreTracedButNotStored) {
    Graph g(support::toy_schema(), support::toy_prefixes());
    g.assert_fact(Triple{support::node(0), support::prop(0), support::node(1)});
    g.assert_fact(Triple{support::node(0), support::prop(1), support::node(1)});
    auto rules = parse_rules("A: t:p0(?x, ?y) -> t:C0(?x)\nB: t:p1(?x, ?y) -> t:C0(?x)\n",
                             support::toy_prefixes(), "urn:t:");
    auto result = forward_chain(g, rules);
    ASSERT_EQ(result.trace.steps.size(), 2u);
    EXPECT_FALSE(result.trace.steps[0].duplicate);
    EXPECT_TRUE(result.trace.steps[1].duplicate);
    EXPECT_EQ(result.inferred.size(), 1u);
}

TEST(ForwardChain, LimitsRollBackAndKeepThePartialTrace) {
    // A value-generating chain: every round adds the next integer.
    Graph g(support::toy_schema(), support::toy_prefixes());
    g.assert_fact(Triple{support::node(0), Term::iri("urn:t:v"), Term::integer(0)});
    auto rules = parse_rules("Inc: t:v(?x, ?n) ^ swrlb:add(?m, ?n, 1) -> t:v(?x, ?m)", support::toy_prefixes(),
                             "urn:t:");
    EXPECT_EQ(recursive_value_generation(rules), std::vector<std::string>{"Inc"});
    auto before = support::triples(g);
    try {
        forward_chain(g, rules, InferenceLimits{5, 1000});
        FAIL();
    } catch (const LimitExceeded& e) {
        EXPECT_EQ(e.code(), ErrorCode::LimitExceeded);
        EXPECT_EQ(e.rounds(), 5u);
        EXPECT_EQ(e.partial_trace().steps.size(), 5u);
    }
    EXPECT_EQ(support::triples(g), before);
    try {
        forward_chain(g, rules, InferenceLimits{1000, 3});
        FAIL();
    } catch (const LimitExceeded& e) {
        EXPECT_FALSE(e.partial_trace().steps.empty());
    }
    EXPECT_EQ(support::triples(g), before);
}

TEST(ForwardChain, ShippedRulesetsHaveNoRecursiveValueGeneration) {
    EXPECT_TRUE(recursive_value_generation(default_ruleset()).empty());
    EXPECT_TRUE(recursive_value_generation(default_ruleset(RulesetOptions{false, 1})).empty());
}

TEST(ForwardChain, RejectsUnknownVocabulary) {
    auto g = iwp();
    auto size = g.size();
    auto rules = parse_rules("R: Product(?p) -> madeUp(?p, true)");
    try {
        forward_chain(g, rules);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownPredicate);
    }
    EXPECT_EQ(g.size(), size);
}

// Replays each step against the graph as it stood before the step's round:
// every graph atom of the body must already be there, every builtin must
// hold, and the head must instantiate to the recorded fact.
TEST(ForwardChain, TraceIsSound) {
    Graph base;
    int i = 0;
    for (const auto& s : checks::enumerate_states()) assert_state(base, ccpo("s" + std::to_string(i++)), s);
    load_data(base, support::read("fixtures/iwp.ttl"));
    Graph g = base;
    auto rules = default_ruleset();
    auto result = forward_chain(g, rules);
    ASSERT_FALSE(result.trace.steps.empty());
    std::map<std::string, const Rule*> by_name;
    for (const auto& r : rules) by_name[r.name] = &r;
    for (const auto& step : result.trace.steps) {
        const Rule& r = *by_name.at(step.rule);
        Graph pre = g;
        pre.truncate(step.pre_state_size);
        Binding b = step.binding;
        for (const auto& a : r.body) {
            if (a.kind == AtomKind::Builtin) {
                ASSERT_TRUE(apply_builtin(a, b)) << step.rule;
                continue;
            }
            auto tp = atom_pattern(a, b);
            EXPECT_TRUE(pre.contains({tp.subject, tp.predicate, tp.object})) << step.rule;
        }
        EXPECT_EQ(b, step.binding) << step.rule;
        auto head = atom_pattern(r.head, b);
        EXPECT_EQ((Triple{head.subject, head.predicate, head.object}), step.produced) << step.rule;
    }
}

TEST(ForwardChain, EveryInferredFactHasATraceStep) {
    auto g = iwp();
    load_data(g, support::read("fixtures/panel_red_strategy.ttl"));
    auto result = forward_chain(g, default_ruleset());
    std::set<Triple> traced;
    for (const auto& s : result.trace.steps) {
        traced.insert(s.produced);
        traced.insert(s.entailed.begin(), s.entailed.end());
    }
    for (const auto& f : g.facts()) {
        if (f.origin.inferred()) EXPECT_TRUE(traced.count(f.triple));
        else EXPECT_FALSE(std::count(result.inferred.begin(), result.inferred.end(), f.triple));
    }
}

TEST(ForwardChain, RuleOrderIndependence) {
    EXPECT_EQ(checks::order_dependence(20), 0u);
    EXPECT_EQ(checks::default_ruleset_order_dependence(20), 0u);
}

TEST(ForwardChain, Monotonicity) { EXPECT_EQ(checks::monotonicity_failures(100), 0u); }

TEST(ForwardChain, IsDeterministic) {
    auto a = iwp(), b = iwp();
    auto ra = forward_chain(a, default_ruleset());
    auto rb = forward_chain(b, default_ruleset());
    EXPECT_EQ(ra.inferred, rb.inferred);
    ASSERT_EQ(ra.trace.steps.size(), rb.trace.steps.size());
    for (std::size_t i = 0; i < ra.trace.steps.size(); ++i) {
        EXPECT_EQ(ra.trace.steps[i].rule, rb.trace.steps[i].rule);
        EXPECT_EQ(ra.trace.steps[i].produced, rb.trace.steps[i].produced);
    }
}

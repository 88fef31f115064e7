#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace eolcycle;

namespace {

std::set<Term> bound(const std::vector<Binding>& rows, const std::string& var) {
    std::set<Term> out;
    for (const auto& b : rows) out.insert(b.at(var));
    return out;
}

} // namespace

TEST(Term, LiteralsCanonicalizeAndKeepTheirDatatype) {
    EXPECT_EQ(Term::literal("007", Datatype::Integer), Term::integer(7));
    EXPECT_EQ(Term::literal("+25", Datatype::Integer).lexical(), "25");
    EXPECT_EQ(Term::literal("1", Datatype::Boolean), Term::boolean(true));
    EXPECT_EQ(Term::literal("2.50", Datatype::Decimal), Term::decimal(2.5));
    EXPECT_NE(Term::integer(1), Term::string_literal("1"));
    EXPECT_NE(Term::integer(1), Term::decimal(1.0));
    EXPECT_EQ(Term::literal("2001-03-02T17:00:00Z", Datatype::Timestamp),
              Term::literal("2001-03-02T17:00:00.000Z", Datatype::Timestamp));
}

TEST(Term, MalformedLiteralsAreRejected) {
    for (auto [text, dt] : {std::pair{"twelve", Datatype::Integer}, {"1.2.3", Datatype::Decimal},
                            {"yes", Datatype::Boolean}, {"2001-13-01", Datatype::Timestamp}}) {
        try {
            (void)Term::literal(text, dt);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::MalformedLiteral) << text;
        }
    }
}

TEST(Term, PrefixesExpandAndCompact) {
    auto px = PrefixMap::defaults();
    EXPECT_EQ(px.expand("ccpo:iwp1"), "http://example.org/ccpo#iwp1");
    EXPECT_EQ(px.compact("http://www.w3.org/ns/prov#used"), "prov:used");
    EXPECT_EQ(px.compact("https://docs.example/a b"), "<https://docs.example/a b>");
    try {
        (void)px.expand("nope:x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownPrefix);
    }
}

TEST(Graph, AssertIsIdempotent) {
    Graph g;
    Triple t{ccpo("iwp1"), rdf_type(), ccpo("GroupedComponent")};
    EXPECT_EQ(g.assert_fact(t), InsertOutcome::Added);
    auto size = g.size();
    EXPECT_EQ(g.assert_fact(t), InsertOutcome::Duplicate);
    EXPECT_EQ(g.size(), size);
}

TEST(Graph, TypesAreMaterializedUpTheClassChain) {
    Graph g;
    g.assert_fact(Triple{ccpo("iwp1"), rdf_type(), ccpo("GroupedComponent")});
    EXPECT_TRUE(g.has_type(ccpo("iwp1"), ccpo("Product")));
    EXPECT_FALSE(g.has_type(ccpo("iwp1"), ccpo("Component")));
    g.assert_fact(Triple{ccpo("core"), rdf_type(), ccpo("Component")});
    EXPECT_TRUE(g.has_type(ccpo("core"), ccpo("Product")));
    EXPECT_FALSE(g.has_type(ccpo("iwp1"), ccpo("Material")));
    EXPECT_FALSE(g.fact(0).origin.inferred());
}

TEST(Graph, InversesAreMaterialized) {
    Graph g;
    g.assert_fact(Triple{ccpo("iwp1"), ccpo("hasComponent"), ccpo("core")});
    EXPECT_TRUE(g.contains({ccpo("core"), ccpo("isComponentOf"), ccpo("iwp1")}));
}

TEST(Graph, ObjectPropertyWithLiteralIsADatatypeMismatch) {
    Graph g;
    // Hand check of the declared range: hasComponent is an object property.
    const auto* def = g.schema().find_property(ccpo("hasComponent"));
    ASSERT_NE(def, nullptr);
    ASSERT_EQ(def->kind, PropertyKind::Object);
    try {
        g.assert_fact(Triple{ccpo("iwp1"), ccpo("hasComponent"), Term::string_literal("steel")});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DatatypeMismatch);
    }
    EXPECT_EQ(g.size(), 0u);
}

TEST(Graph, RejectsUnknownVocabularyAndBadLiterals) {
    Graph g;
    auto code_of = [&](const Triple& t) {
        try {
            g.assert_fact(t);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;  // sentinel: no error
    };
    EXPECT_EQ(code_of({ccpo("x"), ccpo("madeUp"), ccpo("y")}), ErrorCode::UnknownPredicate);
    EXPECT_EQ(code_of({ccpo("x"), rdf_type(), ccpo("Unicorn")}), ErrorCode::UnknownClass);
    EXPECT_EQ(code_of({ccpo("x"), ccpo("referenceServiceLife"), Term::string_literal("25")}),
              ErrorCode::DatatypeMismatch);
    EXPECT_EQ(code_of({ccpo("x"), ccpo("referenceServiceLife"), ccpo("y")}), ErrorCode::DatatypeMismatch);
    EXPECT_EQ(code_of({Term::variable("x"), rdf_type(), ccpo("Product")}), ErrorCode::SyntaxError);
}

TEST(Graph, MatchOnFixture) {
    auto g = support::load("fixtures/iwp.ttl");
    auto components = g.match({Term::variable("x"), rdf_type(), ccpo("Component")});
    EXPECT_EQ(bound(components, "x"),
              (std::set<Term>{ccpo("mineralWoolCore"), ccpo("steelFacingA"), ccpo("steelFacingB")}));
    auto parts = g.match({ccpo("iwp1"), ccpo("hasComponent"), Term::variable("c")});
    EXPECT_EQ(parts.size(), 3u);
    EXPECT_EQ(bound(parts, "c"),
              (std::set<Term>{ccpo("mineralWoolCore"), ccpo("steelFacingA"), ccpo("steelFacingB")}));
}

TEST(Graph, MatchOnEmptyGraphIsEmpty) {
    Graph g;
    EXPECT_TRUE(g.match({Term::variable("x"), Term::variable("p"), Term::variable("o")}).empty());
}

TEST(Graph, MatchOrderIsLexicographic) {
    auto g = support::load("fixtures/iwp.ttl");
    auto rows = g.match({Term::variable("s"), Term::variable("p"), Term::variable("o")});
    ASSERT_EQ(rows.size(), g.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        Triple a{rows[i - 1].at("s"), rows[i - 1].at("p"), rows[i - 1].at("o")};
        Triple b{rows[i].at("s"), rows[i].at("p"), rows[i].at("o")};
        EXPECT_LT(a, b);
    }
}

TEST(Graph, RepeatedVariableMustUnify) {
    Graph g(support::toy_schema(), support::toy_prefixes());
    g.assert_fact(Triple{support::node(1), support::prop(0), support::node(1)});
    g.assert_fact(Triple{support::node(1), support::prop(0), support::node(2)});
    auto rows = g.match({Term::variable("x"), support::prop(0), Term::variable("x")});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].at("x"), support::node(1));
}

TEST(Graph, InsertThenMatchRoundTrip) {
    std::mt19937 rng(3);
    auto ts = support::random_triples(rng, 300);
    auto g = support::toy_graph(ts);
    for (const auto& t : ts) {
        auto rows = g.match({t.subject, t.predicate, t.object});
        EXPECT_EQ(rows.size(), 1u);
    }
}

TEST(Graph, IndexesAgreeWithLinearScan) {
    std::mt19937 rng(5);
    Graph g(support::toy_schema(6, 6), support::toy_prefixes());
    for (const auto& t : support::random_triples(rng, 2500, 40, 6, 6)) g.assert_fact(t);
    ASSERT_GE(g.size(), 1000u);
    std::uniform_int_distribution<int> mask(0, 7);
    std::uniform_int_distribution<FactId> cut(0, static_cast<FactId>(g.size()));
    for (int i = 0; i < 500; ++i) {
        const auto& f = g.fact(std::uniform_int_distribution<FactId>(0, g.size() - 1)(rng)).triple;
        int m = mask(rng);
        std::optional<Term> s, p, o;
        if (m & 1) s = f.subject;
        if (m & 2) p = f.predicate;
        if (m & 4) o = f.object;
        FactRange range{};
        if (i % 3 == 0) {
            FactId a = cut(rng), b = cut(rng);
            range = {std::min(a, b), std::max(a, b)};
        }
        EXPECT_EQ(g.find(s, p, o, range), g.scan(s, p, o, range));
    }
}

TEST(Graph, TruncateRestoresAnEarlierState) {
    std::mt19937 rng(9);
    auto ts = support::random_triples(rng, 200);
    auto g = support::toy_graph(std::vector<Triple>(ts.begin(), ts.begin() + 100));
    auto before = support::triples(g);
    auto size = g.size();
    for (std::size_t i = 100; i < ts.size(); ++i) g.assert_fact(ts[i]);
    g.truncate(size);
    EXPECT_EQ(support::triples(g), before);
    for (const auto& t : before) EXPECT_EQ(g.find(t.subject, t.predicate, t.object).size(), 1u);
    for (std::size_t i = 100; i < ts.size(); ++i)
        if (!before.count(ts[i])) {
            EXPECT_TRUE(g.find(ts[i].subject, ts[i].predicate, ts[i].object).empty());
        }
}

TEST(Closure, BackwardProvenanceChain) {
    auto g = support::load("fixtures/iwp.ttl");
    auto sub = g.entity_closure(ccpo("iwp1"), {prov("wasGeneratedBy"), prov("used")}, Direction::Backward);
    for (const char* n : {"iwp1", "panelAssembly", "steelFacingA", "steelFacingProduction", "steelCoil",
                          "steelmaking", "ironOre", "recycledSteelScrap", "mineralWoolCore",
                          "mineralWoolProduction", "basaltRock"})
        EXPECT_TRUE(sub.nodes.count(ccpo(n))) << n;
    // Later activities that used the panel are downstream, not provenance.
    EXPECT_FALSE(sub.nodes.count(ccpo("installation")));
    EXPECT_TRUE(std::count(sub.facts.begin(), sub.facts.end(),
                           Triple{ccpo("steelmaking"), prov("used"), ccpo("ironOre")}));
}

TEST(Closure, ForwardReachesWhatWasMadeFromAnInput) {
    auto g = support::load("fixtures/iwp.ttl");
    auto sub = g.entity_closure(ccpo("ironOre"), {prov("wasGeneratedBy"), prov("used")}, Direction::Forward);
    for (const char* n : {"steelmaking", "steelCoil", "steelFacingProduction", "steelFacingA", "panelAssembly",
                          "iwp1", "installation", "conditionSurvey"})
        EXPECT_TRUE(sub.nodes.count(ccpo(n))) << n;
}

TEST(Closure, EmptyRelationSetYieldsTheRootAlone) {
    auto g = support::load("fixtures/iwp.ttl");
    auto sub = g.entity_closure(ccpo("iwp1"), {}, Direction::Forward);
    EXPECT_EQ(sub.nodes, std::set<Term>{ccpo("iwp1")});
    EXPECT_TRUE(sub.facts.empty());
}

TEST(Closure, TerminatesOnCycles) {
    Graph g;
    g.assert_fact(Triple{ccpo("a"), prov("used"), ccpo("b")});
    g.assert_fact(Triple{ccpo("b"), prov("wasGeneratedBy"), ccpo("c")});
    g.assert_fact(Triple{ccpo("c"), prov("used"), ccpo("a")});
    auto sub = g.entity_closure(ccpo("a"), {prov("wasGeneratedBy"), prov("used")}, Direction::Both);
    EXPECT_EQ(sub.nodes, (std::set<Term>{ccpo("a"), ccpo("b"), ccpo("c")}));
    EXPECT_EQ(sub.facts.size(), 3u);
}

TEST(Closure, UnknownRootIsAnError) {
    auto g = support::load("fixtures/iwp.ttl");
    try {
        (void)g.entity_closure(ccpo("ghost"), {prov("used")}, Direction::Both);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownEntity);
    }
}

TEST(Closure, MonotoneInTheRelationSet) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = support::toy_graph(support::random_triples(rng, 60));
        Term root = g.fact(0).subject();
        std::set<Term> small, large;
        for (int p = 0; p < 4; ++p) {
            int pick = std::uniform_int_distribution<int>(0, 2)(rng);
            if (pick == 0) small.insert(support::prop(p));
            if (pick <= 1) large.insert(support::prop(p));
        }
        for (auto dir : {Direction::Forward, Direction::Backward, Direction::Both}) {
            auto a = g.entity_closure(root, small, dir);
            auto b = g.entity_closure(root, large, dir);
            EXPECT_TRUE(std::includes(b.nodes.begin(), b.nodes.end(), a.nodes.begin(), a.nodes.end()));
            EXPECT_TRUE(std::includes(b.facts.begin(), b.facts.end(), a.facts.begin(), a.facts.end()));
        }
    }
}

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eolcycle/error.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/rules.hpp"

namespace eolcycle {

struct InferenceLimits {
    std::size_t max_iterations = 1000;
    std::size_t max_facts = 1'000'000;
};

/// One rule firing. `pre_state_size` is the graph size when the round
/// started; the body was matched against facts with smaller ids.
struct TraceStep {
    std::string rule;
    Binding binding;
    Triple produced;
    std::size_t iteration = 0;
    std::size_t pre_state_size = 0;
    bool duplicate = false;
    std::vector<Triple> entailed;
};

struct DerivationTrace {
    std::vector<TraceStep> steps;
};

struct InferenceResult {
    std::vector<Triple> inferred;
    DerivationTrace trace;
    std::size_t rounds = 0;
};

class LimitExceeded : public Error {
public:
    LimitExceeded(const std::string& message, DerivationTrace partial, std::size_t rounds)
        : Error(ErrorCode::LimitExceeded, message), partial_(std::move(partial)), rounds_(rounds) {}

    const DerivationTrace& partial_trace() const noexcept { return partial_; }
    std::size_t rounds() const noexcept { return rounds_; }

private:
    DerivationTrace partial_;
    std::size_t rounds_;
};

/// Substitutes bound variables; unbound variables stay variables.
inline Term substitute(const Term& t, const Binding& b) {
    if (!t.is_variable()) return t;
    auto it = b.find(t.lexical());
    return it == b.end() ? t : it->second;
}

/// The triple a class or property atom stands for under `b`.
inline TriplePattern atom_pattern(const Atom& a, const Binding& b) {
    if (a.kind == AtomKind::Class) return {substitute(a.args[0], b), rdf_type(), a.predicate};
    return {substitute(a.args[0], b), a.predicate, substitute(a.args[1], b)};
}

/// Applies a builtin atom to `b`: false when the test fails, otherwise `b`
/// may gain the builtin's output variable.
inline bool apply_builtin(const Atom& a, Binding& b) {
    std::vector<std::optional<Term>> args;
    args.reserve(a.args.size());
    for (const auto& t : a.args) {
        Term v = substitute(t, b);
        args.push_back(v.is_variable() ? std::nullopt : std::optional<Term>(std::move(v)));
    }
    auto result = evaluate_builtin(*a.builtin, args);
    if (auto* ok = std::get_if<bool>(&result)) return *ok;
    b[a.args[0].lexical()] = std::get<Term>(result);
    return true;
}

namespace detail {

inline void check_rule_vocabulary(const Rule& r, const Schema& schema, const PrefixMap& px) {
    auto check = [&](const Atom& a) {
        if (a.kind == AtomKind::Builtin) return;
        if (a.kind == AtomKind::Class) {
            if (!schema.has_class(a.predicate))
                throw Error(ErrorCode::UnknownClass, "rule " + r.name + ": " +
                                                         px.compact(a.predicate.lexical()) +
                                                         " is not a schema class");
        } else if (a.predicate != rdf_type() && !schema.find_property(a.predicate)) {
            throw Error(ErrorCode::UnknownPredicate, "rule " + r.name + ": " +
                                                         px.compact(a.predicate.lexical()) +
                                                         " is not a declared property");
        }
    };
    for (const auto& a : r.body) check(a);
    check(r.head);
}

struct Derivation {
    const Rule* rule;
    Binding binding;
    Triple head;
};

class RuleMatcher {
public:
    RuleMatcher(const Graph& g, const Rule& r) : graph_(g), rule_(r), plan_(plan_body(r.body)) {
        for (std::size_t k = 0; k < plan_.order.size(); ++k)
            if (r.body[plan_.order[k]].kind != AtomKind::Builtin) graph_positions_.push_back(k);
    }

    /// Every body instantiation that uses at least one fact from `delta`,
    /// each counted once: the k-th graph atom reads delta, earlier graph
    /// atoms read `old`, later ones read `full`.
    void run(FactRange old, FactRange delta, FactRange full, bool first_round,
             std::vector<Derivation>& out) {
        if (graph_positions_.empty()) {
            if (first_round) join(0, Binding{}, std::nullopt, old, delta, full, out);
            return;
        }
        for (std::size_t k = 0; k < graph_positions_.size(); ++k)
            join(0, Binding{}, graph_positions_[k], old, delta, full, out);
    }

private:
    void join(std::size_t step, Binding b, std::optional<std::size_t> delta_step, FactRange old,
              FactRange delta, FactRange full, std::vector<Derivation>& out) {
        if (step == plan_.order.size()) {
            auto head = atom_pattern(rule_.head, b);
            out.push_back({&rule_, std::move(b), Triple{head.subject, head.predicate, head.object}});
            return;
        }
        const Atom& a = rule_.body[plan_.order[step]];
        if (a.kind == AtomKind::Builtin) {
            if (apply_builtin(a, b)) join(step + 1, std::move(b), delta_step, old, delta, full, out);
            return;
        }
        FactRange range = full;
        if (delta_step) {
            if (step == *delta_step) range = delta;
            else if (step < *delta_step) range = old;
        }
        auto pattern = atom_pattern(a, b);
        auto constant = [](const Term& t) -> std::optional<Term> {
            if (t.is_variable()) return std::nullopt;
            return t;
        };
        for (FactId id : graph_.find(constant(pattern.subject), constant(pattern.predicate),
                                     constant(pattern.object), range)) {
            Binding next = b;
            if (Graph::unify(pattern, graph_.fact(id).triple, next))
                join(step + 1, std::move(next), delta_step, old, delta, full, out);
        }
    }

    const Graph& graph_;
    const Rule& rule_;
    BodyPlan plan_;
    std::vector<std::size_t> graph_positions_;
};

} // namespace detail

/// Semi-naive forward chaining to fixpoint. Each round matches rule bodies
/// against the graph as it stood when the round began, then asserts the
/// ground heads in derivation order. Stops after the first round that adds
/// nothing. On error (including limit-exceeded) the graph is restored to its
/// state before the call.
inline InferenceResult forward_chain(Graph& graph, const std::vector<Rule>& rules,
                                     InferenceLimits limits = {}) {
    for (const auto& r : rules) {
        check_safety(r);
        detail::check_rule_vocabulary(r, graph.schema(), graph.prefixes());
    }
    const std::size_t original_size = graph.size();
    InferenceResult result;
    try {
        FactRange old{0, 0};
        FactRange delta{0, static_cast<FactId>(graph.size())};
        while (true) {
            if (result.rounds >= limits.max_iterations)
                throw LimitExceeded("no fixpoint after " + std::to_string(limits.max_iterations) +
                                        " iterations",
                                    result.trace, result.rounds);
            ++result.rounds;
            const FactRange full{0, delta.end};
            std::vector<detail::Derivation> derived;
            for (const auto& r : rules)
                detail::RuleMatcher(graph, r).run(old, delta, full, result.rounds == 1, derived);

            for (auto& d : derived) {
                std::vector<FactId> added;
                auto outcome = graph.insert(d.head, Origin::inferred_by(d.rule->name), added);
                TraceStep step{d.rule->name, std::move(d.binding), d.head, result.rounds,
                               full.end, outcome == InsertOutcome::Duplicate, {}};
                for (std::size_t i = 1; i < added.size(); ++i)
                    step.entailed.push_back(graph.fact(added[i]).triple);
                for (FactId id : added) result.inferred.push_back(graph.fact(id).triple);
                result.trace.steps.push_back(std::move(step));
                if (graph.size() > limits.max_facts)
                    throw LimitExceeded("fact cap of " + std::to_string(limits.max_facts) + " exceeded",
                                        result.trace, result.rounds);
            }
            if (graph.size() == delta.end) break;
            old = FactRange{0, delta.end};
            delta = FactRange{delta.end, static_cast<FactId>(graph.size())};
        }
    } catch (...) {
        graph.truncate(original_size);
        throw;
    }
    return result;
}

} // namespace eolcycle

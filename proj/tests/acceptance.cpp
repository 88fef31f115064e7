// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "checks.hpp"

namespace {

using namespace eolcycle;

struct Verdict {
    bool pass;
    std::string detail;
};

Verdict cq_regression() {
    auto o = checks::cq_regression();
    std::string detail = std::to_string(checks::cq_cases().size() - o.mismatched.size()) + "/6 golden, " +
                         std::to_string(o.seconds).substr(0, 5) + " s";
    for (const auto& m : o.mismatched) detail += ", mismatch " + m;
    return {o.mismatched.empty() && o.seconds < 1.0, detail};
}

Verdict oracle_equivalence() {
    auto start = std::chrono::steady_clock::now();
    auto on = checks::enumerate(true);
    auto off = checks::enumerate(false);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::size_t expected_off = 0, outside = 0;
    for (const auto& s : checks::enumerate_states())
        if (checks::in_divergence_set(s)) ++expected_off;
    for (const auto& s : off.mismatches)
        if (!checks::in_divergence_set(s)) ++outside;
    bool ok = on.states == 216 && on.mismatches.empty() && on.gaps == 0 &&
              off.mismatches.size() == expected_off && outside == 0 && secs < 5.0;
    return {ok, std::to_string(on.states) + " states; reconciled " + std::to_string(on.mismatches.size()) +
                    " mismatches; base rules " + std::to_string(off.mismatches.size()) + " mismatches (" +
                    std::to_string(expected_off) + " expected, " + std::to_string(outside) +
                    " outside the divergence set); " + std::to_string(secs).substr(0, 5) + " s"};
}

Verdict rule_fidelity() {
    std::size_t held = 0;
    std::string failures;
    auto scenarios = checks::rule_scenarios();
    for (const auto& sc : scenarios) {
        std::string why;
        if (checks::scenario_holds(sc, &why)) ++held;
        else failures += " [" + why + "]";
    }
    std::set<std::string> rules;
    for (const auto& sc : scenarios) rules.insert(sc.rule);
    bool ok = held == scenarios.size() && rules.size() == 9;
    return {ok, std::to_string(held) + "/" + std::to_string(scenarios.size()) + " scenarios over " +
                    std::to_string(rules.size()) + " rules" + failures};
}

Verdict health_numerics() {
    auto o = checks::health_numerics(1000);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max relative error %.3g over 1000 draws; %zu monotonicity failures",
                  o.max_rel_error, o.monotonic_failures);
    return {o.max_rel_error <= 1e-9 && o.monotonic_failures == 0, buf};
}

Verdict validator_families() {
    std::size_t flagged = 0;
    std::string missing;
    for (const auto& c : checks::validator_families()) {
        if (checks::family_flagged(c)) ++flagged;
        else missing += " " + c.code;
    }
    bool clean = checks::clean_fixture_silent();
    return {flagged == checks::validator_families().size() && clean,
            std::to_string(flagged) + "/" + std::to_string(checks::validator_families().size()) +
                " families flagged; clean fixture " + (clean ? "silent" : "NOT silent") + missing};
}

Verdict engine_properties() {
    auto order = checks::order_dependence(20);
    auto shipped = checks::default_ruleset_order_dependence(20);
    auto mono = checks::monotonicity_failures(100);
    std::string first;
    auto query = checks::query_oracle_failures(200, 19, &first);
    std::string detail = "order " + std::to_string(order) + "+" + std::to_string(shipped) +
                         "/40 differ; monotonicity " + std::to_string(mono) + "/100 fail; join oracle " +
                         std::to_string(query) + "/200 differ";
    if (!first.empty()) detail += " (first: " + first + ")";
    return {order == 0 && shipped == 0 && mono == 0 && query == 0, detail};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"cq-regression", cq_regression},
        {"oracle-equivalence", oracle_equivalence},
        {"rule-table-fidelity", rule_fidelity},
        {"health-numerics", health_numerics},
        {"validator-families", validator_families},
        {"engine-properties", engine_properties},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
        if (!v.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

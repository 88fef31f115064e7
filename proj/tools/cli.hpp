#pragma once

// Command implementations for the eolcycle binary. Kept in a header so the
// end-to-end tests can drive the same code in-process.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eolcycle/eolcycle.hpp"

namespace eolcycle::cli {

inline constexpr const char* kVersion = "1.0.0";

enum Exit : int { Ok = 0, InputError = 1, ValidationFailure = 2, DecisionGap = 3 };

struct Options {
    std::vector<std::string> positional;
    std::optional<std::string> config_path;
    std::optional<std::string> ruleset_path;
    std::optional<std::string> format;
    bool strict = false;
    bool infer = false;
    std::optional<std::string> query_file;
    std::optional<std::string> query_text;
};

/// Input problem already reported to the user; maps to exit 1.
struct Failure {
    std::string message;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{"io-error: cannot read " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string located(const std::string& path, const Error& e) {
    std::string where = path;
    if (e.where()) where += ":" + std::to_string(e.where()->line) + ":" + std::to_string(e.where()->column);
    return std::string(to_string(e.code())) + " at " + where + ": " + e.message();
}

class Session {
public:
    Session(Options opt, std::ostream& out, std::ostream& err)
        : opt_(std::move(opt)), out_(out), err_(err) {}

    Config config() const {
        Config c;
        if (opt_.config_path) apply_config_file(c, *opt_.config_path);
        apply_environment(c);
        if (opt_.ruleset_path) c.ruleset_path = opt_.ruleset_path;
        if (opt_.format) {
            auto f = parse_output_format(*opt_.format);
            if (!f) throw Failure{"unknown format '" + *opt_.format + "' (expected tsv, json or pretty)"};
            c.format = *f;
        }
        if (opt_.strict) c.strict = true;
        return c;
    }

    Graph load(const std::vector<std::string>& paths) const {
        if (paths.empty()) throw Failure{"at least one data file is required"};
        Graph g;
        for (const auto& p : paths) {
            std::string text = read_file(p);
            try {
                load_data(g, text);
            } catch (const Error& e) {
                throw Failure{located(p, e)};
            }
        }
        return g;
    }

    std::vector<Rule> ruleset(const Config& c, const Graph& g) const {
        if (!c.ruleset_path) return default_ruleset(c.ruleset);
        std::string text = read_file(*c.ruleset_path);
        try {
            return parse_rules(text, g.prefixes());
        } catch (const Error& e) {
            throw Failure{located(*c.ruleset_path, e)};
        }
    }

    static Term product_term(const std::string& arg, const Graph& g) {
        if (arg.size() > 2 && arg.front() == '<' && arg.back() == '>')
            return Term::iri(arg.substr(1, arg.size() - 2));
        if (arg.find("://") != std::string::npos) return Term::iri(arg);
        try {
            return Term::iri(g.prefixes().expand(arg));
        } catch (const Error& e) {
            throw Failure{e.what()};
        }
    }

    int validate_cmd() {
        auto c = config();
        auto g = load(opt_.positional);
        auto report = validate(g, c.strict ? ValidationMode::Strict : ValidationMode::Advisory);
        out_ << format_report(report, c.format.value_or(OutputFormat::Pretty));
        return report.consistent() ? Ok : ValidationFailure;
    }

    int query_cmd() {
        auto c = config();
        if (opt_.query_file.has_value() == opt_.query_text.has_value())
            throw Failure{"give exactly one of --file or --query"};
        auto g = load(opt_.positional);
        std::string source = opt_.query_file ? *opt_.query_file : std::string("<query>");
        std::string text = opt_.query_file ? read_file(*opt_.query_file) : *opt_.query_text;
        QueryAst ast;
        try {
            ast = parse_query(text, g.prefixes());
        } catch (const Error& e) {
            throw Failure{located(source, e)};
        }
        if (opt_.infer) infer(g, c);
        auto table = execute(g, ast);
        out_ << format_results(table, c.format.value_or(OutputFormat::Tsv), ast.prefixes);
        if (table.filter_type_errors)
            err_ << "note: " << table.filter_type_errors
                 << " row(s) dropped by FILTER type mismatches\n";
        return Ok;
    }

    int decide_cmd(bool narrate) {
        auto c = config();
        if (opt_.positional.size() < 2) throw Failure{"expected DATA... PRODUCT"};
        std::vector<std::string> data(opt_.positional.begin(), opt_.positional.end() - 1);
        auto g = load(data);
        Term product = product_term(opt_.positional.back(), g);
        auto report_v = validate(g, c.strict ? ValidationMode::Strict : ValidationMode::Advisory);
        if (!report_v.consistent()) {
            err_ << format_report(report_v, OutputFormat::Pretty);
            return ValidationFailure;
        }
        auto rules = ruleset(c, g);
        DecisionReport report;
        try {
            require_product(g, product);
            derive_health_states(g, c.thresholds);
            report = decide_in_place(g, product, rules);
        } catch (const Error& e) {
            throw Failure{e.what()};
        }
        if (narrate) explain(g, rules, report);
        else print_decision(report, g.prefixes(), c.format.value_or(OutputFormat::Json));
        return report.at_eol && !report.final_route ? DecisionGap : Ok;
    }

private:
    void infer(Graph& g, const Config& c) const {
        try {
            derive_health_states(g, c.thresholds);
            forward_chain(g, ruleset(c, g));
        } catch (const Error& e) {
            throw Failure{e.what()};
        }
    }

    void print_decision(const DecisionReport& r, const PrefixMap& px, OutputFormat fmt) {
        std::string routes;
        for (auto route : r.derived_routes) routes += (routes.empty() ? "" : ", ") + std::string(route_name(route));
        std::string rules;
        for (const auto& n : r.fired_rules) rules += (rules.empty() ? "" : ", ") + n;
        std::string final_name = r.final_route ? std::string(route_name(*r.final_route)) : "";
        switch (fmt) {
        case OutputFormat::Json: out_ << to_json(r, px).dump(2) << '\n'; break;
        case OutputFormat::Tsv:
            out_ << "field\tvalue\n"
                 << "product\t" << px.compact(r.product.lexical()) << '\n'
                 << "atEoL\t" << (r.at_eol ? "true" : "false") << '\n'
                 << "derivedRoutes\t" << routes << '\n'
                 << "final\t" << final_name << '\n'
                 << "firedRules\t" << rules << '\n';
            break;
        case OutputFormat::Pretty:
            out_ << "product:        " << px.compact(r.product.lexical()) << '\n'
                 << "at end-of-life: " << (r.at_eol ? "yes" : "no") << '\n'
                 << "derived routes: " << (routes.empty() ? "(none)" : routes) << '\n'
                 << "final route:    " << (final_name.empty() ? "(none)" : final_name) << '\n'
                 << "fired rules:    " << (rules.empty() ? "(none)" : rules) << '\n';
            break;
        }
    }

    static std::string builtin_note(const Atom& a, const Binding& b, const PrefixMap& px) {
        auto val = [&](const Term& t) { return display(substitute(t, b), px); };
        auto sym = [](Builtin id) -> std::string {
            switch (id) {
            case Builtin::LessThan: return "<";
            case Builtin::LessThanOrEqual: return "<=";
            case Builtin::GreaterThan: return ">";
            case Builtin::GreaterThanOrEqual: return ">=";
            case Builtin::Equal: return "=";
            case Builtin::NotEqual: return "!=";
            case Builtin::Subtract: return "-";
            case Builtin::Add: return "+";
            case Builtin::Multiply: return "*";
            }
            return "?";
        };
        if (builtin_info(*a.builtin).value_generating)
            return display(a.args[0], px) + "=" + val(a.args[1]) + sym(*a.builtin) + val(a.args[2]);
        return val(a.args[0]) + " " + sym(*a.builtin) + " " + val(a.args[1]);
    }

    void explain(const Graph& g, const std::vector<Rule>& rules, const DecisionReport& r) {
        const auto& px = g.prefixes();
        std::string name = px.compact(r.product.lexical());
        if (rules.empty()) {
            out_ << "notice: the ruleset is empty; nothing can be derived for " << name << '\n';
            return;
        }
        std::map<std::string, const Rule*> by_name;
        for (const auto& rule : rules) by_name[rule.name] = &rule;
        out_ << "explaining " << name << " with " << rules.size() << " rule(s), " << r.rounds
             << " round(s)\n";
        for (const auto& step : r.trace) {
            out_ << "[round " << step.iteration << "] " << step.rule << ": ";
            bool first = true;
            for (const auto& [var, value] : step.binding) {
                out_ << (first ? "" : ", ") << '?' << var << '=' << display(value, px);
                first = false;
            }
            if (auto it = by_name.find(step.rule); it != by_name.end()) {
                std::string notes;
                for (const auto& a : it->second->body)
                    if (a.kind == AtomKind::Builtin)
                        notes += (notes.empty() ? "" : "; ") + builtin_note(a, step.binding, px);
                if (!notes.empty()) out_ << " (" << notes << ")";
            }
            out_ << " => " << describe_triple(step.produced, px) << '\n';
        }
        if (!r.at_eol) {
            auto rsl = g.objects(r.product, ccpo("referenceServiceLife"));
            auto asl = g.objects(r.product, ccpo("actualServiceLife"));
            out_ << name << " is not at end-of-life";
            if (!rsl.empty() && !asl.empty()) {
                std::vector<std::optional<Term>> args{std::nullopt, rsl.front(), asl.front()};
                try {
                    auto diff = evaluate_builtin(Builtin::Subtract, args);
                    if (const auto* t = std::get_if<Term>(&diff)) out_ << " (diff=" << t->lexical() << ")";
                } catch (const Error&) {
                    // non-numeric service life: leave the difference out
                }
            }
            out_ << "; no route applies\n";
            return;
        }
        if (r.trace.empty()) out_ << "no rules fired\n";
        if (r.final_route)
            out_ << "final route: " << route_name(*r.final_route) << " (rank "
                 << route_rank(*r.final_route) << ")\n";
        else
            out_ << "decision gap: at end-of-life but no final route was derived\n";
    }

    Options opt_;
    std::ostream& out_;
    std::ostream& err_;
};

/// Parses `argv` and runs one command. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Circular construction product provenance and end-of-life decisions", "eolcycle"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "Key-value configuration file");
    app.add_option("--ruleset", opt.ruleset_path, "Rule file replacing the bundled ruleset");
    app.add_option("--format", opt.format, "Output format: tsv, json or pretty");
    app.add_flag("--strict", opt.strict, "Treat existential gaps as errors");

    auto* validate_sub = app.add_subcommand("validate", "Check data files against the schema");
    validate_sub->add_option("data", opt.positional, "Data files")->required();

    auto* query_sub = app.add_subcommand("query", "Run a SPARQL-subset query");
    query_sub->add_option("data", opt.positional, "Data files")->required();
    query_sub->add_option("--file", opt.query_file, "Query file (.rq)");
    query_sub->add_option("--query", opt.query_text, "Inline query text");
    query_sub->add_flag("--infer", opt.infer, "Run the ruleset before querying");

    auto* decide_sub = app.add_subcommand("decide", "Recommend an end-of-life route for a product");
    decide_sub->add_option("args", opt.positional, "DATA... PRODUCT")->required()->expected(2, -1);

    auto* explain_sub = app.add_subcommand("explain", "Narrate the derivation behind a decision");
    explain_sub->add_option("args", opt.positional, "DATA... PRODUCT")->required()->expected(2, -1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return InputError;
    }

    Session session(opt, out, err);
    try {
        if (*validate_sub) return session.validate_cmd();
        if (*query_sub) return session.query_cmd();
        if (*decide_sub) return session.decide_cmd(false);
        if (*explain_sub) return session.decide_cmd(true);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return InputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return InputError;
    }
    return InputError;
}

} // namespace eolcycle::cli

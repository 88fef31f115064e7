#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eolcycle/detail/scanner.hpp"
#include "eolcycle/error.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

enum class AtomKind { Class, Property, Builtin };

enum class Builtin {
    Subtract,
    Add,
    Multiply,
    LessThan,
    LessThanOrEqual,
    GreaterThan,
    GreaterThanOrEqual,
    Equal,
    NotEqual,
};

struct BuiltinInfo {
    Builtin id;
    std::string_view name;
    std::size_t arity;
    bool value_generating;
};

inline constexpr std::array<BuiltinInfo, 9> kBuiltins{{
    {Builtin::Subtract, "subtract", 3, true},
    {Builtin::Add, "add", 3, true},
    {Builtin::Multiply, "multiply", 3, true},
    {Builtin::LessThan, "lessThan", 2, false},
    {Builtin::LessThanOrEqual, "lessThanOrEqual", 2, false},
    {Builtin::GreaterThan, "greaterThan", 2, false},
    {Builtin::GreaterThanOrEqual, "greaterThanOrEqual", 2, false},
    {Builtin::Equal, "equal", 2, false},
    {Builtin::NotEqual, "notEqual", 2, false},
}};

inline const BuiltinInfo& builtin_info(Builtin b) {
    for (const auto& info : kBuiltins)
        if (info.id == b) return info;
    throw Error(ErrorCode::UnknownBuiltin, "unknown builtin");
}

inline std::optional<Builtin> builtin_by_name(std::string_view name) {
    for (const auto& info : kBuiltins)
        if (info.name == name) return info.id;
    return std::nullopt;
}

/// `C(?x)`, `p(?x, t)` or `swrlb:name(t1..tn)`. For builtins `predicate`
/// holds the swrlb IRI and `builtin` the resolved id.
struct Atom {
    AtomKind kind = AtomKind::Property;
    Term predicate;
    std::optional<Builtin> builtin;
    std::vector<Term> args;

    friend bool operator==(const Atom&, const Atom&) = default;
};

struct Rule {
    std::string name;
    std::vector<Atom> body;
    Atom head;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// ---------------------------------------------------------------------------
// Builtin evaluation

/// A comparison yields a truth value; an arithmetic builtin with an unbound
/// first argument yields the value to bind.
using BuiltinResult = std::variant<bool, Term>;

namespace detail {

inline Numeric numeric_arg(const std::optional<Term>& t, std::string_view builtin) {
    if (!t)
        throw Error(ErrorCode::UnboundArgument,
                    "swrlb:" + std::string(builtin) + " needs all input arguments bound");
    auto n = t->as_numeric();
    if (!n)
        throw Error(ErrorCode::NonNumericArgument,
                    "swrlb:" + std::string(builtin) + " got non-numeric argument '" + t->lexical() + "'");
    return *n;
}

inline Numeric arithmetic(Builtin b, const Numeric& x, const Numeric& y) {
    if (std::holds_alternative<std::int64_t>(x) && std::holds_alternative<std::int64_t>(y)) {
        std::int64_t a = std::get<std::int64_t>(x), c = std::get<std::int64_t>(y), r = 0;
        bool overflow = false;
        switch (b) {
        case Builtin::Subtract: overflow = __builtin_sub_overflow(a, c, &r); break;
        case Builtin::Add: overflow = __builtin_add_overflow(a, c, &r); break;
        case Builtin::Multiply: overflow = __builtin_mul_overflow(a, c, &r); break;
        default: break;
        }
        if (!overflow) return r;
    }
    double a = to_double(x), c = to_double(y);
    switch (b) {
    case Builtin::Subtract: return a - c;
    case Builtin::Add: return a + c;
    case Builtin::Multiply: return a * c;
    default: return 0.0;
    }
}

/// -1, 0, 1; integers compare exactly, otherwise both sides promote to double.
inline int compare_numeric(const Numeric& x, const Numeric& y) {
    if (std::holds_alternative<std::int64_t>(x) && std::holds_alternative<std::int64_t>(y)) {
        auto a = std::get<std::int64_t>(x), b = std::get<std::int64_t>(y);
        return a < b ? -1 : (a > b ? 1 : 0);
    }
    double a = to_double(x), b = to_double(y);
    return a < b ? -1 : (a > b ? 1 : 0);
}

} // namespace detail

/// Evaluates a builtin over possibly-unbound arguments (nullopt = unbound).
inline BuiltinResult evaluate_builtin(Builtin b, std::span<const std::optional<Term>> args) {
    const auto& info = builtin_info(b);
    if (args.size() != info.arity)
        throw Error(ErrorCode::BuiltinArityMismatch,
                    "swrlb:" + std::string(info.name) + " takes " + std::to_string(info.arity) +
                        " arguments, got " + std::to_string(args.size()));
    if (info.value_generating) {
        auto x = detail::numeric_arg(args[1], info.name);
        auto y = detail::numeric_arg(args[2], info.name);
        Numeric result = detail::arithmetic(b, x, y);
        if (!args[0]) return Term::number(result);
        return detail::compare_numeric(detail::numeric_arg(args[0], info.name), result) == 0;
    }
    if (!args[0] || !args[1])
        throw Error(ErrorCode::UnboundArgument,
                    "swrlb:" + std::string(info.name) + " needs both arguments bound");
    const Term& a = *args[0];
    const Term& c = *args[1];
    std::optional<int> cmp;
    if (auto x = a.as_numeric(), y = c.as_numeric(); x && y) {
        cmp = detail::compare_numeric(*x, *y);
    } else if (auto s = a.as_timestamp_ms(), t = c.as_timestamp_ms(); s && t) {
        cmp = *s < *t ? -1 : (*s > *t ? 1 : 0);
    }
    if (!cmp) {
        if (b == Builtin::Equal) return a == c;
        if (b == Builtin::NotEqual) return a != c;
        throw Error(ErrorCode::NonNumericArgument,
                    "swrlb:" + std::string(info.name) + " compares numbers or timestamps, got '" +
                        a.lexical() + "' and '" + c.lexical() + "'");
    }
    switch (b) {
    case Builtin::LessThan: return *cmp < 0;
    case Builtin::LessThanOrEqual: return *cmp <= 0;
    case Builtin::GreaterThan: return *cmp > 0;
    case Builtin::GreaterThanOrEqual: return *cmp >= 0;
    case Builtin::Equal: return *cmp == 0;
    case Builtin::NotEqual: return *cmp != 0;
    default: return false;
    }
}

// ---------------------------------------------------------------------------
// Safety and evaluation order

/// Variables an atom reads before it can be evaluated. For value-generating
/// builtins the first argument is an output, not an input.
inline std::vector<std::string> input_variables(const Atom& a) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (a.kind == AtomKind::Builtin && i == 0 && builtin_info(*a.builtin).value_generating)
            continue;
        if (a.args[i].is_variable()) out.push_back(a.args[i].lexical());
    }
    return out;
}

/// Body atom indexes in evaluation order: graph atoms keep their written
/// order and each builtin runs as soon as all of its inputs are bound.
/// Builtins that never become evaluable are returned in `stuck`.
struct BodyPlan {
    std::vector<std::size_t> order;
    std::vector<std::size_t> stuck;
    std::set<std::string> bound;
};

inline BodyPlan plan_body(const std::vector<Atom>& body) {
    BodyPlan plan;
    std::vector<std::size_t> pending;
    auto ready = [&](std::size_t i) {
        for (const auto& v : input_variables(body[i]))
            if (!plan.bound.count(v)) return false;
        return true;
    };
    auto flush = [&] {
        bool progress = true;
        while (progress) {
            progress = false;
            for (auto it = pending.begin(); it != pending.end(); ++it) {
                if (!ready(*it)) continue;
                plan.order.push_back(*it);
                const auto& a = body[*it];
                if (!a.args.empty() && a.args[0].is_variable()) plan.bound.insert(a.args[0].lexical());
                pending.erase(it);
                progress = true;
                break;
            }
        }
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i].kind == AtomKind::Builtin) {
            pending.push_back(i);
        } else {
            plan.order.push_back(i);
            for (const auto& t : body[i].args)
                if (t.is_variable()) plan.bound.insert(t.lexical());
        }
        flush();
    }
    plan.stuck = pending;
    return plan;
}

/// Throws unsafe-rule when a head variable or a builtin input can never be bound.
inline void check_safety(const Rule& rule) {
    auto plan = plan_body(rule.body);
    std::vector<std::string> problems;
    std::set<std::string> unbound_head;
    for (const auto& t : rule.head.args)
        if (t.is_variable() && !plan.bound.count(t.lexical())) unbound_head.insert(t.lexical());
    if (!unbound_head.empty()) {
        std::string vars;
        for (const auto& v : unbound_head) vars += (vars.empty() ? "?" : ", ?") + v;
        problems.push_back("head variable(s) " + vars + " not bound by the body");
    }
    for (std::size_t i : plan.stuck) {
        std::string vars;
        for (const auto& v : input_variables(rule.body[i]))
            if (!plan.bound.count(v)) vars += (vars.empty() ? "?" : ", ?") + v;
        problems.push_back("builtin swrlb:" + std::string(builtin_info(*rule.body[i].builtin).name) +
                           " has unbound input(s) " + vars);
    }
    if (!problems.empty()) {
        std::string msg = "rule " + rule.name + ": ";
        for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        throw Error(ErrorCode::UnsafeRule, msg);
    }
}

/// Names of rules whose head carries a builtin-computed value into a
/// predicate that can feed back into the rule's own body. Rulesets for which
/// this is empty have a finite fixpoint.
inline std::vector<std::string> recursive_value_generation(const std::vector<Rule>& rules) {
    std::map<Term, std::set<Term>> feeds;  // body predicate -> head predicates
    for (const auto& r : rules)
        for (const auto& a : r.body)
            if (a.kind != AtomKind::Builtin) feeds[a.predicate].insert(r.head.predicate);
    auto reaches = [&](const Term& from, const std::set<Term>& targets) {
        std::set<Term> seen;
        std::vector<Term> work{from};
        while (!work.empty()) {
            Term cur = work.back();
            work.pop_back();
            if (targets.count(cur)) return true;
            if (!seen.insert(cur).second) continue;
            if (auto it = feeds.find(cur); it != feeds.end())
                for (const auto& n : it->second) work.push_back(n);
        }
        return false;
    };
    std::vector<std::string> out;
    for (const auto& r : rules) {
        std::set<std::string> generated;
        for (const auto& a : r.body)
            if (a.kind == AtomKind::Builtin && builtin_info(*a.builtin).value_generating &&
                a.args[0].is_variable())
                generated.insert(a.args[0].lexical());
        bool carries = false;
        for (const auto& t : r.head.args)
            if (t.is_variable() && generated.count(t.lexical())) carries = true;
        if (!carries) continue;
        std::set<Term> body_preds;
        for (const auto& a : r.body)
            if (a.kind != AtomKind::Builtin) body_preds.insert(a.predicate);
        if (reaches(r.head.predicate, body_preds)) out.push_back(r.name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing and printing

namespace detail {

class RuleParser {
public:
    RuleParser(std::string_view text, PrefixMap prefixes, std::string default_ns)
        : in_(text), prefixes_(std::move(prefixes)), default_ns_(std::move(default_ns)) {}

    std::vector<Rule> run() {
        std::vector<Rule> rules;
        while (true) {
            in_.skip_space();
            if (in_.eof()) break;
            rules.push_back(rule());
        }
        return rules;
    }

private:
    Rule rule() {
        auto where = in_.location();
        Rule r;
        r.name = rule_name();
        r.body.push_back(atom());
        while (in_.consume('^') || in_.consume("\xE2\x88\xA7")) r.body.push_back(atom());
        if (!in_.consume("->") && !in_.consume("\xE2\x86\x92"))
            in_.fail("expected '^' or '->' in rule " + r.name);
        auto head_where = in_.location();
        r.head = atom();
        if (r.head.kind == AtomKind::Builtin)
            in_.fail_at(head_where, "rule head cannot be a builtin");
        try {
            check_safety(r);
        } catch (const Error& e) {
            throw Error(e.code(), e.message(), where);
        }
        return r;
    }

    std::string rule_name() {
        in_.skip_space();
        auto where = in_.location();
        std::string raw;
        while (!in_.eof() && (is_name_char(in_.peek()) || in_.peek() == ':')) raw += in_.get();
        if (raw.size() < 2 || raw.back() != ':')
            in_.fail_at(where, "expected a rule name followed by ':'");
        raw.pop_back();
        return raw;
    }

    Atom atom() {
        in_.skip_space();
        auto where = in_.location();
        std::string name = in_.read_name();
        if (name.empty() || name.back() == ':') in_.fail_at(where, "expected an atom");
        Atom a;
        std::vector<Term> args;
        in_.expect('(', "'(' after " + name);
        if (!in_.consume(')')) {
            do {
                args.push_back(argument());
            } while (in_.consume(','));
            in_.expect(')', "')' closing " + name);
        }
        a.args = std::move(args);
        auto colon = name.find(':');
        if (colon != std::string::npos && name.substr(0, colon) == "swrlb") {
            auto b = builtin_by_name(name.substr(colon + 1));
            if (!b) throw Error(ErrorCode::UnknownBuiltin, name + " is not supported", where);
            const auto& info = builtin_info(*b);
            if (a.args.size() != info.arity)
                throw Error(ErrorCode::BuiltinArityMismatch,
                            name + " takes " + std::to_string(info.arity) + " arguments, got " +
                                std::to_string(a.args.size()),
                            where);
            a.kind = AtomKind::Builtin;
            a.builtin = b;
            a.predicate = Term::iri(std::string(ns::swrlb) + std::string(info.name));
            return a;
        }
        a.predicate = resolve(name, where);
        if (a.args.size() == 1) {
            a.kind = AtomKind::Class;
        } else if (a.args.size() == 2) {
            a.kind = AtomKind::Property;
        } else {
            in_.fail_at(where, name + " must take 1 (class) or 2 (property) arguments");
        }
        return a;
    }

    Term argument() {
        in_.skip_space();
        auto where = in_.location();
        char c = in_.peek();
        if (c == '?') {
            in_.get();
            std::string v;
            while (!in_.eof() && (std::isalnum(static_cast<unsigned char>(in_.peek())) || in_.peek() == '_'))
                v += in_.get();
            if (v.empty()) in_.fail_at(where, "empty variable name");
            return Term::variable(v);
        }
        if (c == '"') {
            std::string lexical = in_.read_quoted();
            if (in_.peek() == '^' && in_.peek(1) == '^') {
                in_.get();
                in_.get();
                in_.skip_space();
                auto dt_where = in_.location();
                std::string dt_name = in_.read_name();
                auto tag = datatype_from_iri(prefixes_.expand(dt_name, dt_where));
                if (!tag) throw Error(ErrorCode::MalformedLiteral, "unsupported datatype " + dt_name, dt_where);
                try {
                    return Term::literal(lexical, *tag);
                } catch (const Error& e) {
                    throw Error(e.code(), e.message(), where);
                }
            }
            return Term::string_literal(lexical);
        }
        if (in_.at_number_start()) {
            std::string num = in_.read_number();
            bool dec = num.find_first_of(".eE") != std::string::npos;
            return Term::literal(num, dec ? Datatype::Decimal : Datatype::Integer);
        }
        if (c == '<') return Term::iri(in_.read_iriref());
        if (in_.consume_keyword("true")) return Term::boolean(true);
        if (in_.consume_keyword("false")) return Term::boolean(false);
        std::string name = in_.read_name();
        if (name.empty()) in_.fail_at(where, "expected an argument");
        return resolve(name, where);
    }

    Term resolve(const std::string& name, SourceLocation where) const {
        if (name.find(':') == std::string::npos) return Term::iri(default_ns_ + name);
        return Term::iri(prefixes_.expand(name, where));
    }

    Scanner in_;
    PrefixMap prefixes_;
    std::string default_ns_;
};

} // namespace detail

/// Parses `Name: Atom ^ Atom ^ ... -> Atom` statements. Unprefixed names
/// resolve into `default_ns`; `swrlb:` names are builtins. Unsafe rules are
/// rejected.
inline std::vector<Rule> parse_rules(std::string_view text,
                                     PrefixMap prefixes = PrefixMap::defaults(),
                                     std::string default_ns = std::string(ns::ccpo)) {
    return detail::RuleParser(text, std::move(prefixes), std::move(default_ns)).run();
}

inline std::string format_term_in_rule(const Term& t, const PrefixMap& prefixes,
                                       std::string_view default_ns) {
    switch (t.kind()) {
    case TermKind::Variable: return "?" + t.lexical();
    case TermKind::Iri: {
        std::string_view iri = t.lexical();
        if (iri.starts_with(default_ns)) {
            auto local = iri.substr(default_ns.size());
            if (!local.empty() && detail::is_name_start(local.front()) &&
                local.find_first_of(":/#") == std::string_view::npos)
                return std::string(local);
        }
        return prefixes.compact(iri);
    }
    case TermKind::Literal:
        switch (t.datatype()) {
        case Datatype::Integer:
        case Datatype::Decimal:
        case Datatype::Boolean: return t.lexical();
        case Datatype::Timestamp: return "\"" + t.lexical() + "\"^^xsd:dateTime";
        default: return "\"" + t.lexical() + "\"";
        }
    }
    return t.lexical();
}

inline std::string format_atom(const Atom& a, const PrefixMap& prefixes = PrefixMap::defaults(),
                               std::string_view default_ns = ns::ccpo) {
    std::string out = a.kind == AtomKind::Builtin
                          ? "swrlb:" + std::string(builtin_info(*a.builtin).name)
                          : format_term_in_rule(a.predicate, prefixes, default_ns);
    out += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ", ";
        out += format_term_in_rule(a.args[i], prefixes, default_ns);
    }
    out += ')';
    return out;
}

/// Canonical one-line form; parse_rules(format_rule(r)) == {r}.
inline std::string format_rule(const Rule& r, const PrefixMap& prefixes = PrefixMap::defaults(),
                               std::string_view default_ns = ns::ccpo) {
    std::string out = r.name + ": ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (i) out += " ^ ";
        out += format_atom(r.body[i], prefixes, default_ns);
    }
    out += " -> " + format_atom(r.head, prefixes, default_ns);
    return out;
}

} // namespace eolcycle

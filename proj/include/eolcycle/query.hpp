#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eolcycle/detail/scanner.hpp"
#include "eolcycle/error.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

// ---------------------------------------------------------------------------
// AST

enum class ExprOp { Or, And, Not, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Neg, Bound, Var, Const };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprOp op = ExprOp::Const;
    std::vector<ExprPtr> args;
    std::string var;  // Var, Bound
    Term constant;    // Const
};

struct GroupPattern;
struct SelectQuery;

struct OptionalBlock {
    std::shared_ptr<const GroupPattern> group;
};

struct Filter {
    ExprPtr expr;
};

struct SubSelect {
    std::shared_ptr<const SelectQuery> query;
};

using PatternElement = std::variant<TriplePattern, OptionalBlock, Filter, SubSelect>;

struct GroupPattern {
    std::vector<PatternElement> elements;
};

struct CountAggregate {
    bool distinct = false;
    std::optional<std::string> var;  // nullopt = COUNT(*)
};

/// A projected column: a plain variable or `(COUNT(...) AS ?alias)`.
struct Projection {
    std::string var;
    std::optional<CountAggregate> count;
};

struct OrderKey {
    std::string var;
    bool descending = false;
};

struct SelectQuery {
    bool distinct = false;
    bool select_all = false;
    std::vector<Projection> projections;
    GroupPattern where;
    std::vector<std::string> group_by;
    std::vector<OrderKey> order_by;
    std::optional<std::size_t> limit;
    std::optional<std::size_t> offset;

    bool aggregates() const {
        if (!group_by.empty()) return true;
        for (const auto& p : projections)
            if (p.count) return true;
        return false;
    }
};

struct QueryAst {
    PrefixMap prefixes;
    SelectQuery select;
};

inline constexpr std::size_t kMaxOptionalDepth = 2;
inline constexpr std::size_t kMaxSubSelectDepth = 1;

/// Variables mentioned anywhere in a group, in order of first appearance.
/// A sub-select contributes only its projected variables.
inline void collect_variables(const GroupPattern& g, std::vector<std::string>& out);

inline void collect_projected(const SelectQuery& q, std::vector<std::string>& out) {
    auto add = [&](const std::string& v) {
        for (const auto& x : out)
            if (x == v) return;
        out.push_back(v);
    };
    if (q.select_all) {
        std::vector<std::string> vars;
        collect_variables(q.where, vars);
        for (const auto& v : vars) add(v);
        return;
    }
    for (const auto& p : q.projections) add(p.var);
}

inline void collect_variables(const GroupPattern& g, std::vector<std::string>& out) {
    auto add = [&](const std::string& v) {
        for (const auto& x : out)
            if (x == v) return;
        out.push_back(v);
    };
    for (const auto& el : g.elements) {
        if (const auto* tp = std::get_if<TriplePattern>(&el)) {
            for (const Term* t : {&tp->subject, &tp->predicate, &tp->object})
                if (t->is_variable()) add(t->lexical());
        } else if (const auto* opt = std::get_if<OptionalBlock>(&el)) {
            collect_variables(*opt->group, out);
        } else if (const auto* sub = std::get_if<SubSelect>(&el)) {
            std::vector<std::string> inner;
            collect_projected(*sub->query, inner);
            for (const auto& v : inner) add(v);
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class QueryParser {
public:
    explicit QueryParser(std::string_view text, PrefixMap prefixes)
        : in_(text), prefixes_(std::move(prefixes)) {}

    QueryAst run() {
        while (in_.consume_keyword("PREFIX", true)) {
            in_.skip_space();
            auto where = in_.location();
            std::string label = in_.read_name();
            if (label.empty() || label.back() != ':')
                in_.fail_at(where, "expected a prefix label ending in ':'");
            label.pop_back();
            prefixes_.add(label, in_.read_iriref());
        }
        QueryAst ast;
        ast.select = select(0);
        in_.skip_space();
        if (!in_.eof()) in_.fail("unexpected text after the query");
        ast.prefixes = std::move(prefixes_);
        return ast;
    }

private:
    SelectQuery select(std::size_t sub_depth, bool keyword_consumed = false) {
        if (!keyword_consumed && !in_.consume_keyword("SELECT", true)) in_.fail("expected SELECT");
        SelectQuery q;
        if (in_.consume_keyword("DISTINCT", true)) q.distinct = true;
        std::vector<std::pair<std::string, SourceLocation>> mentioned;
        if (in_.consume('*')) {
            q.select_all = true;
        } else {
            while (true) {
                in_.skip_space();
                auto where = in_.location();
                if (in_.peek() == '?' || in_.peek() == '$') {
                    std::string v = variable();
                    mentioned.emplace_back(v, where);
                    q.projections.push_back({v, std::nullopt});
                } else if (in_.consume('(')) {
                    if (!in_.consume_keyword("COUNT", true))
                        in_.fail("only COUNT aggregates are supported");
                    in_.expect('(', "'(' after COUNT");
                    CountAggregate agg;
                    if (in_.consume_keyword("DISTINCT", true)) agg.distinct = true;
                    in_.skip_space();
                    auto arg_where = in_.location();
                    if (!in_.consume('*')) {
                        agg.var = variable();
                        mentioned.emplace_back(*agg.var, arg_where);
                    }
                    in_.expect(')', "')' closing COUNT");
                    if (!in_.consume_keyword("AS", true)) in_.fail("expected AS");
                    std::string alias = variable();
                    in_.expect(')', "')' closing the aggregate");
                    q.projections.push_back({alias, agg});
                } else {
                    break;
                }
            }
            if (q.projections.empty()) in_.fail("expected projected variables or '*'");
        }
        in_.consume_keyword("WHERE", true);
        q.where = group(0, sub_depth);
        modifiers(q);

        std::vector<std::string> where_vars;
        collect_variables(q.where, where_vars);
        auto used = [&](const std::string& v) {
            for (const auto& w : where_vars)
                if (w == v) return true;
            return false;
        };
        for (const auto& [v, loc] : mentioned)
            if (!used(v))
                throw Error(ErrorCode::ProjectionOfUnusedVariable,
                            "?" + v + " does not occur in the WHERE clause", loc);
        if (q.aggregates()) {
            for (const auto& p : q.projections) {
                if (p.count) continue;
                bool grouped = false;
                for (const auto& g : q.group_by) grouped = grouped || g == p.var;
                if (!grouped)
                    throw Error(ErrorCode::SyntaxError,
                                "?" + p.var + " is projected but not in GROUP BY");
            }
            if (q.select_all) throw Error(ErrorCode::SyntaxError, "SELECT * cannot be combined with GROUP BY");
        }
        return q;
    }

    void modifiers(SelectQuery& q) {
        if (in_.consume_keyword("GROUP", true)) {
            if (!in_.consume_keyword("BY", true)) in_.fail("expected BY after GROUP");
            while (true) {
                in_.skip_space();
                if (in_.peek() != '?' && in_.peek() != '$') break;
                q.group_by.push_back(variable());
            }
            if (q.group_by.empty()) in_.fail("GROUP BY needs at least one variable");
        }
        if (in_.consume_keyword("ORDER", true)) {
            if (!in_.consume_keyword("BY", true)) in_.fail("expected BY after ORDER");
            while (true) {
                in_.skip_space();
                if (in_.peek() == '?' || in_.peek() == '$') {
                    q.order_by.push_back({variable(), false});
                } else if (bool asc = in_.consume_keyword("ASC", true);
                           asc || in_.consume_keyword("DESC", true)) {
                    bool desc = !asc;
                    in_.expect('(', "'(' after ASC/DESC");
                    q.order_by.push_back({variable(), desc});
                    in_.expect(')', "')'");
                } else {
                    break;
                }
            }
            if (q.order_by.empty()) in_.fail("ORDER BY needs at least one key");
        }
        for (int i = 0; i < 2; ++i) {
            if (in_.consume_keyword("LIMIT", true)) q.limit = count_literal();
            else if (in_.consume_keyword("OFFSET", true)) q.offset = count_literal();
        }
    }

    std::size_t count_literal() {
        in_.skip_space();
        std::string n = in_.read_number();
        auto v = detail::parse_int64(n);
        if (!v || *v < 0) in_.fail("expected a non-negative integer");
        return static_cast<std::size_t>(*v);
    }

    GroupPattern group(std::size_t optional_depth, std::size_t sub_depth) {
        in_.expect('{', "'{'");
        GroupPattern g;
        while (true) {
            in_.skip_space();
            if (in_.consume('}')) break;
            if (in_.eof()) in_.fail("unterminated group pattern");
            if (in_.consume('.')) continue;
            auto where = in_.location();
            if (in_.consume_keyword("OPTIONAL", true)) {
                if (optional_depth + 1 > kMaxOptionalDepth)
                    in_.fail_at(where, "OPTIONAL blocks nest at most " +
                                           std::to_string(kMaxOptionalDepth) + " deep");
                auto inner = group(optional_depth + 1, sub_depth);
                g.elements.push_back(OptionalBlock{std::make_shared<GroupPattern>(std::move(inner))});
            } else if (in_.consume_keyword("FILTER", true)) {
                in_.skip_space();
                ExprPtr e;
                if (in_.peek() == '(') {
                    in_.get();
                    e = or_expr();
                    in_.expect(')', "')' closing FILTER");
                } else {
                    e = primary();
                }
                g.elements.push_back(Filter{std::move(e)});
            } else if (in_.peek() == '{') {
                in_.get();
                if (!in_.consume_keyword("SELECT", true))
                    in_.fail_at(where, "nested groups are only supported as sub-selects");
                if (sub_depth + 1 > kMaxSubSelectDepth)
                    in_.fail_at(where, "sub-selects nest at most " +
                                           std::to_string(kMaxSubSelectDepth) + " deep");
                auto sub = select(sub_depth + 1, true);
                in_.expect('}', "'}' closing the sub-select");
                g.elements.push_back(SubSelect{std::make_shared<SelectQuery>(std::move(sub))});
            } else {
                triples(g);
            }
        }
        return g;
    }

    void triples(GroupPattern& g) {
        Term subject = pattern_term(false);
        while (true) {
            Term predicate = pattern_term(true);
            while (true) {
                Term object = pattern_term(false);
                g.elements.push_back(TriplePattern{subject, predicate, std::move(object)});
                if (!in_.consume(',')) break;
            }
            if (!in_.consume(';')) break;
            in_.skip_space();
            if (in_.peek() == '.' || in_.peek() == '}') break;
        }
    }

    std::string variable() {
        in_.skip_space();
        if (in_.peek() != '?' && in_.peek() != '$') in_.fail("expected a variable");
        in_.get();
        std::string v;
        while (!in_.eof() && (std::isalnum(static_cast<unsigned char>(in_.peek())) || in_.peek() == '_'))
            v += in_.get();
        if (v.empty()) in_.fail("empty variable name");
        return v;
    }

    Term pattern_term(bool verb) {
        in_.skip_space();
        auto where = in_.location();
        char c = in_.peek();
        if (c == '?' || c == '$') return Term::variable(variable());
        if (verb && in_.consume_keyword("a")) return rdf_type();
        if (c == '<') return Term::iri(in_.read_iriref());
        if (!verb) {
            if (c == '"') return quoted_literal();
            if (in_.at_number_start()) return number(where);
            if (in_.consume_keyword("true")) return Term::boolean(true);
            if (in_.consume_keyword("false")) return Term::boolean(false);
        }
        if (is_name_start(c) || c == ':') {
            std::string name = in_.read_name();
            if (name.find(':') == std::string::npos)
                in_.fail_at(where, "expected a prefixed name, got '" + name + "'");
            return Term::iri(prefixes_.expand(name, where));
        }
        in_.fail(verb ? "expected a predicate" : "expected a term");
    }

    Term number(SourceLocation where) {
        std::string n = in_.read_number();
        bool dec = n.find_first_of(".eE") != std::string::npos;
        try {
            return Term::literal(n, dec ? Datatype::Decimal : Datatype::Integer);
        } catch (const Error& e) {
            throw Error(e.code(), e.message(), where);
        }
    }

    Term quoted_literal() {
        auto where = in_.location();
        std::string lexical = in_.read_quoted();
        if (in_.peek() == '^' && in_.peek(1) == '^') {
            in_.get();
            in_.get();
            in_.skip_space();
            auto dt_where = in_.location();
            std::string dt;
            if (in_.peek() == '<') {
                dt = in_.read_iriref();
            } else {
                dt = prefixes_.expand(in_.read_name(), dt_where);
            }
            auto tag = datatype_from_iri(dt);
            if (!tag) throw Error(ErrorCode::MalformedLiteral, "unsupported datatype <" + dt + ">", dt_where);
            try {
                return Term::literal(lexical, *tag);
            } catch (const Error& e) {
                throw Error(e.code(), e.message(), where);
            }
        }
        return Term::string_literal(std::move(lexical));
    }

    static ExprPtr make(ExprOp op, std::vector<ExprPtr> args) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->args = std::move(args);
        return e;
    }

    ExprPtr or_expr() {
        auto lhs = and_expr();
        while (in_.consume("||")) lhs = make(ExprOp::Or, {lhs, and_expr()});
        return lhs;
    }

    ExprPtr and_expr() {
        auto lhs = relational();
        while (in_.consume("&&")) lhs = make(ExprOp::And, {lhs, relational()});
        return lhs;
    }

    ExprPtr relational() {
        auto lhs = additive();
        struct OpText {
            std::string_view text;
            ExprOp op;
        };
        static constexpr OpText ops[] = {{"!=", ExprOp::Ne}, {"<=", ExprOp::Le}, {">=", ExprOp::Ge},
                                         {"=", ExprOp::Eq},  {"<", ExprOp::Lt},  {">", ExprOp::Gt}};
        for (const auto& o : ops)
            if (in_.consume(o.text)) return make(o.op, {lhs, additive()});
        return lhs;
    }

    ExprPtr additive() {
        auto lhs = multiplicative();
        while (true) {
            in_.skip_space();
            if (in_.peek() == '+') {
                in_.get();
                lhs = make(ExprOp::Add, {lhs, multiplicative()});
            } else if (in_.peek() == '-') {
                in_.get();
                lhs = make(ExprOp::Sub, {lhs, multiplicative()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr multiplicative() {
        auto lhs = unary();
        while (true) {
            in_.skip_space();
            if (in_.peek() == '*') {
                in_.get();
                lhs = make(ExprOp::Mul, {lhs, unary()});
            } else if (in_.peek() == '/') {
                in_.get();
                lhs = make(ExprOp::Div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr unary() {
        in_.skip_space();
        if (in_.peek() == '!' && in_.peek(1) != '=') {
            in_.get();
            return make(ExprOp::Not, {unary()});
        }
        if (in_.peek() == '-' && !std::isdigit(static_cast<unsigned char>(in_.peek(1)))) {
            in_.get();
            return make(ExprOp::Neg, {unary()});
        }
        return primary();
    }

    ExprPtr primary() {
        in_.skip_space();
        auto where = in_.location();
        char c = in_.peek();
        if (c == '(') {
            in_.get();
            auto e = or_expr();
            in_.expect(')', "')'");
            return e;
        }
        if (in_.consume_keyword("bound", true)) {
            in_.expect('(', "'(' after bound");
            auto e = std::make_shared<Expr>();
            e->op = ExprOp::Bound;
            e->var = variable();
            in_.expect(')', "')' closing bound");
            return e;
        }
        if (c == '?' || c == '$') {
            auto e = std::make_shared<Expr>();
            e->op = ExprOp::Var;
            e->var = variable();
            return e;
        }
        auto e = std::make_shared<Expr>();
        e->op = ExprOp::Const;
        if (c == '"') {
            e->constant = quoted_literal();
        } else if (in_.at_number_start()) {
            e->constant = number(where);
        } else if (in_.consume_keyword("true")) {
            e->constant = Term::boolean(true);
        } else if (in_.consume_keyword("false")) {
            e->constant = Term::boolean(false);
        } else if (c == '<') {
            e->constant = Term::iri(in_.read_iriref());
        } else if (is_name_start(c) || c == ':') {
            std::string name = in_.read_name();
            if (name.find(':') == std::string::npos)
                in_.fail_at(where, "unknown function or name '" + name + "'");
            e->constant = Term::iri(prefixes_.expand(name, where));
        } else {
            in_.fail("expected an expression");
        }
        return e;
    }

    Scanner in_;
    PrefixMap prefixes_;
};

} // namespace detail

inline QueryAst parse_query(std::string_view text, PrefixMap prefixes = PrefixMap::defaults()) {
    return detail::QueryParser(text, std::move(prefixes)).run();
}

} // namespace eolcycle

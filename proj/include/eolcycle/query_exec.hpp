#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eolcycle/format.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/query.hpp"

namespace eolcycle {

using Cell = std::optional<Term>;

struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    /// Rows dropped because a FILTER compared or combined incompatible types.
    std::size_t filter_type_errors = 0;

    friend bool operator==(const ResultTable& a, const ResultTable& b) {
        return a.header == b.header && a.rows == b.rows;
    }
};

/// Value-aware ordering: unbound first, numbers numerically, timestamps
/// chronologically, everything else (and ties) by canonical term order.
inline std::strong_ordering compare_cells(const Cell& a, const Cell& b) {
    if (!a || !b) return static_cast<bool>(a) <=> static_cast<bool>(b);
    auto na = a->as_numeric(), nb = b->as_numeric();
    if (na && nb) {
        double x = std::visit([](auto v) { return static_cast<double>(v); }, *na);
        double y = std::visit([](auto v) { return static_cast<double>(v); }, *nb);
        if (std::holds_alternative<std::int64_t>(*na) && std::holds_alternative<std::int64_t>(*nb)) {
            if (auto c = std::get<std::int64_t>(*na) <=> std::get<std::int64_t>(*nb); c != 0) return c;
        } else if (x < y) {
            return std::strong_ordering::less;
        } else if (x > y) {
            return std::strong_ordering::greater;
        }
    } else if (auto ta = a->as_timestamp_ms(), tb = b->as_timestamp_ms(); ta && tb) {
        if (auto c = *ta <=> *tb; c != 0) return c;
    }
    return *a <=> *b;
}

namespace detail {

struct TypeError {};
struct UnboundError {};

/// Expression value: a term, or an error that eliminates the row.
using ExprValue = std::variant<Term, TypeError, UnboundError>;

class QueryEvaluator {
public:
    explicit QueryEvaluator(const Graph& g) : graph_(g) {}

    std::size_t type_errors = 0;

    ResultTable select(const SelectQuery& q) {
        std::vector<Binding> rows = group(q.where, Binding{});
        std::vector<std::string> columns;
        collect_projected(q, columns);

        if (q.aggregates()) rows = aggregate(q, rows);

        auto project = [&](const Binding& b) {
            std::vector<Cell> out;
            out.reserve(columns.size());
            for (const auto& c : columns) {
                auto it = b.find(c);
                out.push_back(it == b.end() ? Cell{} : Cell{it->second});
            }
            return out;
        };
        auto cell = [](const Binding& b, const std::string& v) {
            auto it = b.find(v);
            return it == b.end() ? Cell{} : Cell{it->second};
        };

        std::vector<std::pair<std::vector<Cell>, const Binding*>> keyed;
        keyed.reserve(rows.size());
        for (const auto& b : rows) keyed.emplace_back(project(b), &b);

        auto lex_less = [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (auto c = compare_cells(a[i], b[i]); c != 0) return c < 0;
            return false;
        };
        std::stable_sort(keyed.begin(), keyed.end(),
                         [&](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
        if (!q.order_by.empty()) {
            std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
                for (const auto& k : q.order_by) {
                    auto c = compare_cells(cell(*x.second, k.var), cell(*y.second, k.var));
                    if (c != 0) return k.descending ? c > 0 : c < 0;
                }
                return false;
            });
        }

        ResultTable table;
        table.header = columns;
        for (auto& [proj, _] : keyed) {
            if (q.distinct &&
                std::find(table.rows.begin(), table.rows.end(), proj) != table.rows.end())
                continue;
            table.rows.push_back(std::move(proj));
        }
        std::size_t offset = std::min(q.offset.value_or(0), table.rows.size());
        table.rows.erase(table.rows.begin(), table.rows.begin() + static_cast<std::ptrdiff_t>(offset));
        if (q.limit && *q.limit < table.rows.size())
            table.rows.resize(*q.limit);
        return table;
    }

private:
    std::vector<Binding> group(const GroupPattern& g, const Binding& seed) {
        std::vector<Binding> rows{seed};
        std::vector<TriplePattern> bgp;
        std::vector<const Filter*> filters;
        auto flush = [&] {
            if (!bgp.empty()) rows = join_bgp(rows, bgp);
            bgp.clear();
        };
        for (const auto& el : g.elements) {
            if (const auto* tp = std::get_if<TriplePattern>(&el)) {
                bgp.push_back(*tp);
            } else if (const auto* opt = std::get_if<OptionalBlock>(&el)) {
                flush();
                std::vector<Binding> next;
                for (const auto& r : rows) {
                    auto ext = group(*opt->group, r);
                    if (ext.empty()) next.push_back(r);
                    else next.insert(next.end(), ext.begin(), ext.end());
                }
                rows = std::move(next);
            } else if (const auto* sub = std::get_if<SubSelect>(&el)) {
                flush();
                auto table = select(*sub->query);
                std::vector<Binding> next;
                for (const auto& r : rows) {
                    for (const auto& srow : table.rows) {
                        Binding merged = r;
                        bool ok = true;
                        for (std::size_t i = 0; i < table.header.size() && ok; ++i) {
                            if (!srow[i]) continue;
                            auto [it, inserted] = merged.emplace(table.header[i], *srow[i]);
                            ok = inserted || it->second == *srow[i];
                        }
                        if (ok) next.push_back(std::move(merged));
                    }
                }
                rows = std::move(next);
            } else {
                filters.push_back(&std::get<Filter>(el));
            }
        }
        flush();
        if (filters.empty()) return rows;
        std::vector<Binding> kept;
        for (auto& r : rows) {
            bool keep = true;
            for (const auto* f : filters) {
                auto v = effective_boolean(eval(*f->expr, r));
                if (std::holds_alternative<TypeError>(v)) ++type_errors;
                if (!std::holds_alternative<Term>(v) || !*std::get<Term>(v).as_bool()) {
                    keep = false;
                    break;
                }
            }
            if (keep) kept.push_back(std::move(r));
        }
        return kept;
    }

    /// Greedy reorder: repeatedly take the pattern with the most positions
    /// already fixed (constants or variables bound by earlier patterns).
    static std::vector<TriplePattern> order_patterns(std::vector<TriplePattern> bgp,
                                                     std::set<std::string> bound) {
        std::vector<TriplePattern> out;
        while (!bgp.empty()) {
            std::size_t best = 0;
            int best_score = -1;
            for (std::size_t i = 0; i < bgp.size(); ++i) {
                int score = 0;
                for (const Term* t : {&bgp[i].subject, &bgp[i].predicate, &bgp[i].object})
                    if (!t->is_variable() || bound.count(t->lexical())) ++score;
                if (score > best_score) {
                    best = i;
                    best_score = score;
                }
            }
            for (const Term* t : {&bgp[best].subject, &bgp[best].predicate, &bgp[best].object})
                if (t->is_variable()) bound.insert(t->lexical());
            out.push_back(std::move(bgp[best]));
            bgp.erase(bgp.begin() + static_cast<std::ptrdiff_t>(best));
        }
        return out;
    }

    std::vector<Binding> join_bgp(const std::vector<Binding>& rows, const std::vector<TriplePattern>& bgp) {
        std::vector<Binding> out;
        for (const auto& r : rows) {
            std::set<std::string> bound;
            for (const auto& [k, _] : r) bound.insert(k);
            auto ordered = order_patterns(bgp, bound);
            extend(ordered, 0, r, out);
        }
        return out;
    }

    void extend(const std::vector<TriplePattern>& ps, std::size_t i, const Binding& b,
                std::vector<Binding>& out) {
        if (i == ps.size()) {
            out.push_back(b);
            return;
        }
        TriplePattern p{substitute(ps[i].subject, b), substitute(ps[i].predicate, b),
                        substitute(ps[i].object, b)};
        auto constant = [](const Term& t) -> std::optional<Term> {
            if (t.is_variable()) return std::nullopt;
            return t;
        };
        for (FactId id : graph_.find(constant(p.subject), constant(p.predicate), constant(p.object))) {
            Binding next = b;
            if (Graph::unify(p, graph_.fact(id).triple, next)) extend(ps, i + 1, next, out);
        }
    }

    static Term substitute(const Term& t, const Binding& b) {
        if (!t.is_variable()) return t;
        auto it = b.find(t.lexical());
        return it == b.end() ? t : it->second;
    }

    std::vector<Binding> aggregate(const SelectQuery& q, const std::vector<Binding>& rows) {
        std::map<std::vector<Cell>, std::vector<const Binding*>,
                 bool (*)(const std::vector<Cell>&, const std::vector<Cell>&)>
            groups([](const std::vector<Cell>& a, const std::vector<Cell>& b) {
                for (std::size_t i = 0; i < a.size(); ++i) {
                    if (a[i] != b[i]) {
                        if (!a[i] || !b[i]) return !a[i];
                        return *a[i] < *b[i];
                    }
                }
                return false;
            });
        for (const auto& r : rows) {
            std::vector<Cell> key;
            for (const auto& v : q.group_by) {
                auto it = r.find(v);
                key.push_back(it == r.end() ? Cell{} : Cell{it->second});
            }
            groups[key].push_back(&r);
        }
        if (q.group_by.empty() && groups.empty()) groups[{}];

        std::vector<Binding> out;
        for (const auto& [key, members] : groups) {
            Binding b;
            for (std::size_t i = 0; i < q.group_by.size(); ++i)
                if (key[i]) b[q.group_by[i]] = *key[i];
            for (const auto& p : q.projections) {
                if (!p.count) continue;
                std::int64_t n = 0;
                if (p.count->var) {
                    std::set<Term> seen;
                    for (const auto* m : members) {
                        auto it = m->find(*p.count->var);
                        if (it == m->end()) continue;
                        if (!p.count->distinct || seen.insert(it->second).second) ++n;
                    }
                } else if (p.count->distinct) {
                    std::set<Binding> seen;
                    for (const auto* m : members) seen.insert(*m);
                    n = static_cast<std::int64_t>(seen.size());
                } else {
                    n = static_cast<std::int64_t>(members.size());
                }
                b[p.var] = Term::integer(n);
            }
            out.push_back(std::move(b));
        }
        return out;
    }

    static ExprValue effective_boolean(const ExprValue& v) {
        if (!std::holds_alternative<Term>(v)) return v;
        const Term& t = std::get<Term>(v);
        if (auto b = t.as_bool()) return Term::boolean(*b);
        if (auto n = t.as_numeric())
            return Term::boolean(std::visit([](auto x) { return x != 0; }, *n));
        if (t.is_literal() && t.datatype() == Datatype::String) return Term::boolean(!t.lexical().empty());
        return TypeError{};
    }

    ExprValue eval(const Expr& e, const Binding& b) {
        switch (e.op) {
        case ExprOp::Const: return e.constant;
        case ExprOp::Var: {
            auto it = b.find(e.var);
            if (it == b.end()) return UnboundError{};
            return it->second;
        }
        case ExprOp::Bound: return Term::boolean(b.count(e.var) != 0);
        case ExprOp::Not: {
            auto v = effective_boolean(eval(*e.args[0], b));
            if (!std::holds_alternative<Term>(v)) return v;
            return Term::boolean(!*std::get<Term>(v).as_bool());
        }
        case ExprOp::Or:
        case ExprOp::And: {
            auto l = effective_boolean(eval(*e.args[0], b));
            auto r = effective_boolean(eval(*e.args[1], b));
            bool dominant = e.op == ExprOp::Or;  // true dominates ||, false dominates &&
            auto is = [](const ExprValue& v, bool want) {
                return std::holds_alternative<Term>(v) && *std::get<Term>(v).as_bool() == want;
            };
            if (is(l, dominant) || is(r, dominant)) return Term::boolean(dominant);
            if (!std::holds_alternative<Term>(l)) return l;
            if (!std::holds_alternative<Term>(r)) return r;
            return Term::boolean(!dominant);
        }
        case ExprOp::Neg: {
            auto v = eval(*e.args[0], b);
            if (!std::holds_alternative<Term>(v)) return v;
            auto n = std::get<Term>(v).as_numeric();
            if (!n) return TypeError{};
            return arithmetic(ExprOp::Sub, Numeric{std::int64_t{0}}, *n);
        }
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div: {
            auto l = eval(*e.args[0], b);
            if (!std::holds_alternative<Term>(l)) return l;
            auto r = eval(*e.args[1], b);
            if (!std::holds_alternative<Term>(r)) return r;
            auto x = std::get<Term>(l).as_numeric(), y = std::get<Term>(r).as_numeric();
            if (!x || !y) return TypeError{};
            return arithmetic(e.op, *x, *y);
        }
        default: return compare(e, b);
        }
    }

    static ExprValue arithmetic(ExprOp op, const Numeric& x, const Numeric& y) {
        if (op != ExprOp::Div && std::holds_alternative<std::int64_t>(x) &&
            std::holds_alternative<std::int64_t>(y)) {
            std::int64_t a = std::get<std::int64_t>(x), c = std::get<std::int64_t>(y), r = 0;
            bool overflow = op == ExprOp::Add   ? __builtin_add_overflow(a, c, &r)
                            : op == ExprOp::Sub ? __builtin_sub_overflow(a, c, &r)
                                                : __builtin_mul_overflow(a, c, &r);
            if (!overflow) return Term::integer(r);
        }
        auto d = [](const Numeric& n) { return std::visit([](auto v) { return static_cast<double>(v); }, n); };
        double a = d(x), c = d(y);
        double r = op == ExprOp::Add ? a + c : op == ExprOp::Sub ? a - c : op == ExprOp::Mul ? a * c : a / c;
        if (!std::isfinite(r)) return TypeError{};
        return Term::decimal(r);
    }

    ExprValue compare(const Expr& e, const Binding& b) {
        auto l = eval(*e.args[0], b);
        if (!std::holds_alternative<Term>(l)) return l;
        auto r = eval(*e.args[1], b);
        if (!std::holds_alternative<Term>(r)) return r;
        const Term& x = std::get<Term>(l);
        const Term& y = std::get<Term>(r);

        std::optional<std::partial_ordering> ord;
        auto nx = x.as_numeric(), ny = y.as_numeric();
        if (nx && ny) {
            if (std::holds_alternative<std::int64_t>(*nx) && std::holds_alternative<std::int64_t>(*ny)) {
                ord = std::get<std::int64_t>(*nx) <=> std::get<std::int64_t>(*ny);
            } else {
                auto d = [](const Numeric& n) { return std::visit([](auto v) { return static_cast<double>(v); }, n); };
                ord = d(*nx) <=> d(*ny);
            }
        } else if (x.is_literal() && y.is_literal() && x.datatype() == y.datatype()) {
            if (auto tx = x.as_timestamp_ms(), ty = y.as_timestamp_ms(); tx && ty) ord = *tx <=> *ty;
            else if (x.datatype() == Datatype::Boolean) ord = *x.as_bool() <=> *y.as_bool();
            else ord = x.lexical() <=> y.lexical();
        } else if (e.op == ExprOp::Eq || e.op == ExprOp::Ne) {
            if (x.is_literal() && y.is_literal()) return TypeError{};
            bool same = x == y;
            return Term::boolean(e.op == ExprOp::Eq ? same : !same);
        } else {
            return TypeError{};
        }
        switch (e.op) {
        case ExprOp::Eq: return Term::boolean(*ord == 0);
        case ExprOp::Ne: return Term::boolean(*ord != 0);
        case ExprOp::Lt: return Term::boolean(*ord < 0);
        case ExprOp::Le: return Term::boolean(*ord <= 0);
        case ExprOp::Gt: return Term::boolean(*ord > 0);
        case ExprOp::Ge: return Term::boolean(*ord >= 0);
        default: return TypeError{};
        }
    }

    const Graph& graph_;
};

} // namespace detail

inline ResultTable execute(const Graph& graph, const QueryAst& query) {
    detail::QueryEvaluator ev(graph);
    auto table = ev.select(query.select);
    table.filter_type_errors = ev.type_errors;
    return table;
}

/// Parses with the graph's prefixes as the base and runs the query.
inline ResultTable execute(const Graph& graph, std::string_view text) {
    return execute(graph, parse_query(text, graph.prefixes()));
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {
inline std::string tsv_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\\': out += "\\\\"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string cell_text(const Cell& c, const PrefixMap& px) {
    if (!c) return {};
    if (c->is_iri()) return px.compact(c->lexical());
    return c->lexical();
}
} // namespace detail

/// SPARQL 1.1 JSON results. Unbound cells are omitted from a binding.
inline nlohmann::ordered_json to_json(const ResultTable& t) {
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (const auto& h : t.header) vars.push_back(h);
    nlohmann::ordered_json bindings = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json b = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i]) continue;
            const Term& v = *row[i];
            nlohmann::ordered_json cell;
            if (v.is_iri()) {
                cell = {{"type", "uri"}, {"value", v.lexical()}};
            } else {
                cell = {{"type", "literal"}, {"value", v.lexical()}};
                if (v.datatype() != Datatype::String && v.datatype() != Datatype::None)
                    cell["datatype"] = std::string(datatype_iri(v.datatype()));
            }
            b[t.header[i]] = std::move(cell);
        }
        bindings.push_back(std::move(b));
    }
    return {{"head", {{"vars", vars}}}, {"results", {{"bindings", bindings}}}};
}

inline std::string format_results(const ResultTable& t, OutputFormat fmt, const PrefixMap& px) {
    std::ostringstream out;
    switch (fmt) {
    case OutputFormat::Json: out << to_json(t).dump(2) << '\n'; break;
    case OutputFormat::Tsv:
        for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "\t" : "") << '?' << t.header[i];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "\t" : "") << detail::tsv_escape(detail::cell_text(row[i], px));
            out << '\n';
        }
        break;
    case OutputFormat::Pretty: {
        std::vector<std::size_t> width;
        for (const auto& h : t.header) width.push_back(h.size());
        std::vector<std::vector<std::string>> text;
        for (const auto& row : t.rows) {
            auto& line = text.emplace_back();
            for (std::size_t i = 0; i < row.size(); ++i) {
                line.push_back(detail::cell_text(row[i], px));
                width[i] = std::max(width[i], line.back().size());
            }
        }
        auto rule = [&] {
            out << '+';
            for (auto w : width) out << std::string(w + 2, '-') << '+';
            out << '\n';
        };
        auto line = [&](const std::vector<std::string>& cells) {
            out << '|';
            for (std::size_t i = 0; i < cells.size(); ++i)
                out << ' ' << cells[i] << std::string(width[i] - cells[i].size(), ' ') << " |";
            out << '\n';
        };
        rule();
        line(t.header);
        rule();
        for (const auto& l : text) line(l);
        rule();
        out << t.rows.size() << (t.rows.size() == 1 ? " row" : " rows") << '\n';
        break;
    }
    }
    return out.str();
}

} // namespace eolcycle

#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eolcycle/detail/scanner.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

struct ParsedData {
    std::vector<Fact> facts;
    PrefixMap prefixes;
};

namespace detail {

class TurtleParser {
public:
    TurtleParser(std::string_view text, PrefixMap prefixes)
        : in_(text), prefixes_(std::move(prefixes)) {}

    ParsedData run() {
        ParsedData out;
        while (true) {
            in_.skip_space();
            if (in_.eof()) break;
            if (in_.consume("@prefix")) {
                prefix_directive(true);
            } else if (in_.consume_keyword("PREFIX", true)) {
                prefix_directive(false);
            } else if (in_.peek() == '@') {
                in_.fail("unsupported directive");
            } else {
                statement(out.facts);
            }
        }
        out.prefixes = std::move(prefixes_);
        return out;
    }

private:
    void prefix_directive(bool needs_dot) {
        in_.skip_space();
        auto where = in_.location();
        std::string label = in_.read_name();
        if (label.empty() || label.back() != ':')
            in_.fail_at(where, "expected a prefix label ending in ':'");
        label.pop_back();
        std::string iri = in_.read_iriref();
        prefixes_.add(label, iri);
        if (needs_dot) in_.expect('.', "'.' after @prefix");
    }

    void statement(std::vector<Fact>& facts) {
        Term subject = iri_term("subject");
        while (true) {
            Term predicate = verb();
            while (true) {
                Term object = object_term();
                facts.push_back(Fact{Triple{subject, predicate, std::move(object)}, Origin::asserted()});
                if (!in_.consume(',')) break;
            }
            if (in_.consume(';')) {
                in_.skip_space();
                // A trailing ';' before '.' is allowed.
                if (in_.peek() == '.') break;
                continue;
            }
            break;
        }
        in_.expect('.', "'.' at end of statement");
    }

    Term verb() {
        in_.skip_space();
        if (in_.consume_keyword("a")) return rdf_type();
        return iri_term("predicate");
    }

    Term iri_term(std::string_view role) {
        in_.skip_space();
        auto where = in_.location();
        char c = in_.peek();
        if (c == '<') return Term::iri(in_.read_iriref());
        if (c == '_' && in_.peek(1) == ':') in_.fail("blank nodes are not supported");
        if (c == '[' || c == '(') in_.fail("blank nodes and collections are not supported");
        if (is_name_start(c) || c == ':') {
            std::string name = in_.read_name();
            if (name.find(':') == std::string::npos)
                in_.fail_at(where, "expected a prefixed name, got '" + name + "'");
            return Term::iri(prefixes_.expand(name, where));
        }
        in_.fail("expected " + std::string(role));
    }

    Term object_term() {
        in_.skip_space();
        auto where = in_.location();
        char c = in_.peek();
        if (c == '"') return quoted_literal();
        if (in_.at_number_start()) return number_literal(in_.read_number(), where);
        if (is_name_start(c)) {
            if (in_.consume_keyword("true")) return Term::boolean(true);
            if (in_.consume_keyword("false")) return Term::boolean(false);
        }
        if (c == '<' || is_name_start(c) || c == ':' || c == '_' || c == '[' || c == '(')
            return iri_term("object");
        in_.fail("expected an object");
    }

    Term quoted_literal() {
        auto where = in_.location();
        std::string lexical = in_.read_quoted();
        if (in_.peek() == '@') in_.fail("language tags are not supported");
        if (in_.peek() == '^' && in_.peek(1) == '^') {
            in_.get();
            in_.get();
            auto dt_where = in_.location();
            Term dt = iri_term("datatype");
            auto tag = datatype_from_iri(dt.lexical());
            if (!tag)
                throw Error(ErrorCode::MalformedLiteral,
                            "unsupported datatype " + prefixes_.compact(dt.lexical()), dt_where);
            return literal_at(lexical, *tag, where);
        }
        return Term::string_literal(std::move(lexical));
    }

    static Term number_literal(const std::string& text, SourceLocation where) {
        bool is_decimal = text.find_first_of(".eE") != std::string::npos;
        return literal_at(text, is_decimal ? Datatype::Decimal : Datatype::Integer, where);
    }

    static Term literal_at(std::string_view lexical, Datatype dt, SourceLocation where) {
        try {
            return Term::literal(lexical, dt);
        } catch (const Error& e) {
            throw Error(e.code(), "'" + std::string(lexical) + "' is not a valid xsd:" +
                                      std::string(datatype_name(dt)),
                        where);
        }
    }

    Scanner in_;
    PrefixMap prefixes_;
};

inline std::string escape_string(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

/// Parses the Turtle subset: @prefix/PREFIX, prefixed names, `a`, `;` and
/// `,` continuations, plain and typed literals, numbers and booleans.
/// Blank nodes, collections and language tags are rejected. Facts come back
/// in file order.
inline ParsedData parse_data(std::string_view text, PrefixMap prefixes = PrefixMap::defaults()) {
    return detail::TurtleParser(text, std::move(prefixes)).run();
}

/// Turtle form of a single term.
inline std::string turtle_term(const Term& t, const PrefixMap& prefixes) {
    if (t.is_iri()) return prefixes.compact(t.lexical());
    if (t.is_variable()) return "?" + t.lexical();
    switch (t.datatype()) {
    case Datatype::Integer:
    case Datatype::Boolean: return t.lexical();
    case Datatype::String:
    case Datatype::None: return "\"" + detail::escape_string(t.lexical()) + "\"";
    default:
        return "\"" + t.lexical() + "\"^^" + prefixes.compact(datatype_iri(t.datatype()));
    }
}

/// Deterministic Turtle rendering of the graph, grouped by subject.
inline std::string export_turtle(const Graph& graph, bool include_inferred = true) {
    const auto& prefixes = graph.prefixes();
    std::map<Term, std::map<Term, std::set<Term>>> grouped;
    for (const auto& f : graph.facts()) {
        if (f.origin.inferred() && !include_inferred) continue;
        grouped[f.subject()][f.predicate()].insert(f.object());
    }
    std::ostringstream out;
    for (const auto& [label, iri] : prefixes.entries())
        out << "@prefix " << label << ": <" << iri << "> .\n";
    for (const auto& [subject, preds] : grouped) {
        out << '\n' << turtle_term(subject, prefixes);
        bool first_pred = true;
        for (const auto& [pred, objects] : preds) {
            out << (first_pred ? "\n    " : " ;\n    ");
            first_pred = false;
            out << (pred == rdf_type() ? std::string("a") : turtle_term(pred, prefixes)) << ' ';
            bool first_obj = true;
            for (const auto& o : objects) {
                if (!first_obj) out << " , ";
                first_obj = false;
                out << turtle_term(o, prefixes);
            }
        }
        out << " .\n";
    }
    return out.str();
}

/// Parses `text` and asserts every fact into `graph`; prefixes declared in
/// the text are added to the graph's table.
inline std::size_t load_data(Graph& graph, std::string_view text) {
    auto parsed = parse_data(text, graph.prefixes());
    graph.prefixes() = parsed.prefixes;
    std::size_t added = 0;
    for (const auto& f : parsed.facts)
        if (graph.assert_fact(f) == InsertOutcome::Added) ++added;
    return added;
}

} // namespace eolcycle

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "eolcycle/error.hpp"

namespace eolcycle {

enum class TermKind : std::uint8_t { Iri, Literal, Variable };

enum class Datatype : std::uint8_t { None, String, Integer, Decimal, Boolean, Timestamp };

namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view prov = "http://www.w3.org/ns/prov#";
inline constexpr std::string_view swrlb = "http://www.w3.org/2003/11/swrlb#";
inline constexpr std::string_view cco = "http://www.ontologyrepository.com/CommonCoreOntologies/";
inline constexpr std::string_view ccpo = "http://example.org/ccpo#";
inline constexpr std::string_view dicbm = "http://example.org/dicbm#";
} // namespace ns

inline constexpr std::string_view datatype_name(Datatype dt) noexcept {
    switch (dt) {
    case Datatype::None: return "none";
    case Datatype::String: return "string";
    case Datatype::Integer: return "integer";
    case Datatype::Decimal: return "decimal";
    case Datatype::Boolean: return "boolean";
    case Datatype::Timestamp: return "dateTime";
    }
    return "none";
}

inline std::string datatype_iri(Datatype dt) {
    return std::string(ns::xsd) + std::string(datatype_name(dt));
}

/// Maps an xsd datatype IRI onto the supported tags. Numeric subtypes fold
/// into integer/decimal, xsd:date folds into timestamp.
inline std::optional<Datatype> datatype_from_iri(std::string_view iri) {
    if (!iri.starts_with(ns::xsd)) return std::nullopt;
    auto local = iri.substr(ns::xsd.size());
    static const std::map<std::string_view, Datatype> table = {
        {"string", Datatype::String},        {"integer", Datatype::Integer},
        {"int", Datatype::Integer},          {"long", Datatype::Integer},
        {"short", Datatype::Integer},        {"nonNegativeInteger", Datatype::Integer},
        {"positiveInteger", Datatype::Integer},
        {"decimal", Datatype::Decimal},      {"double", Datatype::Decimal},
        {"float", Datatype::Decimal},        {"boolean", Datatype::Boolean},
        {"dateTime", Datatype::Timestamp},   {"date", Datatype::Timestamp},
        {"dateTimeStamp", Datatype::Timestamp},
    };
    auto it = table.find(local);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

using Numeric = std::variant<std::int64_t, double>;

inline double to_double(const Numeric& n) {
    return std::visit([](auto v) { return static_cast<double>(v); }, n);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, end);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

inline std::optional<std::int64_t> parse_int64(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty() || (s.front() == '.' && s.size() == 1)) return std::nullopt;
    // from_chars accepts "inf"/"nan"; xsd:decimal does not.
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == 'e' ||
              c == 'E' || c == '+'))
            return std::nullopt;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += n;
    out = v;
    return true;
}

/// ISO-8601: a required date, an optional time, an optional zone. Returns
/// milliseconds since the Unix epoch in UTC; zoneless values are read as UTC.
inline std::optional<std::int64_t> parse_timestamp_ms(std::string_view s) {
    using namespace std::chrono;
    std::size_t pos = 0;
    bool negative_year = false;
    if (pos < s.size() && s[pos] == '-') {
        negative_year = true;
        ++pos;
    }
    int y = 0, mo = 0, d = 0;
    if (!read_digits(s, pos, 4, y)) return std::nullopt;
    if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, mo)) return std::nullopt;
    if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, d)) return std::nullopt;
    year_month_day ymd{year{negative_year ? -y : y}, month{static_cast<unsigned>(mo)},
                       day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    int hh = 0, mm = 0, ss = 0, millis = 0;
    if (pos < s.size() && s[pos] == 'T') {
        ++pos;
        if (!read_digits(s, pos, 2, hh)) return std::nullopt;
        if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
        if (!read_digits(s, pos, 2, mm)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!read_digits(s, pos, 2, ss)) return std::nullopt;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                std::size_t start = pos;
                int scale = 100;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    millis += (s[pos] - '0') * scale;
                    scale /= 10;
                    ++pos;
                }
                if (pos == start) return std::nullopt;
            }
        }
        if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    }
    int offset_minutes = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            int sign = s[pos] == '-' ? -1 : 1;
            ++pos;
            int oh = 0, om = 0;
            if (!read_digits(s, pos, 2, oh)) return std::nullopt;
            if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
            if (!read_digits(s, pos, 2, om)) return std::nullopt;
            if (oh > 14 || om > 59) return std::nullopt;
            offset_minutes = sign * (oh * 60 + om);
        }
    }
    if (pos != s.size()) return std::nullopt;
    auto tp = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis} -
              minutes{offset_minutes};
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

inline std::string format_timestamp_ms(std::int64_t epoch_ms) {
    using namespace std::chrono;
    sys_time<milliseconds> tp{milliseconds{epoch_ms}};
    auto day_point = floor<days>(tp);
    year_month_day ymd{day_point};
    hh_mm_ss<milliseconds> tod{tp - day_point};
    char buf[48];
    int y = static_cast<int>(ymd.year());
    int n = std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", y,
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                          static_cast<int>(tod.hours().count()),
                          static_cast<int>(tod.minutes().count()),
                          static_cast<int>(tod.seconds().count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (auto ms = tod.subseconds().count(); ms != 0) {
        std::snprintf(buf, sizeof(buf), ".%03d", static_cast<int>(ms));
        out += buf;
    }
    out += 'Z';
    return out;
}

} // namespace detail

/// An IRI, a literal, or a variable. IRIs are held in expanded form; literals
/// in canonical lexical form so that equality is value equality within a
/// datatype (`1` integer and `"1"` string stay distinct).
class Term {
public:
    Term() = default;

    static Term iri(std::string full) { return Term(TermKind::Iri, std::move(full), Datatype::None); }
    static Term variable(std::string name) {
        return Term(TermKind::Variable, std::move(name), Datatype::None);
    }
    static Term string_literal(std::string value) {
        return Term(TermKind::Literal, std::move(value), Datatype::String);
    }
    static Term integer(std::int64_t v) {
        return Term(TermKind::Literal, std::to_string(v), Datatype::Integer);
    }
    static Term decimal(double v) {
        return Term(TermKind::Literal, detail::format_double(v), Datatype::Decimal);
    }
    static Term boolean(bool v) {
        return Term(TermKind::Literal, v ? "true" : "false", Datatype::Boolean);
    }
    static Term timestamp_ms(std::int64_t epoch_ms) {
        return Term(TermKind::Literal, detail::format_timestamp_ms(epoch_ms), Datatype::Timestamp);
    }
    static Term number(const Numeric& n) {
        return std::visit(
            [](auto v) {
                if constexpr (std::is_same_v<decltype(v), std::int64_t>) return integer(v);
                else return decimal(v);
            },
            n);
    }

    /// Canonicalizing literal constructor; throws malformed-literal.
    static Term literal(std::string_view lexical, Datatype dt) {
        switch (dt) {
        case Datatype::None:
        case Datatype::String: return string_literal(std::string(lexical));
        case Datatype::Integer:
            if (auto v = detail::parse_int64(lexical)) return integer(*v);
            break;
        case Datatype::Decimal:
            if (auto v = detail::parse_double(lexical)) return decimal(*v);
            break;
        case Datatype::Boolean:
            if (lexical == "true" || lexical == "1") return boolean(true);
            if (lexical == "false" || lexical == "0") return boolean(false);
            break;
        case Datatype::Timestamp:
            if (auto v = detail::parse_timestamp_ms(lexical)) return timestamp_ms(*v);
            break;
        }
        throw Error(ErrorCode::MalformedLiteral, "'" + std::string(lexical) +
                                                     "' is not a valid xsd:" +
                                                     std::string(datatype_name(dt)));
    }

    TermKind kind() const noexcept { return kind_; }
    Datatype datatype() const noexcept { return datatype_; }
    const std::string& lexical() const noexcept { return lexical_; }

    bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
    bool is_literal() const noexcept { return kind_ == TermKind::Literal; }
    bool is_variable() const noexcept { return kind_ == TermKind::Variable; }

    std::optional<Numeric> as_numeric() const {
        if (kind_ != TermKind::Literal) return std::nullopt;
        if (datatype_ == Datatype::Integer) {
            if (auto v = detail::parse_int64(lexical_)) return Numeric{*v};
        } else if (datatype_ == Datatype::Decimal) {
            if (auto v = detail::parse_double(lexical_)) return Numeric{*v};
        }
        return std::nullopt;
    }
    std::optional<std::int64_t> as_timestamp_ms() const {
        if (kind_ != TermKind::Literal || datatype_ != Datatype::Timestamp) return std::nullopt;
        return detail::parse_timestamp_ms(lexical_);
    }
    std::optional<bool> as_bool() const {
        if (kind_ != TermKind::Literal || datatype_ != Datatype::Boolean) return std::nullopt;
        return lexical_ == "true";
    }

    friend bool operator==(const Term&, const Term&) = default;
    friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
        if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
        if (auto c = a.lexical_.compare(b.lexical_); c != 0)
            return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.datatype_ <=> b.datatype_;
    }

private:
    Term(TermKind kind, std::string lexical, Datatype dt)
        : lexical_(std::move(lexical)), kind_(kind), datatype_(dt) {}

    std::string lexical_;
    TermKind kind_ = TermKind::Iri;
    Datatype datatype_ = Datatype::None;
};

inline Term rdf(std::string_view local) { return Term::iri(std::string(ns::rdf) + std::string(local)); }
inline Term rdfs(std::string_view local) { return Term::iri(std::string(ns::rdfs) + std::string(local)); }
inline Term prov(std::string_view local) { return Term::iri(std::string(ns::prov) + std::string(local)); }
inline Term ccpo(std::string_view local) { return Term::iri(std::string(ns::ccpo) + std::string(local)); }
inline Term cco(std::string_view local) { return Term::iri(std::string(ns::cco) + std::string(local)); }
inline Term dicbm(std::string_view local) { return Term::iri(std::string(ns::dicbm) + std::string(local)); }

inline const Term& rdf_type() {
    static const Term t = rdf("type");
    return t;
}

/// Prefix label -> namespace IRI. Expansion rejects unknown labels; compaction
/// picks the longest matching namespace.
class PrefixMap {
public:
    PrefixMap() = default;

    static PrefixMap defaults() {
        PrefixMap m;
        m.add("rdf", ns::rdf);
        m.add("rdfs", ns::rdfs);
        m.add("xsd", ns::xsd);
        m.add("prov", ns::prov);
        m.add("swrlb", ns::swrlb);
        m.add("cco", ns::cco);
        m.add("ccpo", ns::ccpo);
        m.add("dicbm", ns::dicbm);
        return m;
    }

    void add(std::string_view prefix, std::string_view ns_iri) {
        map_[std::string(prefix)] = std::string(ns_iri);
    }

    bool contains(std::string_view prefix) const { return map_.find(std::string(prefix)) != map_.end(); }

    std::optional<std::string> namespace_of(std::string_view prefix) const {
        auto it = map_.find(std::string(prefix));
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }

    /// `prefix:local` -> full IRI.
    std::string expand(std::string_view prefixed,
                       std::optional<SourceLocation> where = std::nullopt) const {
        auto colon = prefixed.find(':');
        if (colon == std::string_view::npos)
            throw Error(ErrorCode::SyntaxError, "expected a prefixed name, got '" +
                                                    std::string(prefixed) + "'", where);
        auto ns_iri = namespace_of(prefixed.substr(0, colon));
        if (!ns_iri)
            throw Error(ErrorCode::UnknownPrefix,
                        "prefix '" + std::string(prefixed.substr(0, colon)) + ":' is not declared",
                        where);
        return *ns_iri + std::string(prefixed.substr(colon + 1));
    }

    /// Shortest readable form: `prefix:local` when a namespace matches and the
    /// local part is a plain name, `<iri>` otherwise.
    std::string compact(std::string_view iri) const {
        const std::pair<const std::string, std::string>* best = nullptr;
        for (const auto& entry : map_) {
            if (iri.starts_with(entry.second) &&
                (!best || entry.second.size() > best->second.size()))
                best = &entry;
        }
        if (best) {
            auto local = iri.substr(best->second.size());
            bool plain = std::all_of(local.begin(), local.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                       c == '.';
            });
            if (plain && !local.empty() && local.back() != '.')
                return best->first + ":" + std::string(local);
        }
        return "<" + std::string(iri) + ">";
    }

    const std::map<std::string, std::string>& entries() const noexcept { return map_; }

private:
    std::map<std::string, std::string> map_;
};

/// Human-readable rendering: compacted IRIs, `?name` variables, literal values.
inline std::string display(const Term& t, const PrefixMap& prefixes) {
    switch (t.kind()) {
    case TermKind::Iri: return prefixes.compact(t.lexical());
    case TermKind::Variable: return "?" + t.lexical();
    case TermKind::Literal:
        if (t.datatype() == Datatype::String) return "\"" + t.lexical() + "\"";
        return t.lexical();
    }
    return t.lexical();
}

} // namespace eolcycle

template <>
struct std::hash<eolcycle::Term> {
    std::size_t operator()(const eolcycle::Term& t) const noexcept {
        std::size_t h = std::hash<std::string>{}(t.lexical());
        return h ^ (static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL) ^
               (static_cast<std::size_t>(t.datatype()) << 7);
    }
};

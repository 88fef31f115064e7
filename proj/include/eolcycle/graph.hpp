#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eolcycle/error.hpp"
#include "eolcycle/schema.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Asserted facts have no rule; inferred facts name the rule that derived them.
struct Origin {
    std::optional<std::string> rule;

    bool inferred() const noexcept { return rule.has_value(); }
    static Origin asserted() { return {}; }
    static Origin inferred_by(std::string rule_name) { return Origin{std::move(rule_name)}; }

    friend bool operator==(const Origin&, const Origin&) = default;
};

struct Fact {
    Triple triple;
    Origin origin;

    const Term& subject() const noexcept { return triple.subject; }
    const Term& predicate() const noexcept { return triple.predicate; }
    const Term& object() const noexcept { return triple.object; }
};

using FactId = std::uint32_t;

/// Half-open window over fact ids. Facts are append-only, so a prefix of the
/// id space is a past state of the graph.
struct FactRange {
    FactId begin = 0;
    FactId end = std::numeric_limits<FactId>::max();

    bool contains(FactId id) const noexcept { return id >= begin && id < end; }
};

enum class InsertOutcome { Added, Duplicate };

/// A triple pattern; any position may hold a variable.
struct TriplePattern {
    Term subject;
    Term predicate;
    Term object;
};

using Binding = std::map<std::string, Term>;

enum class Direction { Forward, Backward, Both };

struct Subgraph {
    std::set<Term> nodes;
    std::vector<Triple> facts;
};

} // namespace eolcycle

template <>
struct std::hash<eolcycle::Triple> {
    std::size_t operator()(const eolcycle::Triple& t) const noexcept {
        std::hash<eolcycle::Term> h;
        std::size_t seed = h(t.subject);
        seed ^= h(t.predicate) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        seed ^= h(t.object) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        return seed;
    }
};

namespace eolcycle {

namespace detail {
struct TermPair {
    Term first;
    Term second;
    friend bool operator==(const TermPair&, const TermPair&) = default;
};
struct TermPairHash {
    std::size_t operator()(const TermPair& p) const noexcept {
        std::hash<Term> h;
        std::size_t seed = h(p.first);
        return seed ^ (h(p.second) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    }
};
} // namespace detail

/// In-memory fact store with subject, predicate, object and predicate+object
/// indexes. Type assertions are materialized up the subclass chain and
/// inverse properties are materialized on insert.
class Graph {
public:
    explicit Graph(Schema schema = ccpo_schema(), PrefixMap prefixes = PrefixMap::defaults())
        : schema_(std::make_shared<const Schema>(std::move(schema))), prefixes_(std::move(prefixes)) {}

    const Schema& schema() const noexcept { return *schema_; }
    const PrefixMap& prefixes() const noexcept { return prefixes_; }
    PrefixMap& prefixes() noexcept { return prefixes_; }

    const std::vector<Fact>& facts() const noexcept { return facts_; }
    std::size_t size() const noexcept { return facts_.size(); }
    const Fact& fact(FactId id) const { return facts_.at(id); }

    InsertOutcome assert_fact(const Fact& fact) {
        std::vector<FactId> added;
        return insert(fact.triple, fact.origin, added);
    }

    InsertOutcome assert_fact(const Triple& triple, Origin origin = Origin::asserted()) {
        std::vector<FactId> added;
        return insert(triple, std::move(origin), added);
    }

    /// Inserts `triple` and its entailments (supertypes, inverse). Every
    /// newly stored fact id is appended to `added`, primary fact first.
    InsertOutcome insert(const Triple& triple, const Origin& origin, std::vector<FactId>& added) {
        check(triple);
        if (!store(triple, origin, added)) return InsertOutcome::Duplicate;
        if (triple.predicate == rdf_type()) {
            for (const auto& sup : schema_->ancestors(triple.object))
                if (sup != triple.object) store({triple.subject, rdf_type(), sup}, origin, added);
        } else if (const auto* def = schema_->find_property(triple.predicate);
                   def && def->inverse_of) {
            store({triple.object, *def->inverse_of, triple.subject}, origin, added);
        }
        return InsertOutcome::Added;
    }

    /// Throws when `triple` could not be stored.
    void check(const Triple& t) const {
        if (t.subject.is_variable() || t.predicate.is_variable() || t.object.is_variable())
            throw Error(ErrorCode::SyntaxError, "facts cannot contain variables");
        if (!t.subject.is_iri() || !t.predicate.is_iri())
            throw Error(ErrorCode::DatatypeMismatch, "subject and predicate must be IRIs");
        if (t.predicate == rdf_type()) {
            if (!t.object.is_iri() || !schema_->has_class(t.object))
                throw Error(ErrorCode::UnknownClass,
                            prefixes_.compact(t.object.lexical()) + " is not a schema class");
            return;
        }
        const auto* def = schema_->find_property(t.predicate);
        if (!def)
            throw Error(ErrorCode::UnknownPredicate,
                        prefixes_.compact(t.predicate.lexical()) + " is not a declared property");
        const std::string where = prefixes_.compact(t.predicate.lexical());
        if (def->kind == PropertyKind::Object) {
            if (!t.object.is_iri())
                throw Error(ErrorCode::DatatypeMismatch,
                            where + " is an object property but the object is a literal");
            return;
        }
        if (!t.object.is_literal())
            throw Error(ErrorCode::DatatypeMismatch,
                        where + " is a data property but the object is an IRI");
        bool ok = t.object.datatype() == def->range_datatype ||
                  (def->range_datatype == Datatype::Decimal &&
                   t.object.datatype() == Datatype::Integer);
        if (!ok)
            throw Error(ErrorCode::DatatypeMismatch,
                        where + " expects xsd:" + std::string(datatype_name(def->range_datatype)) +
                            ", got xsd:" + std::string(datatype_name(t.object.datatype())));
    }

    bool contains(const Triple& t) const { return ids_.count(t) != 0; }

    std::optional<FactId> id_of(const Triple& t) const {
        auto it = ids_.find(t);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    /// Ids of facts matching the given constants (nullopt = wildcard), in
    /// ascending id order, restricted to `range`.
    std::vector<FactId> find(const std::optional<Term>& s, const std::optional<Term>& p,
                             const std::optional<Term>& o, FactRange range = {}) const {
        static const std::vector<FactId> empty;
        const std::vector<FactId>* candidates = nullptr;
        bool all = true;
        auto consider = [&](const std::vector<FactId>* list) {
            if (!candidates || list->size() < candidates->size()) candidates = list;
            all = false;
        };
        if (s) consider(lookup(by_subject_, *s));
        if (p && o) {
            auto it = by_pred_obj_.find(detail::TermPair{*p, *o});
            consider(it == by_pred_obj_.end() ? &empty : &it->second);
        } else if (p) {
            consider(lookup(by_predicate_, *p));
        } else if (o) {
            consider(lookup(by_object_, *o));
        }

        std::vector<FactId> out;
        auto accept = [&](FactId id) {
            const auto& f = facts_[id].triple;
            if (s && f.subject != *s) return;
            if (p && f.predicate != *p) return;
            if (o && f.object != *o) return;
            out.push_back(id);
        };
        FactId hi = static_cast<FactId>(std::min<std::size_t>(range.end, facts_.size()));
        if (all) {
            for (FactId id = range.begin; id < hi; ++id) accept(id);
        } else {
            auto first = std::lower_bound(candidates->begin(), candidates->end(), range.begin);
            for (auto it = first; it != candidates->end() && *it < hi; ++it) accept(*it);
        }
        return out;
    }

    /// Same contract as find() but ignores the indexes.
    std::vector<FactId> scan(const std::optional<Term>& s, const std::optional<Term>& p,
                             const std::optional<Term>& o, FactRange range = {}) const {
        std::vector<FactId> out;
        FactId hi = static_cast<FactId>(std::min<std::size_t>(range.end, facts_.size()));
        for (FactId id = range.begin; id < hi; ++id) {
            const auto& f = facts_[id].triple;
            if ((!s || f.subject == *s) && (!p || f.predicate == *p) && (!o || f.object == *o))
                out.push_back(id);
        }
        return out;
    }

    /// Facts unifying with the pattern, as bindings of its variables, ordered
    /// by (subject, predicate, object).
    std::vector<Binding> match(const TriplePattern& pattern, FactRange range = {}) const {
        auto constant = [](const Term& t) -> std::optional<Term> {
            if (t.is_variable()) return std::nullopt;
            return t;
        };
        auto ids = find(constant(pattern.subject), constant(pattern.predicate),
                        constant(pattern.object), range);
        std::sort(ids.begin(), ids.end(),
                  [&](FactId a, FactId b) { return facts_[a].triple < facts_[b].triple; });
        std::vector<Binding> out;
        out.reserve(ids.size());
        for (FactId id : ids) {
            Binding b;
            if (unify(pattern, facts_[id].triple, b)) out.push_back(std::move(b));
        }
        return out;
    }

    /// Extends `b` so that `pattern` instantiates to `triple`; false on clash.
    static bool unify(const TriplePattern& pattern, const Triple& triple, Binding& b) {
        auto bind = [&](const Term& pat, const Term& value) {
            if (!pat.is_variable()) return pat == value;
            auto [it, inserted] = b.emplace(pat.lexical(), value);
            return inserted || it->second == value;
        };
        return bind(pattern.subject, triple.subject) && bind(pattern.predicate, triple.predicate) &&
               bind(pattern.object, triple.object);
    }

    bool mentions(const Term& entity) const {
        return by_subject_.count(entity) != 0 || by_object_.count(entity) != 0;
    }

    std::vector<Term> objects(const Term& subject, const Term& predicate) const {
        std::vector<Term> out;
        for (FactId id : find(subject, predicate, std::nullopt)) out.push_back(facts_[id].object());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<Term> types_of(const Term& entity) const { return objects(entity, rdf_type()); }

    bool has_type(const Term& entity, const Term& cls) const {
        return contains(Triple{entity, rdf_type(), cls});
    }

    /// Nodes and edges reachable from `root` over `relations`. Provenance
    /// relations point from the later thing to its origin, so Backward walks
    /// subject -> object (towards inputs and generating activities) and
    /// Forward walks object -> subject (towards what was made from it).
    Subgraph entity_closure(const Term& root, const std::set<Term>& relations,
                            Direction direction) const {
        if (!mentions(root))
            throw Error(ErrorCode::UnknownEntity,
                        prefixes_.compact(root.lexical()) + " does not occur in the graph");
        Subgraph out;
        std::set<Triple> edges;
        std::deque<Term> work{root};
        out.nodes.insert(root);
        auto visit = [&](const Term& next, const Triple& edge) {
            edges.insert(edge);
            if (next.is_iri() && out.nodes.insert(next).second) work.push_back(next);
        };
        while (!work.empty()) {
            Term cur = std::move(work.front());
            work.pop_front();
            for (const auto& rel : relations) {
                if (direction != Direction::Forward)
                    for (FactId id : find(cur, rel, std::nullopt))
                        visit(facts_[id].object(), facts_[id].triple);
                if (direction != Direction::Backward)
                    for (FactId id : find(std::nullopt, rel, cur))
                        visit(facts_[id].subject(), facts_[id].triple);
            }
        }
        out.facts.assign(edges.begin(), edges.end());
        return out;
    }

    /// Drops every fact with id >= n, restoring an earlier state.
    void truncate(std::size_t n) {
        while (facts_.size() > n) {
            const auto& f = facts_.back().triple;
            pop_index(by_subject_, f.subject);
            pop_index(by_predicate_, f.predicate);
            pop_index(by_object_, f.object);
            auto po = by_pred_obj_.find(detail::TermPair{f.predicate, f.object});
            po->second.pop_back();
            if (po->second.empty()) by_pred_obj_.erase(po);
            ids_.erase(f);
            facts_.pop_back();
        }
    }

private:
    using Index = std::unordered_map<Term, std::vector<FactId>>;

    static const std::vector<FactId>* lookup(const Index& index, const Term& key) {
        static const std::vector<FactId> empty;
        auto it = index.find(key);
        return it == index.end() ? &empty : &it->second;
    }

    static void pop_index(Index& index, const Term& key) {
        auto it = index.find(key);
        it->second.pop_back();
        if (it->second.empty()) index.erase(it);
    }

    bool store(const Triple& t, const Origin& origin, std::vector<FactId>& added) {
        if (ids_.count(t)) return false;
        auto id = static_cast<FactId>(facts_.size());
        facts_.push_back(Fact{t, origin});
        ids_.emplace(t, id);
        by_subject_[t.subject].push_back(id);
        by_predicate_[t.predicate].push_back(id);
        by_object_[t.object].push_back(id);
        by_pred_obj_[detail::TermPair{t.predicate, t.object}].push_back(id);
        added.push_back(id);
        return true;
    }

    std::shared_ptr<const Schema> schema_;
    PrefixMap prefixes_;
    std::vector<Fact> facts_;
    std::unordered_map<Triple, FactId> ids_;
    Index by_subject_;
    Index by_predicate_;
    Index by_object_;
    std::unordered_map<detail::TermPair, std::vector<FactId>, detail::TermPairHash> by_pred_obj_;
};

} // namespace eolcycle

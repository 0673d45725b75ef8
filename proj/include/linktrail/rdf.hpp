#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace linktrail {

enum class TermKind { Uri, Literal, Blank };

/// An RDF term. Literals are opaque: `lexical` holds the full canonical
/// N-Triples token including quotes and any @lang / ^^<datatype> suffix,
/// so equality is plain string equality per kind. Blank nodes hold the
/// bare label (no "_:" prefix).
struct Term {
    TermKind kind = TermKind::Uri;
    std::string lexical;

    bool is_uri() const { return kind == TermKind::Uri; }
    bool is_literal() const { return kind == TermKind::Literal; }
    bool is_blank() const { return kind == TermKind::Blank; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

inline Term uri(std::string u) { return Term{TermKind::Uri, std::move(u)}; }
inline Term blank(std::string label) { return Term{TermKind::Blank, std::move(label)}; }

/// Builds the canonical literal token from a raw value and an optional
/// suffix ("@en" or "^^<http://...>"). The value is escaped on output.
Term literal(std::string_view value, std::string_view suffix = "");

/// Renders a term in N-Triples syntax.
std::string term_to_ntriples(const Term& t);

struct Triple {
    Term s, p, o;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Variable {
    std::string name;  // without the leading '?'

    friend bool operator==(const Variable&, const Variable&) = default;
    friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// One position of a triple pattern: either a concrete term or a variable.
using PatternTerm = std::variant<Term, Variable>;

inline bool is_variable(const PatternTerm& pt) { return std::holds_alternative<Variable>(pt); }
inline const Variable& as_variable(const PatternTerm& pt) { return std::get<Variable>(pt); }
inline const Term& as_term(const PatternTerm& pt) { return std::get<Term>(pt); }

struct TriplePattern {
    PatternTerm s, p, o;

    std::vector<std::string> variables() const;
    int variable_count() const;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

/// Variable bindings. A variable appears at most once; merging requires
/// agreement on shared variables.
struct SolutionMapping {
    std::map<std::string, Term> bindings;

    bool binds(const std::string& var) const { return bindings.count(var) > 0; }
    const Term* get(const std::string& var) const {
        auto it = bindings.find(var);
        return it == bindings.end() ? nullptr : &it->second;
    }

    friend bool operator==(const SolutionMapping&, const SolutionMapping&) = default;
    friend auto operator<=>(const SolutionMapping&, const SolutionMapping&) = default;
};

/// Conjunctive query: ordered triple patterns plus the derived seed URIs
/// (every URI occurring in any pattern position).
struct BGPQuery {
    std::vector<TriplePattern> patterns;
    std::set<Term> seeds;
};

/// Builds a query from patterns, deriving the seed set.
BGPQuery make_query(std::vector<TriplePattern> patterns);

/// Returns the mapping μ with dom(μ) = vars(tp) and tp instantiated by μ
/// equal to t, or nullopt if any ground position differs or a repeated
/// variable would need two distinct bindings.
std::optional<SolutionMapping> match_triple(const TriplePattern& tp, const Triple& t);

/// Union of two mappings if they agree on shared variables.
std::optional<SolutionMapping> merge_compatible(const SolutionMapping& a, const SolutionMapping& b);

/// Replaces every variable of tp according to mu. Throws std::invalid_argument
/// if mu does not bind all variables of tp.
Triple instantiate(const TriplePattern& tp, const SolutionMapping& mu);

}  // namespace linktrail

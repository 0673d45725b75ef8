#include "linktrail/rdf.hpp"

namespace linktrail {

namespace {

void append_escaped(std::string& out, std::string_view value) {
    for (std::size_t i = 0; i < value.size(); ++i) {
        char c = value[i];
        switch (c) {
            case '\\':
                // \uXXXX and \UXXXXXXXX sequences pass through untouched.
                if (i + 1 < value.size() && (value[i + 1] == 'u' || value[i + 1] == 'U')) {
                    out += c;
                } else {
                    out += "\\\\";
                }
                break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
}

}  // namespace

Term literal(std::string_view value, std::string_view suffix) {
    std::string token = "\"";
    append_escaped(token, value);
    token += "\"";
    token += suffix;
    return Term{TermKind::Literal, std::move(token)};
}

std::string term_to_ntriples(const Term& t) {
    switch (t.kind) {
        case TermKind::Uri: return "<" + t.lexical + ">";
        case TermKind::Blank: return "_:" + t.lexical;
        case TermKind::Literal: return t.lexical;
    }
    return {};
}

std::vector<std::string> TriplePattern::variables() const {
    std::vector<std::string> out;
    for (const PatternTerm* pt : {&s, &p, &o}) {
        if (is_variable(*pt)) {
            const std::string& name = as_variable(*pt).name;
            bool seen = false;
            for (const auto& v : out) seen = seen || v == name;
            if (!seen) out.push_back(name);
        }
    }
    return out;
}

int TriplePattern::variable_count() const { return static_cast<int>(variables().size()); }

BGPQuery make_query(std::vector<TriplePattern> patterns) {
    BGPQuery q;
    q.patterns = std::move(patterns);
    for (const auto& tp : q.patterns) {
        for (const PatternTerm* pt : {&tp.s, &tp.p, &tp.o}) {
            if (!is_variable(*pt) && as_term(*pt).is_uri()) q.seeds.insert(as_term(*pt));
        }
    }
    return q;
}

std::optional<SolutionMapping> match_triple(const TriplePattern& tp, const Triple& t) {
    SolutionMapping mu;
    const PatternTerm* pattern_pos[3] = {&tp.s, &tp.p, &tp.o};
    const Term* triple_pos[3] = {&t.s, &t.p, &t.o};
    for (int i = 0; i < 3; ++i) {
        const PatternTerm& pt = *pattern_pos[i];
        const Term& term = *triple_pos[i];
        if (is_variable(pt)) {
            const std::string& name = as_variable(pt).name;
            auto [it, inserted] = mu.bindings.emplace(name, term);
            if (!inserted && it->second != term) return std::nullopt;
        } else if (as_term(pt) != term) {
            return std::nullopt;
        }
    }
    return mu;
}

std::optional<SolutionMapping> merge_compatible(const SolutionMapping& a, const SolutionMapping& b) {
    SolutionMapping out = a;
    for (const auto& [var, term] : b.bindings) {
        auto [it, inserted] = out.bindings.emplace(var, term);
        if (!inserted && it->second != term) return std::nullopt;
    }
    return out;
}

Triple instantiate(const TriplePattern& tp, const SolutionMapping& mu) {
    auto resolve = [&](const PatternTerm& pt) -> Term {
        if (!is_variable(pt)) return as_term(pt);
        const Term* t = mu.get(as_variable(pt).name);
        if (t == nullptr) throw std::invalid_argument("instantiate: unbound variable ?" + as_variable(pt).name);
        return *t;
    };
    return Triple{resolve(tp.s), resolve(tp.p), resolve(tp.o)};
}

}  // namespace linktrail

#include "linktrail/bgp_eval.hpp"

#include <algorithm>

namespace linktrail {

std::vector<EvaluatedSolution> evaluate_bgp(const BGPQuery& query,
                                            const std::vector<TripleOccurrence>& data,
                                            bool set_semantics) {
    std::vector<EvaluatedSolution> partial{EvaluatedSolution{}};

    for (const TriplePattern& tp : query.patterns) {
        // matching occurrences for this pattern
        std::vector<std::pair<SolutionMapping, std::string>> matches;
        std::set<Triple> seen;
        for (const TripleOccurrence& occ : data) {
            if (set_semantics && !seen.insert(occ.triple).second) continue;
            if (auto mu = match_triple(tp, occ.triple)) {
                matches.emplace_back(std::move(*mu), occ.doc_uri);
            }
        }

        std::vector<EvaluatedSolution> next;
        for (const EvaluatedSolution& sol : partial) {
            for (const auto& [mu, doc] : matches) {
                if (auto merged = merge_compatible(sol.mapping, mu)) {
                    EvaluatedSolution out;
                    out.mapping = std::move(*merged);
                    out.provenance = sol.provenance;
                    out.provenance.insert(doc);
                    next.push_back(std::move(out));
                }
            }
        }
        partial = std::move(next);
        if (partial.empty()) break;
    }
    return partial;
}

std::string mapping_key(const SolutionMapping& mu) {
    std::string key;
    for (const auto& [var, term] : mu.bindings) {
        key += "?" + var + "=" + term_to_ntriples(term) + ";";
    }
    return key;
}

std::vector<std::string> solution_multiset_keys(const std::vector<EvaluatedSolution>& sols) {
    std::vector<std::string> keys;
    keys.reserve(sols.size());
    for (const auto& s : sols) keys.push_back(mapping_key(s.mapping));
    std::sort(keys.begin(), keys.end());
    return keys;
}

}  // namespace linktrail

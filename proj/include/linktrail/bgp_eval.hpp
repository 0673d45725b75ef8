#pragma once

#include <set>
#include <string>
#include <vector>

#include "linktrail/rdf.hpp"

namespace linktrail {

/// One occurrence of a triple in a specific document. The same triple held
/// by two documents is two occurrences (bag semantics).
struct TripleOccurrence {
    Triple triple;
    std::string doc_uri;
};

struct EvaluatedSolution {
    SolutionMapping mapping;
    std::set<std::string> provenance;  // documents contributing a matching triple
};

/// Brute-force nested-loop evaluation of a BGP over a multiset of triple
/// occurrences. Under bag semantics every per-pattern occurrence combination
/// counts; under set semantics occurrences of the same triple collapse per
/// pattern before joining. Order of the returned multiset is unspecified.
std::vector<EvaluatedSolution> evaluate_bgp(const BGPQuery& query,
                                            const std::vector<TripleOccurrence>& data,
                                            bool set_semantics = false);

/// Canonical single-line rendering of a mapping, for multiset comparisons.
std::string mapping_key(const SolutionMapping& mu);

/// Sorted canonical keys of a solution multiset.
std::vector<std::string> solution_multiset_keys(const std::vector<EvaluatedSolution>& sols);

}  // namespace linktrail

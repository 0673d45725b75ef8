#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktrail/bgp_eval.hpp"
#include "linktrail/rdf.hpp"
#include "linktrail/webmodel.hpp"

namespace linktrail {

struct TestWebConfig {
    double phi1 = 0;  // probability a URI-object triple goes into both documents
    double phi2 = 0;  // conditional probability of subject-only over object-only
    std::uint64_t seed = 0;
};

/// A base dataset to distribute over documents. entity_uris is derived as
/// the set of subject URIs; every URI object must be an entity URI.
struct BaseDataset {
    std::set<Triple> triples;
    std::set<Term> entity_uris;
};

/// Validates and derives entity URIs. Throws std::runtime_error when a
/// subject is not a URI or a URI object never occurs as a subject.
BaseDataset make_base_dataset(std::set<Triple> triples);

/// Distributes the base dataset into one document per entity URI.
/// Literal-object triples always go into the subject's document. For a
/// URI-object triple the options are: both documents (probability phi1),
/// else subject only (conditional probability phi2), else object only.
/// Draws consume triples in canonical (lexicographic N-Triples) order, so
/// generation is a pure function of (base, cfg).
WebOfLinkedData generate_testweb(const BaseDataset& base, const TestWebConfig& cfg);

/// The fourteen standard configurations: {0,0.33,0.66} x {0,0.33,0.66,1},
/// then phi1=1, then (0.62, 0.47). Seeds are left 0.
std::vector<TestWebConfig> standard_config_suite();

/// The query-specific reachable subweb: document URIs and link edges
/// (d -> d') where a URI occurring in a matching triple of d resolves
/// to d'. Seeds that fail to resolve contribute nothing.
struct ReachableSubweb {
    std::set<Term> documents;
    std::set<std::pair<Term, Term>> edges;
    std::set<Term> seed_documents;
    /// Every URI the traversal attempts to look up (including failures).
    std::set<Term> attempted_lookups;
};

ReachableSubweb compute_reachable_subweb(const WebOfLinkedData& web, const BGPQuery& query);

/// Ground-truth result contribution counters under bag semantics: for every
/// reachable document URI, the number of solutions whose provenance
/// includes it. Documents outside the subweb are absent.
std::map<std::string, std::int64_t> compute_rcc(const WebOfLinkedData& web, const BGPQuery& query);

/// Bag-semantics solutions over the union of reachable documents; the
/// reference result for engine equivalence checks.
std::vector<EvaluatedSolution> reachable_solutions(const WebOfLinkedData& web, const BGPQuery& query,
                                                   bool set_semantics = false);

struct PathStats {
    double mean = 0;
    double stdev = 0;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::size_t count = 0;
};

struct SubwebStats {
    std::size_t n_docs = 0;
    std::size_t n_edges = 0;
    std::size_t n_scc = 0;
    std::int64_t diameter = 0;  // max finite shortest-path length
    std::size_t n_relevant = 0;
    double pct_relevant = 0;
    PathStats relevant_paths;    // distance from nearest seed document
    PathStats irrelevant_paths;
    std::size_t result_cardinality = 0;
};

SubwebStats subweb_statistics(const ReachableSubweb& subweb,
                              const std::map<std::string, std::int64_t>& rcc_map,
                              std::size_t result_cardinality);

/// CSV row mirroring the reachable-subweb statistics table layout.
std::string subweb_stats_csv_header();
std::string subweb_stats_csv_row(const std::string& query_name, const SubwebStats& s);

/// Generator provenance written next to the manifest so reports can split
/// by phi1 without extending the manifest schema.
void save_genconfig(const std::string& dir, const TestWebConfig& cfg);
std::optional<TestWebConfig> load_genconfig(const std::string& dir);

}  // namespace linktrail

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "linktrail/rdf.hpp"

namespace linktrail {

/// Incrementally built model of the traversed Web's topology: vertices are
/// retrieved documents or queued URIs, edges point from a document to the
/// URIs (or documents) it mentions in matching triples. Document vertices
/// carry a result contribution counter.
class LinkGraph {
public:
    enum class VertexKind { Document, QueuedUri };

    struct Vertex {
        VertexKind kind = VertexKind::QueuedUri;
        std::int64_t rcc = 0;
        std::set<Term> in;
        std::set<Term> out;
    };

    bool contains(const Term& u) const { return vertices_.count(u) > 0; }
    bool is_document(const Term& u) const {
        auto it = vertices_.find(u);
        return it != vertices_.end() && it->second.kind == VertexKind::Document;
    }

    /// Adds the target vertex (kind per flag) and the edge from_doc -> target.
    /// Idempotent. from_doc must be a document vertex.
    void add_discovery(const Term& from_doc, const Term& target, bool target_retrieved);

    /// Ensures a vertex exists (used for seed URIs, which have no parent).
    void add_queued(const Term& u);

    /// Turns a queued-URI vertex into a document vertex, preserving edges.
    void promote(const Term& u);

    /// Drops a vertex whose lookup failed, together with incident edges.
    void remove_failed(const Term& u);

    std::int64_t indegree(const Term& u) const;

    std::int64_t rcc(const Term& u) const;

    /// +1 on each listed document vertex. Unknown URIs are counted in
    /// unknown_bumps() instead of being created.
    void bump_rcc(const std::set<std::string>& provenance);
    std::uint64_t unknown_bumps() const { return unknown_bumps_; }

    /// k-step in-neighborhood, k in {1,2}:
    ///   in1(v) = {v' | (v',v) in E}
    ///   in2(v) = in1(v) ∪ ⋃_{v' in in1(v)} in1(v')
    std::set<Term> in_neighborhood(const Term& u, int k) const;

    /// Sum of RCCs of document vertices in the k-step in-neighborhood.
    std::int64_t rcc_score(const Term& u, int k) const;
    /// Number of document vertices with positive RCC in the k-step
    /// in-neighborhood.
    std::int64_t rel_score(const Term& u, int k) const;

    /// Power iteration with uniform teleport; dangling mass is spread
    /// uniformly. Scores sum to 1.
    std::map<Term, double> pagerank(double damping = 0.85, double epsilon = 1e-8,
                                    int max_iter = 100) const;

    const std::map<Term, Vertex>& vertices() const { return vertices_; }

    std::string to_dot() const;

private:
    std::map<Term, Vertex> vertices_;
    std::uint64_t unknown_bumps_ = 0;
};

}  // namespace linktrail

#include "linktrail/linkgraph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <vector>

namespace linktrail {

void LinkGraph::add_discovery(const Term& from_doc, const Term& target, bool target_retrieved) {
    assert(is_document(from_doc));
    auto [it, inserted] = vertices_.try_emplace(target);
    if (inserted) {
        it->second.kind = target_retrieved ? VertexKind::Document : VertexKind::QueuedUri;
    }
    it->second.in.insert(from_doc);
    vertices_.at(from_doc).out.insert(target);
}

void LinkGraph::add_queued(const Term& u) { vertices_.try_emplace(u); }

void LinkGraph::promote(const Term& u) {
    auto it = vertices_.find(u);
    assert(it != vertices_.end() && it->second.kind == VertexKind::QueuedUri);
    it->second.kind = VertexKind::Document;
}

void LinkGraph::remove_failed(const Term& u) {
    auto it = vertices_.find(u);
    if (it == vertices_.end()) return;
    for (const Term& src : it->second.in) vertices_.at(src).out.erase(u);
    for (const Term& dst : it->second.out) vertices_.at(dst).in.erase(u);
    vertices_.erase(it);
}

std::int64_t LinkGraph::indegree(const Term& u) const {
    auto it = vertices_.find(u);
    return it == vertices_.end() ? 0 : static_cast<std::int64_t>(it->second.in.size());
}

std::int64_t LinkGraph::rcc(const Term& u) const {
    auto it = vertices_.find(u);
    return it == vertices_.end() ? 0 : it->second.rcc;
}

void LinkGraph::bump_rcc(const std::set<std::string>& provenance) {
    for (const std::string& doc : provenance) {
        auto it = vertices_.find(Term{TermKind::Uri, doc});
        if (it == vertices_.end() || it->second.kind != VertexKind::Document) {
            ++unknown_bumps_;
            continue;
        }
        it->second.rcc += 1;
    }
}

std::set<Term> LinkGraph::in_neighborhood(const Term& u, int k) const {
    std::set<Term> result;
    auto it = vertices_.find(u);
    if (it == vertices_.end()) return result;
    result = it->second.in;
    if (k >= 2) {
        for (const Term& v : it->second.in) {
            const auto& inner = vertices_.at(v).in;
            result.insert(inner.begin(), inner.end());
        }
    }
    return result;
}

std::int64_t LinkGraph::rcc_score(const Term& u, int k) const {
    std::int64_t sum = 0;
    for (const Term& v : in_neighborhood(u, k)) {
        auto it = vertices_.find(v);
        if (it != vertices_.end() && it->second.kind == VertexKind::Document) sum += it->second.rcc;
    }
    return sum;
}

std::int64_t LinkGraph::rel_score(const Term& u, int k) const {
    std::int64_t n = 0;
    for (const Term& v : in_neighborhood(u, k)) {
        auto it = vertices_.find(v);
        if (it != vertices_.end() && it->second.kind == VertexKind::Document && it->second.rcc > 0) ++n;
    }
    return n;
}

std::map<Term, double> LinkGraph::pagerank(double damping, double epsilon, int max_iter) const {
    std::map<Term, double> scores;
    const std::size_t n = vertices_.size();
    if (n == 0) return scores;

    std::vector<const Term*> order;
    order.reserve(n);
    for (const auto& [u, v] : vertices_) order.push_back(&u);

    std::map<Term, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[*order[i]] = i;

    std::vector<double> rank(n, 1.0 / static_cast<double>(n)), next(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        double dangling = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (vertices_.at(*order[i]).out.empty()) dangling += rank[i];
        }
        const double base = (1.0 - damping) / static_cast<double>(n) +
                            damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& out = vertices_.at(*order[i]).out;
            if (out.empty()) continue;
            const double share = damping * rank[i] / static_cast<double>(out.size());
            for (const Term& dst : out) next[index.at(dst)] += share;
        }
        double delta = 0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - rank[i]);
        rank.swap(next);
        if (delta < epsilon) break;
    }

    for (std::size_t i = 0; i < n; ++i) scores[*order[i]] = rank[i];
    return scores;
}

std::string LinkGraph::to_dot() const {
    std::ostringstream out;
    out << "digraph linkgraph {\n";
    for (const auto& [u, v] : vertices_) {
        out << "  \"" << u.lexical << "\" [shape="
            << (v.kind == VertexKind::Document ? "box" : "ellipse") << ", label=\"" << u.lexical;
        if (v.kind == VertexKind::Document) out << "\\nrcc=" << v.rcc;
        out << "\"];\n";
    }
    for (const auto& [u, v] : vertices_) {
        for (const Term& dst : v.out) out << "  \"" << u.lexical << "\" -> \"" << dst.lexical << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace linktrail

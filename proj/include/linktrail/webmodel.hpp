#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linktrail/rdf.hpp"
#include "linktrail/rng.hpp"

namespace linktrail {

struct Document {
    Term uri;
    std::set<Triple> triples;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Deterministic per-URI lookup delay:
///   delay_ms(uri) = base_ms + stable_hash(seed, uri) mod (jitter_ms + 1)
struct LatencyModel {
    std::uint64_t base_ms = 0;
    std::uint64_t jitter_ms = 0;
    std::uint64_t seed = 0;

    std::uint64_t delay_ms(const Term& u) const {
        return base_ms + stable_hash(seed, u.lexical) % (jitter_ms + 1);
    }
};

/// The simulated Web: immutable during an execution. Documents and URIs
/// are 1:1 in generated webs; `aliases` lets hand-built webs map extra
/// URIs onto an existing document.
struct WebOfLinkedData {
    std::map<Term, Document> docs;
    std::map<Term, Term> aliases;
    LatencyModel latency;

    const Document* find(const Term& u) const {
        auto it = docs.find(u);
        if (it != docs.end()) return &it->second;
        auto alias = aliases.find(u);
        if (alias == aliases.end()) return nullptr;
        it = docs.find(alias->second);
        return it == docs.end() ? nullptr : &it->second;
    }
};

/// Monotonic simulated clock in microseconds. Lookup delays advance it;
/// local processing does not consume simulated time.
class VirtualClock {
public:
    std::uint64_t now_us() const { return now_.load(std::memory_order_acquire); }

    void advance_to(std::uint64_t t_us) {
        std::uint64_t cur = now_.load(std::memory_order_relaxed);
        while (cur < t_us && !now_.compare_exchange_weak(cur, t_us, std::memory_order_acq_rel)) {
        }
    }

private:
    std::atomic<std::uint64_t> now_{0};
};

struct LookupResult {
    std::optional<Document> document;
    /// Simulated (or wall) time at which the lookup finished; scheduling of
    /// URIs discovered by this lookup may not precede it.
    std::uint64_t completed_at_us = 0;
};

/// Uniform URI-lookup interface used by the engine: in-process store,
/// HTTP client, or a caching wrapper. lookup() consumes the simulated
/// (or real) delay before returning; an absent document means the lookup
/// failed. `not_before_us` is the simulated time at which the URI became
/// known (its discoverer's completion time).
class WebAccess {
public:
    virtual ~WebAccess() = default;

    virtual LookupResult lookup(const Term& u, std::uint64_t not_before_us) = 0;

    /// Timestamp source for trace events.
    virtual std::uint64_t now_us() = 0;

    virtual std::uint64_t lookups_performed() const = 0;
};

/// Lookup against an in-memory web. Simulated time: the lookup occupies the
/// earliest-available of `channels` lookup channels, starting no earlier
/// than the URI's discovery time, for delay_ms(uri). One channel gives the
/// exact sequential accumulation; k channels model k parallel lookup
/// threads independently of how the host schedules the workers.
class InProcessAccess : public WebAccess {
public:
    InProcessAccess(const WebOfLinkedData& web, VirtualClock& clock, int channels = 1)
        : web_(web), clock_(clock), channel_free_(std::max(1, channels), 0) {}

    LookupResult lookup(const Term& u, std::uint64_t not_before_us) override {
        const std::uint64_t delay_us = web_.latency.delay_ms(u) * 1000;
        std::uint64_t end;
        {
            std::lock_guard<std::mutex> lock(mu_);
            std::size_t best = 0;
            for (std::size_t i = 1; i < channel_free_.size(); ++i) {
                if (channel_free_[i] < channel_free_[best]) best = i;
            }
            const std::uint64_t start = std::max(channel_free_[best], not_before_us);
            end = start + delay_us;
            channel_free_[best] = end;
        }
        clock_.advance_to(end);
        count_.fetch_add(1, std::memory_order_relaxed);
        LookupResult result;
        result.completed_at_us = end;
        if (const Document* d = web_.find(u)) result.document = *d;
        return result;
    }

    std::uint64_t now_us() override { return clock_.now_us(); }
    std::uint64_t lookups_performed() const override { return count_.load(std::memory_order_relaxed); }

private:
    const WebOfLinkedData& web_;
    VirtualClock& clock_;
    std::mutex mu_;
    std::vector<std::uint64_t> channel_free_;
    std::atomic<std::uint64_t> count_{0};
};

/// Memoizes lookups, including failed ones. Hits consume zero simulated
/// delay and do not reach the inner access.
class CachingAccess : public WebAccess {
public:
    explicit CachingAccess(WebAccess& inner) : inner_(inner) {}

    LookupResult lookup(const Term& u, std::uint64_t not_before_us) override {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(u);
            if (it != cache_.end()) return LookupResult{it->second, not_before_us};
        }
        LookupResult result = inner_.lookup(u, not_before_us);
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(u, result.document);
        return result;
    }

    /// Fills the cache without counting as engine lookups of interest.
    void prefetch(const Term& u) { (void)lookup(u, 0); }

    std::uint64_t now_us() override { return inner_.now_us(); }

    /// Lookups that reached the inner access.
    std::uint64_t lookups_performed() const override { return inner_.lookups_performed(); }

private:
    WebAccess& inner_;
    std::mutex mu_;
    std::map<Term, std::optional<Document>> cache_;
};

/// Directory layout: <dir>/manifest.json plus one N-Triples file per
/// document. Manifest schema:
///   {"documents": [{"uri": ..., "path": ...}],
///    "latency": {"base_ms": ..., "jitter_ms": ..., "seed": ...}}
void save_web(const WebOfLinkedData& web, const std::string& dir);
WebOfLinkedData load_web(const std::string& dir);

}  // namespace linktrail

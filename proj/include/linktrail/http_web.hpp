#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "linktrail/webmodel.hpp"

namespace linktrail {

/// Running simulated-Web server. Serves
///   GET /lookup?uri=<percent-encoded-uri>
/// with 200 + application/n-triples for known URIs, 404 for unknown ones,
/// 400 for malformed percent-encoding. The latency model is applied
/// server-side as a real sleep when wall_clock_latency is set.
class HttpWebServer {
public:
    /// port 0 binds an ephemeral port. Throws std::runtime_error on bind
    /// failure. The server runs on a background thread until destruction.
    HttpWebServer(const WebOfLinkedData& web, int port, bool wall_clock_latency = false);
    ~HttpWebServer();

    HttpWebServer(const HttpWebServer&) = delete;
    HttpWebServer& operator=(const HttpWebServer&) = delete;

    int port() const;
    std::string base_url() const;

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

inline HttpWebServer serve_http(const WebOfLinkedData& web, int port, bool wall_clock_latency = false) {
    return HttpWebServer(web, port, wall_clock_latency);
}

class HttpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Client side of the protocol above. 404 maps to absent; connection or
/// protocol failures throw HttpError (distinct from a failed lookup).
std::optional<Document> http_fetch(const std::string& endpoint, const Term& u);

/// WebAccess over a remote simulated Web. Timestamps come from the wall
/// clock (the server owns the latency model).
class HttpAccess : public WebAccess {
public:
    explicit HttpAccess(std::string endpoint);

    LookupResult lookup(const Term& u, std::uint64_t not_before_us) override;
    std::uint64_t now_us() override;
    std::uint64_t lookups_performed() const override { return count_.load(); }

private:
    std::string endpoint_;
    std::uint64_t epoch_us_;
    std::atomic<std::uint64_t> count_{0};
};

std::string percent_encode(const std::string& raw);

/// Strict percent-decoding; returns nullopt on malformed input.
std::optional<std::string> percent_decode(const std::string& encoded);

}  // namespace linktrail

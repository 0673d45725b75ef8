#include "linktrail/http_web.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "linktrail/ntriples.hpp"

namespace linktrail {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool unreserved(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '.' || c == '_' || c == '~';
}

}  // namespace

std::string percent_encode(const std::string& raw) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : raw) {
        if (unreserved(static_cast<char>(c))) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

std::optional<std::string> percent_decode(const std::string& encoded) {
    std::string out;
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        char c = encoded[i];
        if (c == '%') {
            if (i + 2 >= encoded.size()) return std::nullopt;
            int hi = hex_value(encoded[i + 1]);
            int lo = hex_value(encoded[i + 2]);
            if (hi < 0 || lo < 0) return std::nullopt;
            out += static_cast<char>((hi << 4) | lo);
            i += 2;
        } else if (c == '+') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

struct HttpWebServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    ~Impl() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
};

HttpWebServer::HttpWebServer(const WebOfLinkedData& web, int port, bool wall_clock_latency)
    : impl_(std::make_unique<Impl>()) {
    // SO_REUSEADDR only; the default SO_REUSEPORT would let two servers bind
    // the same port and hide the configuration error
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    impl_->server.Get("/lookup", [&web, wall_clock_latency](const httplib::Request& req, httplib::Response& res) {
        // Decode the uri parameter ourselves so malformed encodings can be
        // rejected with 400; httplib's own decoding is lenient.
        std::string raw;
        auto qpos = req.target.find('?');
        if (qpos != std::string::npos) {
            std::string query = req.target.substr(qpos + 1);
            std::size_t start = 0;
            while (start < query.size()) {
                std::size_t end = query.find('&', start);
                if (end == std::string::npos) end = query.size();
                std::string kv = query.substr(start, end - start);
                if (kv.rfind("uri=", 0) == 0) raw = kv.substr(4);
                start = end + 1;
            }
        }
        if (raw.empty()) {
            res.status = 400;
            res.set_content("missing uri parameter\n", "text/plain");
            return;
        }
        std::optional<std::string> decoded = percent_decode(raw);
        if (!decoded) {
            res.status = 400;
            res.set_content("malformed percent-encoding\n", "text/plain");
            return;
        }
        Term u = uri(*decoded);
        if (wall_clock_latency) {
            std::this_thread::sleep_for(std::chrono::milliseconds(web.latency.delay_ms(u)));
        }
        const Document* d = web.find(u);
        if (d == nullptr) {
            res.status = 404;
            res.set_content("unknown URI\n", "text/plain");
            return;
        }
        res.status = 200;
        res.set_content(serialize_ntriples(d->triples), "application/n-triples");
    });

    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->port < 0) throw std::runtime_error("cannot bind HTTP server");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port)) {
            throw std::runtime_error("cannot bind HTTP server to port " + std::to_string(port));
        }
        impl_->port = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

HttpWebServer::~HttpWebServer() = default;

int HttpWebServer::port() const { return impl_->port; }

std::string HttpWebServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void HttpWebServer::stop() { impl_->server.stop(); }

std::optional<Document> http_fetch(const std::string& endpoint, const Term& u) {
    httplib::Client client(endpoint);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    auto res = client.Get("/lookup?uri=" + percent_encode(u.lexical));
    if (!res) throw HttpError("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status == 404) return std::nullopt;
    if (res->status != 200) throw HttpError("unexpected HTTP status " + std::to_string(res->status));
    Document d;
    d.uri = u;
    d.triples = parse_ntriples(res->body);
    return d;
}

HttpAccess::HttpAccess(std::string endpoint) : endpoint_(std::move(endpoint)) {
    epoch_us_ = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

LookupResult HttpAccess::lookup(const Term& u, std::uint64_t) {
    count_.fetch_add(1);
    LookupResult result;
    result.document = http_fetch(endpoint_, u);
    result.completed_at_us = now_us();
    return result;
}

std::uint64_t HttpAccess::now_us() {
    auto now = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
    return now - epoch_us_;
}

}  // namespace linktrail

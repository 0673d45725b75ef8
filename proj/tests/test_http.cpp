#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include "linktrail/http_web.hpp"
#include "linktrail/ntriples.hpp"

#include "support.hpp"

using namespace linktrail;
using namespace linktrail::testing;

namespace {

WebOfLinkedData sample_web() {
    WebOfLinkedData web;
    for (int i = 0; i < 5; ++i) {
        Document d;
        d.uri = ent(i);
        d.triples.insert(Triple{ent(i), pred(0), ent((i + 1) % 5)});
        d.triples.insert(Triple{ent(i), pred(1), literal("label \"x\" #" + std::to_string(i))});
        web.docs.emplace(d.uri, std::move(d));
    }
    web.latency = LatencyModel{0, 0, 1};
    return web;
}

}  // namespace

TEST_CASE("percent encoding round-trips") {
    const std::string raw = "http://ex.org/e1?q=a b&x=%#frag";
    auto decoded = percent_decode(percent_encode(raw));
    REQUIRE(decoded);
    CHECK(*decoded == raw);

    CHECK(!percent_decode("%"));
    CHECK(!percent_decode("%2"));
    CHECK(!percent_decode("%zz"));
}

TEST_CASE("server serves documents with the right status codes") {
    WebOfLinkedData web = sample_web();
    HttpWebServer server(web, 0);
    httplib::Client client(server.base_url());

    auto ok = client.Get("/lookup?uri=" + percent_encode(ent(1).lexical));
    REQUIRE(ok);
    CHECK(ok->status == 200);
    CHECK(ok->get_header_value("Content-Type") == "application/n-triples");
    CHECK(parse_ntriples(ok->body) == web.docs.at(ent(1)).triples);

    auto missing = client.Get("/lookup?uri=" + percent_encode("http://ex.org/none"));
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto malformed = client.Get("/lookup?uri=%zz");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);

    auto no_param = client.Get("/lookup");
    REQUIRE(no_param);
    CHECK(no_param->status == 400);
}

TEST_CASE("http_fetch mirrors in-process lookup for every document") {
    WebOfLinkedData web = sample_web();
    HttpWebServer server(web, 0);

    for (const auto& [u, d] : web.docs) {
        auto fetched = http_fetch(server.base_url(), u);
        REQUIRE(fetched);
        CHECK(fetched->triples == d.triples);
    }
    CHECK(!http_fetch(server.base_url(), uri("http://ex.org/none")));
}

TEST_CASE("protocol failures are distinct from failed lookups") {
    CHECK_THROWS_AS(http_fetch("http://127.0.0.1:1", ent(0)), HttpError);
}

TEST_CASE("binding an occupied port fails at start") {
    WebOfLinkedData web = sample_web();
    HttpWebServer first(web, 0);
    CHECK_THROWS_AS(HttpWebServer(web, first.port()), std::runtime_error);
}

TEST_CASE("HttpAccess implements WebAccess over the wire") {
    WebOfLinkedData web = sample_web();
    HttpWebServer server(web, 0);
    HttpAccess access(server.base_url());

    auto r = access.lookup(ent(2), 0);
    REQUIRE(r.document);
    CHECK(r.document->triples == web.docs.at(ent(2)).triples);
    CHECK(!access.lookup(uri("http://ex.org/none"), 0).document);
    CHECK(access.lookups_performed() == 2);
}

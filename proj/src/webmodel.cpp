#include "linktrail/webmodel.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "linktrail/ntriples.hpp"

namespace linktrail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace

void save_web(const WebOfLinkedData& web, const std::string& dir) {
    fs::create_directories(fs::path(dir) / "docs");

    json manifest;
    manifest["documents"] = json::array();
    std::size_t index = 0;
    for (const auto& [u, doc] : web.docs) {
        std::ostringstream name;
        name << "docs/" << std::setw(6) << std::setfill('0') << index++ << ".nt";
        write_file(fs::path(dir) / name.str(), serialize_ntriples(doc.triples));
        manifest["documents"].push_back({{"uri", u.lexical}, {"path", name.str()}});
    }
    manifest["latency"] = {{"base_ms", web.latency.base_ms},
                           {"jitter_ms", web.latency.jitter_ms},
                           {"seed", web.latency.seed}};
    write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

WebOfLinkedData load_web(const std::string& dir) {
    json manifest = json::parse(read_file(fs::path(dir) / "manifest.json"));

    WebOfLinkedData web;
    web.latency.base_ms = manifest.at("latency").at("base_ms").get<std::uint64_t>();
    web.latency.jitter_ms = manifest.at("latency").at("jitter_ms").get<std::uint64_t>();
    web.latency.seed = manifest.at("latency").at("seed").get<std::uint64_t>();

    std::size_t index = 0;
    for (const auto& entry : manifest.at("documents")) {
        Term u = uri(entry.at("uri").get<std::string>());
        std::string text = read_file(fs::path(dir) / entry.at("path").get<std::string>());
        Document doc;
        doc.uri = u;
        doc.triples = parse_ntriples(text, "doc" + std::to_string(index));
        ++index;
        if (!web.docs.emplace(u, std::move(doc)).second) {
            throw std::runtime_error("duplicate document URI in manifest: " + u.lexical);
        }
    }
    return web;
}

}  // namespace linktrail

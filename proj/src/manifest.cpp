#include "atri/manifest.hpp"

#include "atri/digest.hpp"
#include "atri/io.hpp"

namespace atri {

using json = nlohmann::ordered_json;

std::string RunManifest::input_digest() const {
    json j;
    j["command_line"] = command_line;
    j["config_digest"] = config_digest;
    j["corpus_digest"] = corpus_digest;
    j["prompt_digests"] = prompt_digests;
    j["seeds"] = seeds;
    j["model_ids"] = model_ids;
    return sha256_hex(j.dump());
}

nlohmann::json RunManifest::to_json() const {
    json j;
    j["input_digest"] = input_digest();
    j["command_line"] = command_line;
    j["config_digest"] = config_digest;
    j["corpus_digest"] = corpus_digest;
    j["prompt_digests"] = prompt_digests;
    j["seeds"] = seeds;
    j["model_ids"] = model_ids;
    j["cache"] = {{"hits", cache_hits},
                  {"misses", cache_misses},
                  {"transport_calls", transport_calls}};
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j;
}

void RunManifest::save(const std::string& path) const {
    io::write_file_atomic(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::load(const std::string& path) {
    json j = json::parse(io::read_file(path));
    RunManifest m;
    m.command_line = j.value("command_line", "");
    m.config_digest = j.value("config_digest", "");
    m.corpus_digest = j.value("corpus_digest", "");
    const json prompt_digests = j.value("prompt_digests", json::object());
    for (auto& [k, v] : prompt_digests.items())
        m.prompt_digests[k] = v.get<std::string>();
    const json seeds = j.value("seeds", json::object());
    for (auto& [k, v] : seeds.items()) m.seeds[k] = v.get<std::uint64_t>();
    const json model_ids = j.value("model_ids", json::object());
    for (auto& [k, v] : model_ids.items())
        m.model_ids[k] = v.get<std::string>();
    if (j.contains("cache")) {
        m.cache_hits = j["cache"].value("hits", 0L);
        m.cache_misses = j["cache"].value("misses", 0L);
        m.transport_calls = j["cache"].value("transport_calls", 0L);
    }
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    return m;
}

}  // namespace atri

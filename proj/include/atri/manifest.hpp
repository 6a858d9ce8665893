#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace atri {

// Reproducibility record written next to every artifact a run emits.
// input_digest covers only the deterministic inputs (command line, config,
// corpus, prompt assets, seeds, model ids); timestamps and cache counters
// stay out so reruns with a warm cache stay byte-identical.
struct RunManifest {
    std::string command_line;
    std::string config_digest;
    std::string corpus_digest;
    std::map<std::string, std::string> prompt_digests;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> model_ids;
    long cache_hits = 0;
    long cache_misses = 0;
    long transport_calls = 0;
    std::string started_at;
    std::string finished_at;

    std::string input_digest() const;
    nlohmann::json to_json() const;
    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

}  // namespace atri

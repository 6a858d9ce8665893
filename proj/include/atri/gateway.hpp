#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace atri {

struct LlmRequest {
    std::string model_id;
    std::string prompt;
    double temperature = 0.0;
    int rep_index = 0;  // distinguishes repeated samples in the cache key
    int max_tokens = 4096;

    std::string digest() const;
};

struct LlmResponse {
    std::string text;
    bool cached = false;
    int latency_ms = 0;
    nlohmann::ordered_json provider_meta;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual LlmResponse complete(const LlmRequest& req) = 0;
};

// Scripted replies for offline tests. Two layers: an exact prompt-digest
// map, then ordered substring rules. A rule either carries a fixed reply or
// echoes the inclusive span between two markers found in the prompt.
class FixtureBackend : public Backend {
public:
    struct Rule {
        std::string if_contains;
        std::string and_contains;  // optional second predicate
        std::string reply;
        std::string between_start;  // reply = prompt span [start..end] incl.
        std::string between_end;
        std::string reply_prefix;  // prepended to a between-span reply
        std::string reply_suffix;
    };

    FixtureBackend() = default;
    FixtureBackend(FixtureBackend&& o) noexcept
        : digest_replies_(std::move(o.digest_replies_)),
          rules_(std::move(o.rules_)),
          calls_(o.calls_.load()),
          in_flight_(o.in_flight_.load()),
          high_water_(o.high_water_.load()) {}

    static FixtureBackend from_json(const nlohmann::ordered_json& j);
    static FixtureBackend from_file(const std::filesystem::path& path);

    void add_reply(const std::string& prompt_digest, std::string reply);
    void add_rule(Rule rule);

    LlmResponse complete(const LlmRequest& req) override;

    // instrumentation
    int call_count() const { return calls_.load(); }
    int concurrency_high_water() const { return high_water_.load(); }

private:
    std::map<std::string, std::string> digest_replies_;
    std::vector<Rule> rules_;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> high_water_{0};
};

// OpenAI-style chat-completion transport; base URL + model come from
// configuration so any provider in that wire format works.
class HttpBackend : public Backend {
public:
    HttpBackend(std::string base_url, std::string api_key, int max_retries = 3);
    LlmResponse complete(const LlmRequest& req) override;

private:
    std::string base_url_;
    std::string api_key_;
    int max_retries_;
};

struct GatewayStats {
    std::atomic<long> transport_calls{0};
    std::atomic<long> cache_hits{0};
    std::atomic<long> cache_misses{0};
};

struct RequestLogEntry {
    std::string digest;
    std::string model_id;
    double temperature;
    int rep_index;
    bool cached;
};

// Every model call flows through here. Content-addressed on-disk cache:
// cache/<first-2-hex>/<digest>.json holding request echo + response. With a
// warm cache no transport call is made and responses are byte-identical.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend,
            std::filesystem::path cache_dir);

    LlmResponse complete(const LlmRequest& req);

    // order-preserving, at most `parallelism` requests in flight
    std::vector<LlmResponse> complete_batch(const std::vector<LlmRequest>& reqs,
                                            int parallelism);

    const GatewayStats& stats() const { return stats_; }
    std::vector<RequestLogEntry> request_log() const;

private:
    std::optional<LlmResponse> cache_lookup(const LlmRequest& req);
    void cache_store(const LlmRequest& req, const LlmResponse& resp);
    std::filesystem::path cache_path(const std::string& digest) const;
    std::mutex& key_mutex(const std::string& digest);

    std::shared_ptr<Backend> backend_;
    std::filesystem::path cache_dir_;
    GatewayStats stats_;
    mutable std::mutex log_mutex_;
    std::vector<RequestLogEntry> log_;
    std::mutex key_map_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
};

// Builds a gateway from the ATRI_LLM_* / ATRI_JUDGE_* environment variables.
// Throws a provider error when credentials are missing and live=true; with
// live=false a missing fixture file is a config error.
struct GatewayConfig {
    std::string base_url;
    std::string api_key;
    std::string model_id;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path fixture_file;  // fixture backend when set
    bool live = false;
};

std::shared_ptr<Gateway> make_gateway(const GatewayConfig& cfg,
                                      std::shared_ptr<FixtureBackend>* fixture_out = nullptr);

}  // namespace atri

#include "atri/gateway.hpp"

#include <chrono>
#include <thread>

#include "atri/digest.hpp"
#include "atri/errors.hpp"
#include "atri/io.hpp"

namespace atri {

using json = nlohmann::ordered_json;

std::string LlmRequest::digest() const {
    json j;
    j["model_id"] = model_id;
    j["prompt"] = prompt;
    j["temperature"] = temperature;
    j["rep_index"] = rep_index;
    j["max_tokens"] = max_tokens;
    return sha256_hex(j.dump());
}

// ---- FixtureBackend ----

FixtureBackend FixtureBackend::from_json(const nlohmann::ordered_json& j) {
    FixtureBackend b;
    if (j.contains("replies"))
        for (auto& [digest, reply] : j["replies"].items())
            b.digest_replies_[digest] = reply.get<std::string>();
    if (j.contains("rules")) {
        for (const auto& r : j["rules"]) {
            Rule rule;
            rule.if_contains = r.value("if_contains", "");
            rule.and_contains = r.value("and_contains", "");
            rule.reply = r.value("reply", "");
            if (r.contains("reply_between")) {
                rule.between_start = r["reply_between"].at(0).get<std::string>();
                rule.between_end = r["reply_between"].at(1).get<std::string>();
            }
            rule.reply_prefix = r.value("reply_prefix", "");
            rule.reply_suffix = r.value("reply_suffix", "");
            b.rules_.push_back(std::move(rule));
        }
    }
    return b;
}

FixtureBackend FixtureBackend::from_file(const std::filesystem::path& path) {
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded())
        throw config_error("malformed fixture file: " + path.string());
    return from_json(j);
}

void FixtureBackend::add_reply(const std::string& prompt_digest,
                               std::string reply) {
    digest_replies_[prompt_digest] = std::move(reply);
}

void FixtureBackend::add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

LlmResponse FixtureBackend::complete(const LlmRequest& req) {
    calls_.fetch_add(1);
    int now = in_flight_.fetch_add(1) + 1;
    int hw = high_water_.load();
    while (now > hw && !high_water_.compare_exchange_weak(hw, now)) {
    }
    // brief stall so concurrent entries overlap observably in tests
    std::this_thread::sleep_for(std::chrono::milliseconds(1));

    LlmResponse resp;
    resp.provider_meta = json{{"backend", "fixture"}};
    auto finish = [&]() {
        in_flight_.fetch_sub(1);
        return resp;
    };

    auto it = digest_replies_.find(sha256_hex(req.prompt));
    if (it != digest_replies_.end()) {
        resp.text = it->second;
        return finish();
    }
    for (const auto& rule : rules_) {
        if (!rule.if_contains.empty() &&
            req.prompt.find(rule.if_contains) == std::string::npos)
            continue;
        if (!rule.and_contains.empty() &&
            req.prompt.find(rule.and_contains) == std::string::npos)
            continue;
        if (!rule.between_start.empty()) {
            size_t s = req.prompt.find(rule.between_start);
            if (s == std::string::npos) continue;
            size_t e = req.prompt.find(rule.between_end,
                                       s + rule.between_start.size());
            if (e == std::string::npos) continue;
            resp.text = rule.reply_prefix +
                        req.prompt.substr(
                            s, e + rule.between_end.size() - s) +
                        rule.reply_suffix;
            return finish();
        }
        resp.text = rule.reply;
        return finish();
    }
    in_flight_.fetch_sub(1);
    throw provider_error("fixture backend: no scripted reply matches prompt");
}

// ---- HttpBackend ----

HttpBackend::HttpBackend(std::string base_url, std::string api_key,
                         int max_retries)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      max_retries_(max_retries) {}

}  // namespace atri

// httplib pulled in here only; it is heavy
#include <httplib.h>

namespace atri {

LlmResponse HttpBackend::complete(const LlmRequest& req) {
    if (api_key_.empty())
        throw provider_error("ATRI_LLM_API_KEY not set for live provider run");

    json body;
    body["model"] = req.model_id;
    body["messages"] =
        json::array({json{{"role", "user"}, {"content", req.prompt}}});
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(250 << (attempt - 1)));
        auto t0 = std::chrono::steady_clock::now();
        httplib::Client cli(base_url_);
        cli.set_read_timeout(300, 0);
        httplib::Headers headers = {
            {"Authorization", "Bearer " + api_key_}};
        auto res = cli.Post("/v1/chat/completions", headers, payload,
                            "application/json");
        if (!res) {
            last_error = "transport failure";
            continue;
        }
        if (res->status == 401 || res->status == 403)
            throw provider_error("authentication failed (" +
                                 std::to_string(res->status) + ")");
        if (res->status >= 500 || res->status == 429) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw provider_error("provider error: status " +
                                 std::to_string(res->status) + ": " +
                                 res->body);
        json j = json::parse(res->body, nullptr, false);
        if (j.is_discarded())
            throw provider_error("provider returned malformed JSON");
        LlmResponse resp;
        resp.text = j.at("choices").at(0).at("message").at("content")
                        .get<std::string>();
        resp.latency_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count());
        resp.provider_meta = json{{"backend", "http"},
                                  {"status", res->status}};
        return resp;
    }
    throw provider_error("provider error after retries: " + last_error);
}

// ---- Gateway ----

Gateway::Gateway(std::shared_ptr<Backend> backend,
                 std::filesystem::path cache_dir)
    : backend_(std::move(backend)), cache_dir_(std::move(cache_dir)) {}

std::filesystem::path Gateway::cache_path(const std::string& digest) const {
    return cache_dir_ / digest.substr(0, 2) / (digest + ".json");
}

std::mutex& Gateway::key_mutex(const std::string& digest) {
    std::lock_guard lk(key_map_mutex_);
    auto& p = key_mutexes_[digest];
    if (!p) p = std::make_unique<std::mutex>();
    return *p;
}

std::optional<LlmResponse> Gateway::cache_lookup(const LlmRequest& req) {
    auto path = cache_path(req.digest());
    if (!std::filesystem::exists(path)) return std::nullopt;
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    LlmResponse resp;
    resp.text = j.at("response").at("text").get<std::string>();
    resp.cached = true;
    resp.latency_ms = 0;
    if (j["response"].contains("provider_meta"))
        resp.provider_meta = j["response"]["provider_meta"];
    return resp;
}

void Gateway::cache_store(const LlmRequest& req, const LlmResponse& resp) {
    json j;
    j["request"] = {{"model_id", req.model_id},
                    {"prompt", req.prompt},
                    {"temperature", req.temperature},
                    {"rep_index", req.rep_index},
                    {"max_tokens", req.max_tokens}};
    j["response"] = {{"text", resp.text},
                     {"provider_meta", resp.provider_meta}};
    io::write_file_atomic(cache_path(req.digest()), j.dump(2) + "\n");
}

LlmResponse Gateway::complete(const LlmRequest& req) {
    if (req.prompt.empty()) throw runtime_error("LlmRequest: empty prompt");
    const std::string digest = req.digest();
    std::lock_guard key_lk(key_mutex(digest));

    auto record = [&](bool cached) {
        std::lock_guard lk(log_mutex_);
        log_.push_back({digest, req.model_id, req.temperature, req.rep_index,
                        cached});
    };

    if (auto hit = cache_lookup(req)) {
        stats_.cache_hits.fetch_add(1);
        record(true);
        return *hit;
    }
    stats_.cache_misses.fetch_add(1);
    stats_.transport_calls.fetch_add(1);
    LlmResponse resp = backend_->complete(req);
    resp.cached = false;
    cache_store(req, resp);
    record(false);
    return resp;
}

std::vector<LlmResponse> Gateway::complete_batch(
    const std::vector<LlmRequest>& reqs, int parallelism) {
    if (parallelism < 1) throw runtime_error("parallelism must be >= 1");
    std::vector<LlmResponse> out(reqs.size());
    if (reqs.empty()) return out;

    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= reqs.size()) return;
            try {
                out[i] = complete(reqs[i]);
            } catch (...) {
                std::lock_guard lk(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    size_t n_threads =
        std::min(static_cast<size_t>(parallelism), reqs.size());
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<RequestLogEntry> Gateway::request_log() const {
    std::lock_guard lk(log_mutex_);
    return log_;
}

// ---- factory ----

namespace {
std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}
}  // namespace

std::shared_ptr<Gateway> make_gateway(
    const GatewayConfig& cfg, std::shared_ptr<FixtureBackend>* fixture_out) {
    std::shared_ptr<Backend> backend;
    if (cfg.live) {
        std::string base_url =
            !cfg.base_url.empty() ? cfg.base_url
                                  : env_or("ATRI_LLM_BASE_URL", "");
        std::string api_key =
            !cfg.api_key.empty() ? cfg.api_key : env_or("ATRI_LLM_API_KEY", "");
        if (base_url.empty())
            throw provider_error("ATRI_LLM_BASE_URL not set for live run");
        backend = std::make_shared<HttpBackend>(base_url, api_key);
    } else {
        if (cfg.fixture_file.empty())
            throw config_error(
                "no fixture file configured and --live not given");
        auto fixture = std::make_shared<FixtureBackend>(
            FixtureBackend::from_file(cfg.fixture_file));
        if (fixture_out) *fixture_out = fixture;
        backend = fixture;
    }
    return std::make_shared<Gateway>(backend, cfg.cache_dir);
}

}  // namespace atri

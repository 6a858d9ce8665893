#include <doctest.h>

#include "atri/manifest.hpp"
#include "helpers.hpp"

using namespace atri;

namespace {

RunManifest sample() {
    RunManifest m;
    m.command_line = "atri bench --test-set t.jsonl";
    m.config_digest = "cfg";
    m.corpus_digest = "corp";
    m.prompt_digests = {{"entailment_zero_shot", "abc"}};
    m.seeds = {{"bench", 1}};
    m.model_ids = {{"predict", "fixture-model"}};
    m.cache_hits = 10;
    m.cache_misses = 3;
    m.transport_calls = 3;
    m.started_at = "2024-01-01T00:00:00Z";
    m.finished_at = "2024-01-01T00:01:00Z";
    return m;
}

}  // namespace

TEST_CASE("input_digest ignores timestamps and cache counters") {
    auto a = sample();
    auto b = sample();
    b.cache_hits = 0;
    b.cache_misses = 999;
    b.transport_calls = 0;
    b.started_at = "2025-06-06T06:06:06Z";
    b.finished_at = "";
    CHECK(a.input_digest() == b.input_digest());
}

TEST_CASE("input_digest covers every deterministic input") {
    auto base = sample().input_digest();
    auto m = sample();
    m.command_line += " --seed 2";
    CHECK(m.input_digest() != base);
    m = sample();
    m.config_digest = "other";
    CHECK(m.input_digest() != base);
    m = sample();
    m.corpus_digest = "other";
    CHECK(m.input_digest() != base);
    m = sample();
    m.prompt_digests["entailment_zero_shot"] = "zzz";
    CHECK(m.input_digest() != base);
    m = sample();
    m.seeds["bench"] = 2;
    CHECK(m.input_digest() != base);
    m = sample();
    m.model_ids["predict"] = "other-model";
    CHECK(m.input_digest() != base);
}

TEST_CASE("manifest save/load round trip") {
    auto m = sample();
    testutil::TmpDir tmp;
    auto p = (tmp / "run.manifest.json").string();
    m.save(p);
    auto back = RunManifest::load(p);
    CHECK(back.command_line == m.command_line);
    CHECK(back.config_digest == m.config_digest);
    CHECK(back.corpus_digest == m.corpus_digest);
    CHECK(back.prompt_digests == m.prompt_digests);
    CHECK(back.seeds == m.seeds);
    CHECK(back.model_ids == m.model_ids);
    CHECK(back.cache_hits == m.cache_hits);
    CHECK(back.transport_calls == m.transport_calls);
    CHECK(back.started_at == m.started_at);
    CHECK(back.input_digest() == m.input_digest());
}

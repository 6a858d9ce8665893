#include <doctest.h>

#include <algorithm>

#include "atri/bench.hpp"
#include "atri/errors.hpp"
#include "atri/synthetic.hpp"
#include "helpers.hpp"

using namespace atri;

namespace {

EntailmentPrediction pred_with(const std::string& label) {
    EntailmentPrediction p;
    p.label = label;
    return p;
}

MethodMetrics metrics_for(const std::vector<std::string>& labels,
                          const std::vector<std::string>& golds) {
    std::vector<EntailmentPrediction> preds;
    for (const auto& l : labels) preds.push_back(pred_with(l));
    return compute_metrics(preds, golds);
}

struct BenchFixture {
    testutil::FixtureGateway fg;
    EntailmentBench bench;

    explicit BenchFixture(int n_reps = 3, std::uint64_t seed = 0)
        : bench(*fg.gateway, testutil::zh_prompts(), "fixture-model",
                "fixture-judge", n_reps, seed) {}
};

std::vector<EntailmentExample> synthetic_examples(std::uint64_t seed,
                                                  size_t n) {
    auto syn = testutil::make_synthetic(seed, n, 0.5);
    std::vector<EntailmentExample> out;
    for (size_t i = 0; i < syn.cases.size(); ++i) {
        EntailmentExample e;
        e.case_id = syn.cases[i].case_id;
        e.concept_id = syn.sidecar[i].concept_id;
        e.fact = syn.cases[i].facts;
        e.gold_label = syn.sidecar[i].label;
        e.gold_reason = syn.sidecar[i].planted_reason;
        out.push_back(e);
    }
    return out;
}

std::map<std::string, ConceptSpec> spec_map() {
    std::map<std::string, ConceptSpec> m;
    for (const auto& s : testutil::test_concepts()) m[s.concept_id] = s;
    return m;
}

}  // namespace

TEST_CASE("majority_label full truth table over three votes") {
    const std::vector<std::string> vals = {"yes", "no", "invalid"};
    for (const auto& a : vals)
        for (const auto& b : vals)
            for (const auto& c : vals) {
                int y = (a == "yes") + (b == "yes") + (c == "yes");
                int n = (a == "no") + (b == "no") + (c == "no");
                std::string want = y > n ? "yes" : n > y ? "no" : "invalid";
                std::vector<std::string> votes = {a, b, c};
                CHECK(majority_label(votes) == want);
                // permutation invariance
                std::sort(votes.begin(), votes.end());
                do {
                    CHECK(majority_label(votes) == want);
                } while (std::next_permutation(votes.begin(), votes.end()));
            }
}

TEST_CASE("majority_label edge sizes") {
    CHECK(majority_label({}) == "invalid");
    CHECK(majority_label({"yes"}) == "yes");
    CHECK(majority_label({"yes", "no"}) == "invalid");
}

TEST_CASE("compute_metrics hand-checked cases") {
    // two of four correct, both classes half right
    auto m = metrics_for({"yes", "yes", "no", "no"},
                         {"yes", "no", "yes", "no"});
    CHECK(m.acc == doctest::Approx(0.5));
    CHECK(m.ma_p == doctest::Approx(0.5));
    CHECK(m.ma_r == doctest::Approx(0.5));
    CHECK(m.ma_f == doctest::Approx(0.5));

    // all correct
    m = metrics_for({"yes", "no"}, {"yes", "no"});
    CHECK(m.acc == doctest::Approx(1.0));
    CHECK(m.ma_f == doctest::Approx(1.0));

    // constant "yes": recall 1 on yes, 0 on no -> Ma-R 0.5
    m = metrics_for({"yes", "yes", "yes", "yes"},
                    {"yes", "yes", "no", "no"});
    CHECK(m.acc == doctest::Approx(0.5));
    CHECK(m.ma_r == doctest::Approx(0.5));
    CHECK(m.n_yes == 4);
    CHECK(m.n_no == 0);

    // invalid counts as wrong and in neither class tally
    m = metrics_for({"invalid", "no"}, {"yes", "no"});
    CHECK(m.acc == doctest::Approx(0.5));
    CHECK(m.n_invalid == 1);
}

TEST_CASE("compute_metrics rejects length mismatch") {
    CHECK_THROWS_AS(metrics_for({"yes"}, {"yes", "no"}), AtriError);
}

TEST_CASE("consistency means: zeros counted vs scored-only") {
    std::vector<EntailmentPrediction> preds;
    auto a = pred_with("yes");
    a.consistency = 8;
    auto b = pred_with("no");
    b.consistency = 0;
    auto c = pred_with("yes");  // unscored
    preds = {a, b, c};
    auto m = compute_metrics(preds, {"yes", "yes", "yes"});
    CHECK(m.n_scored == 2);
    CHECK(m.mean_cs_with_zeros == doctest::Approx(4.0));
    CHECK(m.mean_cs_scored_only == doctest::Approx(8.0));
}

TEST_CASE("random baseline never touches the transport") {
    BenchFixture bf;
    auto examples = synthetic_examples(1, 10);
    auto specs = spec_map();
    for (const auto& e : examples) {
        auto p = bf.bench.predict_one(e, PredictMethod::random,
                                      specs.at(e.concept_id), nullptr);
        CHECK(p.votes.size() == 3);
        CHECK((p.label == "yes" || p.label == "no"));
        CHECK(p.label == majority_label(p.votes));
    }
    CHECK(bf.fg.backend->call_count() == 0);
}

TEST_CASE("random baseline is deterministic per (seed, case)") {
    BenchFixture a(3, 42), b(3, 42), c(3, 43);
    auto examples = synthetic_examples(2, 6);
    auto specs = spec_map();
    bool any_diff = false;
    for (const auto& e : examples) {
        const auto& spec = specs.at(e.concept_id);
        auto pa = a.bench.predict_one(e, PredictMethod::random, spec, nullptr);
        auto pb = b.bench.predict_one(e, PredictMethod::random, spec, nullptr);
        auto pc = c.bench.predict_one(e, PredictMethod::random, spec, nullptr);
        CHECK(pa.votes == pb.votes);
        any_diff = any_diff || pa.votes != pc.votes;
    }
    CHECK(any_diff);
}

TEST_CASE("zero-shot on the scripted backend recovers planted labels") {
    BenchFixture bf;
    auto examples = synthetic_examples(3, 12);
    auto specs = spec_map();
    for (const auto& e : examples) {
        auto p = bf.bench.predict_one(e, PredictMethod::zero_shot,
                                      specs.at(e.concept_id), nullptr);
        CHECK(p.votes == std::vector<std::string>(3, e.gold_label));
        CHECK(p.label == e.gold_label);
        CHECK_FALSE(p.reason.empty());
    }
    // 3 reps per example, all through the gateway
    CHECK(bf.fg.gateway->stats().transport_calls.load() ==
          static_cast<long>(3 * examples.size()));
    // reps hit distinct cache entries: no hits on first pass
    CHECK(bf.fg.gateway->stats().cache_hits.load() == 0);
}

TEST_CASE("with_interpretation requires an interpretation") {
    BenchFixture bf;
    auto examples = synthetic_examples(4, 2);
    auto specs = spec_map();
    CHECK_THROWS_AS(
        bf.bench.predict_one(examples[0], PredictMethod::with_interpretation,
                             specs.at(examples[0].concept_id), nullptr),
        AtriError);
}

TEST_CASE("score_consistency: wrong label scores 0 with no judge call") {
    BenchFixture bf;
    auto examples = synthetic_examples(5, 4);
    auto specs = spec_map();
    auto before = bf.fg.backend->call_count();
    auto p = pred_with(examples[0].gold_label == "yes" ? "no" : "yes");
    p.reason = "某理由。";
    bf.bench.score_consistency(p, examples[0], specs.at(examples[0].concept_id));
    CHECK(p.consistency == 0);
    CHECK(p.judge_calls == 0);
    CHECK(bf.fg.backend->call_count() == before);
}

TEST_CASE("score_consistency: correct label consults the judge") {
    BenchFixture bf;
    auto examples = synthetic_examples(5, 4);
    auto specs = spec_map();
    auto p = pred_with(examples[0].gold_label);
    p.reason = "某理由。";
    bf.bench.score_consistency(p, examples[0], specs.at(examples[0].concept_id));
    // shipped fixture judge replies [[7]]
    CHECK(p.consistency == 7);
    CHECK(p.judge_calls == 1);
}

TEST_CASE("score_consistency: out-of-range judge reply retried then unscored") {
    testutil::TmpDir tmp;
    auto backend = std::make_shared<FixtureBackend>();
    FixtureBackend::Rule bad;
    bad.if_contains = "一致性进行1-10的打分";
    bad.reply = "打分：[[11]]";
    backend->add_rule(bad);
    Gateway gw(backend, tmp / "cache");
    EntailmentBench bench(gw, testutil::zh_prompts(), "m", "judge", 3, 0);
    auto examples = synthetic_examples(6, 2);
    auto specs = spec_map();
    auto p = pred_with(examples[0].gold_label);
    p.reason = "某理由。";
    bench.score_consistency(p, examples[0], specs.at(examples[0].concept_id));
    CHECK_FALSE(p.consistency.has_value());
    CHECK(p.judge_calls == 2);
}

TEST_CASE("build_test_set golds match the sidecar and honors exclusions") {
    auto syn = testutil::make_synthetic(7, 80, 0.5);
    Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    auto spec = testutil::test_concepts()[0];

    testutil::FixtureGateway fg;
    FilterExtract fx(*fg.gateway, testutil::zh_prompts(), "fixture-model");

    CaseSet none;
    none.concept_id = spec.concept_id;
    none.stage = CaseStage::D_balanced;
    auto full = build_test_set(corpus, index, spec, fx, none);
    REQUIRE_FALSE(full.empty());

    std::map<std::string, const SidecarEntry*> gt;
    for (const auto& e : syn.sidecar) gt[e.case_id] = &e;
    for (const auto& e : full) {
        REQUIRE(gt.count(e.case_id) == 1);
        CHECK(e.gold_label == gt[e.case_id]->label);
        CHECK(e.gold_reason == gt[e.case_id]->planted_reason);
        CHECK(e.fact == corpus.find(e.case_id)->facts);
        // the planted determination must not leak into the task input
        CHECK(e.fact.find(e.gold_reason) == std::string::npos);
    }

    CaseSet excl;
    excl.concept_id = spec.concept_id;
    excl.stage = CaseStage::D_balanced;
    excl.case_ids = {full[0].case_id, full[1].case_id};
    auto reduced = build_test_set(corpus, index, spec, fx, excl);
    CHECK(reduced.size() == full.size() - 2);
    for (const auto& e : reduced) {
        CHECK(e.case_id != full[0].case_id);
        CHECK(e.case_id != full[1].case_id);
    }
}

TEST_CASE("test set JSONL round trip") {
    auto examples = synthetic_examples(8, 6);
    testutil::TmpDir tmp;
    auto p = (tmp / "test_set.jsonl").string();
    save_test_set(examples, p);
    auto back = load_test_set(p);
    REQUIRE(back.size() == examples.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].case_id == examples[i].case_id);
        CHECK(back[i].concept_id == examples[i].concept_id);
        CHECK(back[i].fact == examples[i].fact);
        CHECK(back[i].gold_label == examples[i].gold_label);
        CHECK(back[i].gold_reason == examples[i].gold_reason);
    }
}

TEST_CASE("run produces one ledger row per method and example") {
    BenchFixture bf;
    auto examples = synthetic_examples(9, 10);
    auto specs = spec_map();
    EntailmentBench::RunConfig cfg;
    cfg.methods.push_back({PredictMethod::random, {}, ""});
    cfg.methods.push_back({PredictMethod::zero_shot, {}, ""});
    cfg.score_cs = false;
    auto res = bf.bench.run(examples, specs, cfg);
    CHECK(res.ledger.size() == 2 * examples.size());
    CHECK(res.failures.empty());
    REQUIRE(res.report.overall.count("random") == 1);
    REQUIRE(res.report.overall.count("zero_shot") == 1);
    CHECK(res.report.overall["zero_shot"].acc == doctest::Approx(1.0));
    CHECK(res.report.overall["zero_shot"].n_examples == examples.size());
    // both synthetic concepts appear in the per-concept split
    CHECK(res.report.per_concept.size() == 2);

    auto s = res.report.to_json();
    auto back = BenchReport::from_json(s);
    CHECK(back.overall.size() == res.report.overall.size());
    CHECK(back.overall["zero_shot"].acc == doctest::Approx(1.0));
    CHECK(back.per_concept.size() == 2);
}

TEST_CASE("with_interpretation rows are labeled by interpretation source") {
    BenchFixture bf;
    auto examples = synthetic_examples(10, 6);
    auto specs = spec_map();

    Interpretation hu, qiangpi;
    for (auto* i : {&hu, &qiangpi}) {
        i->raw_text = "解释全文。";
        i->source = InterpSource::judicial;
        i->valid = true;
    }
    hu.concept_id = "hu";
    qiangpi.concept_id = "qiangpi";

    EntailmentBench::RunConfig cfg;
    EntailmentBench::MethodSpec ms;
    ms.method = PredictMethod::with_interpretation;
    ms.interps["hu"] = &hu;
    ms.interps["qiangpi"] = &qiangpi;
    cfg.methods.push_back(ms);
    cfg.score_cs = false;
    auto res = bf.bench.run(examples, specs, cfg);
    CHECK(res.report.overall.count("with_interpretation_judicial") == 1);
    CHECK(res.failures.empty());
}

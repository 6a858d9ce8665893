#include <doctest.h>

#include <map>
#include <random>

#include "atri/retrieval.hpp"
#include "atri/text.hpp"
#include "helpers.hpp"

using namespace atri;

namespace {

CaseJudgment make_case(const std::string& id, const std::string& court_view,
                       const std::string& article,
                       const std::string& facts = "事实。") {
    CaseJudgment c;
    c.case_id = id;
    c.year = 2000;
    c.facts = facts;
    c.court_view = court_view;
    c.verdict = "判。";
    if (!article.empty()) c.cited_articles.insert(article);
    return c;
}

ConceptSpec hu_spec() {
    ConceptSpec s;
    s.concept_id = "hu";
    s.concept_text = "户";
    s.article_id = "PRC-CL:264";
    s.article_text = "入户盗窃，处刑。此处有户。";
    return s;
}

// independent O(N*L) double-predicate scan
std::vector<std::string> brute_force_d0(const Corpus& corpus,
                                        const ConceptSpec& spec) {
    std::vector<std::string> out;
    for (const auto& c : corpus.cases()) {
        auto cited = cited_articles_of(c, "PRC-CL");
        if (!cited.count(spec.article_id)) continue;
        if (!text::contains(text::normalize(c.court_view),
                            text::normalize(spec.concept_text)))
            continue;
        out.push_back(c.case_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("postings are complete, sorted, deduplicated") {
    Corpus corpus = Corpus::ingest_records(
        {make_case("c", "甲。", "PRC-CL:264"),
         make_case("a", "乙。", "PRC-CL:264"),
         make_case("b", "丙。", "PRC-CL:264"),
         make_case("d", "丁。", "PRC-CL:13")},
        SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    auto& p = index.postings("PRC-CL:264");
    REQUIRE(p.size() == 3);
    CHECK(std::is_sorted(p.begin(), p.end()));
    CHECK(index.postings("PRC-CL:999").empty());
}

TEST_CASE("retrieve_d0 applies both predicates") {
    Corpus corpus = Corpus::ingest_records(
        {make_case("in", "被告人入户盗窃。", "PRC-CL:264"),
         // concept only in facts, not court view -> excluded
         make_case("facts-only", "无关。", "PRC-CL:264", "户内事实。"),
         // cites another article -> excluded
         make_case("other-article", "入户盗窃。", "PRC-CL:13"),
         // near-miss with one character substituted -> never retrieved
         make_case("fuzzy", "被告人入室盗窃。", "PRC-CL:264")},
        SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    auto d0 = index.retrieve_d0(hu_spec());
    CHECK(d0.stage == CaseStage::D0);
    CHECK(d0.case_ids == std::vector<std::string>{"in"});
}

TEST_CASE("unknown article yields empty set with warning") {
    Corpus corpus = Corpus::ingest_records(
        {make_case("a", "户。", "PRC-CL:13")}, SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    std::vector<std::string> warnings;
    auto d0 = index.retrieve_d0(hu_spec(), &warnings);
    CHECK(d0.case_ids.empty());
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("regex fallback feeds the postings") {
    auto c = make_case("rx", "依照第二百六十四条，属入户盗窃。", "");
    Corpus corpus = Corpus::ingest_records({c}, SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus, "PRC-CL");
    CHECK(index.postings("PRC-CL:264").size() == 1);
    auto d0 = index.retrieve_d0(hu_spec());
    CHECK(d0.case_ids == std::vector<std::string>{"rx"});
}

TEST_CASE("synthetic fixture: posting sizes match sidecar allocation") {
    auto syn = testutil::make_synthetic(1, 200, 0.67);
    Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    std::map<std::string, size_t> sidecar_counts;
    for (const auto& e : syn.sidecar) ++sidecar_counts[e.concept_id];
    auto specs = testutil::test_concepts();
    for (const auto& spec : specs) {
        CHECK(index.postings(spec.article_id).size() ==
              sidecar_counts[spec.concept_id]);
        // planted reasons quote the concept, so D0 covers the whole posting
        auto d0 = index.retrieve_d0(spec);
        CHECK(d0.case_ids.size() == sidecar_counts[spec.concept_id]);
    }
}

TEST_CASE("D0 equals the brute-force scan on random corpora") {
    std::mt19937_64 rng(99);
    auto specs = testutil::test_concepts();
    for (int round = 0; round < 10; ++round) {
        auto syn = testutil::make_synthetic(rng(), 1 + rng() % 120,
                                            (rng() % 101) / 100.0);
        // mutate some cases so both predicates can fail independently
        for (auto& c : syn.cases) {
            if (rng() % 4 == 0) c.cited_articles = {"PRC-CL:1"};
            if (rng() % 4 == 0)
                c.court_view = "本院认为，无相关概念。";
        }
        Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
        auto index = RetrievalIndex::build(corpus);
        for (const auto& spec : specs) {
            auto d0 = index.retrieve_d0(spec);
            CHECK(d0.case_ids == brute_force_d0(corpus, spec));
        }
    }
}

TEST_CASE("determinism and CaseSet round trip") {
    auto syn = testutil::make_synthetic(7, 60, 0.5);
    Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
    auto index = RetrievalIndex::build(corpus);
    auto spec = testutil::test_concepts()[0];
    auto a = index.retrieve_d0(spec);
    auto b = index.retrieve_d0(spec);
    CHECK(a.case_ids == b.case_ids);

    testutil::TmpDir tmp;
    auto p = (tmp / "d0.json").string();
    a.save(p);
    auto c = CaseSet::load(p);
    CHECK(c.concept_id == a.concept_id);
    CHECK(c.stage == CaseStage::D0);
    CHECK(c.case_ids == a.case_ids);
}

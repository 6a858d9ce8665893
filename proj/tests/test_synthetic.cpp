#include <doctest.h>

#include "atri/corpus.hpp"
#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "atri/synthetic.hpp"
#include "atri/text.hpp"
#include "helpers.hpp"

using namespace atri;

TEST_CASE("determinism: identical seed and params give identical bytes") {
    auto a = testutil::make_synthetic(1, 10, 0.5);
    auto b = testutil::make_synthetic(1, 10, 0.5);
    CHECK(Corpus::ingest_records(a.cases, SchemaMode::strict).emit() ==
          Corpus::ingest_records(b.cases, SchemaMode::strict).emit());
    CHECK(a.emit_sidecar() == b.emit_sidecar());

    auto c = testutil::make_synthetic(2, 10, 0.5);
    CHECK(a.emit_sidecar() != c.emit_sidecar());
}

TEST_CASE("fraction=1.0 plants only positive labels") {
    auto s = testutil::make_synthetic(5, 12, 1.0);
    for (const auto& e : s.sidecar) CHECK(e.label == "yes");
}

TEST_CASE("label quota is exact: round(0.67*200)=134 positives") {
    auto s = testutil::make_synthetic(1, 200, 0.67);
    size_t pos = 0;
    for (const auto& e : s.sidecar) pos += e.label == "yes";
    CHECK(pos == 134);
}

TEST_CASE("every case cites exactly one concept article and plants the reason") {
    auto s = testutil::make_synthetic(9, 40, 0.5);
    REQUIRE(s.cases.size() == s.sidecar.size());
    auto specs = testutil::test_concepts();
    for (size_t i = 0; i < s.cases.size(); ++i) {
        const auto& c = s.cases[i];
        const auto& gt = s.sidecar[i];
        CHECK(c.cited_articles.size() == 1);
        // planted reason is a verbatim court-view sentence
        CHECK(text::contains(c.court_view, gt.planted_reason));
        bool found = false;
        for (const auto& sent : text::split_sentences(c.court_view))
            found = found || sent == gt.planted_reason;
        CHECK(found);
        // label and discriminative feature agree
        const char* feature =
            gt.label == "yes" ? kPositiveFeature : kNegativeFeature;
        CHECK(text::contains(c.facts, feature));
        CHECK(text::contains(c.court_view, feature));
    }
}

TEST_CASE("sidecar round trip") {
    auto s = testutil::make_synthetic(4, 8, 0.25);
    testutil::TmpDir tmp;
    auto p = (tmp / "sidecar.jsonl").string();
    atri::io::write_file_atomic(p, s.emit_sidecar());
    auto loaded = load_sidecar(p);
    REQUIRE(loaded.size() == s.sidecar.size());
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].case_id == s.sidecar[i].case_id);
        CHECK(loaded[i].label == s.sidecar[i].label);
        CHECK(loaded[i].planted_reason == s.sidecar[i].planted_reason);
    }
}

TEST_CASE("parameter validation") {
    auto specs = testutil::test_concepts();
    CHECK_THROWS_AS(
        generate_synthetic_corpus(SyntheticParams{0, 10, 0.5}, {}), AtriError);
    CHECK_THROWS_AS(
        generate_synthetic_corpus(SyntheticParams{0, 0, 0.5}, specs),
        AtriError);
    CHECK_THROWS_AS(
        generate_synthetic_corpus(SyntheticParams{0, 10, 1.5}, specs),
        AtriError);
}

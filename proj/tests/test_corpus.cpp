#include <doctest.h>

#include <nlohmann/json.hpp>

#include "atri/corpus.hpp"
#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "helpers.hpp"

using namespace atri;
using json = nlohmann::ordered_json;

namespace {

std::string record_line(const std::string& id, int year = 2001,
                        const std::string& court_view = "本院认为。") {
    json j;
    j["case_id"] = id;
    j["year"] = year;
    j["header"] = "某法院";
    j["facts"] = "经审理查明。";
    j["court_view"] = court_view;
    j["verdict"] = "判决如下。";
    j["conclusion"] = "";
    j["cited_articles"] = {"PRC-CL:264"};
    return j.dump() + "\n";
}

}  // namespace

TEST_CASE("ingest well-formed 3-line file") {
    testutil::TmpDir tmp;
    auto p = (tmp / "c.jsonl").string();
    io::write_file_atomic(p, record_line("a") + record_line("b") +
                                 record_line("c"));
    Corpus c = Corpus::ingest_file(p, SchemaMode::strict);
    CHECK(c.cases().size() == 3);
    CHECK(c.stats().n_cases == 3);
    CHECK(c.find("b") != nullptr);
    CHECK(c.find("zz") == nullptr);
}

TEST_CASE("duplicate case_id: strict errors naming the id, lenient last-wins") {
    testutil::TmpDir tmp;
    auto p = (tmp / "c.jsonl").string();
    io::write_file_atomic(p, record_line("dup", 2001) +
                                 record_line("dup", 2002));
    CHECK_THROWS_WITH_AS(Corpus::ingest_file(p, SchemaMode::strict),
                         doctest::Contains("dup"), AtriError);
    Corpus c = Corpus::ingest_file(p, SchemaMode::lenient);
    CHECK(c.cases().size() == 1);
    CHECK(c.cases()[0].year == 2002);
    REQUIRE(c.warnings().size() == 1);
}

TEST_CASE("missing required section is rejected with line number") {
    testutil::TmpDir tmp;
    auto p = (tmp / "c.jsonl").string();
    json j = json::parse(record_line("x"));
    j["court_view"] = "";
    io::write_file_atomic(p, j.dump() + "\n");
    CHECK_THROWS_WITH_AS(Corpus::ingest_file(p, SchemaMode::strict),
                         doctest::Contains("line 1"), AtriError);
}

TEST_CASE("year outside 1985-2021 warns but is accepted") {
    auto c = Corpus::ingest_records(
        {[] {
            CaseJudgment x;
            x.case_id = "old";
            x.year = 1950;
            x.facts = "f";
            x.court_view = "v";
            x.verdict = "j";
            return x;
        }()},
        SchemaMode::strict);
    CHECK(c.cases().size() == 1);
    REQUIRE(c.warnings().size() == 1);
    CHECK(c.warnings()[0].find("1950") != std::string::npos);
}

TEST_CASE("ingest-emit round trip is field identical") {
    auto syn = testutil::make_synthetic(3, 25, 0.4);
    Corpus a = Corpus::ingest_records(syn.cases, SchemaMode::strict);
    testutil::TmpDir tmp;
    auto p = (tmp / "c.jsonl").string();
    a.emit_file(p);
    Corpus b = Corpus::ingest_file(p, SchemaMode::strict);
    REQUIRE(a.cases().size() == b.cases().size());
    for (size_t i = 0; i < a.cases().size(); ++i) {
        const auto& x = a.cases()[i];
        const auto& y = b.cases()[i];
        CHECK(x.case_id == y.case_id);
        CHECK(x.year == y.year);
        CHECK(x.header == y.header);
        CHECK(x.facts == y.facts);
        CHECK(x.court_view == y.court_view);
        CHECK(x.verdict == y.verdict);
        CHECK(x.conclusion == y.conclusion);
        CHECK(x.cited_articles == y.cited_articles);
    }
    // emitting again yields identical bytes
    CHECK(a.emit() == b.emit());
}

TEST_CASE("segment_judgment with all five delimiters; join is inverse") {
    std::string raw = "【首部】某法院判决书【事实】经审理查明，甲进入乙宅。"
                      "【本院认为】本院认为其行为构成犯罪。【判决】判三年。"
                      "【尾部】十日内可上诉。";
    auto seg = segment_judgment(raw);
    CHECK_FALSE(seg.unsegmentable);
    CHECK(seg.warnings.empty());
    CHECK(seg.sections.header == "某法院判决书");
    CHECK(seg.sections.court_view == "本院认为其行为构成犯罪。");
    CHECK(join_sections(seg.sections) == raw);
}

TEST_CASE("segment_judgment missing conclusion delimiter") {
    std::string raw = "【首部】h【事实】f【本院认为】v【判决】j";
    auto seg = segment_judgment(raw);
    CHECK_FALSE(seg.unsegmentable);
    CHECK(seg.sections.conclusion == "");
    REQUIRE(seg.warnings.size() == 1);
    CHECK(seg.warnings[0].find("【尾部】") != std::string::npos);
}

TEST_CASE("segment_judgment unsegmentable text lands in facts") {
    auto seg = segment_judgment("无任何分节标记的一段文本。");
    CHECK(seg.unsegmentable);
    CHECK(seg.sections.facts == "无任何分节标记的一段文本。");
    CHECK_FALSE(seg.warnings.empty());
}

TEST_CASE("segment_judgment rejects empty input") {
    CHECK_THROWS_AS(segment_judgment(""), AtriError);
}

TEST_CASE("segmenter is total: joining reproduces raw when delimited") {
    auto syn = testutil::make_synthetic(11, 30, 0.5);
    for (const auto& c : syn.cases) {
        std::string raw = join_sections(c);
        auto seg = segment_judgment(raw);
        CHECK_FALSE(seg.unsegmentable);
        CHECK(join_sections(seg.sections) == raw);
        CHECK(seg.sections.court_view == c.court_view);
    }
}

TEST_CASE("ArticleId canonical form") {
    auto id = ArticleId::parse("PRC-CL:264");
    REQUIRE(id.has_value());
    CHECK(id->law_code == "PRC-CL");
    CHECK(id->number == 264);
    CHECK(id->str() == "PRC-CL:264");
    CHECK_FALSE(ArticleId::parse("PRC-CL").has_value());
    CHECK_FALSE(ArticleId::parse("PRC-CL:0").has_value());
    CHECK_FALSE(ArticleId::parse(":5").has_value());
}

TEST_CASE("cited_articles_of falls back to the 第...条 regex") {
    CaseJudgment c;
    c.case_id = "r";
    c.court_view = "依照刑法第二百六十四条、第十三条之规定。";
    CitationSource src;
    auto ids = cited_articles_of(c, "PRC-CL", &src);
    CHECK(src == CitationSource::regex);
    CHECK(ids == std::set<std::string>{"PRC-CL:13", "PRC-CL:264"});

    c.cited_articles = {"PRC-CL:9"};
    ids = cited_articles_of(c, "PRC-CL", &src);
    CHECK(src == CitationSource::field);
    CHECK(ids == std::set<std::string>{"PRC-CL:9"});
}

TEST_CASE("ConceptSpec validation") {
    ConceptSpec s;
    s.concept_id = "x";
    s.concept_text = "入户盗窃";
    s.article_id = "PRC-CL:264";
    s.article_text = "……入户盗窃……";
    CHECK_NOTHROW(s.validate());
    s.concept_text = "不在法条里";
    CHECK_THROWS_AS(s.validate(), AtriError);
    s.concept_text = "入户盗窃";
    s.article_id = "badid";
    CHECK_THROWS_AS(s.validate(), AtriError);
}

TEST_CASE("load_concepts validates every entry") {
    auto specs = testutil::test_concepts();
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].concept_id == "hu");
    CHECK(specs[0].article_id == "PRC-CL:264");
}

#include <doctest.h>

#include "atri/errors.hpp"
#include "atri/prompt.hpp"
#include "helpers.hpp"

using namespace atri;

namespace {

size_t count_occurrences(const std::string& s, const std::string& needle) {
    size_t n = 0, p = 0;
    while ((p = s.find(needle, p)) != std::string::npos) {
        ++n;
        p += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("render replaces every slot occurrence") {
    auto t = PromptTemplate::from_body("t", "zh", "X{{a}}Y{{a}}Z");
    CHECK(t.render({{"a", "Q"}}) == "XQYQZ");
}

TEST_CASE("missing binding errors naming the slot") {
    auto t = PromptTemplate::from_body("t", "zh", "概念：{{concept}}");
    CHECK_THROWS_WITH_AS(t.render({}), doctest::Contains("concept"),
                         AtriError);
}

TEST_CASE("unknown binding rejected in strict mode only") {
    auto t = PromptTemplate::from_body("t", "zh", "{{a}}");
    CHECK_THROWS_AS(t.render({{"a", "x"}, {"b", "y"}}), AtriError);
    CHECK(t.render({{"a", "x"}, {"b", "y"}}, false) == "x");
}

TEST_CASE("rendered output contains no residual braces") {
    auto t = PromptTemplate::from_body("t", "zh", "{{a}} and {{b c}}");
    auto r = t.render({{"a", "1"}, {"b c", "2"}});
    CHECK(r == "1 and 2");
    CHECK(r.find("{{") == std::string::npos);
}

TEST_CASE("all known templates load in both languages") {
    for (const char* lang : {"zh", "en"}) {
        PromptLibrary lib(testutil::assets_dir(), lang);
        for (const auto& id : PromptLibrary::known_template_ids()) {
            const auto& t = lib.get(id);
            CHECK_FALSE(t.body.empty());
        }
    }
}

TEST_CASE("filter template bound with a court view contains it verbatim once") {
    auto lib = testutil::zh_prompts();
    std::string view = "本院认为，该住宅供家庭生活使用。";
    auto r = lib.get("filter_has_reason")
                 .render({{"article", "法条文本"},
                          {"concept", "户"},
                          {"court view", view}});
    CHECK(count_occurrences(r, view) == 1);
    CHECK(r.find("{{") == std::string::npos);
}

TEST_CASE("unknown template id errors") {
    auto lib = testutil::zh_prompts();
    CHECK_THROWS_AS(lib.get("no_such_template"), AtriError);
}

TEST_CASE("cot template is the zero-shot template plus the CoT cue") {
    auto lib = testutil::zh_prompts();
    CHECK(lib.get("entailment_cot").body.find(
              "Let's think step by step.") != std::string::npos);
    CHECK(lib.get("entailment_zero_shot")
              .body.find("Let's think step by step.") == std::string::npos);
}

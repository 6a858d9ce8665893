#include <doctest.h>

#include "atri/text.hpp"

using namespace atri;

TEST_CASE("normalize strips BOM and keeps CJK/ASCII intact") {
    CHECK(text::normalize("\xEF\xBB\xBFhello") == "hello");
    CHECK(text::normalize("入户盗窃") == "入户盗窃");
    CHECK(text::normalize("abc 123") == "abc 123");
}

TEST_CASE("normalize composes decomposed Hangul") {
    // U+1100 U+1161 -> U+AC00; U+1100 U+1161 U+11A8 -> U+AC01
    CHECK(text::normalize("가") == "가");
    CHECK(text::normalize("각") == "각");
    // already-composed text is untouched
    CHECK(text::normalize("가") == "가");
}

TEST_CASE("utf8 validity") {
    CHECK(text::is_valid_utf8("法律"));
    CHECK(text::is_valid_utf8(""));
    CHECK_FALSE(text::is_valid_utf8("\xFF\xFE"));
    CHECK_FALSE(text::is_valid_utf8("\xE4\xBD"));  // truncated
    CHECK_FALSE(text::is_valid_utf8("\xC0\x80"));  // overlong
}

TEST_CASE("split_sentences keeps CJK terminators, drops newlines") {
    auto s = text::split_sentences("一句。二句！三句？四句；尾巴");
    REQUIRE(s.size() == 5);
    CHECK(s[0] == "一句。");
    CHECK(s[1] == "二句！");
    CHECK(s[2] == "三句？");
    CHECK(s[3] == "四句；");
    CHECK(s[4] == "尾巴");

    auto t = text::split_sentences("a\nb\n");
    REQUIRE(t.size() == 2);
    CHECK(t[0] == "a");
    CHECK(t[1] == "b");

    CHECK(text::split_sentences("").empty());
    CHECK(text::split_sentences("。。。").empty() == false);
}

TEST_CASE("strip_whitespace removes ASCII and ideographic spaces") {
    CHECK(text::strip_whitespace(" a b\tc\nd ") == "abcd");
    CHECK(text::strip_whitespace("甲　乙") == "甲乙");  // U+3000
}

TEST_CASE("parse_cjk_number") {
    CHECK(text::parse_cjk_number("二百六十四") == 264);
    CHECK(text::parse_cjk_number("十") == 10);
    CHECK(text::parse_cjk_number("十三") == 13);
    CHECK(text::parse_cjk_number("三十") == 30);
    CHECK(text::parse_cjk_number("一千零一") == 1001);
    CHECK(text::parse_cjk_number("264") == 264);
    CHECK(text::parse_cjk_number("条") == -1);
    CHECK(text::parse_cjk_number("") == -1);
}

TEST_CASE("contains is verbatim") {
    CHECK(text::contains("被告人入户盗窃案", "入户盗窃"));
    CHECK_FALSE(text::contains("被告人入室盗窃案", "入户盗窃"));
}

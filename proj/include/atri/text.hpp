#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace atri::text {

// True if `s` is well-formed UTF-8.
bool is_valid_utf8(std::string_view s);

// Canonical-composition normalization applied to every ingested string.
// Strips a leading BOM, validates UTF-8, and composes Hangul jamo
// sequences algorithmically. CJK ideographs and ASCII are already in
// composed form, so for the corpora this pipeline handles the mapping is
// the identity on everything else.
std::string normalize(std::string_view s);

// Verbatim substring test on normalized text.
bool contains(std::string_view haystack, std::string_view needle);

// Split on CJK terminal punctuation (。！？；) plus newline. Delimiters are
// kept attached to the sentence they end. Empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view s);

// Removes all ASCII and CJK (U+3000) whitespace.
std::string strip_whitespace(std::string_view s);

// Decodes one code point starting at byte offset i; advances i. Returns
// U+FFFD on malformed input (and advances one byte).
char32_t decode_utf8(std::string_view s, size_t& i);

// Appends the UTF-8 encoding of `cp` to `out`.
void encode_utf8(char32_t cp, std::string& out);

// Parses a Chinese numeral (一二三...十百千 plus 零 and ASCII digits) to an
// integer. Returns -1 when unparseable. Used by the 第...条 citation
// fallback.
long parse_cjk_number(std::string_view s);

}  // namespace atri::text

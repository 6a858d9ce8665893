#include "atri/text.hpp"

#include <array>

namespace atri::text {

bool is_valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t len;
        char32_t cp;
        if (c < 0x80) {
            len = 1;
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong / surrogate / out of range
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

char32_t decode_utf8(std::string_view s, size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len;
    char32_t cp;
    if (c < 0x80) {
        len = 1;
        cp = c;
    } else if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (size_t k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

namespace {

constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19, kHangulVCount = 21, kHangulTCount = 28;

}  // namespace

std::string normalize(std::string_view s) {
    // strip UTF-8 BOM
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);

    std::string out;
    out.reserve(s.size());
    std::vector<char32_t> cps;
    size_t i = 0;
    while (i < s.size()) cps.push_back(decode_utf8(s, i));

    for (size_t k = 0; k < cps.size(); ++k) {
        char32_t cp = cps[k];
        // algorithmic Hangul LV / LVT composition
        if (cp >= kHangulLBase && cp < kHangulLBase + kHangulLCount &&
            k + 1 < cps.size() && cps[k + 1] >= kHangulVBase &&
            cps[k + 1] < kHangulVBase + kHangulVCount) {
            char32_t l = cp - kHangulLBase;
            char32_t v = cps[k + 1] - kHangulVBase;
            char32_t syll =
                kHangulSBase + (l * kHangulVCount + v) * kHangulTCount;
            ++k;
            if (k + 1 < cps.size() && cps[k + 1] > kHangulTBase &&
                cps[k + 1] < kHangulTBase + kHangulTCount) {
                syll += cps[k + 1] - kHangulTBase;
                ++k;
            }
            encode_utf8(syll, out);
            continue;
        }
        encode_utf8(cp, out);
    }
    return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

namespace {

bool is_sentence_terminal(char32_t cp) {
    return cp == U'。' || cp == U'！' || cp == U'？' || cp == U'；' ||
           cp == '\n';
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    size_t i = 0;
    while (i < s.size()) {
        size_t start = i;
        char32_t cp = decode_utf8(s, i);
        cur.append(s.substr(start, i - start));
        if (is_sentence_terminal(cp)) {
            if (cp == '\n') cur.pop_back();  // newline is a pure separator
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string strip_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        size_t start = i;
        char32_t cp = decode_utf8(s, i);
        if (cp == ' ' || cp == '\t' || cp == '\r' || cp == '\n' ||
            cp == U'　')
            continue;
        out.append(s.substr(start, i - start));
    }
    return out;
}

long parse_cjk_number(std::string_view s) {
    if (s.empty()) return -1;
    // ASCII digits
    if (s[0] >= '0' && s[0] <= '9') {
        long v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') return -1;
            v = v * 10 + (c - '0');
            if (v > 100000) return -1;
        }
        return v;
    }
    long total = 0, section = 0, digit = -1;
    size_t i = 0;
    while (i < s.size()) {
        char32_t cp = decode_utf8(s, i);
        long d = -1, mult = 0;
        if (cp == U'零') {  // place skip: 一百零五 = 105
            if (digit >= 0) return -1;
            continue;
        }
        switch (cp) {
            case U'一': d = 1; break;
            case U'二': d = 2; break;
            case U'三': d = 3; break;
            case U'四': d = 4; break;
            case U'五': d = 5; break;
            case U'六': d = 6; break;
            case U'七': d = 7; break;
            case U'八': d = 8; break;
            case U'九': d = 9; break;
            case U'十': mult = 10; break;
            case U'百': mult = 100; break;
            case U'千': mult = 1000; break;
            default: return -1;
        }
        if (mult > 0) {
            if (digit < 0) digit = 1;  // leading 十 means 10
            section += digit * mult;
            digit = -1;
        } else {
            if (digit >= 0) return -1;  // two adjacent digits
            digit = d;
        }
    }
    if (digit > 0) section += digit;
    total += section;
    return total > 0 ? total : -1;
}

}  // namespace atri::text

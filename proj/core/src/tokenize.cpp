#include "factgpt/tokenize.hpp"

#include <cstdint>

namespace factgpt {

namespace {

// Decodes one UTF-8 sequence starting at i. Returns the code point and
// advances i, or returns -1 for an invalid byte (advancing i by one).
std::int32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    std::int32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return -1;
    }
    if (i + len > s.size()) {
        ++i;
        return -1;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return -1;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        ++i;
        return -1;
    }
    i += len;
    return cp;
}

bool is_separator_codepoint(std::int32_t cp) {
    // Unicode whitespace outside ASCII.
    if (cp == 0x0085 || cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
        cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000) {
        return true;
    }
    if (cp >= 0x2000 && cp <= 0x206F) return true;  // General Punctuation
    if (cp >= 0x00A1 && cp <= 0x00BF) return true;  // Latin-1 punctuation/symbols
    return false;
}

void append_utf8(std::string& out, std::int32_t cp) {
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

} // namespace

TokenSeq tokenize(std::string_view text) {
    TokenSeq tokens;
    std::string current;
    const auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const std::int32_t cp = decode_utf8(text, i);
        if (cp < 0) {
            flush();
            continue;
        }
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (c >= '0' && c <= '9') {
                current.push_back(c);
            } else if (c >= 'a' && c <= 'z') {
                current.push_back(c);
            } else if (c >= 'A' && c <= 'Z') {
                current.push_back(static_cast<char>(c - 'A' + 'a'));
            } else {
                flush();
            }
        } else if (is_separator_codepoint(cp)) {
            flush();
        } else {
            append_utf8(current, cp);
        }
    }
    flush();
    return tokens;
}

} // namespace factgpt

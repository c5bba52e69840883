#include "factgpt/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cctype>

#include "factgpt/errors.hpp"

namespace factgpt {

namespace {

bool ifind(std::string_view haystack, std::string_view needle) {
    if (needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (std::tolower(static_cast<unsigned char>(haystack[i + j])) !=
                std::tolower(static_cast<unsigned char>(needle[j]))) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

} // namespace

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

bool contains_url(std::string_view text) {
    return ifind(text, "http://") || ifind(text, "https://") || ifind(text, "www.") ||
           ifind(text, "t.co/");
}

bool is_repost(std::string_view text) {
    return trim(text).substr(0, 4) == "RT @";
}

std::string normalize_for_dedupe(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || nfc == nullptr)
        raise(ErrorCode::internal, "ICU NFC normalizer unavailable");

    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfc->normalize(u, status);
    if (U_FAILURE(status)) raise(ErrorCode::internal, "ICU NFC normalization failed");
    normalized.toLower(icu::Locale::getRoot());  // locale-independent case folding

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < normalized.length();) {
        const UChar32 cp = normalized.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isUWhiteSpace(cp)) {
            pending_space = !collapsed.isEmpty();
        } else {
            if (pending_space) collapsed.append(static_cast<UChar32>(' '));
            pending_space = false;
            collapsed.append(cp);
        }
    }

    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

bool is_valid_record_id(std::string_view id) {
    if (id.empty()) return false;
    for (const char c : id) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u == 0x7F || c == '|') return false;
    }
    return true;
}

} // namespace factgpt

#pragma once

#include <string>
#include <string_view>

namespace factgpt {

std::string_view trim(std::string_view s);

/// True if the text contains any of "http://", "https://", "www." or "t.co/",
/// matched case-insensitively anywhere in the string.
bool contains_url(std::string_view text);

/// True if the trimmed text begins with the repost marker "RT @".
bool is_repost(std::string_view text);

/// Canonical form used for duplicate detection: Unicode NFC, full lowercase,
/// runs of Unicode whitespace collapsed to single spaces, outer whitespace
/// trimmed. Bytes that are not valid UTF-8 are replaced with U+FFFD.
std::string normalize_for_dedupe(std::string_view text);

/// Record ids must survive the whitespace-delimited index format and the
/// "claim|post" pair-id scheme: non-empty, no whitespace, no control
/// characters, no '|'.
bool is_valid_record_id(std::string_view id);

} // namespace factgpt

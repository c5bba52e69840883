#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace factgpt {

/// Ordered lowercase word tokens. Tokens never contain whitespace and are
/// never empty.
using TokenSeq = std::vector<std::string>;

/// Deterministic word segmentation over UTF-8 text. ASCII letters and digits
/// form tokens (letters lowercased); everything else ASCII separates. Code
/// points >= U+0080 are kept as word characters except Unicode whitespace,
/// the General Punctuation block (U+2000..U+206F) and the Latin-1
/// punctuation/symbol range (U+00A1..U+00BF), which separate. Non-ASCII
/// letters are not case-folded. Invalid UTF-8 bytes separate.
TokenSeq tokenize(std::string_view text);

} // namespace factgpt

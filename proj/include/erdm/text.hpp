#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace erdm {

using Terms = std::vector<std::string>;

/// Decode UTF-8 into Unicode scalar values. Throws ParseError on malformed input.
std::u32string utf8_decode(std::string_view text);

std::string utf8_encode(std::u32string_view text);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Lowercased tokens split on whitespace and punctuation.
///
/// A token character is an ASCII letter or digit, or any non-ASCII scalar
/// value outside the Unicode space and general-punctuation blocks. Only ASCII
/// letters are case-folded.
Terms tokenize(std::u32string_view text);
Terms tokenize(std::string_view utf8_text);

bool is_token_char(char32_t c);
bool is_space(char32_t c);

}  // namespace erdm

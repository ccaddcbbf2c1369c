#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coach::text {

/// Word tokenizer shared by the affect and engagement metrics.
///
/// Text is split on every character that is not alphanumeric. ASCII letters
/// are lowercased. Non-ASCII code points are word characters except for
/// punctuation and symbol blocks (Latin-1 punctuation, General Punctuation,
/// arrows and math symbols, CJK punctuation, fullwidth ASCII punctuation and
/// emoji), so curly apostrophes split "don’t" like "don't". Malformed UTF-8
/// bytes are separators. Empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view input);

/// True when the code point counts as a word character.
bool is_word_code_point(char32_t cp) noexcept;

std::string trim(std::string_view s);

/// Lowercases ASCII and drops everything that is not an ASCII letter or digit.
std::string fold_identifier(std::string_view s);

}  // namespace coach::text

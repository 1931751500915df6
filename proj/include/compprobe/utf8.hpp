#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace compprobe {

std::vector<std::string_view> split(std::string_view s, char sep);
void strip_bom(std::string& line);
void strip_cr(std::string& line);

namespace utf8 {

// Decodes the code point starting at byte `pos`; stores its byte length in
// `len`. Malformed sequences decode as U+FFFD with length 1.
char32_t decode(std::string_view s, std::size_t pos, std::size_t& len);

// Code point ending right before byte `pos` (pos > 0).
char32_t decode_before(std::string_view s, std::size_t pos);

// Letters, digits, underscore and non-ASCII letters count as word characters;
// whitespace, ASCII punctuation and the common Unicode punctuation blocks do not.
bool is_word_char(char32_t cp);
bool is_alpha(char32_t cp);

std::size_t length(std::string_view s);
std::size_t byte_to_char(std::string_view s, std::size_t byte_offset);
std::size_t char_to_byte(std::string_view s, std::size_t char_offset);

}  // namespace utf8
}  // namespace compprobe

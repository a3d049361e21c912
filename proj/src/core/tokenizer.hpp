#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace culturank {

/// Case-folded word tokens in input order.
struct TokenStream {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  bool operator==(const TokenStream&) const = default;
};

/// Splits `text` on Unicode default word boundaries, drops segments without
/// any letter or digit, and applies full Unicode case folding to the rest.
/// Invalid UTF-8 sequences are replaced with U+FFFD before segmentation.
TokenStream tokenize(std::string_view text);

/// Full Unicode case folding of a UTF-8 string.
std::string fold_case(std::string_view text);

/// True when `needle` occurs as a contiguous run inside `haystack`. An empty
/// needle never matches.
bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle);

}  // namespace culturank

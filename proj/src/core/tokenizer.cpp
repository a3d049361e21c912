#include "tokenizer.hpp"

#include <algorithm>
#include <memory>

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "error.hpp"

namespace culturank {
namespace {

icu::BreakIterator& word_iterator() {
  thread_local std::unique_ptr<icu::BreakIterator> iter = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status) || !it) {
      throw Error(ErrorCode::Internal, std::string("ICU word iterator: ") + u_errorName(status));
    }
    return it;
  }();
  return *iter;
}

bool has_letter_or_digit(const icu::UnicodeString& s, int32_t begin, int32_t end) {
  for (int32_t i = begin; i < end;) {
    UChar32 c = s.char32At(i);
    if (u_isalpha(c) || u_isdigit(c)) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  if (text.empty()) return out;

  const auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  auto& iter = word_iterator();
  iter.setText(ustr);

  int32_t begin = iter.first();
  for (int32_t end = iter.next(); end != icu::BreakIterator::DONE; begin = end, end = iter.next()) {
    if (!has_letter_or_digit(ustr, begin, end)) continue;
    icu::UnicodeString piece(ustr, begin, end - begin);
    piece.foldCase(U_FOLD_CASE_DEFAULT);
    std::string token;
    piece.toUTF8String(token);
    out.tokens.push_back(std::move(token));
  }
  return out;
}

std::string fold_case(std::string_view text) {
  auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  ustr.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  ustr.toUTF8String(out);
  return out;
}

bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle) {
  if (needle.empty()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace culturank

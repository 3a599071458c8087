#include "coe/textproc.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cctype>
#include <stdexcept>

namespace coe::text {
namespace {

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::string normalize_nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString dst = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
  return to_utf8(dst);
}

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_space(UChar32 c) { return c < 0 || u_isUWhiteSpace(c); }

bool is_punct(UChar32 c) { return c >= 0 && (u_ispunct(c) || (c < 0x80 && std::ispunct(c))); }

}  // namespace

nlohmann::json TokenizerConfig::to_json() const {
  return {{"lowercase", lowercase},
          {"punctuation_split", punctuation_split},
          {"unicode_normalize", unicode_normalize}};
}

std::string lowercase(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  return to_utf8(s);
}

Tokens tokenize(std::string_view text, const TokenizerConfig& config) {
  std::string buffer(text);
  if (config.unicode_normalize) buffer = normalize_nfc(buffer);
  if (config.lowercase) buffer = lowercase(buffer);

  const std::vector<CodePoint> cps = decode(buffer);
  auto slice = [&](std::size_t first, std::size_t last) {
    return buffer.substr(cps[first].begin, cps[last - 1].end - cps[first].begin);
  };

  Tokens tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i].value)) ++i;
    if (i == cps.size()) break;
    std::size_t end = i;
    while (end < cps.size() && !is_space(cps[end].value)) ++end;

    if (!config.punctuation_split) {
      tokens.push_back(slice(i, end));
      i = end;
      continue;
    }
    std::size_t lo = i;
    while (lo < end && is_punct(cps[lo].value)) {
      tokens.push_back(slice(lo, lo + 1));
      ++lo;
    }
    std::size_t hi = end;
    while (hi > lo && is_punct(cps[hi - 1].value)) --hi;
    if (hi > lo) tokens.push_back(slice(lo, hi));
    for (std::size_t p = hi; p < end; ++p) tokens.push_back(slice(p, p + 1));
    i = end;
  }
  return tokens;
}

}  // namespace coe::text

#include "hopeal/text.hpp"

#include <unicode/uchar.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>
#include <unicode/utf16.h>

#include <array>
#include <stdexcept>
#include <string_view>

namespace hopeal {
namespace {

constexpr UChar32 kReplacement = 0xFFFD;

std::vector<UChar32> decode_utf8(std::string_view s) {
  std::vector<UChar32> out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? kReplacement : c);
  }
  return out;
}

void append_utf8(std::string& out, UChar32 c) {
  std::array<uint8_t, U8_MAX_LENGTH> buf{};
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf.data(), n, U8_MAX_LENGTH, c, error);
  if (error) {
    n = 0;
    U8_APPEND_UNSAFE(buf.data(), n, kReplacement);
  }
  out.append(reinterpret_cast<const char*>(buf.data()), static_cast<std::size_t>(n));
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

char ascii_lower(UChar32 c) {
  if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return c < 0x80 ? static_cast<char>(c) : '\0';
}

bool starts_with_ci(const std::vector<UChar32>& cps, std::size_t at, std::string_view prefix) {
  if (cps.size() - at < prefix.size()) return false;
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    if (ascii_lower(cps[at + j]) != prefix[j]) return false;
  }
  return true;
}

std::vector<UChar32> strip_urls(const std::vector<UChar32>& cps) {
  std::vector<UChar32> out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    if (starts_with_ci(cps, i, "http://") || starts_with_ci(cps, i, "https://") || starts_with_ci(cps, i, "www.")) {
      while (i < cps.size() && !is_space(cps[i])) ++i;
      continue;
    }
    out.push_back(cps[i++]);
  }
  return out;
}

std::vector<UChar32> lowercase(const std::vector<UChar32>& cps) {
  std::u16string utf16;
  utf16.reserve(cps.size());
  for (UChar32 c : cps) {
    if (U_IS_SURROGATE(c)) c = kReplacement;
    if (U_IS_BMP(c)) {
      utf16.push_back(static_cast<char16_t>(c));
    } else {
      utf16.push_back(static_cast<char16_t>(U16_LEAD(c)));
      utf16.push_back(static_cast<char16_t>(U16_TRAIL(c)));
    }
  }
  if (utf16.empty()) return {};

  // Full case mapping can grow the string (e.g. U+0130 -> i + U+0307).
  std::u16string lowered(utf16.size() * 3 + 8, u'\0');
  UErrorCode status = U_ZERO_ERROR;
  int32_t n = u_strToLower(reinterpret_cast<UChar*>(lowered.data()), static_cast<int32_t>(lowered.size()),
                           reinterpret_cast<const UChar*>(utf16.data()), static_cast<int32_t>(utf16.size()), "",
                           &status);
  if (status == U_BUFFER_OVERFLOW_ERROR) {
    lowered.assign(static_cast<std::size_t>(n), u'\0');
    status = U_ZERO_ERROR;
    n = u_strToLower(reinterpret_cast<UChar*>(lowered.data()), n, reinterpret_cast<const UChar*>(utf16.data()),
                     static_cast<int32_t>(utf16.size()), "", &status);
  }
  if (U_FAILURE(status)) throw std::runtime_error(std::string("u_strToLower: ") + u_errorName(status));

  std::vector<UChar32> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int32_t i = 0; i < n;) {
    UChar32 c;
    U16_NEXT(lowered.data(), i, n, c);
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view raw) {
  const std::vector<UChar32> cps = lowercase(strip_urls(decode_utf8(raw)));

  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (UChar32 c : cps) {
    if ((U_GET_GC_MASK(c) & U_GC_P_MASK) != 0) continue;
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, c);
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (UChar32 c : decode_utf8(text)) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace hopeal

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hopeal {

/// Text normalization applied to every document before featurization:
///   1. drop URLs: maximal runs starting with "http://", "https://" or "www."
///      (ASCII case-insensitive) up to the next whitespace character;
///   2. Unicode lowercasing (root locale full case mapping);
///   3. drop every character of general category P*;
///   4. collapse whitespace runs to one U+0020 and trim both ends.
/// Ill-formed UTF-8 sequences are replaced by U+FFFD first. Idempotent.
std::string normalize(std::string_view raw);

/// Splits on Unicode whitespace; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace hopeal

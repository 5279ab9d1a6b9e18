// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Raw reference lists: splitting into citations, DOI extraction and
// normalization.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optimeta/error.hpp"
#include "optimeta/text.hpp"

namespace optimeta {

/// One line of a reference list, as the author typed it.
struct RawCitation {
  std::size_t index = 0;
  std::string text;

  friend bool operator==(const RawCitation&, const RawCitation&) = default;
};

namespace detail {

// Characters stripped from the end of a DOI suffix when they are most
// likely sentence or markup punctuation.
constexpr std::string_view kTrailingPunctuation = ".,;)>]\"'";

// Matches `10.<4-9 digits>/` at position `pos` and returns the index just
// past the slash, or npos.
inline std::size_t match_doi_prefix(std::string_view s, std::size_t pos) {
  if (pos + 3 > s.size() || s[pos] != '1' || s[pos + 1] != '0' ||
      s[pos + 2] != '.')
    return std::string_view::npos;
  std::size_t i = pos + 3;
  std::size_t digits = 0;
  while (i < s.size() && text::is_digit(s[i])) {
    ++i;
    ++digits;
  }
  if (digits < 4 || digits > 9 || i >= s.size() || s[i] != '/')
    return std::string_view::npos;
  return i + 1;
}

// Strips trailing punctuation, keeping closing brackets that balance an
// opening bracket inside the suffix, e.g. 10.1016/0002-9149(84)90001-0.
inline std::string_view strip_trailing(std::string_view suffix) {
  while (!suffix.empty() &&
         kTrailingPunctuation.find(suffix.back()) != std::string_view::npos) {
    char c = suffix.back();
    if (c == ')' || c == ']') {
      char open = c == ')' ? '(' : '[';
      auto opens = std::count(suffix.begin(), suffix.end(), open);
      auto closes = std::count(suffix.begin(), suffix.end(), c);
      if (opens >= closes) break;
    }
    suffix.remove_suffix(1);
  }
  return suffix;
}

struct DoiMatch {
  std::size_t begin;
  std::size_t end;
};

// Finds the first DOI-shaped token in `s` (case-insensitive; DOI prefixes
// are numeric so only the suffix carries case).
inline std::optional<DoiMatch> find_doi(std::string_view s) {
  for (std::size_t pos = 0; pos + 3 <= s.size(); ++pos) {
    // A DOI must not be glued onto a preceding digit or word ("110.1234/").
    if (pos > 0 && (text::is_digit(s[pos - 1]) || s[pos - 1] == '.')) continue;
    auto after_slash = match_doi_prefix(s, pos);
    if (after_slash == std::string_view::npos) continue;
    std::size_t end = after_slash;
    while (end < s.size() && !text::is_space(s[end])) ++end;
    auto suffix = strip_trailing(s.substr(after_slash, end - after_slash));
    if (suffix.empty()) continue;
    return DoiMatch{pos, after_slash + suffix.size()};
  }
  return std::nullopt;
}

}  // namespace detail

/// A normalized DOI name: no resolver prefix, lowercase.
class Doi {
 public:
  /// Extracts and normalizes the DOI inside `raw`; accepts resolver URLs,
  /// `doi:` prefixes and bare names. Throws MalformedDoi when no
  /// `10.NNNN/suffix` pattern is present.
  static Doi parse(std::string_view raw) {
    auto match = detail::find_doi(raw);
    if (!match)
      throw Error(Errc::MalformedDoi,
                  "no DOI pattern in '" + std::string(raw) + "'");
    return Doi(text::to_lower(raw.substr(match->begin, match->end - match->begin)));
  }

  const std::string& value() const noexcept { return value_; }

  /// `https://doi.org/<value>`
  std::string url() const { return "https://doi.org/" + value_; }

  /// Satisfies every Doi invariant: pattern, no prefix, lowercase.
  static bool is_normalized(std::string_view v) {
    auto match = detail::find_doi(v);
    return match && match->begin == 0 && match->end == v.size() &&
           text::to_lower(v) == v;
  }

  friend auto operator<=>(const Doi&, const Doi&) = default;

 private:
  explicit Doi(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

inline Doi normalize_doi(std::string_view raw) { return Doi::parse(raw); }

/// First DOI in the citation text, or nothing. Only the first DOI of a
/// reference is used.
inline std::optional<Doi> extract_doi(const RawCitation& citation) {
  if (!detail::find_doi(citation.text)) return std::nullopt;
  return Doi::parse(citation.text);
}

/// One citation per non-blank line, trimmed, indices 0..n-1.
inline std::vector<RawCitation> split_references(std::string_view raw_block) {
  std::vector<RawCitation> out;
  for (auto line : text::split_lines(raw_block)) {
    auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    out.push_back(RawCitation{out.size(), std::string(trimmed)});
  }
  return out;
}

}  // namespace optimeta

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

// Machine-readable landing-page metadata: Dublin Core, Highwire `citation_*`
// and geo tags in an HTML head fragment, and the GeoJSON download.
//
// Tag order follows the OJS landing page layout:
//
//   DC.temporal, DC.SpatialCoverage, geo.placename, DC.box, ISO 19139,
//   DC.PeriodOfTime, citation_journal_title, citation_author*,
//   citation_title, DC.Coverage, DC.Creator.PersonalName*, DC.Title, DC.Type

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optimeta/article.hpp"
#include "optimeta/error.hpp"
#include "optimeta/geo.hpp"
#include "optimeta/time_period.hpp"

namespace optimeta {

struct MetaTag {
  std::string name;
  std::optional<std::string> scheme;
  std::optional<std::string> lang;  // rendered as xml:lang
  std::string content;

  friend bool operator==(const MetaTag&, const MetaTag&) = default;
};

inline std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string unescape_attribute(std::string_view s) {
  static constexpr std::pair<std::string_view, char> entities[] = {
      {"&amp;", '&'}, {"&quot;", '"'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&#39;", '\''}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [entity, c] : entities) {
        if (s.substr(i, entity.size()) == entity) {
          out.push_back(c);
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

/// `name=<unit>; northlimit=<n>; southlimit=<s>; westlimit=<w>; eastlimit=<e>`
inline std::string dc_box_content(std::string_view unit_name, const BoundingBox& b) {
  return "name=" + std::string(unit_name) + "; northlimit=" + text::format_decimal(b.north) +
         "; southlimit=" + text::format_decimal(b.south) + "; westlimit=" + text::format_decimal(b.west) +
         "; eastlimit=" + text::format_decimal(b.east);
}

/// gmd:EX_GeographicBoundingBox fragment (ISO 19139), limits as gco:Decimal.
inline std::string iso19139_content(const BoundingBox& b) {
  auto element = [](std::string_view tag, double v) {
    return "<gmd:" + std::string(tag) + "><gco:Decimal>" + text::format_decimal(v) +
           "</gco:Decimal></gmd:" + std::string(tag) + ">";
  };
  return "<gmd:EX_GeographicBoundingBox>" + element("westBoundLongitude", b.west) +
         element("eastBoundLongitude", b.east) + element("southBoundLatitude", b.south) +
         element("northBoundLatitude", b.north) + "</gmd:EX_GeographicBoundingBox>";
}

/// Landing-page tags for one article. Throws MissingAdminPath when the
/// article has geometries that were never resolved to administrative units.
inline std::vector<MetaTag> emit_meta_tags(const ArticleRecord& article) {
  std::vector<MetaTag> tags;
  auto tag = [&](std::string name, std::string content, std::optional<std::string> scheme = std::nullopt,
                 std::optional<std::string> lang = std::nullopt) {
    tags.push_back(MetaTag{std::move(name), std::move(scheme), std::move(lang), std::move(content)});
  };

  std::optional<std::string> interval;
  if (article.period) interval = format_iso8601_interval(*article.period);

  const bool spatial = article.extent && !article.extent->empty();
  if (spatial && !article.extent->admin_path)
    throw Error(Errc::MissingAdminPath, "article " + article.id + " has an unresolved extent");

  if (interval) tag("DC.temporal", *interval, "ISO8601");
  std::optional<std::string> coverage;
  if (spatial) {
    const auto& path = *article.extent->admin_path;
    const AdminUnit& smallest = path.units.empty() ? earth_unit() : path.smallest();
    tag("DC.SpatialCoverage", serialize_extent(*article.extent), "GeoJSON");
    tag("geo.placename", smallest.name);
    // The root has no meaningful box; neither has a unit whose box is not known.
    if (!path.is_root_only() && smallest.bbox) {
      tag("DC.box", dc_box_content(smallest.name, *smallest.bbox));
      tag("ISO 19139", iso19139_content(*smallest.bbox));
    }
    coverage = path.units.empty() ? std::string("Earth") : text::join(path.names(), ", ");
  }
  if (interval) tag("DC.PeriodOfTime", *interval, "ISO8601");

  if (!article.journal_title.empty()) tag("citation_journal_title", article.journal_title);
  for (const auto& c : article.contributors) tag("citation_author", c.display_name);
  tag("citation_title", article.title);
  if (coverage) tag("DC.Coverage", *coverage, std::nullopt, "en");
  for (const auto& c : article.contributors) tag("DC.Creator.PersonalName", c.display_name);
  tag("DC.Title", article.title);
  tag("DC.Type", "Text.Serial.Journal");
  return tags;
}

inline std::string render_meta_tag(const MetaTag& t) {
  std::string line = "<meta name=\"" + escape_attribute(t.name) + "\"";
  if (t.scheme) line += " scheme=\"" + escape_attribute(*t.scheme) + "\"";
  if (t.lang) line += " xml:lang=\"" + escape_attribute(*t.lang) + "\"";
  line += " content=\"" + escape_attribute(t.content) + "\">";
  return line;
}

/// One `<meta ...>` line per tag, each terminated by '\n'.
inline std::string render_head_fragment(const std::vector<MetaTag>& tags) {
  std::string out;
  for (const auto& t : tags) {
    out += render_meta_tag(t);
    out += '\n';
  }
  return out;
}

/// Reads back `<meta>` elements (double-quoted attributes) from a head
/// fragment; other markup is skipped.
inline std::vector<MetaTag> parse_head_fragment(std::string_view html) {
  std::vector<MetaTag> tags;
  std::size_t pos = 0;
  while ((pos = html.find("<meta", pos)) != std::string_view::npos) {
    auto end = html.find('>', pos);
    // '>' never appears unescaped inside our attribute values
    if (end == std::string_view::npos) throw Error(Errc::ParseError, "unterminated <meta> element");
    auto element = html.substr(pos + 5, end - pos - 5);
    MetaTag tag;
    bool has_name = false;
    std::size_t i = 0;
    while (i < element.size()) {
      while (i < element.size() && text::is_space(element[i])) ++i;
      auto eq = element.find('=', i);
      if (eq == std::string_view::npos) break;
      auto attr = text::trim(element.substr(i, eq - i));
      if (eq + 1 >= element.size() || element[eq + 1] != '"')
        throw Error(Errc::ParseError, "attribute values must be double-quoted");
      auto close = element.find('"', eq + 2);
      if (close == std::string_view::npos) throw Error(Errc::ParseError, "unterminated attribute");
      auto value = unescape_attribute(element.substr(eq + 2, close - eq - 2));
      if (attr == "name") {
        tag.name = value;
        has_name = true;
      } else if (attr == "scheme") {
        tag.scheme = value;
      } else if (attr == "xml:lang") {
        tag.lang = value;
      } else if (attr == "content") {
        tag.content = value;
      }
      i = close + 1;
    }
    if (has_name) tags.push_back(std::move(tag));
    pos = end + 1;
  }
  return tags;
}

/// The stored FeatureCollection with provenance, licence and the
/// resolved administrative units. Throws NoExtent.
inline Json geojson_download(const ArticleRecord& article) {
  if (!article.extent) throw Error(Errc::NoExtent, "article " + article.id + " has no spatial extent");
  return to_json(*article.extent);
}

}  // namespace optimeta

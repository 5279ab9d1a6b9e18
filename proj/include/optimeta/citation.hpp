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

// Structured citations: the record a reference becomes after enrichment,
// the Crossref-over-OpenAlex merge and manual post-edits.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optimeta/doi.hpp"
#include "optimeta/error.hpp"
#include "optimeta/jsonutil.hpp"
#include "optimeta/text.hpp"

namespace optimeta {

/// Validates and canonicalizes an ORCID iD to `https://orcid.org/XXXX-XXXX-XXXX-XXXX`.
/// Accepts the bare iD and http/https/schemeless orcid.org forms.
inline std::optional<std::string> normalize_orcid(std::string_view raw) {
  auto s = text::trim(raw);
  for (std::string_view prefix :
       {"https://orcid.org/", "http://orcid.org/", "orcid.org/"}) {
    if (text::starts_with_icase(s, prefix)) {
      s.remove_prefix(prefix.size());
      break;
    }
  }
  if (s.size() != 19) return std::nullopt;
  std::string id(s);
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (i == 4 || i == 9 || i == 14) {
      if (id[i] != '-') return std::nullopt;
    } else if (i == 18 && (id[i] == 'x' || id[i] == 'X')) {
      id[i] = 'X';
    } else if (!text::is_digit(id[i])) {
      return std::nullopt;
    }
  }
  return "https://orcid.org/" + id;
}

inline bool is_valid_orcid_url(std::string_view url) {
  auto n = normalize_orcid(url);
  return n && *n == url;
}

struct Author {
  std::string display_name;
  std::optional<std::string> orcid;  // full https://orcid.org/ form

  friend bool operator==(const Author&, const Author&) = default;
};

enum class CitationStatus { unstructured, enriched, verified };

/// Where a field's current value came from. `extracted` marks a DOI parsed
/// out of the raw reference text.
enum class Provenance { extracted, crossref, openalex, manual };

enum class Field {
  doi,
  title,
  authors,
  journal_title,
  year,
  volume,
  issue,
  first_page,
  last_page,
};

inline constexpr std::array<Field, 9> kAllFields = {
    Field::doi,    Field::title,  Field::authors,
    Field::journal_title, Field::year, Field::volume,
    Field::issue,  Field::first_page, Field::last_page};

/// Fields filled from bibliographic sources (everything except the DOI).
inline constexpr std::array<Field, 8> kSourceFields = {
    Field::title,  Field::authors, Field::journal_title, Field::year,
    Field::volume, Field::issue,   Field::first_page,    Field::last_page};

constexpr std::string_view to_string(Field f) noexcept {
  switch (f) {
    case Field::doi: return "doi";
    case Field::title: return "title";
    case Field::authors: return "authors";
    case Field::journal_title: return "journal_title";
    case Field::year: return "year";
    case Field::volume: return "volume";
    case Field::issue: return "issue";
    case Field::first_page: return "first_page";
    case Field::last_page: return "last_page";
  }
  return "";
}

constexpr std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::extracted: return "extracted";
    case Provenance::crossref: return "crossref";
    case Provenance::openalex: return "openalex";
    case Provenance::manual: return "manual";
  }
  return "";
}

constexpr std::string_view to_string(CitationStatus s) noexcept {
  switch (s) {
    case CitationStatus::unstructured: return "unstructured";
    case CitationStatus::enriched: return "enriched";
    case CitationStatus::verified: return "verified";
  }
  return "";
}

inline std::optional<Field> field_from_string(std::string_view s) {
  for (auto f : kAllFields)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

inline Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::extracted, Provenance::crossref,
                 Provenance::openalex, Provenance::manual})
    if (to_string(p) == s) return p;
  throw Error(Errc::SchemaError, "unknown provenance '" + std::string(s) + "'");
}

inline CitationStatus status_from_string(std::string_view s) {
  for (auto st : {CitationStatus::unstructured, CitationStatus::enriched,
                  CitationStatus::verified})
    if (to_string(st) == s) return st;
  throw Error(Errc::SchemaError, "unknown citation status '" + std::string(s) + "'");
}

/// The bibliographic core one source returned for a DOI.
struct SourceCitation {
  std::optional<std::string> title;
  std::vector<Author> authors;
  std::optional<std::string> journal_title;
  std::optional<int> year;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::optional<std::string> last_page;

  friend bool operator==(const SourceCitation&, const SourceCitation&) = default;
};

struct StructuredCitation {
  RawCitation raw;
  std::optional<Doi> doi;
  std::optional<std::string> title;
  std::vector<Author> authors;
  std::optional<std::string> journal_title;
  std::optional<int> year;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> first_page;
  std::optional<std::string> last_page;
  CitationStatus status = CitationStatus::unstructured;
  std::map<Field, Provenance> sources;

  bool has(Field f) const {
    switch (f) {
      case Field::doi: return doi.has_value();
      case Field::title: return title.has_value();
      case Field::authors: return !authors.empty();
      case Field::journal_title: return journal_title.has_value();
      case Field::year: return year.has_value();
      case Field::volume: return volume.has_value();
      case Field::issue: return issue.has_value();
      case Field::first_page: return first_page.has_value();
      case Field::last_page: return last_page.has_value();
    }
    return false;
  }

  std::optional<Provenance> provenance(Field f) const {
    auto it = sources.find(f);
    if (it == sources.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const StructuredCitation&,
                         const StructuredCitation&) = default;
};

namespace detail {

inline bool source_has(const SourceCitation& s, Field f) {
  switch (f) {
    case Field::doi: return false;
    case Field::title: return s.title.has_value();
    case Field::authors: return !s.authors.empty();
    case Field::journal_title: return s.journal_title.has_value();
    case Field::year: return s.year.has_value();
    case Field::volume: return s.volume.has_value();
    case Field::issue: return s.issue.has_value();
    case Field::first_page: return s.first_page.has_value();
    case Field::last_page: return s.last_page.has_value();
  }
  return false;
}

inline void copy_field(StructuredCitation& dst, const SourceCitation& src,
                       Field f) {
  switch (f) {
    case Field::doi: break;
    case Field::title: dst.title = src.title; break;
    case Field::authors: dst.authors = src.authors; break;
    case Field::journal_title: dst.journal_title = src.journal_title; break;
    case Field::year: dst.year = src.year; break;
    case Field::volume: dst.volume = src.volume; break;
    case Field::issue: dst.issue = src.issue; break;
    case Field::first_page: dst.first_page = src.first_page; break;
    case Field::last_page: dst.last_page = src.last_page; break;
  }
}

inline void copy_field(StructuredCitation& dst, const StructuredCitation& src,
                       Field f) {
  switch (f) {
    case Field::doi: dst.doi = src.doi; break;
    case Field::title: dst.title = src.title; break;
    case Field::authors: dst.authors = src.authors; break;
    case Field::journal_title: dst.journal_title = src.journal_title; break;
    case Field::year: dst.year = src.year; break;
    case Field::volume: dst.volume = src.volume; break;
    case Field::issue: dst.issue = src.issue; break;
    case Field::first_page: dst.first_page = src.first_page; break;
    case Field::last_page: dst.last_page = src.last_page; break;
  }
}

}  // namespace detail

/// A citation that has not (yet) been looked up: raw text plus the DOI
/// extracted from it.
inline StructuredCitation unstructured_citation(const RawCitation& raw) {
  StructuredCitation c;
  c.raw = raw;
  c.doi = extract_doi(raw);
  if (c.doi) c.sources[Field::doi] = Provenance::extracted;
  return c;
}

/// Field-wise merge, Crossref first, OpenAlex filling the gaps. The author
/// list is one field: it comes whole from whichever source wins.
inline StructuredCitation merge_sources(const std::optional<SourceCitation>& crossref,
                                        const std::optional<SourceCitation>& openalex,
                                        const RawCitation& raw) {
  auto merged = unstructured_citation(raw);
  for (auto f : kSourceFields) {
    if (crossref && detail::source_has(*crossref, f)) {
      detail::copy_field(merged, *crossref, f);
      merged.sources[f] = Provenance::crossref;
    } else if (openalex && detail::source_has(*openalex, f)) {
      detail::copy_field(merged, *openalex, f);
      merged.sources[f] = Provenance::openalex;
    }
  }
  merged.status = (crossref || openalex) ? CitationStatus::enriched
                                         : CitationStatus::unstructured;
  return merged;
}

/// Re-runs the merge for an existing citation. Fields the prior record got
/// from a manual edit (and its DOI, whatever its origin) survive
/// unchanged; a verified citation drops back to enriched.
inline StructuredCitation remerge(const StructuredCitation& prior,
                                  const std::optional<SourceCitation>& crossref,
                                  const std::optional<SourceCitation>& openalex) {
  auto merged = merge_sources(crossref, openalex, prior.raw);
  merged.doi = prior.doi;
  merged.sources.erase(Field::doi);
  if (auto p = prior.provenance(Field::doi)) merged.sources[Field::doi] = *p;
  for (auto f : kSourceFields) {
    if (prior.provenance(f) == Provenance::manual) {
      detail::copy_field(merged, prior, f);
      merged.sources[f] = Provenance::manual;
    }
  }
  return merged;
}

namespace detail {

inline std::optional<std::string> opt_text(std::string_view value) {
  auto t = text::trim(value);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

inline Author parse_author_value(std::string_view value) {
  auto t = text::trim(value);
  // "Name https://orcid.org/0000-..." carries an optional trailing ORCID.
  auto sp = t.find_last_of(" \t");
  if (sp != std::string_view::npos) {
    auto tail = t.substr(sp + 1);
    if (text::starts_with_icase(tail, "https://orcid.org/") ||
        text::starts_with_icase(tail, "http://orcid.org/")) {
      auto orcid = normalize_orcid(tail);
      if (!orcid)
        throw Error(Errc::InvalidOrcid, "'" + std::string(tail) + "' is not an ORCID iD");
      return Author{std::string(text::trim(t.substr(0, sp))), orcid};
    }
  }
  return Author{std::string(t), std::nullopt};
}

}  // namespace detail

/// Applies one reviewer edit. Field names are the JSON field names
/// (`title`, `journal_title` / `venue`, `doi` / `identifier`, `year`,
/// `volume`, `issue`, `first_page`, `last_page`) plus author row
/// operations `authors.add`, `authors.<i>.name`, `authors.<i>.orcid` and
/// `authors.<i>.remove`. An empty value clears the field.
inline StructuredCitation apply_manual_edit(StructuredCitation citation,
                                            std::string_view field,
                                            std::string_view value) {
  auto mark = [&](Field f) { citation.sources[f] = Provenance::manual; };

  if (field.starts_with("authors.")) {
    auto rest = field.substr(8);
    if (rest == "add") {
      auto author = detail::parse_author_value(value);
      if (author.display_name.empty())
        throw Error(Errc::UnknownField, "authors.add needs a name");
      citation.authors.push_back(std::move(author));
      mark(Field::authors);
      return citation;
    }
    auto dot = rest.find('.');
    auto index = text::parse_int(rest.substr(0, dot));
    if (dot == std::string_view::npos || !index || *index < 0 ||
        static_cast<std::size_t>(*index) >= citation.authors.size())
      throw Error(Errc::UnknownField, "no such author field '" + std::string(field) + "'");
    auto& author = citation.authors[static_cast<std::size_t>(*index)];
    auto op = rest.substr(dot + 1);
    if (op == "name") {
      auto name = text::trim(value);
      if (name.empty())
        throw Error(Errc::UnknownField, "author name cannot be empty");
      author.display_name = std::string(name);
    } else if (op == "orcid") {
      if (text::trim(value).empty()) {
        author.orcid.reset();
      } else {
        auto orcid = normalize_orcid(value);
        if (!orcid)
          throw Error(Errc::InvalidOrcid, "'" + std::string(value) + "' is not an ORCID iD");
        author.orcid = *orcid;
      }
    } else if (op == "remove") {
      citation.authors.erase(citation.authors.begin() + *index);
    } else {
      throw Error(Errc::UnknownField, "no such author field '" + std::string(field) + "'");
    }
    mark(Field::authors);
    return citation;
  }

  std::string_view name = field;
  if (name == "venue") name = "journal_title";
  if (name == "identifier") name = "doi";
  auto f = field_from_string(name);
  if (!f || *f == Field::authors)
    throw Error(Errc::UnknownField, "'" + std::string(field) + "' is not editable");

  auto v = detail::opt_text(value);
  switch (*f) {
    case Field::doi:
      citation.doi = v ? std::optional<Doi>(Doi::parse(*v)) : std::nullopt;
      break;
    case Field::title: citation.title = v; break;
    case Field::journal_title: citation.journal_title = v; break;
    case Field::year:
      if (v) {
        auto y = text::parse_int(*v);
        if (!y || *y < 1 || *y > 9999)
          throw Error(Errc::ParseError, "year '" + *v + "' is not a Gregorian year");
        citation.year = static_cast<int>(*y);
      } else {
        citation.year.reset();
      }
      break;
    case Field::volume: citation.volume = v; break;
    case Field::issue: citation.issue = v; break;
    case Field::first_page: citation.first_page = v; break;
    case Field::last_page: citation.last_page = v; break;
    case Field::authors: break;
  }
  mark(*f);
  return citation;
}

// JSON ----------------------------------------------------------------------

inline Json to_json(const Author& a) {
  Json j = Json::object();
  j["name"] = a.display_name;
  if (a.orcid) j["orcid"] = *a.orcid;
  return j;
}

inline Author author_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw Error(Errc::SchemaError, "author needs a name");
  Author a{j["name"].get<std::string>(), jsonutil::opt_string(j, "orcid")};
  if (a.orcid && !is_valid_orcid_url(*a.orcid))
    throw Error(Errc::InvalidOrcid, *a.orcid);
  return a;
}

inline Json to_json(const StructuredCitation& c) {
  Json j = Json::object();
  j["index"] = c.raw.index;
  j["raw"] = c.raw.text;
  j["status"] = to_string(c.status);
  if (c.doi) j["doi"] = c.doi->value();
  if (c.title) j["title"] = *c.title;
  if (!c.authors.empty()) {
    Json authors = Json::array();
    for (const auto& a : c.authors) authors.push_back(to_json(a));
    j["authors"] = std::move(authors);
  }
  if (c.journal_title) j["journal_title"] = *c.journal_title;
  if (c.year) j["year"] = *c.year;
  if (c.volume) j["volume"] = *c.volume;
  if (c.issue) j["issue"] = *c.issue;
  if (c.first_page) j["first_page"] = *c.first_page;
  if (c.last_page) j["last_page"] = *c.last_page;
  Json sources = Json::object();
  for (auto f : kAllFields)
    if (auto p = c.provenance(f)) sources[std::string(to_string(f))] = to_string(*p);
  j["sources"] = std::move(sources);
  return j;
}

inline StructuredCitation citation_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::SchemaError, "citation must be an object");
  StructuredCitation c;
  try {
    c.raw.index = j.at("index").get<std::size_t>();
    c.raw.text = j.at("raw").get<std::string>();
    c.status = status_from_string(j.at("status").get<std::string>());
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
  if (auto d = jsonutil::opt_string(j, "doi")) c.doi = Doi::parse(*d);
  c.title = jsonutil::opt_string(j, "title");
  if (auto a = jsonutil::member(j, "authors"))
    for (const auto& item : *a) c.authors.push_back(author_from_json(item));
  c.journal_title = jsonutil::opt_string(j, "journal_title");
  if (auto y = jsonutil::member(j, "year"); y && y->is_number_integer())
    c.year = y->get<int>();
  c.volume = jsonutil::opt_string(j, "volume");
  c.issue = jsonutil::opt_string(j, "issue");
  c.first_page = jsonutil::opt_string(j, "first_page");
  c.last_page = jsonutil::opt_string(j, "last_page");
  if (auto s = jsonutil::member(j, "sources")) {
    for (const auto& [key, value] : s->items()) {
      auto f = field_from_string(key);
      if (!f) throw Error(Errc::SchemaError, "unknown field '" + key + "' in sources");
      c.sources[*f] = provenance_from_string(value.get<std::string>());
    }
  }
  return c;
}

}  // namespace optimeta

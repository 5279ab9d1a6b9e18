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

// Article, journal and issue records with their persisted JSON form.
//
// Schema history:
//   1  flat record: `stage` as an integer, raw reference text, GeoJSON and
//      time period stored as strings;
//   2  structured citations, extent and period (current).

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optimeta/citation.hpp"
#include "optimeta/doi.hpp"
#include "optimeta/geo.hpp"
#include "optimeta/time_period.hpp"

namespace optimeta {

inline constexpr int kRecordSchemaVersion = 2;

enum class LifecycleState { submission, review, published };

constexpr std::string_view to_string(LifecycleState s) noexcept {
  switch (s) {
    case LifecycleState::submission: return "submission";
    case LifecycleState::review: return "review";
    case LifecycleState::published: return "published";
  }
  return "";
}

inline LifecycleState lifecycle_from_string(std::string_view s) {
  for (auto st : {LifecycleState::submission, LifecycleState::review, LifecycleState::published})
    if (to_string(st) == s) return st;
  throw Error(Errc::SchemaError, "unknown lifecycle state '" + std::string(s) + "'");
}

/// Records which editor confirmed the citation list, and when.
struct Verification {
  std::string reviewer;
  std::string at;  // ISO 8601 UTC

  friend bool operator==(const Verification&, const Verification&) = default;
};

struct ArticleRecord {
  std::string id;
  std::optional<Doi> doi;
  std::string title;
  std::string abstract;
  std::vector<Author> contributors;
  std::optional<std::chrono::year_month_day> publication_date;
  std::string journal_id;
  std::string issue_id;
  std::string journal_title;
  std::vector<StructuredCitation> citations;
  std::optional<GeoExtent> extent;
  std::optional<TimePeriod> period;
  LifecycleState state = LifecycleState::submission;
  std::optional<Verification> verification;
  bool needs_resolution = false;  // admin path degraded, re-resolve later
  bool deposit_pending = false;   // last deposit attempt failed transiently
  std::optional<std::string> last_deposit_error;
};

struct JournalRecord {
  std::string id;
  std::string title;
  std::string domain;  // used in OpenCitations deposit titles
  std::vector<std::string> article_ids;
  std::vector<std::string> issue_ids;
};

struct IssueRecord {
  std::string id;
  std::string journal_id;
  std::string title;
  std::vector<std::string> article_ids;
};

inline std::string format_date(const std::chrono::year_month_day& d) {
  return text::zero_pad(static_cast<int>(d.year()), 4) + "-" +
         text::zero_pad(static_cast<unsigned>(d.month()), 2) + "-" +
         text::zero_pad(static_cast<unsigned>(d.day()), 2);
}

inline std::chrono::year_month_day parse_date(std::string_view s) {
  auto t = text::trim(s);
  auto y = t.size() == 10 && t[4] == '-' && t[7] == '-' ? text::parse_int(t.substr(0, 4)) : std::nullopt;
  auto m = y ? text::parse_int(t.substr(5, 2)) : std::nullopt;
  auto d = m ? text::parse_int(t.substr(8, 2)) : std::nullopt;
  if (!d) throw Error(Errc::ParseError, "'" + std::string(t) + "' is not a YYYY-MM-DD date");
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*y)},
                                  std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) throw Error(Errc::ParseError, "'" + std::string(t) + "' is not a calendar date");
  return ymd;
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp = std::chrono::system_clock::now()) {
  auto days = std::chrono::floor<std::chrono::days>(tp);
  std::chrono::year_month_day ymd{days};
  std::chrono::hh_mm_ss hms{std::chrono::floor<std::chrono::seconds>(tp - days)};
  return format_date(ymd) + "T" + text::zero_pad(hms.hours().count(), 2) + ":" +
         text::zero_pad(hms.minutes().count(), 2) + ":" + text::zero_pad(hms.seconds().count(), 2) + "Z";
}

inline Json to_json(const TimePeriod& p) {
  return Json{{"interval", format_iso8601_interval(p)}, {"raw", p.raw}};
}

inline TimePeriod period_from_json(const Json& j) {
  auto interval = jsonutil::opt_string(j, "interval");
  if (!interval) throw Error(Errc::SchemaError, "period has no interval");
  auto p = parse_time_period(*interval);
  p.raw = jsonutil::opt_string(j, "raw").value_or(*interval);
  return p;
}

inline Json to_json(const ArticleRecord& a) {
  Json j = Json::object();
  j["id"] = a.id;
  if (a.doi) j["doi"] = a.doi->value();
  j["title"] = a.title;
  j["abstract"] = a.abstract;
  Json contributors = Json::array();
  for (const auto& c : a.contributors) contributors.push_back(to_json(c));
  j["contributors"] = std::move(contributors);
  if (a.publication_date) j["publication_date"] = format_date(*a.publication_date);
  j["journal_id"] = a.journal_id;
  j["issue_id"] = a.issue_id;
  j["journal_title"] = a.journal_title;
  j["state"] = to_string(a.state);
  Json citations = Json::array();
  for (const auto& c : a.citations) citations.push_back(to_json(c));
  j["citations"] = std::move(citations);
  if (a.extent) j["extent"] = to_json(*a.extent);
  if (a.period) j["period"] = to_json(*a.period);
  if (a.verification) j["verification"] = {{"reviewer", a.verification->reviewer}, {"at", a.verification->at}};
  j["needs_resolution"] = a.needs_resolution;
  j["deposit_pending"] = a.deposit_pending;
  if (a.last_deposit_error) j["last_deposit_error"] = *a.last_deposit_error;
  return j;
}

inline ArticleRecord article_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::SchemaError, "article record must be an object");
  ArticleRecord a;
  try {
    a.id = j.at("id").get<std::string>();
    if (auto d = jsonutil::opt_string(j, "doi")) a.doi = Doi::parse(*d);
    a.title = j.value("title", std::string{});
    a.abstract = j.value("abstract", std::string{});
    if (auto c = jsonutil::member(j, "contributors"))
      for (const auto& item : *c) a.contributors.push_back(author_from_json(item));
    if (auto d = jsonutil::opt_string(j, "publication_date")) a.publication_date = parse_date(*d);
    a.journal_id = j.value("journal_id", std::string{});
    a.issue_id = j.value("issue_id", std::string{});
    a.journal_title = j.value("journal_title", std::string{});
    a.state = lifecycle_from_string(j.value("state", std::string("submission")));
    if (auto c = jsonutil::member(j, "citations"))
      for (const auto& item : *c) a.citations.push_back(citation_from_json(item));
    if (auto e = jsonutil::member(j, "extent")) a.extent = extent_from_json(*e);
    if (auto p = jsonutil::member(j, "period")) a.period = period_from_json(*p);
    if (auto v = jsonutil::member(j, "verification"))
      a.verification = Verification{v->at("reviewer").get<std::string>(), v->at("at").get<std::string>()};
    a.needs_resolution = j.value("needs_resolution", false);
    a.deposit_pending = j.value("deposit_pending", false);
    a.last_deposit_error = jsonutil::opt_string(j, "last_deposit_error");
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("article record: ") + e.what());
  }
  return a;
}

inline Json to_json(const JournalRecord& r) {
  return Json{{"id", r.id}, {"title", r.title}, {"domain", r.domain},
              {"article_ids", r.article_ids}, {"issue_ids", r.issue_ids}};
}

inline JournalRecord journal_from_json(const Json& j) {
  try {
    return JournalRecord{j.at("id").get<std::string>(), j.value("title", std::string{}),
                         j.value("domain", std::string{}),
                         j.value("article_ids", std::vector<std::string>{}),
                         j.value("issue_ids", std::vector<std::string>{})};
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("journal record: ") + e.what());
  }
}

inline Json to_json(const IssueRecord& r) {
  return Json{{"id", r.id}, {"journal_id", r.journal_id}, {"title", r.title},
              {"article_ids", r.article_ids}};
}

inline IssueRecord issue_from_json(const Json& j) {
  try {
    return IssueRecord{j.at("id").get<std::string>(), j.value("journal_id", std::string{}),
                       j.value("title", std::string{}),
                       j.value("article_ids", std::vector<std::string>{})};
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("issue record: ") + e.what());
  }
}

/// Upgrades a schema-1 article document to schema 2.
inline Json migrate_article_v1_to_v2(const Json& v1) {
  ArticleRecord a;
  try {
    a.id = v1.at("id").get<std::string>();
    if (auto d = jsonutil::opt_string(v1, "doi")) a.doi = Doi::parse(*d);
    a.title = v1.value("title", std::string{});
    a.abstract = v1.value("abstract", std::string{});
    for (const auto& name : v1.value("authors", std::vector<std::string>{}))
      a.contributors.push_back(Author{name, std::nullopt});
    if (auto d = jsonutil::opt_string(v1, "published")) a.publication_date = parse_date(*d);
    a.journal_id = v1.value("journal", std::string{});
    a.issue_id = v1.value("issue", std::string{});
    a.journal_title = v1.value("journal_title", std::string{});
    static constexpr LifecycleState stages[] = {LifecycleState::submission, LifecycleState::review,
                                                LifecycleState::published};
    auto stage = v1.value("stage", 0);
    if (stage < 0 || stage > 2) throw Error(Errc::SchemaError, "v1 stage out of range");
    a.state = stages[stage];
    for (const auto& raw : split_references(v1.value("references_raw", std::string{})))
      a.citations.push_back(unstructured_citation(raw));
    if (auto g = jsonutil::opt_string(v1, "geojson"); g && !g->empty()) a.extent = validate_extent(*g);
    if (auto t = jsonutil::opt_string(v1, "time_period"); t && !t->empty())
      a.period = parse_time_period(*t);
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("v1 article record: ") + e.what());
  }
  return to_json(a);
}

/// Brings a stored article document of any known schema to the current one.
inline Json migrate_article(Json doc, int from_version) {
  if (from_version > kRecordSchemaVersion)
    throw Error(Errc::SchemaError, "record schema " + std::to_string(from_version) + " is newer than supported");
  if (from_version < 1) throw Error(Errc::SchemaError, "unknown record schema");
  if (from_version == 1) doc = migrate_article_v1_to_v2(doc);
  return doc;
}

}  // namespace optimeta

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

// DOI look-ups against Crossref and OpenAlex.

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "optimeta/citation.hpp"
#include "optimeta/doi.hpp"
#include "optimeta/http.hpp"

namespace optimeta {

namespace detail {

inline std::optional<std::string> clean_text(const Json& v) {
  if (v.is_string()) {
    auto t = text::trim(v.get_ref<const std::string&>());
    if (!t.empty()) return std::string(t);
    return std::nullopt;
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return std::nullopt;
}

// Crossref carries most titles as single-element arrays.
inline std::optional<std::string> first_text(const Json& obj, std::string_view key) {
  auto m = jsonutil::member(obj, key);
  if (!m) return std::nullopt;
  if (m->is_array()) {
    for (const auto& item : *m)
      if (auto t = clean_text(item)) return t;
    return std::nullopt;
  }
  if (m->is_string()) return clean_text(*m);
  throw Error(Errc::SchemaError, "'" + std::string(key) + "' has unexpected type");
}

inline void split_pages(std::string_view pages, SourceCitation& out) {
  auto t = text::trim(pages);
  if (t.empty()) return;
  // Hyphen or en dash (U+2013, UTF-8 E2 80 93).
  std::size_t sep = t.find('-');
  std::size_t sep_len = 1;
  if (auto en = t.find("\xE2\x80\x93"); en != std::string_view::npos &&
                                        (sep == std::string_view::npos || en < sep)) {
    sep = en;
    sep_len = 3;
  }
  if (sep == std::string_view::npos) {
    out.first_page = std::string(t);
    return;
  }
  if (auto first = text::trim(t.substr(0, sep)); !first.empty()) out.first_page = std::string(first);
  if (auto last = text::trim(t.substr(sep + sep_len)); !last.empty()) out.last_page = std::string(last);
}

inline std::optional<int> crossref_year(const Json& message) {
  for (auto key : {"issued", "published", "published-print", "published-online", "created"}) {
    auto date = jsonutil::member(message, key);
    if (!date) continue;
    auto parts = jsonutil::member(*date, "date-parts");
    if (!parts || !parts->is_array() || parts->empty()) continue;
    const auto& first = (*parts)[0];
    if (!first.is_array() || first.empty() || !first[0].is_number_integer()) continue;
    return first[0].get<int>();
  }
  return std::nullopt;
}

}  // namespace detail

/// Maps the `message` object of a Crossref `/works/{doi}` response.
inline SourceCitation map_crossref_work(const Json& message) {
  if (!message.is_object())
    throw Error(Errc::SchemaError, "Crossref message is not an object");
  SourceCitation s;
  try {
    s.title = detail::first_text(message, "title");
    if (auto authors = jsonutil::member(message, "author")) {
      if (!authors->is_array()) throw Error(Errc::SchemaError, "Crossref 'author' is not an array");
      for (const auto& a : *authors) {
        if (!a.is_object()) throw Error(Errc::SchemaError, "Crossref author is not an object");
        std::string name;
        auto given = jsonutil::opt_string(a, "given");
        auto family = jsonutil::opt_string(a, "family");
        if (given && family) name = *given + " " + *family;
        else if (family) name = *family;
        else if (auto n = jsonutil::opt_string(a, "name")) name = *n;
        else if (given) name = *given;
        if (name.empty()) continue;
        std::optional<std::string> orcid;
        if (auto o = jsonutil::opt_string(a, "ORCID")) orcid = normalize_orcid(*o);
        s.authors.push_back(Author{std::move(name), orcid});
      }
    }
    s.journal_title = detail::first_text(message, "container-title");
    s.year = detail::crossref_year(message);
    if (auto v = jsonutil::member(message, "volume")) s.volume = detail::clean_text(*v);
    if (auto v = jsonutil::member(message, "issue")) s.issue = detail::clean_text(*v);
    if (auto p = jsonutil::opt_string(message, "page")) detail::split_pages(*p, s);
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
  return s;
}

/// Maps an OpenAlex work object.
inline SourceCitation map_openalex_work(const Json& work) {
  if (!work.is_object() || !work.contains("id") || !work["id"].is_string())
    throw Error(Errc::SchemaError, "OpenAlex work lacks an id");
  SourceCitation s;
  try {
    s.title = jsonutil::opt_string(work, "title");
    if (!s.title) s.title = jsonutil::opt_string(work, "display_name");
    if (auto authorships = jsonutil::member(work, "authorships")) {
      if (!authorships->is_array())
        throw Error(Errc::SchemaError, "OpenAlex 'authorships' is not an array");
      for (const auto& a : *authorships) {
        auto author = jsonutil::member(a, "author");
        if (!author) continue;
        auto name = jsonutil::opt_string(*author, "display_name");
        if (!name) continue;
        std::optional<std::string> orcid;
        if (auto o = jsonutil::opt_string(*author, "orcid")) orcid = normalize_orcid(*o);
        s.authors.push_back(Author{*name, orcid});
      }
    }
    const Json* source = nullptr;
    if (auto loc = jsonutil::member(work, "primary_location")) source = jsonutil::member(*loc, "source");
    if (source) s.journal_title = jsonutil::opt_string(*source, "display_name");
    if (!s.journal_title)
      if (auto hv = jsonutil::member(work, "host_venue")) s.journal_title = jsonutil::opt_string(*hv, "display_name");
    if (auto y = jsonutil::member(work, "publication_year"); y && y->is_number_integer())
      s.year = y->get<int>();
    if (auto biblio = jsonutil::member(work, "biblio")) {
      s.volume = jsonutil::opt_string(*biblio, "volume");
      s.issue = jsonutil::opt_string(*biblio, "issue");
      s.first_page = jsonutil::opt_string(*biblio, "first_page");
      s.last_page = jsonutil::opt_string(*biblio, "last_page");
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, e.what());
  }
  return s;
}

struct SourceConfig {
  std::string base_url;
  std::optional<std::string> mailto;
};

namespace detail {

inline std::optional<Json> fetch_json(http::Transport& transport, http::RateLimiter& limiter,
                                      http::Request request, std::string_view source) {
  auto response = limiter.run([&] { return transport.send(request); });
  if (response.status == 404) return std::nullopt;
  if (response.status == 429)
    throw Error(Errc::RateLimited, std::string(source) + " answered 429");
  if (response.status != 200)
    throw Error(Errc::TransportError,
                std::string(source) + " answered HTTP " + std::to_string(response.status));
  return jsonutil::parse(response.body, Errc::SchemaError);
}

}  // namespace detail

class CrossrefClient {
 public:
  static constexpr std::string_view kDefaultBase = "https://api.crossref.org";

  CrossrefClient(std::shared_ptr<http::Transport> transport, SourceConfig config,
                 std::shared_ptr<http::RateLimiter> limiter)
      : transport_(std::move(transport)), config_(std::move(config)), limiter_(std::move(limiter)) {
    if (config_.base_url.empty()) config_.base_url = kDefaultBase;
  }

  std::string works_url(const Doi& doi) const {
    std::vector<std::pair<std::string, std::string>> params;
    if (config_.mailto) params.emplace_back("mailto", *config_.mailto);
    return http::build_url(config_.base_url, "/works/" + text::percent_encode(doi.value(), true), params);
  }

  /// Absent on 404. Throws RateLimited on 429, TransportError on network
  /// failure or unexpected status, SchemaError on an unmappable payload.
  std::optional<SourceCitation> fetch(const Doi& doi) const {
    http::Request request{"GET", works_url(doi), {}, {}};
    request.headers.emplace("Accept", "application/json");
    if (config_.mailto)
      request.headers.emplace("User-Agent", "optimeta-cpp/1.0 (mailto:" + *config_.mailto + ")");
    auto body = detail::fetch_json(*transport_, *limiter_, std::move(request), "Crossref");
    if (!body) return std::nullopt;
    auto message = jsonutil::member(*body, "message");
    if (!message) throw Error(Errc::SchemaError, "Crossref response has no message");
    return map_crossref_work(*message);
  }

 private:
  std::shared_ptr<http::Transport> transport_;
  SourceConfig config_;
  std::shared_ptr<http::RateLimiter> limiter_;
};

class OpenAlexClient {
 public:
  static constexpr std::string_view kDefaultBase = "https://api.openalex.org";

  OpenAlexClient(std::shared_ptr<http::Transport> transport, SourceConfig config,
                 std::shared_ptr<http::RateLimiter> limiter)
      : transport_(std::move(transport)), config_(std::move(config)), limiter_(std::move(limiter)) {
    if (config_.base_url.empty()) config_.base_url = kDefaultBase;
  }

  std::string works_url(const Doi& doi) const {
    std::vector<std::pair<std::string, std::string>> params;
    if (config_.mailto) params.emplace_back("mailto", *config_.mailto);
    return http::build_url(config_.base_url,
                           "/works/doi:" + text::percent_encode(doi.value(), true), params);
  }

  std::optional<SourceCitation> fetch(const Doi& doi) const {
    http::Request request{"GET", works_url(doi), {}, {}};
    request.headers.emplace("Accept", "application/json");
    auto body = detail::fetch_json(*transport_, *limiter_, std::move(request), "OpenAlex");
    if (!body) return std::nullopt;
    return map_openalex_work(*body);
  }

 private:
  std::shared_ptr<http::Transport> transport_;
  SourceConfig config_;
  std::shared_ptr<http::RateLimiter> limiter_;
};

enum class SourceSelection { crossref, openalex, both };

inline SourceSelection source_selection_from_string(std::string_view s) {
  if (s == "crossref") return SourceSelection::crossref;
  if (s == "openalex") return SourceSelection::openalex;
  if (s == "both") return SourceSelection::both;
  throw Error(Errc::PreconditionViolated, "source must be crossref, openalex or both");
}

/// Outcome of enriching one reference. `errors` lists per-source failures;
/// the citation is still usable (possibly unstructured).
struct EnrichedItem {
  StructuredCitation citation;
  std::vector<std::string> errors;
  bool transport_failure = false;
};

inline Json to_json(const EnrichedItem& item) {
  Json j = to_json(item.citation);
  if (!item.errors.empty()) j["errors"] = item.errors;
  return j;
}

struct EnrichConfig {
  SourceConfig crossref{std::string(CrossrefClient::kDefaultBase), std::nullopt};
  SourceConfig openalex{std::string(OpenAlexClient::kDefaultBase), std::nullopt};
  SourceSelection sources = SourceSelection::both;
  http::RatePolicy policy;
};

class Enricher {
 public:
  Enricher(std::shared_ptr<const CrossrefClient> crossref,
           std::shared_ptr<const OpenAlexClient> openalex, http::RatePolicy policy,
           http::SleepFn sleep = http::real_sleep())
      : crossref_(std::move(crossref)),
        openalex_(std::move(openalex)),
        policy_(policy),
        sleep_(std::move(sleep)) {}

  /// Builds both clients over one transport, each with its own limiter.
  static Enricher create(std::shared_ptr<http::Transport> transport, const EnrichConfig& config,
                         http::SleepFn sleep = http::real_sleep()) {
    std::shared_ptr<const CrossrefClient> cr;
    std::shared_ptr<const OpenAlexClient> oa;
    if (config.sources != SourceSelection::openalex)
      cr = std::make_shared<CrossrefClient>(
          transport, config.crossref, std::make_shared<http::RateLimiter>(config.policy.min_spacing, sleep));
    if (config.sources != SourceSelection::crossref)
      oa = std::make_shared<OpenAlexClient>(
          transport, config.openalex, std::make_shared<http::RateLimiter>(config.policy.min_spacing, sleep));
    return Enricher(std::move(cr), std::move(oa), config.policy, std::move(sleep));
  }

  EnrichedItem enrich(const RawCitation& raw) const {
    return reenrich(unstructured_citation(raw));
  }

  /// Looks up the citation's current DOI and re-merges, keeping manual
  /// fields. Citations without a DOI come back unchanged.
  EnrichedItem reenrich(const StructuredCitation& prior) const {
    EnrichedItem item;
    if (!prior.doi) {
      item.citation = prior;
      if (item.citation.status == CitationStatus::verified)
        item.citation.status = CitationStatus::unstructured;
      return item;
    }
    auto cr = lookup(crossref_, *prior.doi, "crossref", item);
    auto oa = lookup(openalex_, *prior.doi, "openalex", item);
    // A failed re-run must not wipe what an earlier run found.
    if (!cr && !oa && item.transport_failure && prior.status != CitationStatus::unstructured) {
      item.citation = prior;
      return item;
    }
    item.citation = remerge(prior, cr, oa);
    return item;
  }

  /// Output index i corresponds to input index i. One failing reference
  /// never aborts the batch.
  std::vector<EnrichedItem> enrich_all(std::span<const RawCitation> citations,
                                       std::size_t workers = 1) const {
    std::vector<EnrichedItem> out(citations.size());
    run_indexed(citations.size(), workers, [&](std::size_t i) { out[i] = enrich(citations[i]); });
    return out;
  }

  std::vector<EnrichedItem> reenrich_all(std::span<const StructuredCitation> citations,
                                         std::size_t workers = 1) const {
    std::vector<EnrichedItem> out(citations.size());
    run_indexed(citations.size(), workers, [&](std::size_t i) { out[i] = reenrich(citations[i]); });
    return out;
  }

 private:
  template <typename F>
  static void run_indexed(std::size_t n, std::size_t workers, F&& body) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      });
  }

  template <typename Client>
  std::optional<SourceCitation> lookup(const std::shared_ptr<const Client>& client,
                                       const Doi& doi, std::string_view name,
                                       EnrichedItem& item) const {
    if (!client) return std::nullopt;
    try {
      return http::with_backoff(policy_, sleep_, [&] { return client->fetch(doi); });
    } catch (const Error& e) {
      item.errors.push_back(std::string(name) + ": " + e.what());
      if (is_transient(e.code())) item.transport_failure = true;
      return std::nullopt;
    }
  }

  std::shared_ptr<const CrossrefClient> crossref_;
  std::shared_ptr<const OpenAlexClient> openalex_;
  http::RatePolicy policy_;
  http::SleepFn sleep_;
};

}  // namespace optimeta

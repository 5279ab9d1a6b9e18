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

// Journal workflow over the record store: articles move
// submission -> review -> published; metadata is collected, enriched,
// verified and disseminated along the way.
//
// Every mutation of one article loads, changes and writes the record while
// holding that article's mutex, so a failed operation leaves the stored
// record untouched.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "optimeta/article.hpp"
#include "optimeta/deposit.hpp"
#include "optimeta/enrich.hpp"
#include "optimeta/gazetteer.hpp"
#include "optimeta/meta_emit.hpp"
#include "optimeta/store.hpp"

namespace optimeta {

struct WorkflowConfig {
  std::string landing_url_template = "https://journal.example/article/view/{id}";
  std::string default_domain = "journal.example";
  std::string default_provenance = "Drawn by the article authors during submission";
  std::size_t enrich_workers = 4;
};

struct DepositOutcome {
  DepositReceipt receipt;
  bool already_submitted = false;
  std::vector<SkippedCitation> skipped;
};

class Workflow {
 public:
  Workflow(std::shared_ptr<RecordStore> store, std::shared_ptr<const Enricher> enricher,
           std::shared_ptr<const GazetteerClient> gazetteer, std::shared_ptr<IssueSubmitter> submitter,
           WorkflowConfig config = {})
      : store_(std::move(store)),
        enricher_(std::move(enricher)),
        gazetteer_(std::move(gazetteer)),
        submitter_(std::move(submitter)),
        config_(std::move(config)) {}

  const WorkflowConfig& config() const { return config_; }

  std::string landing_url(std::string_view article_id) const {
    auto url = config_.landing_url_template;
    if (auto pos = url.find("{id}"); pos != std::string::npos) url.replace(pos, 4, article_id);
    return url;
  }

  // Journals and issues ------------------------------------------------------

  JournalRecord create_journal(std::string title, std::string domain) {
    std::lock_guard lock(catalogue_mutex_);
    JournalRecord j{next_id("journal", "j"), std::move(title), std::move(domain), {}, {}};
    if (j.domain.empty()) j.domain = config_.default_domain;
    put(j);
    return j;
  }

  IssueRecord create_issue(const std::string& journal_id, std::string title) {
    std::lock_guard lock(catalogue_mutex_);
    auto journal = load_journal(journal_id, Errc::InvalidReference);
    IssueRecord issue{next_id("issue", "i"), journal_id, std::move(title), {}};
    journal.issue_ids.push_back(issue.id);
    put(issue);
    put(journal);
    return issue;
  }

  JournalRecord journal(const std::string& id) const { return load_journal(id, Errc::NotFound); }
  IssueRecord issue(const std::string& id) const { return load_issue(id, Errc::NotFound); }

  // Articles -----------------------------------------------------------------

  /// Body fields: title, abstract, doi, contributors [{name, orcid}],
  /// publication_date, journal_id, issue_id. All optional.
  ArticleRecord create_article(const Json& body) {
    if (!body.is_object()) throw Error(Errc::ParseError, "article body must be a JSON object");
    ArticleRecord a;
    try {
      a.title = body.value("title", std::string{});
      a.abstract = body.value("abstract", std::string{});
      if (auto d = jsonutil::opt_string(body, "doi")) a.doi = Doi::parse(*d);
      if (auto c = jsonutil::member(body, "contributors")) {
        if (!c->is_array()) throw Error(Errc::ParseError, "contributors must be an array");
        for (const auto& item : *c) {
          auto author = author_from_json(item);
          if (author.orcid) {
            auto normalized = normalize_orcid(*author.orcid);
            if (!normalized) throw Error(Errc::InvalidOrcid, "'" + *author.orcid + "' is not an ORCID iD");
            author.orcid = *normalized;
          }
          a.contributors.push_back(std::move(author));
        }
      }
      if (auto d = jsonutil::opt_string(body, "publication_date")) a.publication_date = parse_date(*d);
      a.journal_id = body.value("journal_id", std::string{});
      a.issue_id = body.value("issue_id", std::string{});
    } catch (const Json::exception& e) {
      throw Error(Errc::ParseError, std::string("article body: ") + e.what());
    }

    std::lock_guard lock(catalogue_mutex_);
    std::optional<JournalRecord> journal;
    std::optional<IssueRecord> issue;
    if (!a.issue_id.empty()) {
      issue = load_issue(a.issue_id, Errc::InvalidReference);
      if (a.journal_id.empty()) a.journal_id = issue->journal_id;
      if (issue->journal_id != a.journal_id)
        throw Error(Errc::InvalidReference, "issue " + a.issue_id + " belongs to another journal");
    }
    if (!a.journal_id.empty()) {
      journal = load_journal(a.journal_id, Errc::InvalidReference);
      a.journal_title = journal->title;
    }
    a.id = next_id("article", "a");
    put(a);
    if (journal) {
      journal->article_ids.push_back(a.id);
      put(*journal);
    }
    if (issue) {
      issue->article_ids.push_back(a.id);
      put(*issue);
    }
    return a;
  }

  ArticleRecord article(const std::string& id) const { return load_article(id); }

  std::vector<StructuredCitation> set_references(const std::string& id, std::string_view text) {
    return mutate(id, [&](ArticleRecord& a) {
      a.citations.clear();
      for (const auto& raw : split_references(text)) a.citations.push_back(unstructured_citation(raw));
      a.verification.reset();
      return a.citations;
    });
  }

  /// Looks every citation up again; fields edited by hand survive and
  /// verified citations drop back to enriched.
  std::vector<EnrichedItem> enrich_citations(const std::string& id) {
    return mutate(id, [&](ArticleRecord& a) {
      auto items = enricher_->reenrich_all(a.citations, config_.enrich_workers);
      for (std::size_t i = 0; i < items.size(); ++i) a.citations[i] = items[i].citation;
      a.verification.reset();
      return items;
    });
  }

  using FieldEdit = std::pair<std::string, std::string>;

  /// Applies the edits in order; one bad edit rejects all of them.
  StructuredCitation edit_citation(const std::string& id, std::size_t index, const std::vector<FieldEdit>& edits) {
    return mutate(id, [&](ArticleRecord& a) {
      if (index >= a.citations.size())
        throw Error(Errc::NotFound, "article " + id + " has no citation " + std::to_string(index));
      auto edited = a.citations[index];
      for (const auto& [field, value] : edits) edited = apply_manual_edit(std::move(edited), field, value);
      if (edited.status == CitationStatus::verified) edited.status = CitationStatus::enriched;
      a.citations[index] = edited;
      return edited;
    });
  }

  /// Editor confirmation: every enriched citation becomes verified.
  ArticleRecord verify_citations(const std::string& id, std::string_view reviewer) {
    auto who = text::trim(reviewer);
    if (who.empty()) throw Error(Errc::PreconditionViolated, "verification needs a reviewer");
    return mutate(id, [&](ArticleRecord& a) {
      for (auto& c : a.citations)
        if (c.status == CitationStatus::enriched) c.status = CitationStatus::verified;
      a.verification = Verification{std::string(who), utc_timestamp()};
      return a;
    });
  }

  /// Validates and stores the extent, then resolves its administrative
  /// path. When the gazetteer fails the path degrades to [Earth] and the
  /// article is flagged for another attempt.
  ArticleRecord set_extent(const std::string& id, std::string_view geojson) {
    auto extent = validate_extent(geojson);
    if (!extent.provenance) extent.provenance = config_.default_provenance;
    return mutate(id, [&](ArticleRecord& a) {
      a.extent = std::move(extent);
      resolve(a);
      return a;
    });
  }

  /// Retries resolution for an article flagged by an earlier failure.
  ArticleRecord re_resolve(const std::string& id) {
    return mutate(id, [&](ArticleRecord& a) {
      if (a.extent) resolve(a);
      return a;
    });
  }

  AdminPath resolve_preview(std::string_view geojson) const {
    auto extent = validate_extent(geojson);
    if (extent.empty()) return root_path();
    return gazetteer_->smallest_enclosing_unit(extent);
  }

  /// `path_ids` is the constraint path as gazetteer ids, root first.
  std::vector<AdminUnit> suggest(std::string_view prefix, const std::vector<std::int64_t>& path_ids) const {
    std::optional<AdminPath> constraint;
    if (!path_ids.empty()) {
      constraint = AdminPath{};
      for (auto gid : path_ids) constraint->units.push_back(AdminUnit{"", gid, std::nullopt});
    }
    return gazetteer_->suggest_units(prefix, constraint);
  }

  /// An empty value clears the period.
  ArticleRecord set_period(const std::string& id, std::string_view raw) {
    std::optional<TimePeriod> period;
    if (!text::trim(raw).empty()) period = parse_time_period(raw);
    return mutate(id, [&](ArticleRecord& a) {
      a.period = period;
      return a;
    });
  }

  std::string head_fragment(const std::string& id) const {
    return render_head_fragment(emit_meta_tags(load_article(id)));
  }

  Json geojson(const std::string& id) const { return geojson_download(load_article(id)); }

  /// Moves the article forward. Staying put or moving back is rejected.
  ArticleRecord advance(const std::string& id, LifecycleState target) {
    return mutate(id, [&](ArticleRecord& a) {
      if (static_cast<int>(target) <= static_cast<int>(a.state))
        throw Error(Errc::IllegalTransition, "article " + id + " is " + std::string(to_string(a.state)) +
                                                 "; cannot move to " + std::string(to_string(target)));
      a.state = target;
      return a;
    });
  }

  /// Published articles only. A transient failure marks the deposit as
  /// pending for the sweep.
  DepositOutcome deposit(const std::string& id) {
    auto lock = lock_article(id);
    auto a = load_article(id);
    if (a.state != LifecycleState::published)
      throw Error(Errc::IllegalTransition, "article " + id + " is not published");
    auto payload = build_deposit(a);
    auto issue = render_issue(payload, domain_for(a));
    try {
      auto result = submitter_->submit(payload.citing_doi, issue);
      if (a.deposit_pending || a.last_deposit_error) {
        a.deposit_pending = false;
        a.last_deposit_error.reset();
        put(a);
      }
      return {result.receipt, result.already_submitted, payload.skipped};
    } catch (const Error& e) {
      a.deposit_pending = is_transient(e.code());
      a.last_deposit_error = e.what();
      put(a);
      throw;
    }
  }

  /// Re-attempts pending deposits; returns the ids that went through.
  std::vector<std::string> sweep_deposits() {
    std::vector<std::string> done;
    for (const auto& key : store_->keys_with_prefix("article:")) {
      auto id = key.substr(8);
      auto a = load_article(id);
      if (!a.deposit_pending || a.state != LifecycleState::published) continue;
      try {
        deposit(id);
        done.push_back(id);
      } catch (const Error&) {
        // stays pending (or not, if the failure was permanent)
      }
    }
    return done;
  }

  Json issue_map(const std::string& id) const { return map_of(load_issue(id, Errc::NotFound).article_ids); }
  Json journal_map(const std::string& id) const {
    return map_of(load_journal(id, Errc::NotFound).article_ids);
  }

 private:
  template <typename F>
  std::invoke_result_t<F&, ArticleRecord&> mutate(const std::string& id, F&& f) {
    auto lock = lock_article(id);
    auto a = load_article(id);
    auto result = f(a);
    put(a);
    return result;
  }

  void resolve(ArticleRecord& a) const {
    a.needs_resolution = false;
    if (a.extent->empty()) {
      a.extent->admin_path.reset();
      return;
    }
    try {
      auto path = gazetteer_->smallest_enclosing_unit(*a.extent);
      if (!path.is_root_only()) {
        try {
          path.units.back().bbox = gazetteer_->unit_bbox(path.smallest());
        } catch (const Error& e) {
          if (is_transient(e.code())) a.needs_resolution = true;
        }
      }
      a.extent->admin_path = std::move(path);
    } catch (const Error& e) {
      if (!is_transient(e.code()) && e.code() != Errc::SchemaError) throw;
      a.extent->admin_path = root_path();
      a.needs_resolution = true;
    }
  }

  Json map_of(const std::vector<std::string>& article_ids) const {
    Json features = Json::array();
    for (const auto& aid : article_ids) {
      auto a = load_article(aid);
      if (!a.extent || a.extent->empty()) continue;
      Json authors = Json::array();
      for (const auto& c : a.contributors) authors.push_back(c.display_name);
      auto doc = to_json(*a.extent);
      for (auto f : doc.at("features")) {
        Json props = f["properties"].is_object() ? f["properties"] : Json::object();
        props["article_id"] = a.id;
        props["title"] = a.title;
        props["authors"] = authors;
        props["landing_url"] = landing_url(a.id);
        f["properties"] = std::move(props);
        features.push_back(std::move(f));
      }
    }
    Json fc = Json::object();
    fc["type"] = "FeatureCollection";
    fc["features"] = std::move(features);
    fc["licence"] = std::string(kGeodataLicence);
    return fc;
  }

  std::string domain_for(const ArticleRecord& a) const {
    if (!a.journal_id.empty())
      if (auto v = store_->get("journal:" + a.journal_id)) {
        auto j = journal_from_json(jsonutil::parse(v->payload, Errc::StorageCorrupt));
        if (!j.domain.empty()) return j.domain;
      }
    return config_.default_domain;
  }

  std::unique_lock<std::mutex> lock_article(const std::string& id) {
    std::shared_ptr<std::mutex> m;
    {
      std::lock_guard lock(locks_mutex_);
      auto& slot = article_locks_[id];
      if (!slot) slot = std::make_shared<std::mutex>();
      m = slot;
    }
    // the map keeps the mutex alive for the lifetime of the workflow
    return std::unique_lock<std::mutex>(*m);
  }

  std::string next_id(const std::string& kind, std::string_view prefix) {
    auto key = "counter:" + kind;
    long long n = 0;
    if (auto v = store_->get(key)) n = std::stoll(v->payload);
    ++n;
    store_->put(key, 1, std::to_string(n));
    return std::string(prefix) + std::to_string(n);
  }

  ArticleRecord load_article(const std::string& id) const {
    auto v = store_->get("article:" + id);
    if (!v) throw Error(Errc::NotFound, "no article '" + id + "'");
    auto doc = jsonutil::parse(v->payload, Errc::StorageCorrupt);
    return article_from_json(migrate_article(std::move(doc), v->schema_version));
  }

  JournalRecord load_journal(const std::string& id, Errc missing) const {
    auto v = store_->get("journal:" + id);
    if (!v) throw Error(missing, "no journal '" + id + "'");
    return journal_from_json(jsonutil::parse(v->payload, Errc::StorageCorrupt));
  }

  IssueRecord load_issue(const std::string& id, Errc missing) const {
    auto v = store_->get("issue:" + id);
    if (!v) throw Error(missing, "no issue '" + id + "'");
    return issue_from_json(jsonutil::parse(v->payload, Errc::StorageCorrupt));
  }

  void put(const ArticleRecord& a) { store_->put("article:" + a.id, kRecordSchemaVersion, to_json(a).dump()); }
  void put(const JournalRecord& j) { store_->put("journal:" + j.id, kRecordSchemaVersion, to_json(j).dump()); }
  void put(const IssueRecord& i) { store_->put("issue:" + i.id, kRecordSchemaVersion, to_json(i).dump()); }

  std::shared_ptr<RecordStore> store_;
  std::shared_ptr<const Enricher> enricher_;
  std::shared_ptr<const GazetteerClient> gazetteer_;
  std::shared_ptr<IssueSubmitter> submitter_;
  WorkflowConfig config_;

  std::mutex catalogue_mutex_;  // counters, journals, issues
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> article_locks_;
};

}  // namespace optimeta

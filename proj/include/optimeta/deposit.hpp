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

// OpenCitations crowdsourcing deposits. One article becomes one GitHub
// issue titled `deposit <domain> doi:<citing doi>` whose body holds the
// citation CSV, the separator line and the metadata CSV.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "optimeta/article.hpp"
#include "optimeta/digest.hpp"
#include "optimeta/error.hpp"
#include "optimeta/http.hpp"
#include "optimeta/store.hpp"

namespace optimeta {

inline constexpr std::string_view kDepositSeparator = "===###===@@@===";

struct MetadataRow {
  std::string id;  // "doi:..."
  std::string title;
  std::string author;
  std::string pub_date;
  std::string venue;
  std::string volume;
  std::string issue;
  std::string page;
  std::string type;
  std::string publisher;
  std::string editor;

  friend bool operator==(const MetadataRow&, const MetadataRow&) = default;
};

struct CitationRow {
  std::string citing_id;
  std::string citing_publication_date;
  std::string cited_id;
  std::string cited_publication_date;

  friend bool operator==(const CitationRow&, const CitationRow&) = default;
};

struct SkippedCitation {
  std::size_t index = 0;  // RawCitation index
  std::string reason;     // "no_doi" or "not_enriched"

  friend bool operator==(const SkippedCitation&, const SkippedCitation&) = default;
};

struct DepositPayload {
  Doi citing_doi;
  std::vector<MetadataRow> metadata_rows;  // citing article first
  std::vector<CitationRow> citation_rows;  // input citation order
  std::vector<SkippedCitation> skipped;
};

struct RenderedIssue {
  std::string title;
  std::string body;

  friend bool operator==(const RenderedIssue&, const RenderedIssue&) = default;
};

inline std::string doi_id(const Doi& doi) { return "doi:" + doi.value(); }

/// "Family, Given [orcid:0000-...]". Names already containing a comma are
/// taken as family-first; otherwise the last word is the family name.
inline std::string format_deposit_author(const Author& a) {
  std::string name = std::string(text::trim(a.display_name));
  if (name.find(',') == std::string::npos) {
    auto sp = name.find_last_of(' ');
    if (sp != std::string::npos)
      name = name.substr(sp + 1) + ", " + std::string(text::trim(std::string_view(name).substr(0, sp)));
  }
  if (a.orcid) {
    constexpr std::string_view prefix = "https://orcid.org/";
    name += " [orcid:" + a.orcid->substr(prefix.size()) + "]";
  }
  return name;
}

inline std::string format_deposit_authors(const std::vector<Author>& authors) {
  std::vector<std::string> parts;
  for (const auto& a : authors) parts.push_back(format_deposit_author(a));
  return text::join(parts, "; ");
}

inline std::string page_range(const std::optional<std::string>& first, const std::optional<std::string>& last) {
  if (first && last && *first != *last) return *first + "-" + *last;
  if (first) return *first;
  return last.value_or("");
}

/// Throws NoCitingDoi or NothingToDeposit.
inline DepositPayload build_deposit(const ArticleRecord& article) {
  if (!article.doi) throw Error(Errc::NoCitingDoi, "article " + article.id + " has no DOI");
  DepositPayload p{*article.doi, {}, {}, {}};
  const auto citing_id = doi_id(*article.doi);
  const auto citing_date = article.publication_date ? format_date(*article.publication_date) : std::string{};

  p.metadata_rows.push_back(MetadataRow{citing_id, article.title, format_deposit_authors(article.contributors),
                                        citing_date, article.journal_title, "", "", "", "journal article", "",
                                        ""});
  std::set<std::string> ids{citing_id};
  for (const auto& c : article.citations) {
    if (!c.doi) {
      p.skipped.push_back({c.raw.index, "no_doi"});
      continue;
    }
    if (c.status == CitationStatus::unstructured) {
      p.skipped.push_back({c.raw.index, "not_enriched"});
      continue;
    }
    auto cited_id = doi_id(*c.doi);
    auto year = c.year ? text::zero_pad(*c.year, 4) : std::string{};
    p.citation_rows.push_back(CitationRow{citing_id, citing_date, cited_id, year});
    if (ids.insert(cited_id).second)
      p.metadata_rows.push_back(MetadataRow{cited_id, c.title.value_or(""), format_deposit_authors(c.authors), year,
                                            c.journal_title.value_or(""), c.volume.value_or(""),
                                            c.issue.value_or(""), page_range(c.first_page, c.last_page),
                                            "journal article", "", ""});
  }
  if (p.citation_rows.empty())
    throw Error(Errc::NothingToDeposit, "article " + article.id + " has no enriched citation with a DOI");
  return p;
}

namespace detail {

inline void csv_line(std::string& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out += ',';
    first = false;
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
}

}  // namespace detail

inline RenderedIssue render_issue(const DepositPayload& p, std::string_view domain) {
  if (p.metadata_rows.empty()) throw Error(Errc::PreconditionViolated, "payload has no metadata rows");
  RenderedIssue r;
  r.title = "deposit " + std::string(domain) + " " + doi_id(p.citing_doi);
  detail::csv_line(r.body, {"citing_id", "citing_publication_date", "cited_id", "cited_publication_date"});
  for (const auto& c : p.citation_rows)
    detail::csv_line(r.body, {c.citing_id, c.citing_publication_date, c.cited_id, c.cited_publication_date});
  r.body += kDepositSeparator;
  r.body += '\n';
  detail::csv_line(r.body,
                   {"id", "title", "author", "pub_date", "venue", "volume", "issue", "page", "type", "publisher",
                    "editor"});
  for (const auto& m : p.metadata_rows)
    detail::csv_line(r.body, {m.id, m.title, m.author, m.pub_date, m.venue, m.volume, m.issue, m.page, m.type,
                              m.publisher, m.editor});
  return r;
}

/// citing DOI + content hash of the rendered issue.
inline std::string idempotency_key(const Doi& citing_doi, const RenderedIssue& issue) {
  return citing_doi.value() + "#" + sha256_hex(issue.title + "\n" + issue.body);
}

struct DepositReceipt {
  std::string key;
  std::string citing_doi;
  std::int64_t issue_number = 0;
  std::int64_t issue_id = 0;
  std::string html_url;
  std::string submitted_at;

  friend bool operator==(const DepositReceipt&, const DepositReceipt&) = default;
};

inline Json to_json(const DepositReceipt& r) {
  return Json{{"key", r.key},           {"citing_doi", r.citing_doi}, {"issue_number", r.issue_number},
              {"issue_id", r.issue_id}, {"html_url", r.html_url},     {"submitted_at", r.submitted_at}};
}

inline DepositReceipt receipt_from_json(const Json& j) {
  try {
    return DepositReceipt{j.at("key").get<std::string>(),  j.at("citing_doi").get<std::string>(),
                          j.value("issue_number", std::int64_t{0}), j.value("issue_id", std::int64_t{0}),
                          j.value("html_url", std::string{}), j.value("submitted_at", std::string{})};
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaError, std::string("receipt: ") + e.what());
  }
}

class ReceiptStore {
 public:
  virtual ~ReceiptStore() = default;
  virtual std::optional<DepositReceipt> find(const std::string& key) const = 0;
  virtual void save(const DepositReceipt& receipt) = 0;
};

/// Receipts kept in a JSON object file (key -> receipt), rewritten atomically.
class FileReceiptStore final : public ReceiptStore {
 public:
  explicit FileReceiptStore(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    std::stringstream buf;
    buf << in.rdbuf();
    auto doc = jsonutil::parse(buf.str(), Errc::StorageCorrupt);
    if (!doc.is_object()) throw Error(Errc::StorageCorrupt, path_.string() + " is not a receipt file");
    for (const auto& [k, v] : doc.items()) receipts_.emplace(k, receipt_from_json(v));
  }

  std::optional<DepositReceipt> find(const std::string& key) const override {
    std::lock_guard lock(mutex_);
    auto it = receipts_.find(key);
    if (it == receipts_.end()) return std::nullopt;
    return it->second;
  }

  void save(const DepositReceipt& receipt) override {
    std::lock_guard lock(mutex_);
    receipts_[receipt.key] = receipt;
    Json doc = Json::object();
    for (const auto& [k, v] : receipts_) doc[k] = to_json(v);
    auto tmp = path_;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << doc.dump(2) << '\n';
      if (!out) throw Error(Errc::StorageCorrupt, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path_);
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return receipts_.size();
  }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, DepositReceipt> receipts_;
};

class RecordReceiptStore final : public ReceiptStore {
 public:
  explicit RecordReceiptStore(std::shared_ptr<RecordStore> store) : store_(std::move(store)) {}

  std::optional<DepositReceipt> find(const std::string& key) const override {
    auto v = store_->get("receipt:" + key);
    if (!v) return std::nullopt;
    return receipt_from_json(jsonutil::parse(v->payload, Errc::StorageCorrupt));
  }

  void save(const DepositReceipt& receipt) override {
    store_->put("receipt:" + receipt.key, 1, to_json(receipt).dump());
  }

 private:
  std::shared_ptr<RecordStore> store_;
};

struct RepoConfig {
  std::string api_base = "https://api.github.com";
  std::string owner = "opencitations";
  std::string repo = "crowdsourcing";
  std::optional<std::string> token;  // GITHUB_TOKEN
};

struct SubmitResult {
  DepositReceipt receipt;
  bool already_submitted = false;
};

/// Creates deposit issues in one repository, one at a time.
class IssueSubmitter {
 public:
  IssueSubmitter(std::shared_ptr<http::Transport> transport, RepoConfig repo,
                 std::shared_ptr<ReceiptStore> receipts,
                 std::function<std::string()> now = [] { return utc_timestamp(); })
      : transport_(std::move(transport)),
        repo_(std::move(repo)),
        receipts_(std::move(receipts)),
        now_(std::move(now)) {}

  const RepoConfig& repo() const { return repo_; }

  /// Resubmitting an already receipted issue makes no remote call.
  SubmitResult submit(const Doi& citing_doi, const RenderedIssue& issue) {
    std::lock_guard lock(mutex_);
    auto key = idempotency_key(citing_doi, issue);
    if (auto r = receipts_->find(key)) return {*r, true};
    if (!repo_.token || repo_.token->empty()) throw Error(Errc::AuthError, "no GitHub token configured");

    http::Request req;
    req.method = "POST";
    req.url = repo_.api_base + "/repos/" + repo_.owner + "/" + repo_.repo + "/issues";
    req.headers.emplace("Authorization", "Bearer " + *repo_.token);
    req.headers.emplace("Accept", "application/vnd.github+json");
    req.headers.emplace("Content-Type", "application/json");
    req.headers.emplace("User-Agent", "optimeta-deposit");
    req.body = Json{{"title", issue.title}, {"body", issue.body}}.dump();
    auto res = transport_->send(req);

    if (res.status == 401 || res.status == 403)
      throw Error(Errc::AuthError, "repository rejected credentials (HTTP " + std::to_string(res.status) + ")");
    if (res.status == 410 || res.status == 422)
      throw Error(Errc::RemoteRejected, "issue rejected (HTTP " + std::to_string(res.status) + ")");
    if (res.status != 201)
      throw Error(Errc::TransportError, "issue creation returned HTTP " + std::to_string(res.status));

    auto doc = jsonutil::parse(res.body, Errc::SchemaError);
    DepositReceipt receipt;
    receipt.key = key;
    receipt.citing_doi = citing_doi.value();
    try {
      receipt.issue_number = doc.at("number").get<std::int64_t>();
      receipt.issue_id = doc.value("id", std::int64_t{0});
      receipt.html_url = doc.value("html_url", std::string{});
    } catch (const Json::exception& e) {
      throw Error(Errc::SchemaError, std::string("issue response: ") + e.what());
    }
    receipt.submitted_at = now_();
    receipts_->save(receipt);
    return {receipt, false};
  }

 private:
  std::shared_ptr<http::Transport> transport_;
  RepoConfig repo_;
  std::shared_ptr<ReceiptStore> receipts_;
  std::function<std::string()> now_;
  std::mutex mutex_;
};

}  // namespace optimeta

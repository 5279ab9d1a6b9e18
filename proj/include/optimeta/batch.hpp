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

// Back-catalogue batch commands. Each reads JSONL, isolates failures per
// record and returns the process exit code:
//   0  success
//   1  some records failed (enrich: some lookup hit a transport error)
//   2  unusable input or credentials

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optimeta/deposit.hpp"
#include "optimeta/enrich.hpp"
#include "optimeta/gazetteer.hpp"
#include "optimeta/meta_emit.hpp"

namespace optimeta::batch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitInput = 2;

/// Splits a JSONL stream into lines, dropping only the final empty line.
inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

struct EnrichSummary {
  std::size_t records = 0;
  std::size_t enriched = 0;    // citations
  std::size_t no_doi = 0;      // citations
  std::size_t unresolved = 0;  // DOI found, no source knew it
  std::size_t errored = 0;     // citations with a transport failure
  std::size_t invalid = 0;     // records that were not valid input

  std::string line() const {
    return "records=" + std::to_string(records) + " enriched=" + std::to_string(enriched) +
           " no_doi=" + std::to_string(no_doi) + " unresolved=" + std::to_string(unresolved) +
           " errored=" + std::to_string(errored) + " invalid=" + std::to_string(invalid);
  }
};

/// Input lines: {"doi": "...", "raw_references": "text" | ["ref", ...]}.
/// Output: one line per input line, {"doi", "citations"} or {"error"}.
inline int run_enrich(const Enricher& enricher, std::istream& in, std::ostream& out, std::ostream& err,
                      std::size_t workers = 1, EnrichSummary* summary_out = nullptr) {
  struct Record {
    std::optional<std::string> doi;
    std::optional<std::string> error;
    std::size_t first = 0;
    std::size_t count = 0;
  };
  auto lines = read_lines(in);
  std::vector<Record> records;
  std::vector<RawCitation> all;
  EnrichSummary summary;
  summary.records = lines.size();

  for (std::size_t n = 0; n < lines.size(); ++n) {
    Record r;
    try {
      auto doc = jsonutil::parse(lines[n], Errc::ParseError);
      if (!doc.is_object()) throw Error(Errc::ParseError, "record must be a JSON object");
      r.doi = jsonutil::opt_string(doc, "doi");
      std::string text;
      if (auto refs = jsonutil::member(doc, "raw_references")) {
        if (refs->is_string()) {
          text = refs->get<std::string>();
        } else if (refs->is_array()) {
          for (const auto& item : *refs) {
            if (!item.is_string()) throw Error(Errc::ParseError, "raw_references entries must be strings");
            text += item.get<std::string>() + "\n";
          }
        } else {
          throw Error(Errc::ParseError, "raw_references must be a string or an array of strings");
        }
      }
      auto raws = split_references(text);
      r.first = all.size();
      r.count = raws.size();
      all.insert(all.end(), raws.begin(), raws.end());
    } catch (const Error& e) {
      r.error = "line " + std::to_string(n + 1) + ": " + e.what();
      ++summary.invalid;
    }
    records.push_back(std::move(r));
  }

  auto items = enricher.enrich_all(all, workers);
  bool transport_failure = false;
  for (const auto& r : records) {
    Json line = Json::object();
    if (r.doi) line["doi"] = *r.doi;
    if (r.error) {
      line["error"] = *r.error;
    } else {
      Json citations = Json::array();
      for (std::size_t i = r.first; i < r.first + r.count; ++i) {
        const auto& item = items[i];
        citations.push_back(to_json(item));
        if (item.transport_failure) {
          ++summary.errored;
          transport_failure = true;
        } else if (!item.citation.doi) {
          ++summary.no_doi;
        } else if (item.citation.status == CitationStatus::unstructured) {
          ++summary.unresolved;
        } else {
          ++summary.enriched;
        }
      }
      line["citations"] = std::move(citations);
    }
    out << line.dump() << '\n';
  }
  err << summary.line() << '\n';
  if (summary_out) *summary_out = summary;
  return transport_failure ? kExitPartial : kExitOk;
}

/// Parses one stored article line (current schema, or v1 when it carries
/// `"schema_version": 1`).
inline ArticleRecord parse_article_line(const std::string& line) {
  auto doc = jsonutil::parse(line, Errc::ParseError);
  int version = kRecordSchemaVersion;
  if (doc.is_object()) {
    if (auto v = jsonutil::member(doc, "schema_version"); v && v->is_number_integer()) {
      version = v->get<int>();
      doc.erase("schema_version");
    }
  }
  return article_from_json(migrate_article(std::move(doc), version));
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(Errc::StorageCorrupt, "cannot write " + path.string());
}

struct EmitOptions {
  std::filesystem::path out_dir = ".";
  const GazetteerClient* resolver = nullptr;  // resolves extents lacking a path
};

/// Writes `<id>.head.html` for every article and `<id>.geojson` for those
/// with an extent.
inline int run_emit(std::istream& in, const EmitOptions& options, std::ostream& err) {
  std::size_t written = 0, failed = 0;
  auto lines = read_lines(in);
  std::filesystem::create_directories(options.out_dir);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) continue;
    try {
      auto a = parse_article_line(lines[n]);
      if (a.extent && !a.extent->empty() && !a.extent->admin_path && options.resolver) {
        auto path = options.resolver->smallest_enclosing_unit(*a.extent);
        if (!path.is_root_only()) path.units.back().bbox = options.resolver->unit_bbox(path.smallest());
        a.extent->admin_path = std::move(path);
      }
      auto head = render_head_fragment(emit_meta_tags(a));
      write_file(options.out_dir / (a.id + ".head.html"), head);
      if (a.extent) write_file(options.out_dir / (a.id + ".geojson"), geojson_download(a).dump() + "\n");
      ++written;
    } catch (const Error& e) {
      ++failed;
      err << "line " << n + 1 << ": " << e.what() << '\n';
    }
  }
  err << "emitted=" << written << " failed=" << failed << '\n';
  return failed ? kExitPartial : kExitOk;
}

struct DepositOptions {
  std::string domain = "journal.example";
  std::filesystem::path out_dir = ".";
  bool dry_run = true;
  IssueSubmitter* submitter = nullptr;  // required unless dry_run
};

inline std::string issue_file_content(const RenderedIssue& issue) { return issue.title + "\n\n" + issue.body; }

/// Dry run writes `<id>.issue.md` (title, blank line, body) and never
/// touches the network.
inline int run_deposit(std::istream& in, const DepositOptions& options, std::ostream& err) {
  if (!options.dry_run) {
    if (!options.submitter) {
      err << "live deposit needs a repository configuration\n";
      return kExitInput;
    }
    if (!options.submitter->repo().token || options.submitter->repo().token->empty()) {
      err << "AuthError: GITHUB_TOKEN is not set; nothing was submitted\n";
      return kExitInput;
    }
  }
  std::size_t deposited = 0, skipped = 0, failed = 0;
  auto lines = read_lines(in);
  if (options.dry_run) std::filesystem::create_directories(options.out_dir);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) continue;
    std::string label = "line " + std::to_string(n + 1);
    try {
      auto a = parse_article_line(lines[n]);
      label = a.id;
      if (a.state != LifecycleState::published) {
        ++skipped;
        err << label << ": skipped (NotPublished)\n";
        continue;
      }
      auto payload = build_deposit(a);
      auto issue = render_issue(payload, options.domain);
      if (options.dry_run) {
        write_file(options.out_dir / (a.id + ".issue.md"), issue_file_content(issue));
        ++deposited;
        continue;
      }
      auto result = options.submitter->submit(payload.citing_doi, issue);
      if (result.already_submitted) {
        ++skipped;
        err << label << ": skipped (AlreadyDeposited, issue #" << result.receipt.issue_number << ")\n";
      } else {
        ++deposited;
        err << label << ": deposited as issue #" << result.receipt.issue_number << '\n';
      }
    } catch (const Error& e) {
      if (e.code() == Errc::NoCitingDoi || e.code() == Errc::NothingToDeposit) {
        ++skipped;
        err << label << ": skipped (" << to_string(e.code()) << ")\n";
        continue;
      }
      if (e.code() == Errc::AuthError) {
        err << label << ": " << e.what() << "; aborting\n";
        err << "deposited=" << deposited << " skipped=" << skipped << " failed=" << failed << '\n';
        return kExitInput;
      }
      ++failed;
      err << label << ": " << e.what() << '\n';
    }
  }
  err << "deposited=" << deposited << " skipped=" << skipped << " failed=" << failed << '\n';
  return failed ? kExitPartial : kExitOk;
}

}  // namespace optimeta::batch

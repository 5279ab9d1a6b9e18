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

// optimeta: batch processing of back-catalogue articles.
//
//   optimeta enrich  --input refs.jsonl [--output out.jsonl]
//   optimeta emit    --input articles.jsonl --out-dir site/
//   optimeta deposit --input articles.jsonl --dry-run --out-dir issues/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "optimeta/batch.hpp"

namespace {

using namespace optimeta;

struct CommonFlags {
  std::string input;
  std::string fixtures_dir;
  double rate = 10.0;  // requests per second per source
  int timeout_s = 10;
};

std::shared_ptr<http::Transport> make_transport(const CommonFlags& f) {
  if (!f.fixtures_dir.empty()) return http::FixtureTransport::from_directory(f.fixtures_dir);
  return std::make_shared<http::HttplibTransport>(std::chrono::seconds(f.timeout_s));
}

std::chrono::milliseconds spacing(double rate) {
  if (rate <= 0) return std::chrono::milliseconds(0);
  return std::chrono::milliseconds(static_cast<long long>(1000.0 / rate + 0.5));
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation and spatio-temporal metadata batch processor"};
  app.require_subcommand(1);
  CommonFlags common;

  // enrich
  auto* enrich = app.add_subcommand("enrich", "Extract DOIs and enrich references (JSONL in, JSONL out)");
  std::string output, source = "both", crossref_url, openalex_url, mailto;
  std::size_t workers = 4;
  enrich->add_option("--input", common.input, "JSONL of {doi, raw_references}")->required();
  enrich->add_option("--output", output, "Output JSONL (default: stdout)");
  enrich->add_option("--source", source, "crossref | openalex | both")
      ->check(CLI::IsMember({"crossref", "openalex", "both"}));
  enrich->add_option("--rate", common.rate, "Requests per second per source");
  enrich->add_option("--workers", workers, "Concurrent lookups");
  enrich->add_option("--fixtures-dir", common.fixtures_dir, "Replay recorded responses instead of the network");
  enrich->add_option("--crossref-url", crossref_url, "Crossref API base URL");
  enrich->add_option("--openalex-url", openalex_url, "OpenAlex API base URL");
  enrich->add_option("--mailto", mailto, "Contact address for polite API use");
  enrich->add_option("--timeout", common.timeout_s, "HTTP timeout in seconds");

  // emit
  auto* emit = app.add_subcommand("emit", "Write <id>.head.html and <id>.geojson per article");
  std::string out_dir = ".", geonames_url = "http://api.geonames.org", geonames_user, cache_dir;
  bool resolve = false;
  emit->add_option("--input", common.input, "JSONL of article records")->required();
  emit->add_option("--out-dir", out_dir, "Output directory");
  emit->add_flag("--resolve", resolve, "Resolve extents that lack administrative units");
  emit->add_option("--fixtures-dir", common.fixtures_dir, "Replay recorded responses instead of the network");
  emit->add_option("--geonames-url", geonames_url, "Gazetteer base URL");
  emit->add_option("--geonames-user", geonames_user, "Gazetteer username (or GEONAMES_USERNAME)");
  emit->add_option("--cache-dir", cache_dir, "Gazetteer response cache directory");
  emit->add_option("--rate", common.rate, "Gazetteer requests per second");
  emit->add_option("--timeout", common.timeout_s, "HTTP timeout in seconds");

  // deposit
  auto* deposit = app.add_subcommand("deposit", "Build OpenCitations deposits; submit them or write them out");
  std::string domain = "journal.example", repo = "opencitations/crowdsourcing", api_url = "https://api.github.com",
              receipts;
  bool dry_run = false;
  deposit->add_option("--input", common.input, "JSONL of article records")->required();
  deposit->add_option("--domain", domain, "Journal domain used in issue titles");
  deposit->add_flag("--dry-run", dry_run, "Write <id>.issue.md files; no network");
  deposit->add_option("--out-dir", out_dir, "Output directory for --dry-run");
  deposit->add_option("--repo", repo, "owner/name of the deposit repository");
  deposit->add_option("--api-url", api_url, "GitHub API base URL");
  deposit->add_option("--receipts", receipts, "Receipt file (default: <input>.receipts.json)");
  deposit->add_option("--fixtures-dir", common.fixtures_dir, "Replay recorded responses instead of the network");
  deposit->add_option("--timeout", common.timeout_s, "HTTP timeout in seconds");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(common.input);
  if (!in) {
    std::cerr << "cannot read " << common.input << '\n';
    return batch::kExitInput;
  }

  try {
    if (*enrich) {
      EnrichConfig config;
      config.sources = source_selection_from_string(source);
      if (!crossref_url.empty()) config.crossref.base_url = crossref_url;
      if (!openalex_url.empty()) config.openalex.base_url = openalex_url;
      auto contact = mailto.empty() ? env("OPTIMETA_MAILTO") : std::optional<std::string>(mailto);
      config.crossref.mailto = contact;
      config.openalex.mailto = contact;
      config.policy.min_spacing = spacing(common.rate);
      auto enricher = Enricher::create(make_transport(common), config);
      if (output.empty()) return batch::run_enrich(enricher, in, std::cout, std::cerr, workers);
      std::ofstream out(output, std::ios::trunc);
      if (!out) {
        std::cerr << "cannot write " << output << '\n';
        return batch::kExitInput;
      }
      return batch::run_enrich(enricher, in, out, std::cerr, workers);
    }

    if (*emit) {
      batch::EmitOptions options;
      options.out_dir = out_dir;
      std::unique_ptr<GazetteerClient> gazetteer;
      if (resolve) {
        GazetteerConfig config;
        config.base_url = geonames_url;
        config.username = geonames_user.empty() ? env("GEONAMES_USERNAME") : std::optional(geonames_user);
        config.min_spacing = spacing(common.rate);
        std::optional<std::filesystem::path> dir;
        if (!cache_dir.empty()) dir = cache_dir;
        auto cache = std::make_shared<ResponseCache>(std::chrono::hours(24 * 7), dir);
        gazetteer = std::make_unique<GazetteerClient>(make_transport(common), config, cache);
        options.resolver = gazetteer.get();
      }
      return batch::run_emit(in, options, std::cerr);
    }

    if (*deposit) {
      batch::DepositOptions options;
      options.domain = domain;
      options.out_dir = out_dir;
      options.dry_run = dry_run;
      std::unique_ptr<IssueSubmitter> submitter;
      if (!dry_run) {
        RepoConfig rc;
        rc.api_base = api_url;
        auto slash = repo.find('/');
        if (slash == std::string::npos) {
          std::cerr << "--repo must be owner/name\n";
          return batch::kExitInput;
        }
        rc.owner = repo.substr(0, slash);
        rc.repo = repo.substr(slash + 1);
        rc.token = env("GITHUB_TOKEN");
        auto receipt_path = receipts.empty() ? common.input + ".receipts.json" : receipts;
        submitter = std::make_unique<IssueSubmitter>(make_transport(common), rc,
                                                     std::make_shared<FileReceiptStore>(receipt_path));
        options.submitter = submitter.get();
      }
      return batch::run_deposit(in, options, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return batch::kExitInput;
  }
  return batch::kExitOk;
}

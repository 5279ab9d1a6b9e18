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

// optimeta-server: the journal workflow API.
//
// Every flag has an environment fallback (OPTIMETA_BIND, OPTIMETA_PORT,
// OPTIMETA_STORE, OPTIMETA_API_TOKEN, GEONAMES_USERNAME, GITHUB_TOKEN, ...).

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "optimeta/api.hpp"

namespace {

using namespace optimeta;

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Journal workflow API for citation and spatio-temporal metadata"};
  std::string bind = env("OPTIMETA_BIND").value_or("127.0.0.1");
  int port = std::stoi(env("OPTIMETA_PORT").value_or("8080"));
  std::string store_path = env("OPTIMETA_STORE").value_or("optimeta.db");
  std::string fixtures_dir, cache_dir;
  std::string geonames_url = "http://api.geonames.org", repo = "opencitations/crowdsourcing",
              github_url = "https://api.github.com";
  std::string landing = "https://journal.example/article/view/{id}", domain = "journal.example";
  int sweep_minutes = 0;

  app.add_option("--bind", bind, "Bind address");
  app.add_option("--port", port, "Port");
  app.add_option("--store", store_path, "SQLite database file");
  app.add_option("--fixtures-dir", fixtures_dir, "Replay recorded upstream responses (offline)");
  app.add_option("--cache-dir", cache_dir, "Gazetteer response cache directory");
  app.add_option("--geonames-url", geonames_url, "Gazetteer base URL");
  app.add_option("--repo", repo, "owner/name of the deposit repository");
  app.add_option("--github-url", github_url, "GitHub API base URL");
  app.add_option("--landing-url", landing, "Landing page URL template; {id} is replaced");
  app.add_option("--domain", domain, "Default journal domain for deposits");
  app.add_option("--sweep-minutes", sweep_minutes, "Retry pending deposits every N minutes (0: off)");
  CLI11_PARSE(app, argc, argv);

  try {
    std::shared_ptr<http::Transport> transport;
    if (!fixtures_dir.empty())
      transport = http::FixtureTransport::from_directory(fixtures_dir);
    else
      transport = std::make_shared<http::HttplibTransport>();

    auto store = std::make_shared<RecordStore>(store_path);

    EnrichConfig ec;
    ec.crossref.mailto = env("OPTIMETA_MAILTO");
    ec.openalex.mailto = ec.crossref.mailto;
    auto enricher = std::make_shared<Enricher>(Enricher::create(transport, ec));

    GazetteerConfig gc;
    gc.base_url = geonames_url;
    gc.username = env("GEONAMES_USERNAME");
    std::optional<std::filesystem::path> dir;
    if (!cache_dir.empty()) dir = cache_dir;
    auto gazetteer = std::make_shared<GazetteerClient>(
        transport, gc, std::make_shared<ResponseCache>(std::chrono::hours(24 * 7), dir));

    RepoConfig rc;
    rc.api_base = github_url;
    auto slash = repo.find('/');
    if (slash == std::string::npos) {
      std::cerr << "--repo must be owner/name\n";
      return 2;
    }
    rc.owner = repo.substr(0, slash);
    rc.repo = repo.substr(slash + 1);
    rc.token = env("GITHUB_TOKEN");
    auto submitter =
        std::make_shared<IssueSubmitter>(transport, rc, std::make_shared<RecordReceiptStore>(store));

    WorkflowConfig wc;
    wc.landing_url_template = landing;
    wc.default_domain = domain;
    auto workflow = std::make_shared<Workflow>(store, enricher, gazetteer, submitter, wc);

    std::mutex log_mutex;
    Api api(workflow, env("OPTIMETA_API_TOKEN"), [&](const Json& entry) {
      std::lock_guard lock(log_mutex);
      std::clog << entry.dump() << '\n';
    });

    httplib::Server server;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    std::jthread sweeper;
    if (sweep_minutes > 0)
      sweeper = std::jthread([&](std::stop_token stop) {
        while (!stop.stop_requested()) {
          for (int s = 0; s < sweep_minutes * 60 && !stop.stop_requested(); ++s)
            std::this_thread::sleep_for(std::chrono::seconds(1));
          if (stop.stop_requested()) break;
          for (const auto& id : workflow->sweep_deposits()) {
            std::lock_guard lock(log_mutex);
            std::clog << Json{{"ts", utc_timestamp()}, {"event", "deposit_retried"}, {"article", id}}.dump() << '\n';
          }
        }
      });

    std::clog << Json{{"ts", utc_timestamp()}, {"event", "listening"}, {"bind", bind}, {"port", port}}.dump()
              << '\n';
    if (!serve(api, server, bind, port)) {
      std::cerr << "cannot listen on " << bind << ":" << port << '\n';
      return 2;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}

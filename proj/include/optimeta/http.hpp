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

// Outbound HTTP: a transport interface with a live implementation backed by
// cpp-httplib, a fixture-replay implementation for offline runs, and the
// per-source rate limiter shared by every upstream client.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "optimeta/error.hpp"
#include "optimeta/jsonutil.hpp"
#include "optimeta/text.hpp"

namespace optimeta::http {

struct Request {
  std::string method = "GET";
  std::string url;  // absolute: scheme://host[:port]/path?query
  std::multimap<std::string, std::string> headers;
  std::string body;
};

struct Response {
  int status = 0;
  std::multimap<std::string, std::string> headers;
  std::string body;
};

/// Sends one request. Implementations throw Error(TransportError) when no
/// HTTP response was obtained at all; every status code is a Response.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response send(const Request& request) = 0;
};

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;   // begins with '/'
  std::string query;  // without '?'

  std::string origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
  }
  std::string target() const { return query.empty() ? path : path + "?" + query; }
};

inline Url parse_url(std::string_view url) {
  Url u;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos)
    throw Error(Errc::TransportError, "not an absolute URL: " + std::string(url));
  u.scheme = text::to_lower(url.substr(0, scheme_end));
  auto rest = url.substr(scheme_end + 3);
  auto path_start = rest.find_first_of("/?");
  auto authority = rest.substr(0, path_start);
  rest = path_start == std::string_view::npos ? std::string_view{} : rest.substr(path_start);
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    auto port = text::parse_int(authority.substr(colon + 1));
    if (!port) throw Error(Errc::TransportError, "bad port in " + std::string(url));
    u.port = static_cast<int>(*port);
    u.host = text::to_lower(authority.substr(0, colon));
  } else {
    u.host = text::to_lower(authority);
    u.port = u.scheme == "https" ? 443 : 80;
  }
  auto q = rest.find('?');
  u.path = std::string(rest.substr(0, q));
  if (u.path.empty()) u.path = "/";
  if (q != std::string_view::npos) u.query = std::string(rest.substr(q + 1));
  return u;
}

/// Builds `base + path` with an encoded query string from ordered params.
inline std::string build_url(std::string_view base, std::string_view path,
                             const std::vector<std::pair<std::string, std::string>>& params = {}) {
  std::string url(base);
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += path;
  char sep = url.find('?') == std::string::npos ? '?' : '&';
  for (const auto& [k, v] : params) {
    url += sep;
    url += text::percent_encode(k);
    url += '=';
    url += text::percent_encode(v);
    sep = '&';
  }
  return url;
}

/// Live transport. One httplib client per call keeps it safe for concurrent
/// use; connections are not pooled.
class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::chrono::milliseconds timeout = std::chrono::seconds(10),
                            std::string user_agent = "optimeta-cpp/1.0")
      : timeout_(timeout), user_agent_(std::move(user_agent)) {}

  Response send(const Request& request) override {
    auto url = parse_url(request.url);
    httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    if (headers.find("User-Agent") == headers.end()) headers.emplace("User-Agent", user_agent_);
    std::string content_type = "application/json";
    if (auto it = headers.find("Content-Type"); it != headers.end()) {
      content_type = it->second;
      headers.erase(it);
    }

    httplib::Result result;
    auto target = url.target();
    if (request.method == "GET") {
      result = client.Get(target, headers);
    } else if (request.method == "POST") {
      result = client.Post(target, headers, request.body, content_type);
    } else if (request.method == "PUT") {
      result = client.Put(target, headers, request.body, content_type);
    } else if (request.method == "PATCH") {
      result = client.Patch(target, headers, request.body, content_type);
    } else {
      throw Error(Errc::TransportError, "unsupported method " + request.method);
    }
    if (!result)
      throw Error(Errc::TransportError,
                  request.method + " " + request.url + ": " + httplib::to_string(result.error()));
    Response response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [k, v] : result->headers) response.headers.emplace(k, v);
    return response;
  }

 private:
  std::chrono::milliseconds timeout_;
  std::string user_agent_;
};

/// Canonical key for matching a request against recorded fixtures: method,
/// host, path and the sorted query with volatile parameters removed.
inline std::string fixture_key(std::string_view method, std::string_view url,
                               const std::set<std::string, std::less<>>& ignored_params) {
  auto u = parse_url(url);
  std::vector<std::pair<std::string, std::string>> params;
  if (!u.query.empty()) {
    std::string_view q = u.query;
    while (!q.empty()) {
      auto amp = q.find('&');
      auto pair = q.substr(0, amp);
      auto eq = pair.find('=');
      auto key = text::percent_decode(pair.substr(0, eq), true);
      auto value = eq == std::string_view::npos ? std::string{}
                                                : text::percent_decode(pair.substr(eq + 1), true);
      if (!ignored_params.contains(key)) params.emplace_back(std::move(key), std::move(value));
      if (amp == std::string_view::npos) break;
      q.remove_prefix(amp + 1);
    }
  }
  std::sort(params.begin(), params.end());
  std::string key = std::string(method) + " " + u.host + text::percent_decode(u.path);
  char sep = '?';
  for (const auto& [k, v] : params) {
    key += sep + k + "=" + v;
    sep = '&';
  }
  return key;
}

/// Replays recorded exchanges from a directory of JSON files. Each file
/// holds one exchange or `{"exchanges": [...]}`:
///
///   {"request": {"method": "GET", "url": "https://api.crossref.org/works/10.1/x"},
///    "response": {"status": 200, "body": {...}}}
///
/// `response.body` may be JSON (re-serialized compactly) or use
/// `body_text` for verbatim bytes; `{"transport_error": "..."}` simulates a
/// network failure. `responses: [...]` replays a sequence, repeating the
/// last entry. Requests without a fixture fail as TransportError.
class FixtureTransport final : public Transport {
 public:
  static inline const std::set<std::string, std::less<>> kDefaultIgnored = {
      "mailto", "username"};

  explicit FixtureTransport(std::set<std::string, std::less<>> ignored_params = kDefaultIgnored)
      : ignored_(std::move(ignored_params)) {}

  static std::shared_ptr<FixtureTransport> from_directory(const std::filesystem::path& dir) {
    auto t = std::make_shared<FixtureTransport>();
    t->load_directory(dir);
    return t;
  }

  void load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
      throw Error(Errc::TransportError, "fixture directory " + dir.string() + " not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      Json doc;
      try {
        doc = Json::parse(buf.str());
      } catch (const Json::parse_error& e) {
        throw Error(Errc::ParseError, file.string() + ": " + e.what());
      }
      if (doc.contains("exchanges")) {
        for (const auto& ex : doc["exchanges"]) add(ex);
      } else if (doc.contains("request")) {
        add(doc);
      }
    }
  }

  /// Registers one exchange in the on-disk JSON shape.
  void add(const Json& exchange) {
    const auto& req = exchange.at("request");
    auto key = fixture_key(req.value("method", "GET"), req.at("url").get<std::string>(), ignored_);
    Entry entry;
    if (exchange.contains("responses")) {
      for (const auto& r : exchange["responses"]) entry.responses.push_back(r);
    } else {
      entry.responses.push_back(exchange.at("response"));
    }
    std::lock_guard lock(mutex_);
    entries_[key] = std::move(entry);
  }

  void add(std::string_view method, std::string_view url, int status, std::string body) {
    Json exchange = {{"request", {{"method", method}, {"url", url}}},
                     {"response", {{"status", status}, {"body_text", body}}}};
    add(exchange);
  }

  Response send(const Request& request) override {
    auto key = fixture_key(request.method, request.url, ignored_);
    Json canned;
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      requests_.push_back(request);
      auto it = entries_.find(key);
      if (it == entries_.end())
        throw Error(Errc::TransportError, "no fixture for " + key);
      auto& entry = it->second;
      canned = entry.responses[std::min(entry.next, entry.responses.size() - 1)];
      if (entry.next < entry.responses.size()) ++entry.next;
    }
    if (canned.contains("transport_error"))
      throw Error(Errc::TransportError, canned["transport_error"].get<std::string>());
    Response response;
    response.status = canned.value("status", 200);
    if (canned.contains("headers"))
      for (const auto& [k, v] : canned["headers"].items()) response.headers.emplace(k, v.get<std::string>());
    if (canned.contains("body_text")) {
      response.body = canned["body_text"].get<std::string>();
    } else if (canned.contains("body")) {
      response.body = canned["body"].dump();
    }
    return response;
  }

  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

  std::vector<Request> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  struct Entry {
    std::vector<Json> responses;
    std::size_t next = 0;
  };
  std::set<std::string, std::less<>> ignored_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::size_t calls_ = 0;
  std::vector<Request> requests_;
};

/// Wraps a live transport and writes every exchange as a fixture file, for
/// recording replay sets once against the real services.
class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  Response send(const Request& request) override {
    auto response = inner_->send(request);
    Json resp = {{"status", response.status}};
    try {
      resp["body"] = Json::parse(response.body);
    } catch (const Json::parse_error&) {
      resp["body_text"] = response.body;
    }
    Json exchange = {{"request", {{"method", request.method}, {"url", request.url}}},
                     {"response", resp}};
    std::lock_guard lock(mutex_);
    auto name = text::percent_encode(
        fixture_key(request.method, request.url, FixtureTransport::kDefaultIgnored));
    if (name.size() > 180) name.resize(180);
    std::ofstream(dir_ / (name + ".json")) << exchange.dump(2) << '\n';
    return response;
  }

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

inline SleepFn real_sleep() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

/// Request pacing for one upstream source.
struct RatePolicy {
  std::chrono::milliseconds min_spacing{100};
  int max_retries = 3;                         // extra attempts after a 429
  std::chrono::milliseconds backoff_base{500};  // doubled per retry
  std::chrono::milliseconds backoff_cap{8000};

  std::chrono::milliseconds backoff(int attempt) const {
    auto d = backoff_base * (1LL << std::min(attempt, 20));
    return std::min<std::chrono::milliseconds>(d, backoff_cap);
  }
};

/// Serializes dispatch to one source (at most one request in flight) and
/// keeps at least `min_spacing` between consecutive request starts.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(std::chrono::milliseconds min_spacing, SleepFn sleep = real_sleep())
      : spacing_(min_spacing), sleep_(std::move(sleep)) {}

  template <typename F>
  auto run(F&& f) -> decltype(f()) {
    std::lock_guard lock(mutex_);
    if (started_) {
      auto due = last_start_ + spacing_;
      auto now = Clock::now();
      if (now < due)
        sleep_(std::chrono::ceil<std::chrono::milliseconds>(due - now));
    }
    last_start_ = Clock::now();
    started_ = true;
    ++dispatched_;
    return f();
  }

  std::size_t dispatched() const {
    std::lock_guard lock(mutex_);
    return dispatched_;
  }

 private:
  std::chrono::milliseconds spacing_;
  SleepFn sleep_;
  mutable std::mutex mutex_;
  Clock::time_point last_start_{};
  bool started_ = false;
  std::size_t dispatched_ = 0;
};

/// Runs `f`, retrying with exponential backoff while it throws RateLimited.
template <typename F>
auto with_backoff(const RatePolicy& policy, const SleepFn& sleep, F&& f) -> decltype(f()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() != Errc::RateLimited || attempt >= policy.max_retries) throw;
      sleep(policy.backoff(attempt));
    }
  }
}

inline std::string header_value(const Response& r, std::string_view name) {
  for (const auto& [k, v] : r.headers)
    if (text::to_lower(k) == text::to_lower(name)) return v;
  return {};
}

}  // namespace optimeta::http

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

// HTTP+JSON API over Workflow. `Api::dispatch` is transport-free so the
// routing can be exercised in-process; `serve` binds it to a socket.
// The endpoint list lives in docs/openapi.yaml.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>

#include "optimeta/workflow.hpp"

namespace optimeta {

struct ApiRequest {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::multimap<std::string, std::string> headers;
  std::string body;

  std::optional<std::string> param(std::string_view key) const {
    auto it = query.find(std::string(key));
    if (it == query.end()) return std::nullopt;
    return it->second;
  }
  std::string header(std::string_view name) const {
    for (const auto& [k, v] : headers)
      if (text::to_lower(k) == text::to_lower(name)) return v;
    return {};
  }
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

constexpr int http_status_for(Errc code) noexcept {
  switch (code) {
    case Errc::NotFound:
    case Errc::NoExtent: return 404;
    case Errc::IllegalTransition: return 409;
    case Errc::Unauthorized: return 401;
    case Errc::RateLimited: return 503;
    case Errc::StorageCorrupt: return 500;
    case Errc::TransportError:
    case Errc::SchemaError:
    case Errc::GazetteerUnavailable:
    case Errc::UnknownUnit:
    case Errc::AuthError:
    case Errc::RemoteRejected: return 502;
    default: return 422;
  }
}

inline ApiResponse json_response(int status, const Json& body) {
  return ApiResponse{status, "application/json", body.dump()};
}

inline ApiResponse error_response(const Error& e) {
  return json_response(http_status_for(e.code()),
                       Json{{"error", std::string(to_string(e.code()))}, {"message", e.detail()}});
}

class Api {
 public:
  using LogSink = std::function<void(const Json&)>;

  explicit Api(std::shared_ptr<Workflow> workflow, std::optional<std::string> token = std::nullopt,
               LogSink log = nullptr)
      : workflow_(std::move(workflow)), token_(std::move(token)), log_(std::move(log)) {}

  ApiResponse dispatch(const ApiRequest& req) {
    auto started = std::chrono::steady_clock::now();
    ApiResponse res;
    try {
      res = route(req);
    } catch (const Error& e) {
      res = error_response(e);
    } catch (const std::exception& e) {
      res = json_response(500, Json{{"error", "Internal"}, {"message", e.what()}});
    }
    if (log_) {
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      log_(Json{{"ts", utc_timestamp()},
                {"method", req.method},
                {"path", req.path},
                {"status", res.status},
                {"ms", ms}});
    }
    return res;
  }

 private:
  ApiResponse route(const ApiRequest& req) {
    auto segs = segments(req.path);
    const auto& m = req.method;
    const bool write = m == "POST" || m == "PUT" || m == "PATCH" || m == "DELETE";
    const bool preview = segs.size() == 2 && segs[0] == "gazetteer";
    if (write && !preview) authorize(req);
    auto& wf = *workflow_;
    auto n = segs.size();

    if (n == 1 && segs[0] == "health") return json_response(200, Json{{"status", "ok"}});

    if (n >= 1 && segs[0] == "journals") {
      if (n == 1 && m == "POST") {
        auto body = json_body(req);
        return json_response(201, to_json(wf.create_journal(body.value("title", std::string{}),
                                                            body.value("domain", std::string{}))));
      }
      if (n == 2 && m == "GET") return json_response(200, to_json(wf.journal(segs[1])));
      if (n == 3 && segs[2] == "map.geojson" && m == "GET") return geojson_response(wf.journal_map(segs[1]));
    }

    if (n >= 1 && segs[0] == "issues") {
      if (n == 1 && m == "POST") {
        auto body = json_body(req);
        return json_response(201, to_json(wf.create_issue(body.value("journal_id", std::string{}),
                                                          body.value("title", std::string{}))));
      }
      if (n == 2 && m == "GET") return json_response(200, to_json(wf.issue(segs[1])));
      if (n == 3 && segs[2] == "map.geojson" && m == "GET") return geojson_response(wf.issue_map(segs[1]));
    }

    if (n == 2 && segs[0] == "gazetteer") {
      if (segs[1] == "resolve" && m == "POST") {
        auto path = wf.resolve_preview(req.body);
        Json j = Json{{"administrativeUnits", to_json(path)}};
        j["coverage"] = text::join(path.names(), ", ");
        return json_response(200, j);
      }
      if (segs[1] == "suggest" && m == "GET") {
        std::vector<std::int64_t> ids;
        for (const auto& part : split(req.param("path").value_or(""), ',')) {
          auto v = text::parse_int(text::trim(part));
          if (!v) throw Error(Errc::ParseError, "path must be comma-separated gazetteer ids");
          ids.push_back(*v);
        }
        Json out = Json::array();
        for (const auto& u : wf.suggest(req.param("q").value_or(""), ids)) out.push_back(to_json(u));
        return json_response(200, out);
      }
    }

    if (n >= 1 && segs[0] == "articles") {
      if (n == 1 && m == "POST") return json_response(201, to_json(wf.create_article(json_body(req))));
      if (n < 2) return not_found();
      const auto& id = segs[1];
      if (n == 2 && m == "GET") return json_response(200, to_json(wf.article(id)));
      if (n == 3) {
        const auto& op = segs[2];
        if (op == "references" && m == "PUT") return json_response(200, citations_json(wf.set_references(id, req.body)));
        if (op == "geo" && m == "PUT") {
          auto a = wf.set_extent(id, req.body);
          return geojson_response(geojson_download(a));
        }
        if (op == "geo.geojson" && m == "GET") return geojson_response(wf.geojson(id));
        if (op == "period" && m == "PUT") {
          auto a = wf.set_period(id, req.body);
          return json_response(200, a.period ? to_json(*a.period) : Json(nullptr));
        }
        if (op == "meta.html" && m == "GET")
          return ApiResponse{200, "text/html; charset=utf-8", wf.head_fragment(id)};
        if (op == "review" && m == "POST")
          return json_response(200, to_json(wf.advance(id, LifecycleState::review)));
        if (op == "publish" && m == "POST")
          return json_response(200, to_json(wf.advance(id, LifecycleState::published)));
        if (op == "deposit" && m == "POST") {
          auto outcome = wf.deposit(id);
          Json j = to_json(outcome.receipt);
          j["already_submitted"] = outcome.already_submitted;
          Json skipped = Json::array();
          for (const auto& s : outcome.skipped) skipped.push_back(Json{{"index", s.index}, {"reason", s.reason}});
          j["skipped"] = std::move(skipped);
          return json_response(outcome.already_submitted ? 200 : 201, j);
        }
      }
      if (n == 4 && segs[2] == "citations") {
        if (segs[3] == "enrich" && m == "POST") {
          Json out = Json::array();
          for (const auto& item : wf.enrich_citations(id)) out.push_back(to_json(item));
          return json_response(200, out);
        }
        if (segs[3] == "verify" && m == "POST") {
          auto body = json_body(req);
          auto a = wf.verify_citations(id, body.value("reviewer", std::string{}));
          return json_response(200, citations_json(a.citations));
        }
        if (m == "PATCH") {
          auto index = text::parse_int(segs[3]);
          if (!index || *index < 0) return not_found();
          auto body = json_body(req);
          if (!body.is_object() || body.empty())
            throw Error(Errc::ParseError, "edit body must be an object of field: value pairs");
          std::vector<Workflow::FieldEdit> edits;
          for (const auto& [field, value] : body.items()) edits.emplace_back(field, edit_value(value));
          return json_response(200, to_json(wf.edit_citation(id, static_cast<std::size_t>(*index), edits)));
        }
      }
    }
    return not_found();
  }

  void authorize(const ApiRequest& req) const {
    if (!token_) return;
    if (req.header("Authorization") != "Bearer " + *token_)
      throw Error(Errc::Unauthorized, "missing or wrong bearer token");
  }

  static std::string edit_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(Errc::ParseError, "edit values must be strings, integers or null");
  }

  static Json json_body(const ApiRequest& req) {
    if (text::trim(req.body).empty()) return Json::object();
    auto j = jsonutil::parse(req.body, Errc::ParseError);
    if (!j.is_object()) throw Error(Errc::ParseError, "request body must be a JSON object");
    return j;
  }

  static Json citations_json(const std::vector<StructuredCitation>& cs) {
    Json out = Json::array();
    for (const auto& c : cs) out.push_back(to_json(c));
    return out;
  }

  static ApiResponse geojson_response(const Json& j) { return ApiResponse{200, "application/geo+json", j.dump()}; }

  static ApiResponse not_found() {
    return json_response(404, Json{{"error", "NotFound"}, {"message", "no such route"}});
  }

  static std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto end = s.find(sep, start);
      if (end == std::string_view::npos) end = s.size();
      if (end > start) out.emplace_back(s.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  static std::vector<std::string> segments(std::string_view path) {
    auto q = path.find('?');
    return split(path.substr(0, q), '/');
  }

  std::shared_ptr<Workflow> workflow_;
  std::optional<std::string> token_;
  LogSink log_;
};

/// Routes every request on `server` through `api`.
inline void register_routes(Api& api, httplib::Server& server) {
  auto handler = [&api](const httplib::Request& in, httplib::Response& out) {
    ApiRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) req.headers.emplace(k, v);
    req.body = in.body;
    auto res = api.dispatch(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Patch(".*", handler);
  server.Delete(".*", handler);
}

/// Serves `api` until `server.stop()`; returns false when binding fails.
inline bool serve(Api& api, httplib::Server& server, const std::string& host, int port) {
  register_routes(api, server);
  return server.listen(host, port);
}

}  // namespace optimeta

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

#include <gtest/gtest.h>

#include <random>
#include <thread>
#include <string>

#include "test_support.hpp"

namespace optimeta {
namespace {

using testing::ApiHarness;

int rank_of(const std::string& state) {
  if (state == "submission") return 0;
  if (state == "review") return 1;
  if (state == "published") return 2;
  return -1;
}

std::string new_article(ApiHarness& h, const Json& body) {
  auto res = h.call("POST", "/articles", body.dump());
  EXPECT_EQ(res.status, 201) << res.body;
  return Json::parse(res.body).at("id").get<std::string>();
}

TEST(Api, Health) {
  ApiHarness h;
  auto res = h.call("GET", "/health");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(Json::parse(res.body).at("status"), "ok");
}

TEST(Api, FullWorkflow) {
  ApiHarness h;
  auto journal = h.call_json("POST", "/journals", R"({"title":"Journal of Optimal Geolocations","domain":"jog.example"})");
  auto issue = h.call_json("POST", "/issues", Json{{"journal_id", journal["id"]}, {"title", "Vol. 1"}}.dump());
  auto id = new_article(h, Json{{"title", "Test 3: Three"},
                                {"doi", "10.5555/optimeta.1"},
                                {"publication_date", "2022-06-30"},
                                {"issue_id", issue["id"]},
                                {"contributors", Json::array({{{"name", "C Contributor"}}})}});

  auto refs = h.call("PUT", "/articles/" + id + "/references", testing::kRioReference);
  ASSERT_EQ(refs.status, 200) << refs.body;
  EXPECT_EQ(Json::parse(refs.body).at(0).at("status"), "unstructured");

  auto enriched = h.call_json("POST", "/articles/" + id + "/citations/enrich");
  auto c = enriched.at(0);
  EXPECT_EQ(c.at("status"), "enriched");
  EXPECT_EQ(c.at("year"), 2021);
  EXPECT_EQ(c.at("authors").size(), 4u);

  auto geo = h.call("PUT", "/articles/" + id + "/geo", testing::italy_geojson());
  ASSERT_EQ(geo.status, 200) << geo.body;
  EXPECT_EQ(geo.content_type, "application/geo+json");
  auto g = Json::parse(geo.body);
  EXPECT_EQ(g.at("licence"), "CC-0");
  EXPECT_EQ(g.at("provenance"), "Drawn by the article authors during submission");
  EXPECT_EQ(g.at("administrativeUnits").size(), 3u);

  auto period = h.call_json("PUT", "/articles/" + id + "/period", "2022-08-01 - 2022-08-10");
  EXPECT_EQ(period.at("interval"), "2022-08-01/2022-08-10");

  auto meta = h.call("GET", "/articles/" + id + "/meta.html");
  EXPECT_EQ(meta.status, 200);
  EXPECT_EQ(meta.content_type, "text/html; charset=utf-8");
  EXPECT_NE(meta.body.find(R"(name="DC.temporal" scheme="ISO8601" content="2022-08-01/2022-08-10")"), std::string::npos);
  EXPECT_NE(meta.body.find(R"(content="Earth, Europe, Italian Republic")"), std::string::npos);
  EXPECT_NE(meta.body.find(R"(<meta name="citation_journal_title" content="Journal of Optimal Geolocations">)"),
            std::string::npos);

  auto verified = h.call_json("POST", "/articles/" + id + "/citations/verify", R"({"reviewer":"editor"})");
  EXPECT_EQ(verified.at(0).at("status"), "verified");

  EXPECT_EQ(h.call("POST", "/articles/" + id + "/review").status, 200);
  EXPECT_EQ(h.call("POST", "/articles/" + id + "/publish").status, 200);

  auto dep = h.call("POST", "/articles/" + id + "/deposit");
  ASSERT_EQ(dep.status, 201) << dep.body;
  auto receipt = Json::parse(dep.body);
  EXPECT_EQ(receipt.at("issue_number"), 41);
  EXPECT_EQ(receipt.at("already_submitted"), false);
  auto sent = Json::parse(h.transport->requests().back().body);
  EXPECT_EQ(sent.at("title"), "deposit jog.example doi:10.5555/optimeta.1");

  auto again = h.call("POST", "/articles/" + id + "/deposit");
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(Json::parse(again.body).at("already_submitted"), true);
  EXPECT_EQ(Json::parse(again.body).at("issue_number"), 41);
}

TEST(Api, DepositBeforePublishIsConflict) {
  ApiHarness h;
  auto id = new_article(h, Json{{"title", "t"}, {"doi", "10.5555/optimeta.2"}});
  h.call("PUT", "/articles/" + id + "/references", testing::kRioReference);
  h.call("POST", "/articles/" + id + "/citations/enrich");
  auto before = h.transport->calls();
  auto res = h.call("POST", "/articles/" + id + "/deposit");
  EXPECT_EQ(res.status, 409);
  EXPECT_EQ(Json::parse(res.body).at("error"), "IllegalTransition");
  h.call("POST", "/articles/" + id + "/review");
  EXPECT_EQ(h.call("POST", "/articles/" + id + "/deposit").status, 409);
  EXPECT_EQ(h.transport->calls(), before);
}

// Random request sequences over one article; the state never moves back.
TEST(Api, LifecycleNeverMovesBackward) {
  std::mt19937 rng(665);
  const std::vector<std::pair<std::string, std::string>> ops = {
      {"POST", "review"},           {"POST", "publish"},          {"POST", "deposit"},
      {"PUT", "references"},        {"PUT", "period"},            {"PUT", "geo"},
      {"POST", "citations/enrich"}, {"POST", "citations/verify"}, {"PATCH", "citations/0"},
      {"POST", "submission"},       {"PATCH", "state"},           {"PUT", "state"}};
  for (int run = 0; run < 40; ++run) {
    ApiHarness h;
    auto id = new_article(h, Json{{"title", "t"}, {"doi", "10.5555/optimeta.3"}});
    int rank = 0;
    bool reached_published = false;
    for (int step = 0; step < 25; ++step) {
      const auto& [method, op] = ops[rng() % ops.size()];
      std::string body;
      if (op == "references") body = testing::kRioReference;
      if (op == "period") body = "2022-06-27 - 2022-06-30";
      if (op == "geo") body = testing::italy_geojson();
      if (op == "citations/verify") body = R"({"reviewer":"editor"})";
      if (op == "citations/0") body = R"({"volume":"7"})";
      if (op == "state" || op == "submission") body = R"({"state":"submission"})";
      auto res = h.call(method, "/articles/" + id + "/" + op, body);
      EXPECT_LT(res.status, 500) << method << " " << op << ": " << res.body;
      if (op == "review") {
        EXPECT_EQ(res.status, rank < 1 ? 200 : 409);
      } else if (op == "publish") {
        EXPECT_EQ(res.status, rank < 2 ? 200 : 409);
      } else if (op == "deposit" && rank < 2) {
        EXPECT_EQ(res.status, 409);
      }

      int now = rank_of(h.call_json("GET", "/articles/" + id).at("state").get<std::string>());
      ASSERT_GE(now, rank) << "moved back after " << method << " " << op;
      rank = now;
      reached_published = reached_published || rank == 2;
      if (reached_published) {
        ASSERT_EQ(rank, 2);
      }
    }
  }
}

TEST(Api, NotFoundAndValidation) {
  ApiHarness h;
  EXPECT_EQ(h.call("GET", "/articles/a404").status, 404);
  EXPECT_EQ(h.call("GET", "/articles/a404/meta.html").status, 404);
  EXPECT_EQ(h.call("GET", "/nowhere").status, 404);
  EXPECT_EQ(h.call("DELETE", "/articles").status, 404);
  EXPECT_EQ(h.call("POST", "/articles", "[1]").status, 422);
  EXPECT_EQ(h.call("POST", "/articles", "{not json").status, 422);
  EXPECT_EQ(h.call("POST", "/articles", R"({"doi":"not a doi"})").status, 422);
  EXPECT_EQ(h.call("POST", "/articles", R"({"issue_id":"i9"})").status, 422);
  EXPECT_EQ(h.call("POST", "/articles", R"({"contributors":[{"name":"A","orcid":"0000-0000-0000-0000"}]})").status,
            422);

  auto id = new_article(h, Json{{"title", "t"}});
  auto reversed = h.call("PUT", "/articles/" + id + "/period", "2022-02-02 - 2021-01-01");
  EXPECT_EQ(reversed.status, 422);
  EXPECT_EQ(Json::parse(reversed.body).at("error"), "ReversedInterval");
  EXPECT_EQ(h.call("PUT", "/articles/" + id + "/period", "2021 - 2022-02-02").status, 422);
  auto open_ring = h.call("PUT", "/articles/" + id + "/geo",
                          R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{},)"
                          R"("geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}}]})");
  EXPECT_EQ(open_ring.status, 422);
  EXPECT_EQ(Json::parse(open_ring.body).at("error"), "OpenRing");
  EXPECT_EQ(h.call("GET", "/articles/" + id + "/geo.geojson").status, 404);
  EXPECT_EQ(h.call("PATCH", "/articles/" + id + "/citations/0", R"({"title":"x"})").status, 404);

  // an empty period clears it
  h.call("PUT", "/articles/" + id + "/period", "753 - 1234");
  EXPECT_EQ(h.call("PUT", "/articles/" + id + "/period", "").body, "null");
  EXPECT_FALSE(h.call_json("GET", "/articles/" + id).contains("period"));
}

TEST(Api, PatchIsAllOrNothing) {
  ApiHarness h;
  auto id = new_article(h, Json{{"title", "t"}});
  h.call("PUT", "/articles/" + id + "/references", testing::kRioReference);
  auto bad = h.call("PATCH", "/articles/" + id + "/citations/0", R"({"volume":"7","no_such_field":"x"})");
  EXPECT_EQ(bad.status, 422);
  EXPECT_EQ(Json::parse(bad.body).at("error"), "UnknownField");
  auto c = h.call_json("GET", "/articles/" + id).at("citations").at(0);
  EXPECT_FALSE(c.contains("volume") && !c.at("volume").is_null());

  auto ok = h.call_json("PATCH", "/articles/" + id + "/citations/0", R"({"volume":"7","year":2021})");
  EXPECT_EQ(ok.at("volume"), "7");
  EXPECT_EQ(ok.at("year"), 2021);
  EXPECT_EQ(h.call("PATCH", "/articles/" + id + "/citations/0", "{}").status, 422);
  EXPECT_EQ(h.call("PATCH", "/articles/" + id + "/citations/x", R"({"volume":"1"})").status, 404);
}

TEST(Api, BearerToken) {
  ApiHarness h(std::string("s3cret"));
  EXPECT_EQ(h.call("POST", "/articles", "{}").status, 401);
  EXPECT_EQ(h.call("POST", "/articles", "{}", std::string("wrong")).status, 401);
  auto res = h.call("POST", "/articles", "{}", std::string("s3cret"));
  EXPECT_EQ(res.status, 201);
  auto id = Json::parse(res.body).at("id").get<std::string>();
  EXPECT_EQ(h.call("GET", "/articles/" + id).status, 200);
  EXPECT_EQ(h.call("POST", "/articles/" + id + "/publish").status, 401);
  EXPECT_EQ(h.call("POST", "/gazetteer/resolve", testing::italy_geojson()).status, 200);
}

TEST(Api, GazetteerPreviewAndSuggest) {
  ApiHarness h;
  auto res = h.call_json("POST", "/gazetteer/resolve", testing::italy_geojson());
  EXPECT_EQ(res.at("coverage"), "Earth, Europe, Italian Republic");
  EXPECT_EQ(res.at("administrativeUnits").size(), 3u);
  auto empty = h.call_json("POST", "/gazetteer/resolve", R"({"type":"FeatureCollection","features":[]})");
  EXPECT_EQ(empty.at("coverage"), "Earth");

  EXPECT_EQ(h.call_json("GET", "/gazetteer/suggest?q=Ital").size(), 2u);
  auto in_europe = h.call_json("GET", "/gazetteer/suggest?q=Ital&path=6295630,6255148");
  ASSERT_EQ(in_europe.size(), 1u);
  EXPECT_EQ(in_europe.at(0).at("name"), "Italian Republic");
  EXPECT_EQ(h.call("GET", "/gazetteer/suggest?q=Ital&path=x").status, 422);
  EXPECT_EQ(h.call("GET", "/gazetteer/suggest?q=I").status, 422);
}

TEST(Api, GazetteerOutageDegradesToEarth) {
  auto offline = std::make_shared<http::FixtureTransport>();
  ApiHarness h(std::nullopt, offline);
  auto id = new_article(h, Json{{"title", "t"}});
  auto geo = h.call("PUT", "/articles/" + id + "/geo", testing::italy_geojson());
  ASSERT_EQ(geo.status, 200) << geo.body;
  auto units = Json::parse(geo.body).at("administrativeUnits");
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units.at(0).at("name"), "Earth");
  auto a = h.call_json("GET", "/articles/" + id);
  EXPECT_EQ(a.at("needs_resolution"), true);
  auto meta = h.call("GET", "/articles/" + id + "/meta.html").body;
  EXPECT_NE(meta.find(R"(<meta name="DC.Coverage" xml:lang="en" content="Earth">)"), std::string::npos);
  EXPECT_EQ(meta.find("DC.box"), std::string::npos);
  EXPECT_EQ(h.call("POST", "/gazetteer/resolve", testing::italy_geojson()).status, 502);
}

TEST(Api, IssueAndJournalMaps) {
  ApiHarness h;
  auto journal = h.call_json("POST", "/journals", R"({"title":"J"})");
  auto issue = h.call_json("POST", "/issues", Json{{"journal_id", journal["id"]}, {"title", "Vol. 1"}}.dump());
  std::vector<std::string> ids;
  for (int i = 0; i < 3; ++i)
    ids.push_back(new_article(h, Json{{"title", "Article " + std::to_string(i)},
                                      {"issue_id", issue["id"]},
                                      {"contributors", Json::array({{{"name", "Author Author"}}})}}));
  ASSERT_EQ(h.call("PUT", "/articles/" + ids[0] + "/geo", testing::italy_geojson()).status, 200);
  auto germany = h.call("PUT", "/articles/" + ids[2] + "/geo", serialize_extent(testing::germany_extent()));
  ASSERT_EQ(germany.status, 200) << germany.body;
  // ids[1] has no extent and must not appear

  auto map = h.call("GET", "/issues/" + issue["id"].get<std::string>() + "/map.geojson");
  EXPECT_EQ(map.content_type, "application/geo+json");
  auto fc = Json::parse(map.body);
  EXPECT_EQ(fc.at("licence"), "CC-0");
  std::map<std::string, int> per_article;
  for (const auto& f : fc.at("features")) {
    auto aid = f.at("properties").at("article_id").get<std::string>();
    ++per_article[aid];
    EXPECT_EQ(f.at("properties").at("landing_url"), "https://journal.example/article/view/" + aid);
    EXPECT_EQ(f.at("properties").at("authors").at(0), "Author Author");
  }
  EXPECT_EQ(per_article, (std::map<std::string, int>{{ids[0], 2}, {ids[2], 2}}));
  EXPECT_EQ(Json::parse(h.call("GET", "/journals/" + journal["id"].get<std::string>() + "/map.geojson").body),
            fc);
  EXPECT_EQ(h.call("GET", "/issues/i99/map.geojson").status, 404);
}

TEST(Api, TransientDepositFailureIsSwept) {
  ApiHarness h;
  // no fixture for this repository: the first attempt is a transport failure
  RepoConfig rc;
  rc.owner = "example";
  rc.repo = "flaky";
  rc.token = "t";
  auto flaky = std::make_shared<http::FixtureTransport>();
  auto submitter = std::make_shared<IssueSubmitter>(flaky, rc, std::make_shared<RecordReceiptStore>(h.store));
  Workflow wf(h.store, std::make_shared<Enricher>(testing::fixture_enricher(h.transport)),
              testing::fixture_gazetteer(h.transport), submitter);
  auto id = wf.create_article(Json{{"title", "t"}, {"doi", "10.5555/optimeta.4"}}).id;
  wf.set_references(id, testing::kRioReference);
  wf.enrich_citations(id);
  wf.advance(id, LifecycleState::review);
  wf.advance(id, LifecycleState::published);
  EXPECT_THROW(wf.deposit(id), Error);
  EXPECT_TRUE(wf.article(id).deposit_pending);
  EXPECT_TRUE(wf.sweep_deposits().empty());

  flaky->add("POST", "https://api.github.com/repos/example/flaky/issues", 201,
             R"({"id":7,"number":7,"html_url":"https://github.com/example/flaky/issues/7"})");
  EXPECT_EQ(wf.sweep_deposits(), std::vector<std::string>{id});
  EXPECT_FALSE(wf.article(id).deposit_pending);
  EXPECT_FALSE(wf.article(id).last_deposit_error.has_value());
}

TEST(Api, RequestLog) {
  std::vector<Json> entries;
  ApiHarness h;
  Api api(h.workflow, std::nullopt, [&](const Json& e) { entries.push_back(e); });
  api.dispatch(ApiRequest{"GET", "/articles/a1", {}, {}, ""});
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].at("status"), 404);
  EXPECT_EQ(entries[0].at("path"), "/articles/a1");
  EXPECT_TRUE(entries[0].contains("ms"));
}

TEST(Api, OverHttp) {
  ApiHarness h;
  httplib::Server server;
  register_routes(*h.api, server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/articles", R"({"title":"Over the wire"})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  auto id = Json::parse(created->body).at("id").get<std::string>();
  auto geo = client.Put("/articles/" + id + "/geo", testing::italy_geojson(), "application/geo+json");
  ASSERT_TRUE(geo);
  EXPECT_EQ(geo->status, 200);
  EXPECT_EQ(geo->get_header_value("Content-Type"), "application/geo+json");
  auto suggest = client.Get("/gazetteer/suggest?q=Ital&path=6295630,6255148");
  ASSERT_TRUE(suggest);
  EXPECT_EQ(Json::parse(suggest->body).size(), 1u);
  auto missing = client.Get("/articles/a999");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  loop.join();
}

}  // namespace
}  // namespace optimeta

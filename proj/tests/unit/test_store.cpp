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

#include <string>
#include <thread>
#include <vector>

#include "test_support.hpp"

namespace optimeta {
namespace {

TEST(Store, PutGetRemove) {
  RecordStore s;
  EXPECT_FALSE(s.get("k").has_value());
  s.put("k", 2, "{\"a\":1}");
  auto v = s.get("k");
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->schema_version, 2);
  EXPECT_EQ(v->payload, "{\"a\":1}");
  s.put("k", 3, "second");
  EXPECT_EQ(s.get("k")->payload, "second");
  EXPECT_EQ(s.get("k")->schema_version, 3);
  EXPECT_TRUE(s.remove("k"));
  EXPECT_FALSE(s.remove("k"));
  EXPECT_FALSE(s.get("k").has_value());
}

TEST(Store, BinarySafePayloads) {
  RecordStore s;
  std::string payload = "Nüst – \"quoted\" 'x' ;DROP TABLE records;";
  s.put("article:'1'", 1, payload);
  EXPECT_EQ(s.get("article:'1'")->payload, payload);
}

TEST(Store, KeysWithPrefix) {
  RecordStore s;
  for (auto k : {"article:a2", "article:a1", "journal:j1", "articles", "receipt:x"}) s.put(k, 1, "{}");
  EXPECT_EQ(s.keys_with_prefix("article:"), (std::vector<std::string>{"article:a1", "article:a2"}));
  EXPECT_EQ(s.keys_with_prefix("nothing").size(), 0u);
  EXPECT_EQ(s.keys_with_prefix("").size(), 5u);
}

TEST(Store, TamperedPayloadIsDetected) {
  RecordStore s;
  s.put("article:a1", 2, "{\"id\":\"a1\"}");
  s.exec("UPDATE records SET payload = '{\"id\":\"a2\"}' WHERE key = 'article:a1'");
  try {
    s.get("article:a1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StorageCorrupt);
  }
}

TEST(Store, PersistsAcrossOpen) {
  auto dir = testing::scratch_dir("store");
  auto path = (dir / "optimeta.db").string();
  {
    RecordStore s(path);
    s.put("article:a1", 2, "payload");
  }
  RecordStore s(path);
  EXPECT_EQ(s.get("article:a1")->payload, "payload");
  std::filesystem::remove_all(dir);
}

TEST(Store, UnopenablePath) {
  EXPECT_THROW(RecordStore("/nonexistent-dir/for/sure/x.db"), Error);
}

TEST(Store, ConcurrentWriters) {
  auto s = std::make_shared<RecordStore>();
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([s, t] {
      for (int i = 0; i < 50; ++i) s->put("k:" + std::to_string(t) + ":" + std::to_string(i), 1, std::to_string(i));
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(s->keys_with_prefix("k:").size(), 200u);
  EXPECT_EQ(s->get("k:3:49")->payload, "49");
}

TEST(Migration, SchemaOneArticleIsUpgradedOnRead) {
  testing::ApiHarness h;
  auto v1 = testing::read_file(testing::fixtures() / "store" / "article_v1.json");
  h.store->put("article:a7", 1, v1);
  auto a = h.workflow->article("a7");
  EXPECT_EQ(a.doi->value(), "10.5555/optimeta.7");
  EXPECT_EQ(a.state, LifecycleState::published);
  ASSERT_EQ(a.contributors.size(), 1u);
  EXPECT_EQ(a.contributors[0].display_name, "C Contributor");
  ASSERT_EQ(a.citations.size(), 2u);
  EXPECT_EQ(a.citations[0].doi->value(), "10.3897/rio.7.e66264");
  EXPECT_EQ(a.citations[0].status, CitationStatus::unstructured);
  EXPECT_FALSE(a.citations[1].doi.has_value());
  ASSERT_TRUE(a.extent.has_value());
  EXPECT_EQ(a.extent->features.size(), 2u);
  EXPECT_EQ(format_iso8601_interval(*a.period), "2022-06-27/2022-06-30");
  EXPECT_EQ(format_date(*a.publication_date), "2022-07-01");

  // a write stores the current schema
  h.workflow->set_period("a7", "2022-06-27 - 2022-07-01");
  EXPECT_EQ(h.store->get("article:a7")->schema_version, kRecordSchemaVersion);
  EXPECT_EQ(h.workflow->article("a7").citations.size(), 2u);
}

TEST(Migration, Rejections) {
  EXPECT_THROW(migrate_article(Json::object(), kRecordSchemaVersion + 1), Error);
  EXPECT_THROW(migrate_article(Json::object(), 0), Error);
  auto bad = Json::parse(testing::read_file(testing::fixtures() / "store" / "article_v1.json"));
  bad["stage"] = 7;
  EXPECT_THROW(migrate_article(bad, 1), Error);
}

TEST(Migration, CurrentSchemaRoundTrip) {
  auto a = testing::italy_article(*testing::fixture_gazetteer());
  a.doi = Doi::parse("10.5555/x");
  a.citations = {testing::enriched_citation(0, "10.3897/rio.7.e66264", "OPTIMETA", 2021)};
  a.state = LifecycleState::review;
  auto doc = to_json(a);
  auto back = article_from_json(migrate_article(doc, kRecordSchemaVersion));
  EXPECT_EQ(to_json(back), doc);
}

TEST(Workflow, ConcurrentMutationsOfOneArticleAreNotLost) {
  testing::ApiHarness h;
  auto id = h.workflow->create_article(Json{{"title", "t"}}).id;
  std::thread a([&] {
    for (int i = 0; i < 20; ++i) h.workflow->set_period(id, "2000 - " + std::to_string(2001 + i));
  });
  std::thread b([&] {
    for (int i = 0; i < 20; ++i) h.workflow->set_references(id, std::string(i + 1, 'x'));
  });
  a.join();
  b.join();
  auto art = h.workflow->article(id);
  EXPECT_EQ(format_iso8601_interval(*art.period), "2000/2020");
  ASSERT_EQ(art.citations.size(), 1u);
  EXPECT_EQ(art.citations[0].raw.text, std::string(20, 'x'));
}

}  // namespace
}  // namespace optimeta

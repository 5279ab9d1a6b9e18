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

// Acceptance run: one PASS/FAIL line per primary criterion, everything
// offline against the recorded fixtures. Exit status is the number of
// failed criteria.
//
// Tolerances: none. Every numeric comparison below is exact, because all
// oracles use the same IEEE arithmetic (min/max, parsing) as the code under
// test.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace {

using namespace optimeta;
namespace t = optimeta::testing;

constexpr double kBboxTolerance = 0.0;  // exact equality
constexpr int kRandomExtents = 1000;
constexpr int kRandomArticles = 50;
constexpr int kLifecycleRuns = 25;
constexpr int kLifecycleSteps = 30;
constexpr int kRandomPeriods = 500;

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  template <typename A, typename B>
  void equal(const A& actual, const B& expected, const std::string& what) {
    expect(actual == expected, what);
  }
  const std::vector<std::string>& failures() const { return failures_; }
  std::size_t checks() const { return checks_; }

 private:
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
};

std::optional<Errc> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// DOI extraction --------------------------------------------------------------

void doi_extraction(Check& c) {
  auto doi = extract_doi(RawCitation{0, t::kRioReference});
  c.expect(doi && doi->value() == "10.3897/rio.7.e66264", "rio reference");

  std::ifstream in(t::fixtures() / "corpus" / "doi_references.tsv");
  std::string line;
  std::size_t entries = 0, with_doi = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    auto expected = line.substr(0, tab);
    auto got = extract_doi(RawCitation{entries, line.substr(tab + 1)});
    ++entries;
    if (expected == "-") {
      c.expect(!got, "corpus line " + std::to_string(entries) + ": expected no DOI");
    } else {
      ++with_doi;
      c.expect(got && got->value() == expected, "corpus line " + std::to_string(entries) + ": " + expected);
    }
  }
  c.equal(entries, std::size_t{30}, "corpus size");
  c.expect(with_doi > 0 && with_doi < entries, "corpus mixes present and absent DOIs");
}

// Enrichment ---------------------------------------------------------------------

void set_source_field(SourceCitation& s, Field f, const std::string& tag) {
  switch (f) {
    case Field::title: s.title = tag + " title"; break;
    case Field::authors: s.authors = {Author{tag + " Author", std::nullopt}}; break;
    case Field::journal_title: s.journal_title = tag + " venue"; break;
    case Field::year: s.year = tag == "cr" ? 1999 : 2000; break;
    case Field::volume: s.volume = tag + " volume"; break;
    case Field::issue: s.issue = tag + " issue"; break;
    case Field::first_page: s.first_page = tag + " first"; break;
    case Field::last_page: s.last_page = tag + " last"; break;
    case Field::doi: break;
  }
}

template <typename C>
std::optional<std::string> field_text(const C& m, Field f) {
  auto opt = [](const std::optional<std::string>& v) { return v; };
  switch (f) {
    case Field::title: return opt(m.title);
    case Field::authors:
      if (m.authors.empty()) return std::nullopt;
      return m.authors.front().display_name;
    case Field::journal_title: return opt(m.journal_title);
    case Field::year:
      if (!m.year) return std::nullopt;
      return std::to_string(*m.year);
    case Field::volume: return opt(m.volume);
    case Field::issue: return opt(m.issue);
    case Field::first_page: return opt(m.first_page);
    case Field::last_page: return opt(m.last_page);
    case Field::doi: return std::nullopt;
  }
  return std::nullopt;
}

void enrichment_pipeline(Check& c) {
  auto item = t::fixture_enricher().enrich(RawCitation{0, t::kRioReference});
  const auto& m = item.citation;
  c.equal(m.status, CitationStatus::enriched, "rio status");
  c.expect(m.title && m.title->rfind("OPTIMETA – Strengthening", 0) == 0, "rio title prefix");
  c.equal(m.journal_title, std::optional<std::string>("Research Ideas and Outcomes"), "rio venue");
  c.equal(m.year, std::optional<int>(2021), "rio year");
  std::vector<std::string> names;
  for (const auto& a : m.authors) {
    names.push_back(a.display_name);
    c.expect(a.orcid && a.orcid->rfind("https://orcid.org/", 0) == 0 && is_valid_orcid_url(*a.orcid),
             "ORCID URL for " + a.display_name);
  }
  c.equal(names, std::vector<std::string>{"Christian Hauschke", "Daniel Nüst", "Anette Cordts", "Svantje Lilienthal"},
          "rio authors");

  // Precedence law: a field comes from Crossref when Crossref has it, else
  // from OpenAlex, else it is absent. All 4^8 presence patterns, each with
  // every combination of the sources responding.
  const RawCitation raw{0, "x. https://doi.org/10.1234/law"};
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < kSourceFields.size(); ++i) patterns *= 4;
  std::size_t violations = 0;
  for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
    SourceCitation cr, oa;
    std::vector<int> state(kSourceFields.size());
    for (std::size_t i = 0, p = pattern; i < kSourceFields.size(); ++i, p /= 4) {
      state[i] = static_cast<int>(p % 4);
      if (state[i] & 1) set_source_field(cr, kSourceFields[i], "cr");
      if (state[i] & 2) set_source_field(oa, kSourceFields[i], "oa");
    }
    for (int presence = 0; presence < 4; ++presence) {
      auto ocr = (presence & 1) ? std::optional(cr) : std::nullopt;
      auto ooa = (presence & 2) ? std::optional(oa) : std::nullopt;
      auto merged = merge_sources(ocr, ooa, raw);
      for (std::size_t i = 0; i < kSourceFields.size(); ++i) {
        auto f = kSourceFields[i];
        std::optional<std::string> expected;
        std::optional<Provenance> from;
        if (ocr && (state[i] & 1)) {
          expected = field_text(cr, f);
          from = Provenance::crossref;
        } else if (ooa && (state[i] & 2)) {
          expected = field_text(oa, f);
          from = Provenance::openalex;
        }
        if (field_text(merged, f) != expected || merged.provenance(f) != from) ++violations;
      }
    }
  }
  c.equal(violations, std::size_t{0}, "precedence law violations over " + std::to_string(patterns * 4) + " cases");
}

// Landing-page head fragment --------------------------------------------------------

void landing_page(Check& c) {
  auto html = render_head_fragment(emit_meta_tags(t::italy_article(*t::fixture_gazetteer())));
  c.equal(html, t::read_file(t::fixtures() / "golden" / "italy_head.html"), "golden file");
  for (const std::string needle :
       {R"(name="DC.temporal" scheme="ISO8601" content="2022-06-27/2022-06-30")",
        R"(name="geo.placename" content="Italian Republic")", R"(content="Earth, Europe, Italian Republic")",
        "northlimit=47.091783741544; southlimit=35.49285259236"})
    c.expect(html.find(needle) != std::string::npos, "substring " + needle);
  auto coverage = html.find("name=\"DC.Coverage\"");
  c.expect(coverage != std::string::npos &&
               html.find("content=\"Earth, Europe, Italian Republic\"", coverage) < html.find('\n', coverage),
           "DC.Coverage carries the unit path");
}

// Bounding boxes ------------------------------------------------------------------------

void brute_force(const Json& node, BoundingBox& box) {
  if (node.is_array() && node.size() >= 2 && node[0].is_number()) {
    box.west = std::min(box.west, node[0].get<double>());
    box.east = std::max(box.east, node[0].get<double>());
    box.south = std::min(box.south, node[1].get<double>());
    box.north = std::max(box.north, node[1].get<double>());
    return;
  }
  if (node.is_array())
    for (const auto& child : node) brute_force(child, box);
}

Json random_feature_collection(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lon(-180, 180), lat(-90, 90);
  auto position = [&] { return Json::array({lon(rng), lat(rng)}); };
  auto line = [&](std::size_t n) {
    Json l = Json::array();
    while (n--) l.push_back(position());
    return l;
  };
  Json features = Json::array();
  for (int n = 1 + static_cast<int>(rng() % 5); n > 0; --n) {
    Json g;
    switch (rng() % 4) {
      case 0: g = {{"type", "Point"}, {"coordinates", position()}}; break;
      case 1: g = {{"type", "LineString"}, {"coordinates", line(2 + rng() % 10)}}; break;
      default: {
        // rectangles as drawn on the map, and free polygons
        Json ring;
        if (rng() % 2) {
          auto a = position(), b = position();
          double w = std::min(a[0].get<double>(), b[0].get<double>()), e = std::max(a[0].get<double>(), b[0].get<double>());
          double s = std::min(a[1].get<double>(), b[1].get<double>()), nn = std::max(a[1].get<double>(), b[1].get<double>());
          ring = Json::array({Json::array({w, s}), Json::array({e, s}), Json::array({e, nn}), Json::array({w, nn}),
                              Json::array({w, s})});
        } else {
          ring = line(3 + rng() % 8);
          ring.push_back(ring.front());
        }
        g = {{"type", "Polygon"}, {"coordinates", Json::array({ring})}};
      }
    }
    features.push_back({{"type", "Feature"}, {"geometry", g}, {"properties", Json::object()}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

void bbox_oracle(Check& c) {
  std::mt19937_64 rng(20221);
  std::size_t mismatches = 0;
  for (int n = 0; n < kRandomExtents; ++n) {
    const auto text = random_feature_collection(rng).dump();
    const auto doc = Json::parse(text);
    constexpr double inf = std::numeric_limits<double>::infinity();
    BoundingBox oracle{inf, inf, -inf, -inf};
    for (const auto& f : doc.at("features")) brute_force(f.at("geometry").at("coordinates"), oracle);
    auto box = compute_bbox(validate_extent(text));
    auto off = std::max({std::abs(box.west - oracle.west), std::abs(box.south - oracle.south),
                         std::abs(box.east - oracle.east), std::abs(box.north - oracle.north)});
    if (!(off <= kBboxTolerance)) ++mismatches;
  }
  c.equal(mismatches, std::size_t{0}, "bbox mismatches over " + std::to_string(kRandomExtents) + " extents");
  auto italy = compute_bbox(t::extent_of({t::point_feature(6.63, 35.49), t::point_feature(18.52, 47.09)}));
  c.equal(italy, (BoundingBox{6.63, 35.49, 18.52, 47.09}), "two-point box");
}

// Time periods --------------------------------------------------------------------------

std::string ymd(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

void time_grammar(Check& c) {
  const std::pair<const char*, const char*> valid[] = {{"2021-01-01 - 2022-02-02", "2021-01-01/2022-02-02"},
                                                       {"753 - 1234", "0753/1234"},
                                                       {"2022-08-08 - 2022-08-09", "2022-08-08/2022-08-09"}};
  for (const auto& [input, iso] : valid) {
    try {
      auto p = parse_time_period(input);
      c.equal(format_iso8601_interval(p), std::string(iso), std::string("format ") + input);
      c.expect(parse_time_period(format_iso8601_interval(p)).same_period(p), std::string("round trip ") + input);
    } catch (const Error& e) {
      c.expect(false, std::string("parse ") + input + ": " + e.what());
    }
  }
  c.equal(error_of([] { parse_time_period("2022-02-02 - 2021-01-01"); }), std::optional(Errc::ReversedInterval),
          "reversed days");
  c.equal(error_of([] { parse_time_period("1234 - 753"); }), std::optional(Errc::ReversedInterval), "reversed years");
  c.equal(error_of([] { parse_time_period("2021 - 2022-02-02"); }), std::optional(Errc::MixedPrecision),
          "mixed precision");

  std::mt19937 rng(8);
  using std::chrono::sys_days;
  const sys_days base = std::chrono::year{1000} / 1 / 1;
  for (int n = 0; n < kRandomPeriods; ++n) {
    auto a = base + std::chrono::days(rng() % 3'000'000);
    auto b = a + std::chrono::days(rng() % 40'000);
    std::chrono::year_month_day da{a}, db{b};
    if (static_cast<int>(db.year()) > 9999) continue;
    auto input = ymd(da) + " - " + ymd(db);
    try {
      c.equal(format_iso8601_interval(parse_time_period(input)), ymd(da) + "/" + ymd(db), "random " + input);
    } catch (const Error& e) {
      c.expect(false, "random " + input + ": " + e.what());
    }
  }
}

// Administrative units ---------------------------------------------------------------

void admin_resolution(Check& c) {
  auto g = t::fixture_gazetteer();
  auto coverage = [](const AdminPath& p) { return text::join(p.names(), ", "); };
  c.equal(coverage(g->smallest_enclosing_unit(t::germany_extent())),
          std::string("Earth, Europe, Federal Republic of Germany"), "Münster and Hanover");
  c.equal(coverage(g->smallest_enclosing_unit(t::brazil_extent())), std::string("Earth, South America, Brazil"),
          "Brazil polygons");

  auto mixed = t::germany_extent();
  for (const auto& f : t::brazil_extent().features) mixed.features.push_back(f);
  auto path = g->smallest_enclosing_unit(mixed);
  c.equal(coverage(path), std::string("Earth"), "cross-continent");

  // common-prefix oracle over the per-position hierarchies
  for (const auto& extent : {t::germany_extent(), t::brazil_extent(), mixed}) {
    std::vector<AdminPath> paths;
    for (const auto& p : sample_positions(extent)) paths.push_back(g->reverse_geocode(p.lon, p.lat));
    std::size_t n = 0;
    for (bool same = true; same; ++n) {
      for (const auto& p : paths) same = same && n < p.units.size() && p.units[n].gazetteer_id == paths[0].units[n].gazetteer_id;
      if (!same) break;
    }
    auto got = g->smallest_enclosing_unit(extent);
    c.equal(got.units.size(), n, "common prefix length for " + coverage(got));
  }
}

// Deposits ----------------------------------------------------------------------------

ArticleRecord random_article(std::mt19937& rng, int n) {
  ArticleRecord a;
  a.id = "r" + std::to_string(n);
  a.doi = Doi::parse("10.5555/accept." + std::to_string(n));
  a.title = "Article " + std::to_string(n);
  a.contributors = {Author{"Author " + std::to_string(n), std::nullopt}};
  a.publication_date = std::chrono::year{2022} / 5 / 18;
  a.state = LifecycleState::published;
  for (std::size_t i = 0, count = rng() % 10; i < count; ++i) {
    auto doi = "10.7777/ref" + std::to_string(rng() % 6);
    switch (rng() % 4) {
      case 0: {
        StructuredCitation s;
        s.raw = RawCitation{i, "plain text reference"};
        a.citations.push_back(s);
        break;
      }
      case 1: {
        StructuredCitation s;
        s.raw = RawCitation{i, "doi:" + doi};
        s.doi = Doi::parse(doi);
        a.citations.push_back(s);
        break;
      }
      default: {
        auto s = t::enriched_citation(i, doi, "Cited " + std::to_string(i), 1950 + static_cast<int>(rng() % 70));
        if (rng() % 2) s.status = CitationStatus::verified;
        a.citations.push_back(s);
      }
    }
  }
  return a;
}

std::map<std::string, std::string> dry_run(const std::string& jsonl) {
  auto dir = t::scratch_dir("accept-deposit");
  std::istringstream in(jsonl);
  std::ostringstream err;
  batch::DepositOptions options;
  options.out_dir = dir;
  batch::run_deposit(in, options, err);
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    files[entry.path().filename().string()] = t::read_file(entry.path());
  std::filesystem::remove_all(dir);
  return files;
}

void deposit_closure(Check& c) {
  std::mt19937 rng(4242);
  std::string jsonl;
  std::size_t depositable = 0;
  for (int n = 0; n < kRandomArticles; ++n) {
    auto a = random_article(rng, n);
    jsonl += to_json(a).dump() + "\n";
    std::size_t eligible = 0;
    for (const auto& cit : a.citations) eligible += cit.doi && cit.status != CitationStatus::unstructured;
    if (eligible == 0) {
      c.equal(error_of([&] { build_deposit(a); }), std::optional(Errc::NothingToDeposit), a.id + " nothing");
      continue;
    }
    ++depositable;
    auto p = build_deposit(a);
    std::set<std::string> ids{"doi:" + a.doi->value()};
    for (const auto& r : p.citation_rows) ids.insert(r.cited_id);
    std::set<std::string> described;
    std::size_t rows = 0;
    for (const auto& m : p.metadata_rows) {
      described.insert(m.id);
      ++rows;
    }
    c.equal(described, ids, a.id + " referential closure");
    c.equal(rows, described.size(), a.id + " metadata ids unique");
    c.equal(p.citation_rows.size() + p.skipped.size(), a.citations.size(), a.id + " skip accounting");
    c.equal(p.citation_rows.size(), eligible, a.id + " deposited rows");
  }
  c.expect(depositable >= kRandomArticles / 2, "enough depositable articles");

  auto first = dry_run(jsonl), second = dry_run(jsonl);
  c.equal(first.size(), depositable, "one issue file per depositable article");
  c.equal(first, second, "dry-run files byte-identical");
}

// Lifecycle ---------------------------------------------------------------------------

int rank_of(const Json& article) {
  auto s = article.at("state").get<std::string>();
  return s == "submission" ? 0 : s == "review" ? 1 : s == "published" ? 2 : -1;
}

void lifecycle(Check& c) {
  const std::vector<std::pair<std::string, std::string>> ops = {
      {"POST", "review"},  {"POST", "publish"},    {"POST", "deposit"},          {"PUT", "references"},
      {"PUT", "period"},   {"PUT", "geo"},         {"POST", "citations/enrich"}, {"POST", "citations/verify"},
      {"POST", "submission"}, {"PUT", "state"},    {"PATCH", "citations/0"}};
  std::mt19937 rng(12);
  std::size_t backward = 0, wrong_status = 0;
  for (int run = 0; run < kLifecycleRuns; ++run) {
    t::ApiHarness h;
    auto created = h.call("POST", "/articles", R"({"title":"t","doi":"10.5555/lifecycle.1"})");
    auto id = Json::parse(created.body).at("id").get<std::string>();
    int rank = 0;
    for (int step = 0; step < kLifecycleSteps; ++step) {
      const auto& [method, op] = ops[rng() % ops.size()];
      std::string body;
      if (op == "references") body = t::kRioReference;
      if (op == "period") body = "2022-06-27 - 2022-06-30";
      if (op == "geo") body = t::italy_geojson();
      if (op == "citations/verify") body = R"({"reviewer":"editor"})";
      if (op == "citations/0") body = R"({"volume":"7"})";
      if (op == "state" || op == "submission") body = R"({"state":"submission"})";
      auto res = h.call(method, "/articles/" + id + "/" + op, body);
      if (op == "deposit" && rank < 2 && res.status != 409) ++wrong_status;
      int now = rank_of(h.call_json("GET", "/articles/" + id));
      if (now < rank) ++backward;
      rank = std::max(rank, now);
    }
  }
  c.equal(backward, std::size_t{0}, "backward transitions");
  c.equal(wrong_status, std::size_t{0}, "deposit before publish not 409");

  t::ApiHarness h;
  auto id = Json::parse(h.call("POST", "/articles", R"({"doi":"10.5555/lifecycle.2"})").body).at("id").get<std::string>();
  h.call("PUT", "/articles/" + id + "/references", t::kRioReference);
  h.call("POST", "/articles/" + id + "/citations/enrich");
  c.equal(h.call("POST", "/articles/" + id + "/deposit").status, 409, "deposit in submission");
  h.call("POST", "/articles/" + id + "/review");
  c.equal(h.call("POST", "/articles/" + id + "/deposit").status, 409, "deposit in review");
  h.call("POST", "/articles/" + id + "/publish");
  c.equal(h.call("POST", "/articles/" + id + "/deposit").status, 201, "deposit once published");
  c.equal(h.call("POST", "/articles/" + id + "/review").status, 409, "published cannot go back to review");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Check&)>> criteria = {
      {"doi-extraction", doi_extraction},     {"enrichment-pipeline", enrichment_pipeline},
      {"landing-page-golden", landing_page},  {"bbox-oracle", bbox_oracle},
      {"time-grammar", time_grammar},         {"admin-resolution", admin_resolution},
      {"deposit-closure", deposit_closure},   {"lifecycle", lifecycle}};
  int failed = 0;
  auto total_start = std::chrono::steady_clock::now();
  for (const auto& [name, run] : criteria) {
    Check c;
    auto start = std::chrono::steady_clock::now();
    try {
      run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    if (c.failures().empty()) {
      std::cout << "PASS " << name << " (" << c.checks() << " checks, " << ms << " ms)\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ": " << c.failures().front();
      if (c.failures().size() > 1) std::cout << " (+" << c.failures().size() - 1 << " more)";
      std::cout << '\n';
    }
  }
  auto total = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - total_start);
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - static_cast<std::size_t>(failed) << "/"
            << criteria.size() << " in " << total.count() << " ms\n";
  return failed;
}

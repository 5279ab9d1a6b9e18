# Copyright 2026 The optimeta-cpp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the JSONL inputs under tests/fixtures/batch/."""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "batch"

RIO = ("Hauschke C, Nüst D, Cordts A, Lilienthal S (2021) OPTIMETA – Strengthening the Open Access publishing "
        "system through open citations and spatiotemporal metadata. Research Ideas and Outcomes 7: e66264. "
        "https://doi.org/10.3897/rio.7.e66264")
FRMA = ("Turki H, Hauschke C (2021). Enhancing Knowledge Graph Extraction and Validation From Scholarly "
        "Publications Using Bibliographic Metadata. Frontiers in Research Metrics and Analytics 6: 694307. "
        "https://doi.org/10.3389/frma.2021.694307")
VIVO = "Conlon M et al. (2019). VIVO: a system for research discovery. JOSS 4(39): 1182. doi:10.21105/joss.01182"
GARFIELD = ("Garfield, Eugene (1952). The Crisis in Chemical Literature. Address to the Maryland Section of the "
            "American Chemical Society.")
UNREGISTERED = "Nobody N (2020). Never registered. https://doi.org/10.9999/unregistered.0001"
DOWN = "Flaky F (2020). Upstream down. https://doi.org/10.5555/transport.failure"


def jsonl(name, rows):
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / name, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def enriched(index, raw, doi, title, year, journal):
    return {"index": index, "raw": raw, "status": "enriched", "doi": doi, "title": title,
            "journal_title": journal, "year": year,
            "sources": {"doi": "extracted", "title": "crossref", "journal_title": "crossref", "year": "crossref"}}


def italy_extent():
    bbox = json.loads((ROOT / "tests/fixtures/http/geonames/bbox.json").read_text())["exchanges"][0]
    b = bbox["response"]["body"]["bbox"]
    return {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "geometry": {"type": "Point", "coordinates": [12.5, 42.0]}, "properties": {}},
            {"type": "Feature", "geometry": {"type": "Point", "coordinates": [9.19, 45.4642]}, "properties": {}},
        ],
        "provenance": "Drawn by the article authors during submission",
        "licence": "CC-0",
        "administrativeUnits": [
            {"name": "Earth", "geonameId": 6295630},
            {"name": "Europe", "geonameId": 6255148},
            {"name": "Italian Republic", "geonameId": 3175395,
             "bbox": {k: b[k] for k in ("west", "south", "east", "north")}},
        ],
    }


def main():
    jsonl("single_reference.jsonl", [{"doi": "10.5555/optimeta.1", "raw_references": RIO}])

    refs = [RIO, FRMA, VIVO, GARFIELD, UNREGISTERED]
    rows = []
    for n in range(10):
        r = {"doi": f"10.5555/back.{n}", "raw_references": [refs[n % len(refs)]]}
        if n == 6:
            r["raw_references"].append(DOWN)
        rows.append(r)
    jsonl("ten_records.jsonl", rows)

    a1 = {"id": "a1", "doi": "10.5555/optimeta.1", "title": "Test 3: Three",
          "contributors": [{"name": "C Contributor"}], "publication_date": "2022-06-30",
          "journal_title": "Journal of Optimal Geolocations", "state": "published",
          "citations": [enriched(0, RIO, "10.3897/rio.7.e66264",
                                 "OPTIMETA – Strengthening the Open Access publishing system", 2021,
                                 "Research Ideas and Outcomes"),
                        enriched(1, FRMA, "10.3389/frma.2021.694307",
                                 "Enhancing Knowledge Graph Extraction and Validation From Scholarly "
                                 "Publications Using Bibliographic Metadata", 2021,
                                 "Frontiers in Research Metrics and Analytics")],
          "extent": italy_extent(),
          "period": {"interval": "2022-06-27/2022-06-30", "raw": "2022-06-27 - 2022-06-30"}}
    a2 = {"id": "a2", "doi": "10.5555/optimeta.2", "title": "No map",
          "contributors": [{"name": "Author Author"}], "publication_date": "2022-05-18",
          "journal_title": "Journal of Optimal Geolocations", "state": "published",
          "citations": [enriched(0, VIVO, "10.21105/joss.01182", "VIVO: a system for research discovery", 2019,
                                 "Journal of Open Source Software"),
                        {"index": 1, "raw": GARFIELD, "status": "unstructured", "sources": {}}],
          "period": {"interval": "0753/1234", "raw": "753 - 1234"}}
    a3 = {"id": "a3", "doi": "10.5555/optimeta.3", "title": "Still in review",
          "contributors": [{"name": "Optimeta Admin"}], "journal_title": "Journal of Optimal Geolocations",
          "state": "review", "citations": [enriched(0, RIO, "10.3897/rio.7.e66264", "OPTIMETA", 2021,
                                                    "Research Ideas and Outcomes")]}
    jsonl("articles.jsonl", [a1, a2, a3])


if __name__ == "__main__":
    main()

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

"""Writes the golden landing-page head fragment for the Italy test article.

The fragment is built here with Python's json and html modules so that the
C++ renderer is compared against an independent encoder. Bounding box
values come from the frozen gazetteer fixture (getJSON for 3175395).
"""

import html
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "golden" / "italy_head.html"

BBOX_FIXTURE = ROOT / "tests" / "fixtures" / "http" / "geonames" / "bbox.json"


def italy_bbox():
    doc = json.loads(BBOX_FIXTURE.read_text(encoding="utf-8"))
    for ex in doc["exchanges"]:
        if "geonameId=3175395" in ex["request"]["url"]:
            b = ex["response"]["body"]["bbox"]
            return {k: float(b[k]) for k in ("west", "south", "east", "north")}
    raise SystemExit("Italy bbox missing from fixture")


def attr(value):
    return html.escape(value, quote=True).replace("&#x27;", "'")


def meta(name, content, scheme=None, lang=None):
    s = f'<meta name="{attr(name)}"'
    if scheme:
        s += f' scheme="{attr(scheme)}"'
    if lang:
        s += f' xml:lang="{attr(lang)}"'
    return s + f' content="{attr(content)}">'


def decimal(v):
    r = repr(v)
    return r[:-2] if r.endswith(".0") else r


def main():
    box = italy_bbox()
    units = [
        {"name": "Earth", "geonameId": 6295630},
        {"name": "Europe", "geonameId": 6255148},
        {"name": "Italian Republic", "geonameId": 3175395, "bbox": box},
    ]
    extent = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "geometry": {"type": "Point", "coordinates": [12.5, 42.0]}, "properties": None},
            {"type": "Feature", "geometry": {"type": "Point", "coordinates": [9.19, 45.4642]}, "properties": None},
        ],
        "provenance": "Drawn by the article authors during submission",
        "licence": "CC-0",
        "administrativeUnits": units,
    }
    period = "2022-06-27/2022-06-30"
    name = "Italian Republic"
    dc_box = (f"name={name}; northlimit={decimal(box['north'])}; southlimit={decimal(box['south'])}; "
              f"westlimit={decimal(box['west'])}; eastlimit={decimal(box['east'])}")

    def el(tag, v):
        return f"<gmd:{tag}><gco:Decimal>{decimal(v)}</gco:Decimal></gmd:{tag}>"

    iso = ("<gmd:EX_GeographicBoundingBox>" + el("westBoundLongitude", box["west"]) +
           el("eastBoundLongitude", box["east"]) + el("southBoundLatitude", box["south"]) +
           el("northBoundLatitude", box["north"]) + "</gmd:EX_GeographicBoundingBox>")
    lines = [
        meta("DC.temporal", period, scheme="ISO8601"),
        meta("DC.SpatialCoverage", json.dumps(extent, separators=(",", ":"), ensure_ascii=False), scheme="GeoJSON"),
        meta("geo.placename", name),
        meta("DC.box", dc_box),
        meta("ISO 19139", iso),
        meta("DC.PeriodOfTime", period, scheme="ISO8601"),
        meta("citation_journal_title", "Journal of Optimal Geolocations"),
        meta("citation_author", "C Contributor"),
        meta("citation_title", "Test 3: Three"),
        meta("DC.Coverage", "Earth, Europe, Italian Republic", lang="en"),
        meta("DC.Creator.PersonalName", "C Contributor"),
        meta("DC.Title", "Test 3: Three"),
        meta("DC.Type", "Text.Serial.Journal"),
    ]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


if __name__ == "__main__":
    main()

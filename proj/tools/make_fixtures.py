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

"""Writes the replay fixtures under tests/fixtures/http.

The payloads follow the public response schemas of Crossref, OpenAlex,
Geonames and the GitHub issues API. Re-record against the live services
with RecordingTransport when network access is available.

    python3 tools/make_fixtures.py
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "http"

CROSSREF = "https://api.crossref.org"
OPENALEX = "https://api.openalex.org"
GEONAMES = "http://api.geonames.org"
GITHUB = "https://api.github.com"


def orcid(base):
    """Completes a 15-digit ORCID iD with its ISO 7064 11,2 check character."""
    total = 0
    for c in base.replace("-", ""):
        total = (total + int(c)) * 2
    r = (12 - total % 11) % 11
    return base + ("X" if r == 10 else str(r))


def write(rel, doc):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def exchange(url, body=None, status=200, method="GET", **extra):
    response = {"status": status}
    if body is not None:
        response["body"] = body
    response.update(extra)
    return {"request": {"method": method, "url": url}, "response": response}


# Bibliographic sources ------------------------------------------------------

RIO_TITLE = ("OPTIMETA – Strengthening the Open Access publishing system through "
             "open citations and spatiotemporal metadata")
RIO_AUTHORS = [
    ("Christian", "Hauschke", "0000-0003-2499-7741"),
    ("Daniel", "Nüst", "0000-0002-0024-5046"),
    ("Anette", "Cordts", orcid("0000-0002-6406-085")),
    ("Svantje", "Lilienthal", orcid("0000-0002-3481-249")),
]


def crossref_work(doi, title, authors, venue, date_parts, volume=None, issue=None, page=None):
    message = {
        "DOI": doi,
        "type": "journal-article",
        "title": [title],
        "author": [],
        "container-title": [venue],
        "issued": {"date-parts": [date_parts]},
        "published": {"date-parts": [date_parts]},
        "publisher": "Example Publisher",
        "reference-count": 0,
    }
    for i, (given, family, oid) in enumerate(authors):
        a = {"given": given, "family": family, "sequence": "first" if i == 0 else "additional",
             "affiliation": []}
        if oid:
            a["ORCID"] = "http://orcid.org/" + oid
            a["authenticated-orcid"] = False
        message["author"].append(a)
    if volume:
        message["volume"] = volume
    if issue:
        message["issue"] = issue
    if page:
        message["page"] = page
    return {"status": "ok", "message-type": "work", "message-version": "1.0.0", "message": message}


def openalex_work(wid, doi, title, authors, venue, year, volume=None, issue=None, first=None, last=None):
    return {
        "id": "https://openalex.org/" + wid,
        "doi": "https://doi.org/" + doi,
        "title": title,
        "display_name": title,
        "publication_year": year,
        "type": "article",
        "authorships": [
            {"author_position": "first" if i == 0 else "middle",
             "author": {"id": "https://openalex.org/A%d" % (5000 + i),
                        "display_name": "%s %s" % (given, family),
                        "orcid": ("https://orcid.org/" + oid) if oid else None}}
            for i, (given, family, oid) in enumerate(authors)
        ],
        "primary_location": {"source": {"id": "https://openalex.org/S1", "display_name": venue}},
        "biblio": {"volume": volume, "issue": issue, "first_page": first, "last_page": last},
    }


def sources():
    rio = "10.3897/rio.7.e66264"
    write("crossref/rio.7.e66264.json",
          exchange(f"{CROSSREF}/works/{rio}",
                   crossref_work(rio, RIO_TITLE, RIO_AUTHORS, "Research Ideas and Outcomes", [2021, 4, 8],
                                 volume="7", page="e66264")))
    write("openalex/rio.7.e66264.json",
          exchange(f"{OPENALEX}/works/doi:{rio}",
                   openalex_work("W3155436223", rio, RIO_TITLE, RIO_AUTHORS, "Research Ideas and Outcomes", 2021,
                                 volume="7", first="e66264", last="e66264")))

    roadmap = "10.1080/19386389.2021.1999156"
    roadmap_authors = [("Christian", "Hauschke", "0000-0003-2499-7741"), ("Serhii", "Nazarovets", None),
                       ("Franziska", "Altemeier", None), ("Nataliia", "Kaliuzhna", None)]
    roadmap_title = "Roadmap to FAIR Research Information in Open Infrastructures"
    write("crossref/roadmap.json",
          exchange(f"{CROSSREF}/works/{roadmap}",
                   crossref_work(roadmap, roadmap_title, roadmap_authors, "Journal of Library Metadata",
                                 [2021, 10, 2], volume="21", issue="1-2", page="45-61")))
    write("openalex/roadmap.json",
          exchange(f"{OPENALEX}/works/doi:{roadmap}",
                   openalex_work("W3208867947", roadmap, roadmap_title, roadmap_authors,
                                 "Journal of Library Metadata", 2021, volume="21", issue="1-2", first="45",
                                 last="61")))

    vivo = "10.21105/joss.01182"
    vivo_authors = [("Michael", "Conlon", None), ("Andrew", "Woods", None)]
    write("crossref/vivo.json",
          exchange(f"{CROSSREF}/works/{vivo}",
                   crossref_work(vivo, "VIVO: a system for research discovery", vivo_authors,
                                 "Journal of Open Source Software", [2019, 7, 1], volume="4", issue="39",
                                 page="1182")))
    write("openalex/vivo.json", exchange(f"{OPENALEX}/works/doi:{vivo}", {"error": "not found"}, status=404))

    # OpenAlex knows this one, Crossref does not.
    kg = "10.3389/frma.2021.694307"
    kg_title = ("Enhancing Knowledge Graph Extraction and Validation From Scholarly Publications Using "
                "Bibliographic Metadata")
    kg_authors = [("Houcemeddine", "Turki", None), ("Christian", "Hauschke", "0000-0003-2499-7741")]
    write("crossref/frma.json", exchange(f"{CROSSREF}/works/{kg}", status=404, body_text="Resource not found."))
    write("openalex/frma.json",
          exchange(f"{OPENALEX}/works/doi:{kg}",
                   openalex_work("W3175412345", kg, kg_title, kg_authors,
                                 "Frontiers in Research Metrics and Analytics", 2021, volume="6",
                                 first="694307", last="694307")))

    unregistered = "10.9999/unregistered.0001"
    write("crossref/unregistered.json",
          exchange(f"{CROSSREF}/works/{unregistered}", status=404, body_text="Resource not found."))
    write("openalex/unregistered.json",
          exchange(f"{OPENALEX}/works/doi:{unregistered}", {"error": "not found"}, status=404))

    limited = "10.5555/ratelimited.1"
    write("crossref/ratelimited.json", {
        "request": {"method": "GET", "url": f"{CROSSREF}/works/{limited}"},
        "responses": [
            {"status": 429, "headers": {"Retry-After": "1"}, "body_text": "Too Many Requests"},
            {"status": 200, "body": crossref_work(limited, "Rate limited but eventually served",
                                                  [("Ada", "Example", None)], "Journal of Retries",
                                                  [2020, 1, 1], volume="1", page="1-2")},
        ],
    })
    write("openalex/ratelimited.json",
          exchange(f"{OPENALEX}/works/doi:{limited}", {"error": "not found"}, status=404))

    malformed = "10.5555/malformed.1"
    write("crossref/malformed.json",
          exchange(f"{CROSSREF}/works/{malformed}", body_text='{"status": "ok", "message": {"title": 42'))
    write("openalex/malformed.json",
          exchange(f"{OPENALEX}/works/doi:{malformed}", {"id": 17, "title": ["not", "a", "string"]}))

    down = "10.5555/transport.failure"
    write("crossref/down.json",
          exchange(f"{CROSSREF}/works/{down}", transport_error="connection reset by peer"))
    write("openalex/down.json",
          exchange(f"{OPENALEX}/works/doi:{down}", transport_error="connection timed out"))


# Gazetteer ------------------------------------------------------------------

EARTH = ("Earth", "Earth", 6295630, "AREA")
EUROPE = ("Europe", "Europe", 6255148, "CONT")
SOUTH_AMERICA = ("South America", "South America", 6255150, "CONT")
NORTH_AMERICA = ("North America", "North America", 6255149, "CONT")
GERMANY = ("Federal Republic of Germany", "Germany", 2921044, "PCLI")
ITALY = ("Italian Republic", "Italy", 3175395, "PCLI")
BRAZIL = ("Brazil", "Brazil", 3469034, "PCLI")
USA = ("United States", "United States", 6252001, "PCLI")

NRW = ("Land Nordrhein-Westfalen", "North Rhine-Westphalia", 2861876, "ADM1")
MUENSTER_RB = ("Regierungsbezirk Münster", "Regierungsbezirk Münster", 3337386, "ADM2")
MUENSTER = ("Kreisfreie Stadt Münster", "Münster", 6553041, "ADM3")
LOWER_SAXONY = ("Land Niedersachsen", "Lower Saxony", 2862926, "ADM1")
REGION_HANNOVER = ("Region Hannover", "Region Hannover", 3337389, "ADM3")
HANNOVER = ("Landeshauptstadt Hannover", "Hanover", 6559065, "ADM4")
LAZIO = ("Regione Lazio", "Latium", 3174976, "ADM1")
LOMBARDY = ("Regione Lombardia", "Lombardy", 3174618, "ADM1")
AMAZONAS = ("Estado do Amazonas", "Amazonas", 3665361, "ADM1")
MATO_GROSSO = ("Estado de Mato Grosso", "Mato Grosso", 3457419, "ADM1")
PARA = ("Estado do Pará", "Pará", 3393129, "ADM1")
BAHIA = ("Estado da Bahia", "Bahia", 3471168, "ADM1")
TEXAS = ("State of Texas", "Texas", 4736286, "ADM1")
ITALY_TX = ("Italy", "Italy", 4703811, "PPL")

GERMAN_TAIL_MUENSTER = [EARTH, EUROPE, GERMANY, NRW, MUENSTER_RB, MUENSTER]
GERMAN_TAIL_HANNOVER = [EARTH, EUROPE, GERMANY, LOWER_SAXONY, REGION_HANNOVER, HANNOVER]


def unit(u, lat=None, lng=None):
    toponym, name, gid, fcode = u
    d = {"toponymName": toponym, "name": name, "geonameId": gid, "fcode": fcode}
    if lat is not None:
        d["lat"] = "%.5f" % lat
        d["lng"] = "%.5f" % lng
    return d


def r4(v):
    s = "%.4f" % v
    return "0.0000" if s == "-0.0000" else s


def nearby(lon, lat, path):
    url = f"{GEONAMES}/extendedFindNearbyJSON?lat={r4(lat)}&lng={r4(lon)}&username=demo"
    if path is None:
        body = {"ocean": {"distance": "0", "geonameId": 3411923, "name": "North Atlantic Ocean"}}
    else:
        body = {"geonames": [unit(u, lat, lon) for u in path]}
    return exchange(url, body)


def polygon_samples(ring):
    """Vertices without the closing one, plus the vertex average."""
    verts = ring[:-1]
    avg = (sum(p[0] for p in verts) / len(verts), sum(p[1] for p in verts) / len(verts))
    return verts + [avg]


MUENSTER_POINT = (7.6261, 51.9607)
HANOVER_RING = [(9.6, 52.3), (9.9, 52.3), (9.9, 52.45), (9.6, 52.45), (9.6, 52.3)]
BRAZIL_T1 = [(-60.0, -5.0), (-55.0, -10.0), (-50.0, -5.0), (-60.0, -5.0)]
BRAZIL_T2 = [(-45.0, -12.0), (-42.0, -15.0), (-40.0, -10.0), (-45.0, -12.0)]
ROME = (12.5, 42.0)
MILAN = (9.19, 45.4642)
MID_ATLANTIC = (-30.0, 0.0)

BRAZIL_STATES = {(-60.0, -5.0): AMAZONAS, (-55.0, -10.0): MATO_GROSSO, (-50.0, -5.0): PARA}


def bbox_doc(u, west, south, east, north):
    toponym, name, gid, fcode = u
    return {"geonameId": gid, "toponymName": toponym, "name": name, "fcode": fcode,
            "bbox": {"west": west, "south": south, "east": east, "north": north, "accuracyLevel": 0}}


def hierarchy_doc(path):
    return {"geonames": [unit(u) for u in path]}


def gazetteer():
    ex = [nearby(*MUENSTER_POINT, GERMAN_TAIL_MUENSTER)]
    for p in polygon_samples(HANOVER_RING):
        ex.append(nearby(*p, GERMAN_TAIL_HANNOVER))
    write("geonames/germany.json", {"exchanges": ex})

    ex = []
    for p in polygon_samples(BRAZIL_T1):
        ex.append(nearby(*p, [EARTH, SOUTH_AMERICA, BRAZIL, BRAZIL_STATES.get(p, PARA)]))
    for p in polygon_samples(BRAZIL_T2):
        ex.append(nearby(*p, [EARTH, SOUTH_AMERICA, BRAZIL, BAHIA]))
    write("geonames/brazil.json", {"exchanges": ex})

    write("geonames/italy.json", {"exchanges": [
        nearby(*ROME, [EARTH, EUROPE, ITALY, LAZIO]),
        nearby(*MILAN, [EARTH, EUROPE, ITALY, LOMBARDY]),
    ]})
    write("geonames/ocean.json", nearby(*MID_ATLANTIC, None))

    write("geonames/bbox.json", {"exchanges": [
        exchange(f"{GEONAMES}/getJSON?geonameId={ITALY[2]}&username=demo",
                 bbox_doc(ITALY, 6.62662136853768, 35.49285259236, 18.520383311552, 47.091783741544)),
        exchange(f"{GEONAMES}/getJSON?geonameId={GERMANY[2]}&username=demo",
                 bbox_doc(GERMANY, 5.8663153, 47.2701114, 15.0419319, 55.099161)),
        exchange(f"{GEONAMES}/getJSON?geonameId={BRAZIL[2]}&username=demo",
                 bbox_doc(BRAZIL, -73.985535, -33.750704, -28.847639, 5.264877)),
        exchange(f"{GEONAMES}/getJSON?geonameId=999999999&username=demo",
                 {"status": {"message": "the geoname feature does not exist.", "value": 15}}),
    ]})

    write("geonames/search.json", {"exchanges": [
        exchange(f"{GEONAMES}/searchJSON?name_startsWith=Ital&maxRows=10&username=demo",
                 {"totalResultsCount": 2, "geonames": [unit(ITALY, 42.83333, 12.83333),
                                                       unit(ITALY_TX, 32.18404, -96.88472)]}),
        exchange(f"{GEONAMES}/hierarchyJSON?geonameId={ITALY[2]}&username=demo",
                 hierarchy_doc([EARTH, EUROPE, ITALY])),
        exchange(f"{GEONAMES}/hierarchyJSON?geonameId={ITALY_TX[2]}&username=demo",
                 hierarchy_doc([EARTH, NORTH_AMERICA, USA, TEXAS, ITALY_TX])),
    ]})


# Deposit repository ---------------------------------------------------------

def github():
    write("github/created.json", {
        "request": {"method": "POST", "url": f"{GITHUB}/repos/opencitations/crowdsourcing/issues"},
        "responses": [
            {"status": 201, "body": {"id": 2100000000 + n, "number": n,
                                     "html_url": f"https://github.com/opencitations/crowdsourcing/issues/{n}",
                                     "state": "open"}}
            for n in range(41, 61)
        ],
    })
    write("github/denied.json", exchange(f"{GITHUB}/repos/example/denied/issues",
                                         {"message": "Bad credentials",
                                          "documentation_url": "https://docs.github.com/rest"},
                                         status=401, method="POST"))
    write("github/gone.json", exchange(f"{GITHUB}/repos/example/archived/issues",
                                       {"message": "Issues are disabled for this repo"}, status=410,
                                       method="POST"))


if __name__ == "__main__":
    sources()
    gazetteer()
    github()

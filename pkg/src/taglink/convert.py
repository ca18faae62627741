"""Raw dataset dumps to triple files.

Every converter builds an in-memory graph (deduplicating as it goes) and
writes it back out, so reruns are byte-identical. Any rating or listen
event counts as an interaction regardless of its value; tag text is
lowercased and stripped. Object names repeat occasionally in the raw
dumps, so a colliding name gets its raw id appended to keep the
name-to-id mapping bijective.

Expected layouts (files are looked up inside the raw directory):

movielens   ratings.dat  UserID::MovieID::Rating::Timestamp
            (or ratings.csv with a userId,movieId,... header)
            tags.dat     UserID::MovieID::Tag::Timestamp
            (or tags.csv with a userId,movieId,tag,... header)
            movies.dat   MovieID::Title::Genres   (optional, object names)
            (or movies.csv)

lastfm      user_artists.dat         userID<TAB>artistID<TAB>weight
            user_taggedartists.dat   userID<TAB>artistID<TAB>tagID<TAB>...
            tags.dat                 tagID<TAB>tagValue
            artists.dat              id<TAB>name<TAB>...      (optional)

steam       reviews.csv    user_id,app_id[,...]
            app_tags.csv   app_id,tag
            apps.csv       app_id,name              (optional)
"""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import DataError
from .kg import KnowledgeGraph, compute_stats, save_triples

DATASETS = ("movielens", "lastfm", "steam")


def _find(raw_dir: Path, candidates, required=True) -> Path | None:
    for name in candidates:
        p = raw_dir / name
        if p.exists():
            return p
    if required:
        raise DataError(f"none of {', '.join(candidates)} found under {raw_dir}")
    return None


def _read_sep(path: Path, sep: str):
    """Yield (lineno, fields) from a separator-delimited file; a header
    line (non-numeric first field) is skipped."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            fields = line.split(sep)
            if lineno == 1 and not fields[0].strip().isdigit():
                continue
            yield lineno, fields


def _read_csv(path: Path):
    with open(path, encoding="utf-8", errors="replace", newline="") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            if not fields:
                continue
            if lineno == 1 and not fields[0].strip().isdigit():
                continue
            yield lineno, fields


def _read_auto(path: Path):
    """`.dat` files use `::`, everything else is treated as CSV."""
    if path.suffix == ".dat":
        return _read_sep(path, "::")
    return _read_csv(path)


class _NameTable:
    """Raw id -> display name with collision-proofing."""

    def __init__(self):
        self._by_id: dict[str, str] = {}
        self._used: set[str] = set()

    def put(self, raw_id: str, name: str) -> None:
        name = name.strip()
        if not name:
            return
        if name in self._used:
            name = f"{name} ({raw_id})"
        self._used.add(name)
        self._by_id[raw_id] = name

    def get(self, raw_id: str, prefix: str) -> str:
        return self._by_id.get(raw_id, f"{prefix}{raw_id}")


def _clean_tag(text: str) -> str:
    return " ".join(text.strip().lower().split())


def convert_movielens(raw_dir) -> KnowledgeGraph:
    raw_dir = Path(raw_dir)
    movies = _NameTable()
    names_file = _find(raw_dir, ("movies.dat", "movies.csv"), required=False)
    if names_file is not None:
        for _, fields in _read_auto(names_file):
            if len(fields) >= 2:
                movies.put(fields[0].strip(), fields[1])

    kg = KnowledgeGraph()
    ratings = _find(raw_dir, ("ratings.dat", "ratings.csv"))
    for lineno, fields in _read_auto(ratings):
        if len(fields) < 3:
            raise DataError(f"{ratings}:{lineno}: expected user, movie, rating")
        kg.add_interaction(f"u{fields[0].strip()}",
                           movies.get(fields[1].strip(), "m"))
    tags = _find(raw_dir, ("tags.dat", "tags.csv"))
    for lineno, fields in _read_auto(tags):
        if len(fields) < 3:
            raise DataError(f"{tags}:{lineno}: expected user, movie, tag")
        tag = _clean_tag(fields[2])
        if tag:
            kg.add_tagging(movies.get(fields[1].strip(), "m"), tag)
    return kg


def convert_lastfm(raw_dir) -> KnowledgeGraph:
    raw_dir = Path(raw_dir)
    artists = _NameTable()
    names_file = _find(raw_dir, ("artists.dat",), required=False)
    if names_file is not None:
        for _, fields in _read_sep(names_file, "\t"):
            if len(fields) >= 2:
                artists.put(fields[0].strip(), fields[1])
    tag_names = _NameTable()
    for _, fields in _read_sep(_find(raw_dir, ("tags.dat",)), "\t"):
        if len(fields) >= 2:
            tag_names.put(fields[0].strip(), _clean_tag(fields[1]))

    kg = KnowledgeGraph()
    listens = _find(raw_dir, ("user_artists.dat",))
    for lineno, fields in _read_sep(listens, "\t"):
        if len(fields) < 2:
            raise DataError(f"{listens}:{lineno}: expected user, artist")
        kg.add_interaction(f"u{fields[0].strip()}",
                           artists.get(fields[1].strip(), "a"))
    tagged = _find(raw_dir, ("user_taggedartists.dat",))
    for lineno, fields in _read_sep(tagged, "\t"):
        if len(fields) < 3:
            raise DataError(f"{tagged}:{lineno}: expected user, artist, tag")
        kg.add_tagging(artists.get(fields[1].strip(), "a"),
                       tag_names.get(fields[2].strip(), "t"))
    return kg


def convert_steam(raw_dir) -> KnowledgeGraph:
    raw_dir = Path(raw_dir)
    apps = _NameTable()
    names_file = _find(raw_dir, ("apps.csv",), required=False)
    if names_file is not None:
        for _, fields in _read_csv(names_file):
            if len(fields) >= 2:
                apps.put(fields[0].strip(), fields[1])

    kg = KnowledgeGraph()
    reviews = _find(raw_dir, ("reviews.csv",))
    for lineno, fields in _read_csv(reviews):
        if len(fields) < 2:
            raise DataError(f"{reviews}:{lineno}: expected user, app")
        kg.add_interaction(f"u{fields[0].strip()}",
                           apps.get(fields[1].strip(), "app"))
    tags_file = _find(raw_dir, ("app_tags.csv",))
    for lineno, fields in _read_csv(tags_file):
        if len(fields) < 2:
            raise DataError(f"{tags_file}:{lineno}: expected app, tag")
        tag = _clean_tag(fields[1])
        if tag:
            kg.add_tagging(apps.get(fields[0].strip(), "app"), tag)
    return kg


CONVERTERS = {
    "movielens": convert_movielens,
    "lastfm": convert_lastfm,
    "steam": convert_steam,
}


def convert(dataset: str, raw_dir, out_path):
    """Run one converter and write the triple file; returns the stats."""
    if dataset not in CONVERTERS:
        raise DataError(f"unknown dataset {dataset!r}; expected one of {DATASETS}")
    kg = CONVERTERS[dataset](raw_dir)
    if not kg.triples:
        raise DataError(f"no triples produced from {raw_dir}")
    save_triples(kg, out_path)
    return compute_stats(kg)

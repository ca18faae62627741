"""User/object/tag knowledge graph with dense per-class integer ids.

Triples come from UTF-8 tab-separated files (`head <TAB> relation <TAB>
tail`, `#` starts a comment line) with two relations: a user interacting
with an object, and an object carrying a tag. Ids are assigned in
first-appearance order within each entity class, so the same file always
indexes the same way. Graphs are treated as undirected downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError

INTERACT = "interact"
TAGGED_WITH = "tagged_with"
RELATIONS = (INTERACT, TAGGED_WITH)


class EntityIndex:
    """Bijective name <-> id mapping; ids run in first-appearance order."""

    __slots__ = ("_ids", "_names")

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._names: list[str] = []

    def intern(self, name: str) -> int:
        i = self._ids.get(name)
        if i is None:
            i = len(self._names)
            self._ids[name] = i
            self._names.append(name)
        return i

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise DataError(f"unknown entity name: {name!r}") from None

    def name_of(self, entity_id: int) -> str:
        return self._names[entity_id]

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __iter__(self):
        return iter(self._names)


class KnowledgeGraph:
    """Indexed triple store over users, objects, and tags.

    Pair lists keep insertion (file) order. Duplicate triples are stored
    once; the multiplicity is kept in `duplicate_count` for diagnostics.
    Instances are treated as read-only once fully built.
    """

    def __init__(self):
        self.users = EntityIndex()
        self.objects = EntityIndex()
        self.tags = EntityIndex()
        self.interact_pairs: list[tuple[int, int]] = []
        self.tagged_pairs: list[tuple[int, int]] = []
        self.duplicate_count = 0
        self._events: list[tuple[str, int, int]] = []
        self._seen: set[tuple[str, int, int]] = set()

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_tags(self) -> int:
        return len(self.tags)

    @property
    def triples(self) -> list[tuple[str, int, int]]:
        """All stored triples as (relation, head_id, tail_id), insertion order."""
        return list(self._events)

    def add_interaction(self, user: str, obj: str) -> None:
        u = self.users.intern(user)
        o = self.objects.intern(obj)
        self._add(INTERACT, u, o, self.interact_pairs)

    def add_tagging(self, obj: str, tag: str) -> None:
        o = self.objects.intern(obj)
        t = self.tags.intern(tag)
        self._add(TAGGED_WITH, o, t, self.tagged_pairs)

    def _add(self, relation, head, tail, pairs) -> None:
        key = (relation, head, tail)
        if key in self._seen:
            self.duplicate_count += 1
            return
        self._seen.add(key)
        pairs.append((head, tail))
        self._events.append(key)


@dataclass
class KgStats:
    n_users: int
    n_objects: int
    n_tags: int
    n_interact: int
    n_tagged: int
    interact_density: float
    tagged_density: float
    duplicates: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def load_triples(path) -> KnowledgeGraph:
    """Parse a triple file into an indexed KnowledgeGraph.

    Raises DataError for malformed lines (with the line number), unknown
    relation tokens, or a file containing no triples at all.
    """
    kg = KnowledgeGraph()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(
                    f"{path}:{lineno}: expected 'head<TAB>relation<TAB>tail', "
                    f"got {line!r}"
                )
            head, relation, tail = (p.strip() for p in parts)
            if not head or not tail:
                raise DataError(f"{path}:{lineno}: empty head or tail in {line!r}")
            if relation == INTERACT:
                kg.add_interaction(head, tail)
            elif relation == TAGGED_WITH:
                kg.add_tagging(head, tail)
            else:
                raise DataError(f"{path}:{lineno}: unknown relation {relation!r}")
    if not kg._events:
        raise DataError(f"{path}: no triples found")
    return kg


def save_triples(kg: KnowledgeGraph, path) -> None:
    """Write the graph back out in insertion order.

    Replaying insertion order preserves first-appearance ids, so a
    reload yields identical indices and pair lists.
    """
    heads = {INTERACT: kg.users, TAGGED_WITH: kg.objects}
    tails = {INTERACT: kg.objects, TAGGED_WITH: kg.tags}
    with open(path, "w", encoding="utf-8") as fh:
        for relation, head, tail in kg._events:
            fh.write(
                f"{heads[relation].name_of(head)}\t{relation}\t"
                f"{tails[relation].name_of(tail)}\n"
            )


def compute_stats(kg: KnowledgeGraph) -> KgStats:
    """Entity/edge counts plus edge densities (|edges| / (rows * cols))."""

    def density(edges, rows, cols):
        return edges / (rows * cols) if rows and cols else 0.0

    return KgStats(
        n_users=kg.n_users,
        n_objects=kg.n_objects,
        n_tags=kg.n_tags,
        n_interact=len(kg.interact_pairs),
        n_tagged=len(kg.tagged_pairs),
        interact_density=density(len(kg.interact_pairs), kg.n_users, kg.n_objects),
        tagged_density=density(len(kg.tagged_pairs), kg.n_objects, kg.n_tags),
        duplicates=kg.duplicate_count,
    )


def tag_sets(kg: KnowledgeGraph) -> dict[int, list[int]]:
    """Observed tag ids per object, sorted; every object id is present,
    objects without tags map to an empty list."""
    sets: dict[int, list[int]] = {o: [] for o in range(kg.n_objects)}
    for obj, tag in kg.tagged_pairs:
        sets[obj].append(tag)
    for obj in sets:
        sets[obj].sort()
    return sets

"""Splitting, top-k ranking metrics, bucketed reports, and a planted
cluster dataset for end-to-end checks.

Conventions (also echoed in every report's metadata): tags observed in the
training split are excluded from an object's candidate list unless asked
otherwise; recall uses the full truth size as denominator; metrics are
macro-averaged over objects that have at least one test tag; score ties
break by ascending tag id.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .kg import KnowledgeGraph
from .trainer import TrainedModel, substream

DEFAULT_KS = (3, 5)
DEFAULT_BUCKET_EDGES = (10, 20, 30, 40)


@dataclass
class Split:
    """Disjoint train/test pair lists whose union is the pair universe
    they were drawn from."""

    train: list[tuple[int, int]]
    test: list[tuple[int, int]]
    ratio: float
    seed: int

    def train_tags_by_object(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for obj, tag in self.train:
            out.setdefault(obj, set()).add(tag)
        return out

    def test_tags_by_object(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for obj, tag in self.test:
            out.setdefault(obj, set()).add(tag)
        return out


def split_pairs(pairs, ratio: float, seed: int, stream: str = "split") -> Split:
    """Uniform random pair-level split; size of the train side is
    round(ratio * n), so it is within one pair of the exact ratio.

    `stream` names the substream under the seed, letting callers draw
    several independent splits (sweeps) from one root seed.
    """
    if not 0.0 < ratio < 1.0:
        raise DataError(f"split ratio must be in (0, 1), got {ratio}")
    if len(pairs) < 2:
        raise DataError("need at least 2 pairs to split")
    rng = substream(seed, stream)
    order = rng.permutation(len(pairs))
    n_train = int(round(ratio * len(pairs)))
    n_train = min(max(n_train, 1), len(pairs) - 1)
    train_idx = np.sort(order[:n_train])
    test_idx = np.sort(order[n_train:])
    pairs = list(pairs)
    return Split(
        train=[pairs[i] for i in train_idx],
        test=[pairs[i] for i in test_idx],
        ratio=ratio,
        seed=seed,
    )


def save_split(split: Split, path) -> None:
    payload = {
        "ratio": split.ratio,
        "seed": split.seed,
        "train": [list(p) for p in split.train],
        "test": [list(p) for p in split.test],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_split(path) -> Split:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        return Split(
            train=[(int(o), int(t)) for o, t in payload["train"]],
            test=[(int(o), int(t)) for o, t in payload["test"]],
            ratio=float(payload["ratio"]),
            seed=int(payload["seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed split file ({exc})") from None


def rank_tags(z_obj: np.ndarray, z_tag: np.ndarray, object_id: int,
              exclude=()) -> np.ndarray:
    """All candidate tags sorted by score descending, ties by ascending id.

    `exclude` removes tags (typically the object's training tags) from the
    candidate set.
    """
    if not 0 <= object_id < z_obj.shape[0]:
        raise IndexError(f"object id {object_id} out of range")
    scores = z_tag @ z_obj[object_id]
    candidates = np.arange(z_tag.shape[0])
    if len(exclude):
        mask = np.ones(z_tag.shape[0], dtype=bool)
        mask[list(exclude)] = False
        candidates = candidates[mask]
        scores = scores[mask]
    order = np.lexsort((candidates, -scores))
    return candidates[order]


def recall_at_k(ranked, truth, k: int) -> float:
    """|top-k intersect truth| / |truth|."""
    truth = set(truth)
    if not truth:
        raise DataError("recall is undefined for an empty truth set")
    hits = sum(1 for t in list(ranked)[:k] if t in truth)
    return hits / len(truth)


def ndcg_at_k(ranked, truth, k: int) -> float:
    """Binary-gain NDCG: DCG over the top k against the ideal DCG of
    min(k, |truth|) leading hits."""
    truth = set(truth)
    if not truth:
        raise DataError("ndcg is undefined for an empty truth set")
    dcg = sum(
        1.0 / math.log2(i + 2)
        for i, t in enumerate(list(ranked)[:k])
        if t in truth
    )
    idcg = sum(1.0 / math.log2(i + 2) for i in range(min(k, len(truth))))
    return dcg / idcg


def _bucket_bounds(edges) -> list[tuple[int, float, str]]:
    # Bucket 0 is exactly zero training tags (cold start); the rest are
    # half-open ranges keyed by the training-tag count.
    edges = sorted(edges)
    bounds = [(0, 0, "0")]
    lo = 1
    for hi in edges:
        bounds.append((lo, hi - 1, f"{lo}-{hi - 1}"))
        lo = hi
    bounds.append((lo, math.inf, f"{lo}+"))
    return bounds


@dataclass
class BucketMetrics:
    label: str
    n_objects: int
    metrics: dict[str, float]

    def to_dict(self) -> dict:
        return {"label": self.label, "n_objects": self.n_objects,
                "metrics": dict(self.metrics)}


@dataclass
class EvalReport:
    ks: tuple[int, ...]
    n_objects: int
    overall: dict[str, float]
    buckets: list[BucketMetrics]
    per_object: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_dict(self, include_per_object: bool = True) -> dict:
        d = {
            "ks": list(self.ks),
            "n_objects": self.n_objects,
            "overall": dict(self.overall),
            "buckets": [b.to_dict() for b in self.buckets],
            "metadata": dict(self.metadata),
        }
        if include_per_object:
            d["per_object"] = [dict(row) for row in self.per_object]
        return d


def evaluate(model: TrainedModel, split: Split, ks=DEFAULT_KS,
             bucket_edges=DEFAULT_BUCKET_EDGES, exclude_train: bool = True) -> EvalReport:
    """Macro-averaged Recall@k / NDCG@k over objects with at least one test
    tag, plus a breakdown bucketed by each object's training-tag count."""
    if not split.test:
        raise DataError("test split is empty")
    ks = tuple(sorted(set(int(k) for k in ks)))
    z_obj, z_tag = model.object_embeddings, model.tag_embeddings
    train_tags = split.train_tags_by_object()
    test_tags = split.test_tags_by_object()

    bounds = _bucket_bounds(bucket_edges)
    rows = []
    for obj in sorted(test_tags):
        truth = test_tags[obj]
        observed = train_tags.get(obj, set())
        exclude = observed if exclude_train else ()
        ranked = rank_tags(z_obj, z_tag, obj, exclude)
        row = {"object_id": obj, "n_train_tags": len(observed),
               "n_test_tags": len(truth)}
        for k in ks:
            row[f"recall@{k}"] = recall_at_k(ranked, truth, k)
            row[f"ndcg@{k}"] = ndcg_at_k(ranked, truth, k)
        rows.append(row)

    def averages(subset):
        out = {}
        for k in ks:
            for name in (f"recall@{k}", f"ndcg@{k}"):
                out[name] = (
                    float(np.mean([r[name] for r in subset])) if subset else 0.0
                )
        return out

    buckets = []
    for lo, hi, label in bounds:
        subset = [r for r in rows if lo <= r["n_train_tags"] <= hi]
        buckets.append(BucketMetrics(label, len(subset), averages(subset)))

    metadata = {
        "exclude_train_tags": exclude_train,
        "recall_denominator": "truth_size",
        "averaging": "macro_over_objects",
        "tie_break": "ascending_tag_id",
        "bucket_edges": list(bucket_edges),
    }
    return EvalReport(ks, len(rows), averages(rows), buckets, rows, metadata)


# --- planted-structure dataset ----------------------------------------------


@dataclass
class SyntheticSpec:
    """Clustered user/object/tag world for desk-scale end-to-end checks.

    Users mostly interact inside their own cluster (each intra pair drawn
    with `intra_probability`); every object carries its cluster's tags
    except `heldout_per_object` of them, which are withheld from the graph
    entirely and form the ground truth. `cold_per_cluster` objects per
    cluster get *all* their cluster tags withheld, so their links are
    recoverable only through the shared-user structure. Cross-cluster
    noise edges appear with `noise_probability`. The held-out links are
    therefore exactly the never-observed intra-cluster pairs.
    """

    clusters: int = 4
    objects_per_cluster: int = 20
    tags_per_cluster: int = 10
    users_per_cluster: int = 15
    intra_probability: float = 0.3
    noise_probability: float = 0.01
    heldout_per_object: int = 2
    cold_per_cluster: int = 0
    seed: int = 0

    def validate(self) -> None:
        if min(self.clusters, self.objects_per_cluster, self.tags_per_cluster,
               self.users_per_cluster) < 1:
            raise DataError("cluster sizes must be positive")
        if not 0 <= self.intra_probability <= 1 or not 0 <= self.noise_probability <= 1:
            raise DataError("probabilities must lie in [0, 1]")
        if not 0 < self.heldout_per_object < self.tags_per_cluster:
            raise DataError("heldout_per_object must be in (0, tags_per_cluster)")
        if not 0 <= self.cold_per_cluster < self.objects_per_cluster:
            raise DataError("cold_per_cluster must leave at least one warm object")


@dataclass
class SyntheticData:
    kg: KnowledgeGraph
    held_out: list[tuple[int, int]]
    object_clusters: dict[int, int]
    tag_clusters: dict[int, int]
    user_clusters: dict[int, int]
    spec: SyntheticSpec

    def split(self) -> Split:
        """Observed taggings as train, planted held-out links as test."""
        total = len(self.kg.tagged_pairs) + len(self.held_out)
        return Split(
            train=list(self.kg.tagged_pairs),
            test=list(self.held_out),
            ratio=len(self.kg.tagged_pairs) / total,
            seed=self.spec.seed,
        )


def generate_synthetic(spec: SyntheticSpec) -> SyntheticData:
    """Build the clustered graph deterministically from the spec's seed."""
    spec.validate()
    rng = substream(spec.seed, "synthetic")
    kg = KnowledgeGraph()
    held_names: list[tuple[str, str]] = []

    def user(c, i):
        return f"user{c}_{i}"

    def obj(c, i):
        return f"object{c}_{i}"

    def tag(c, i):
        return f"tag{c}_{i}"

    for c in range(spec.clusters):
        # Interactions: Bernoulli(intra) per user/object pair, then forced
        # edges so no user or object is left isolated.
        drawn = rng.random((spec.users_per_cluster, spec.objects_per_cluster))
        hit = drawn < spec.intra_probability
        for u in range(spec.users_per_cluster):
            if not hit[u].any():
                hit[u, int(rng.integers(spec.objects_per_cluster))] = True
        for o in range(spec.objects_per_cluster):
            if not hit[:, o].any():
                hit[int(rng.integers(spec.users_per_cluster)), o] = True
        for u in range(spec.users_per_cluster):
            for o in range(spec.objects_per_cluster):
                if hit[u, o]:
                    kg.add_interaction(user(c, u), obj(c, o))
        # Taggings: each object carries the full cluster tag set minus the
        # held-out ones, which never enter the graph. Cold objects hold out
        # everything. Every tag must keep at least one warm observer or it
        # would vanish as an entity.
        cold = set(int(i) for i in rng.choice(spec.objects_per_cluster,
                                              size=spec.cold_per_cluster,
                                              replace=False)) if spec.cold_per_cluster else set()
        all_tags = set(range(spec.tags_per_cluster))
        held_sets = []
        for o in range(spec.objects_per_cluster):
            if o in cold:
                held_sets.append(set(all_tags))
            else:
                held_sets.append(set(int(h) for h in rng.choice(
                    spec.tags_per_cluster, size=spec.heldout_per_object,
                    replace=False)))
        warm = [o for o in range(spec.objects_per_cluster) if o not in cold]
        for t in range(spec.tags_per_cluster):
            if all(t in held_sets[o] for o in warm):
                held_sets[warm[int(rng.integers(len(warm)))]].discard(t)
        for o in range(spec.objects_per_cluster):
            for t in range(spec.tags_per_cluster):
                if t in held_sets[o]:
                    held_names.append((obj(c, o), tag(c, t)))
                else:
                    kg.add_tagging(obj(c, o), tag(c, t))

    # Cross-cluster noise, in a fixed scan order.
    for cu in range(spec.clusters):
        for co in range(spec.clusters):
            if cu == co:
                continue
            noisy = rng.random((spec.users_per_cluster, spec.objects_per_cluster))
            for u in range(spec.users_per_cluster):
                for o in range(spec.objects_per_cluster):
                    if noisy[u, o] < spec.noise_probability:
                        kg.add_interaction(user(cu, u), obj(co, o))
    for co in range(spec.clusters):
        for ct in range(spec.clusters):
            if co == ct:
                continue
            noisy = rng.random((spec.objects_per_cluster, spec.tags_per_cluster))
            for o in range(spec.objects_per_cluster):
                for t in range(spec.tags_per_cluster):
                    if noisy[o, t] < spec.noise_probability:
                        kg.add_tagging(obj(co, o), tag(ct, t))

    held_out = [(kg.objects.id_of(o), kg.tags.id_of(t)) for o, t in held_names]
    object_clusters = {
        kg.objects.id_of(obj(c, o)): c
        for c in range(spec.clusters) for o in range(spec.objects_per_cluster)
    }
    tag_clusters = {
        kg.tags.id_of(tag(c, t)): c
        for c in range(spec.clusters) for t in range(spec.tags_per_cluster)
    }
    user_clusters = {
        kg.users.id_of(user(c, u)): c
        for c in range(spec.clusters) for u in range(spec.users_per_cluster)
    }
    return SyntheticData(kg, held_out, object_clusters, tag_clusters,
                         user_clusters, spec)

"""Co-occurrence graphs over objects and over tags, SPPMI weighting, and
symmetric adjacency normalization.

Two objects co-occur once per distinct user that interacts with both (a
length-2 hop through the user). Two tags co-occur once per distinct object
carrying both. Counting is exact: with B the 0/1 incidence matrix of the
relevant relation, the pair-count matrix is B'B with the diagonal removed.

Link weights are shifted positive PMI with the symmetric-corpus
convention: D is the grand total of pair counts (both orientations) and
the marginals are row sums, so

    weight(i, j) = max(log(#(i,j) * D / (#(i) * #(j))) - log(k), 0).

Shifts k < 1 are allowed and densify the graph (the shift term becomes
positive).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DataError
from .kg import KnowledgeGraph
from .linalg import csr_from_coo, validate_csr

OBJECT_SIDE = "object"
TAG_SIDE = "tag"


@dataclass
class CooccurrenceCounts:
    """Symmetric pair counts #(i,j) with zero diagonal, their row-sum
    marginals #(i), and the grand total D."""

    side: str
    n: int
    pair_counts: sparse.csr_matrix
    marginals: np.ndarray
    total: float


@dataclass
class SppmiGraph:
    """Symmetric nonnegative link weights for one side of the dual graphs."""

    side: str
    shift: float
    weights: sparse.csr_matrix

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def nnz(self) -> int:
        return self.weights.nnz

    def density(self) -> float:
        return self.nnz / (self.n * self.n) if self.n else 0.0


@dataclass
class NormalizedAdjacency:
    """Self-looped, symmetrically normalized adjacency used by the graph
    encoders: with Abar = A + I and dbar the row sums of Abar, entry (i,j)
    is Abar_ij / sqrt(dbar_i * dbar_j)."""

    matrix: sparse.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _incidence(pairs, n_rows, n_cols) -> sparse.csr_matrix:
    if not pairs:
        return sparse.csr_matrix((n_rows, n_cols), dtype=np.float64)
    arr = np.asarray(pairs, dtype=np.int64)
    return csr_from_coo(arr[:, 0], arr[:, 1], np.ones(len(arr)), (n_rows, n_cols))


def _counts_from_incidence(b: sparse.csr_matrix, side: str) -> CooccurrenceCounts:
    n = b.shape[1]
    pair = (b.T @ b).tocoo()
    off_diag = pair.row != pair.col
    counts = csr_from_coo(
        pair.row[off_diag], pair.col[off_diag], pair.data[off_diag], (n, n)
    )
    marginals = np.asarray(counts.sum(axis=1)).ravel()
    return CooccurrenceCounts(side, n, counts, marginals, float(marginals.sum()))


def object_cooccurrence(kg: KnowledgeGraph) -> CooccurrenceCounts:
    """#(o_i, o_j) = number of distinct users interacting with both."""
    b = _incidence(kg.interact_pairs, kg.n_users, kg.n_objects)
    return _counts_from_incidence(b, OBJECT_SIDE)


def tag_cooccurrence(kg: KnowledgeGraph) -> CooccurrenceCounts:
    """#(t_i, t_j) = number of distinct objects carrying both tags."""
    b = _incidence(kg.tagged_pairs, kg.n_objects, kg.n_tags)
    return _counts_from_incidence(b, TAG_SIDE)


def sppmi(counts: CooccurrenceCounts, k: float) -> SppmiGraph:
    """Shifted positive PMI weights; entries that shift to <= 0 are dropped
    from the sparsity pattern entirely."""
    if k <= 0:
        raise ValueError(f"SPPMI shift must be positive, got {k}")
    coo = counts.pair_counts.tocoo()
    if coo.nnz == 0:
        empty = sparse.csr_matrix((counts.n, counts.n), dtype=np.float64)
        return SppmiGraph(counts.side, float(k), empty)
    # grouping the marginal terms keeps the result exactly symmetric
    # (float subtraction order would otherwise differ across orientations)
    log_marginals = np.log(counts.marginals[coo.row]) + np.log(counts.marginals[coo.col])
    weights = (np.log(coo.data) + np.log(counts.total)) - log_marginals - np.log(k)
    keep = weights > 0
    mat = csr_from_coo(coo.row[keep], coo.col[keep], weights[keep], (counts.n, counts.n))
    return SppmiGraph(counts.side, float(k), mat)


def normalize(g: SppmiGraph) -> NormalizedAdjacency:
    """Add unit self-loops and scale each entry by the inverse square roots
    of its endpoints' loop-augmented degrees. Degrees are always >= 1, so
    no division guard is needed."""
    n = g.n
    a = g.weights.tocoo()
    rows = np.concatenate([a.row, np.arange(n)])
    cols = np.concatenate([a.col, np.arange(n)])
    vals = np.concatenate([a.data, np.ones(n)])
    looped = csr_from_coo(rows, cols, vals, (n, n))
    degree = np.asarray(looped.sum(axis=1)).ravel()
    scale = 1.0 / np.sqrt(degree)
    out = looped.tocoo()
    data = out.data * (scale[out.row] * scale[out.col])
    return NormalizedAdjacency(csr_from_coo(out.row, out.col, data, (n, n)))


@dataclass
class DualGraphs:
    object_graph: SppmiGraph
    tag_graph: SppmiGraph

    def normalized(self) -> tuple[NormalizedAdjacency, NormalizedAdjacency]:
        return normalize(self.object_graph), normalize(self.tag_graph)


def build_graphs(kg: KnowledgeGraph, k_object: float, k_tag: float) -> DualGraphs:
    return DualGraphs(
        object_graph=sppmi(object_cooccurrence(kg), k_object),
        tag_graph=sppmi(tag_cooccurrence(kg), k_tag),
    )


def _meta_path(txt_path) -> Path:
    return Path(txt_path).with_suffix(".json")


def save_graph(g: SppmiGraph, txt_path) -> None:
    """Coordinate text snapshot (`i j weight` per stored entry, both
    orientations) plus a JSON sidecar with side, shift, n, and nnz."""
    coo = g.weights.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(txt_path, "w", encoding="utf-8") as fh:
        for i, j, w in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i} {j} {w:.17g}\n")
    meta = {"side": g.side, "k": g.shift, "n": g.n, "nnz": int(g.nnz)}
    with open(_meta_path(txt_path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_graph(txt_path) -> SppmiGraph:
    meta_path = _meta_path(txt_path)
    try:
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"graph sidecar not found: {meta_path}") from None
    rows, cols, vals = [], [], []
    with open(txt_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"{txt_path}:{lineno}: expected 'i j weight'")
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
            vals.append(float(parts[2]))
    n = int(meta["n"])
    mat = csr_from_coo(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                       np.array(vals), (n, n)) if rows else \
        sparse.csr_matrix((n, n), dtype=np.float64)
    validate_csr(mat)
    if (mat != mat.T).nnz:
        raise DataError(f"{txt_path}: stored graph is not symmetric")
    if mat.nnz != int(meta["nnz"]):
        raise DataError(f"{txt_path}: nnz does not match sidecar")
    return SppmiGraph(meta["side"], float(meta["k"]), mat)

"""Shared generators and independent oracles for the test suite.

The oracles here deliberately re-derive results by the most literal means
available (triple loops, explicit path enumeration, dense arithmetic) so
they stay independent of the code paths they check.
"""

import numpy as np

from taglink.kg import KnowledgeGraph


def random_kg(rng, max_users=6, max_objects=8, max_tags=6,
              p_interact=0.4, p_tag=0.4) -> KnowledgeGraph:
    """Random small graph; guaranteed to contain at least one edge of each
    relation so every entity class is populated."""
    n_users = int(rng.integers(1, max_users + 1))
    n_objects = int(rng.integers(2, max_objects + 1))
    n_tags = int(rng.integers(1, max_tags + 1))
    kg = KnowledgeGraph()
    for u in range(n_users):
        for o in range(n_objects):
            if rng.random() < p_interact:
                kg.add_interaction(f"u{u}", f"o{o}")
    for o in range(n_objects):
        for t in range(n_tags):
            if rng.random() < p_tag:
                kg.add_tagging(f"o{o}", f"t{t}")
    if not kg.interact_pairs:
        kg.add_interaction("u0", "o0")
    if not kg.tagged_pairs:
        kg.add_tagging("o0", "t0")
    return kg


def path_count_oracle(edges, n_side) -> np.ndarray:
    """Count 2-hop paths side -> middle -> side by literally enumerating
    every pair of edges that shares a middle entity.

    `edges` is a list of (middle_id, side_id) pairs (already deduplicated).
    """
    by_middle: dict[int, list[int]] = {}
    for mid, side in edges:
        by_middle.setdefault(mid, []).append(side)
    counts = np.zeros((n_side, n_side))
    for sides in by_middle.values():
        for i in sides:
            for j in sides:
                if i != j:
                    counts[i, j] += 1.0
    return counts


def ppmi_oracle(counts: np.ndarray) -> np.ndarray:
    """Dense positive PMI from a dense symmetric count matrix."""
    marginals = counts.sum(axis=1)
    total = marginals.sum()
    out = np.zeros_like(counts)
    n = counts.shape[0]
    for i in range(n):
        for j in range(n):
            if counts[i, j] > 0:
                val = np.log(counts[i, j] * total / (marginals[i] * marginals[j]))
                out[i, j] = max(val, 0.0)
    return out


def normalize_oracle(a: np.ndarray) -> np.ndarray:
    """Dense self-looped symmetric normalization."""
    abar = a + np.eye(a.shape[0])
    d = abar.sum(axis=1)
    scale = np.diag(1.0 / np.sqrt(d))
    return scale @ abar @ scale


def gcn_oracle(adj_dense: np.ndarray, w0: np.ndarray, w1: np.ndarray) -> np.ndarray:
    """Dense re-statement of the two-layer convolution."""
    return adj_dense @ np.maximum(adj_dense @ w0, 0.0) @ w1


def central_difference(fn, arrays: dict, eps: float = 1e-5) -> dict:
    """Central finite differences of a scalar function of named arrays."""
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            up = fn()
            arr[idx] = orig - eps
            down = fn()
            arr[idx] = orig
            g[idx] = (up - down) / (2.0 * eps)
            it.iternext()
        grads[name] = g
    return grads


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray,
                       floor: float = 1e-4) -> float:
    """Per-entry |a - n| / max(|a|, |n|, floor), maxed over entries; the
    floor makes near-zero gradients compare absolutely."""
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))

"""Dual graph encoders, the inner-product decoder, and exact gradients.

Each encoder is a two-layer graph convolution over a normalized adjacency
Ahat:

    Z = Ahat . ReLU(Ahat . W0) . W1

Input features are one-hot and never materialized, so the first layer's
weights double as per-node embeddings. The ablation encoder drops the
adjacency (Ahat = I), leaving a plain two-layer map ReLU(W0) . W1.

The decoder scores an (object, tag) pair by the inner product of their
embedding rows. Ranking probabilities come from a softmax over all tags;
training replaces the softmax with a noise-contrastive binary classifier:
with K negatives per positive drawn from noise distribution pn,

    p(y=1 | tag j, object i) = sigmoid(s_ij - log(K * pn_j)),

the softmax normalizer being dropped (the classifier self-normalizes).
All log-probabilities go through softplus, never through raw exp ratios.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass

import numpy as np

from .dualgraph import NormalizedAdjacency
from .errors import NumericalError
from .linalg import (as_dense, dense_bytes, dense_from_bytes, matmul, relu,
                     relu_mask_backward, spmm, transpose)

GCN = "gcn"
MLP = "mlp"
ENCODER_KINDS = (GCN, MLP)

CHECKPOINT_MAGIC = b"TLCK1\n"


@dataclass
class EncoderSpec:
    """Shape contract for one encoder; GCN encoders bind an adjacency of
    matching size."""

    kind: str
    input_dim: int
    hidden_dim: int
    output_dim: int
    adjacency: NormalizedAdjacency | None = None

    def validate(self) -> None:
        if self.kind not in ENCODER_KINDS:
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if min(self.input_dim, self.hidden_dim, self.output_dim) <= 0:
            raise ValueError("encoder dimensions must be positive")
        if self.kind == GCN:
            if self.adjacency is None:
                raise ValueError("gcn encoder requires an adjacency")
            if self.adjacency.n != self.input_dim:
                raise ValueError(
                    f"adjacency size {self.adjacency.n} != input dim {self.input_dim}"
                )


@dataclass
class ModelParams:
    """The four trainable weight matrices. `generation` counts parameter
    updates so stale forward caches can be detected."""

    obj_w0: np.ndarray
    obj_w1: np.ndarray
    tag_w0: np.ndarray
    tag_w1: np.ndarray
    generation: int = 0

    def as_dict(self) -> dict[str, np.ndarray]:
        return {
            "obj_w0": self.obj_w0,
            "obj_w1": self.obj_w1,
            "tag_w0": self.tag_w0,
            "tag_w1": self.tag_w1,
        }

    def bump(self) -> None:
        self.generation += 1


@dataclass
class EncoderCache:
    """Everything the backward pass needs without re-running forward."""

    pre_hidden: np.ndarray
    hidden: np.ndarray
    embeddings: np.ndarray
    w1: np.ndarray
    generation: int


@dataclass
class DualCache:
    obj: EncoderCache
    tag: EncoderCache
    generation: int


def gcn_forward(adj: NormalizedAdjacency, w0, w1, generation: int = 0):
    """Two-layer graph convolution with one-hot inputs absorbed into W0."""
    pre = spmm(adj.matrix, as_dense(w0))
    hidden = relu(pre)
    z = matmul(spmm(adj.matrix, hidden), as_dense(w1))
    return z, EncoderCache(pre, hidden, z, as_dense(w1), generation)


def gcn_backward(adj: NormalizedAdjacency, cache: EncoderCache, dz):
    """Gradients of the two-layer convolution. The adjacency is symmetric,
    so its transpose products reuse the same matrix."""
    dz = as_dense(dz)
    agg = spmm(adj.matrix, dz)
    dw1 = matmul(transpose(cache.hidden), agg)
    dpre = relu_mask_backward(matmul(agg, transpose(cache.w1)), cache.pre_hidden)
    dw0 = spmm(adj.matrix, dpre)
    return dw0, dw1


def mlp_forward(w0, w1, generation: int = 0):
    """Graph-free two-layer map; identical to the GCN with identity adjacency."""
    pre = as_dense(w0)
    hidden = relu(pre)
    z = matmul(hidden, as_dense(w1))
    return z, EncoderCache(pre, hidden, z, as_dense(w1), generation)


def mlp_backward(cache: EncoderCache, dz):
    dz = as_dense(dz)
    dw1 = matmul(transpose(cache.hidden), dz)
    dw0 = relu_mask_backward(matmul(dz, transpose(cache.w1)), cache.pre_hidden)
    return dw0, dw1


def encode(spec: EncoderSpec, w0, w1, generation: int = 0):
    if spec.kind == GCN:
        return gcn_forward(spec.adjacency, w0, w1, generation)
    return mlp_forward(w0, w1, generation)


def encoder_backward(spec: EncoderSpec, cache: EncoderCache, dz):
    if spec.kind == GCN:
        return gcn_backward(spec.adjacency, cache, dz)
    return mlp_backward(cache, dz)


def dual_forward(obj_spec: EncoderSpec, tag_spec: EncoderSpec, params: ModelParams):
    z_obj, obj_cache = encode(obj_spec, params.obj_w0, params.obj_w1, params.generation)
    z_tag, tag_cache = encode(tag_spec, params.tag_w0, params.tag_w1, params.generation)
    return z_obj, z_tag, DualCache(obj_cache, tag_cache, params.generation)


def end_to_end_backward(obj_spec, tag_spec, params: ModelParams, cache: DualCache,
                        dz_obj, dz_tag) -> dict[str, np.ndarray]:
    """Chain decoder gradients through both encoders to the four weights."""
    if cache.generation != params.generation:
        raise ValueError(
            f"stale forward cache: generation {cache.generation} vs "
            f"params generation {params.generation}"
        )
    obj_w0, obj_w1 = encoder_backward(obj_spec, cache.obj, dz_obj)
    tag_w0, tag_w1 = encoder_backward(tag_spec, cache.tag, dz_tag)
    return {"obj_w0": obj_w0, "obj_w1": obj_w1, "tag_w0": tag_w0, "tag_w1": tag_w1}


# --- decoder ---------------------------------------------------------------


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out) if out.ndim == 0 else out


def softplus(x):
    return np.logaddexp(0.0, x)


def score(z_obj: np.ndarray, z_tag: np.ndarray, object_id: int, tag_id: int) -> float:
    """Inner-product relevance of one (object, tag) pair."""
    if not 0 <= object_id < z_obj.shape[0]:
        raise IndexError(f"object id {object_id} out of range")
    if not 0 <= tag_id < z_tag.shape[0]:
        raise IndexError(f"tag id {tag_id} out of range")
    return float(z_obj[object_id] @ z_tag[tag_id])


def score_matrix(z_obj: np.ndarray, z_tag: np.ndarray) -> np.ndarray:
    """All-pairs scores, objects by tags."""
    return matmul(as_dense(z_obj), transpose(as_dense(z_tag)))


def softmax_row(scores) -> np.ndarray:
    """Max-shifted softmax over one score vector."""
    s = np.asarray(scores, dtype=np.float64)
    e = np.exp(s - s.max())
    return e / e.sum()


def _nce_bias(negatives_count: int, noise_prob) -> np.ndarray:
    if negatives_count < 1:
        raise ValueError(f"need at least one negative, got {negatives_count}")
    noise_prob = np.asarray(noise_prob, dtype=np.float64)
    if np.any(noise_prob <= 0):
        raise ValueError("noise probability must be positive")
    return math.log(negatives_count) + np.log(noise_prob)


def nce_posterior(s, negatives_count: int, noise_prob):
    """p(y=1 | score) under the K-to-1 noise-contrastive classifier."""
    return sigmoid(np.asarray(s, dtype=np.float64) - _nce_bias(negatives_count, noise_prob))


def nce_negative_prob(s, negatives_count: int, noise_prob):
    """p(y=0 | score); complements nce_posterior to exactly 1."""
    return 1.0 - nce_posterior(s, negatives_count, noise_prob)


@dataclass(frozen=True)
class Batch:
    """One mini-batch of positives with pre-sampled negatives."""

    objects: np.ndarray    # (B,)
    positives: np.ndarray  # (B,)
    negatives: np.ndarray  # (B, K)

    @property
    def size(self) -> int:
        return int(self.objects.shape[0])

    @property
    def negatives_per_positive(self) -> int:
        return int(self.negatives.shape[1])


def scatter_pair_grads(batch: Batch, z_obj, z_tag, g_pos, g_neg):
    """Accumulate per-pair score gradients into full-shape dZ arrays.

    g_pos[b] is dLoss/ds for the b-th positive pair, g_neg[b, k] for its
    k-th negative. Accumulation order is fixed (row-major over the batch).
    """
    dz_obj = np.zeros_like(z_obj)
    dz_tag = np.zeros_like(z_tag)
    zo = z_obj[batch.objects]
    zt_pos = z_tag[batch.positives]
    zt_neg = z_tag[batch.negatives]
    contrib_obj = g_pos[:, None] * zt_pos + np.einsum("bk,bkd->bd", g_neg, zt_neg)
    np.add.at(dz_obj, batch.objects, contrib_obj)
    np.add.at(dz_tag, batch.positives, g_pos[:, None] * zo)
    neg_contrib = (g_neg[:, :, None] * zo[:, None, :]).reshape(-1, z_obj.shape[1])
    np.add.at(dz_tag, batch.negatives.ravel(), neg_contrib)
    return dz_obj, dz_tag


def nce_loss_and_grads(batch: Batch, z_obj, z_tag, noise_probs):
    """Negated noise-contrastive log-likelihood of the batch and its exact
    gradients with respect to the embedding rows the batch touches."""
    if batch.size == 0:
        raise ValueError("empty batch")
    k = batch.negatives_per_positive
    with np.errstate(divide="ignore"):
        log_pn = np.log(np.asarray(noise_probs, dtype=np.float64))
    log_k = math.log(k)
    zo = z_obj[batch.objects]
    x_pos = np.einsum("bd,bd->b", zo, z_tag[batch.positives]) - (log_k + log_pn[batch.positives])
    x_neg = np.einsum("bd,bkd->bk", zo, z_tag[batch.negatives]) - (log_k + log_pn[batch.negatives])
    if not (np.all(np.isfinite(x_pos)) and np.all(np.isfinite(x_neg))):
        raise NumericalError("non-finite score or zero noise probability in batch")
    loss = float(softplus(-x_pos).sum() + softplus(x_neg).sum())
    g_pos = sigmoid(x_pos) - 1.0
    g_neg = sigmoid(x_neg)
    dz_obj, dz_tag = scatter_pair_grads(batch, z_obj, z_tag, g_pos, g_neg)
    return loss, dz_obj, dz_tag


# --- checkpoint container ---------------------------------------------------


def save_checkpoint(path, header: dict, matrices: dict[str, np.ndarray]) -> None:
    """Single-file checkpoint: magic, JSON header, then one dense snapshot
    per matrix in header['matrices'] order. Byte-stable for fixed inputs."""
    header = dict(header)
    header["matrices"] = list(matrices.keys())
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<q", len(blob)))
        fh.write(blob)
        for name in header["matrices"]:
            fh.write(dense_bytes(matrices[name]))


def load_checkpoint(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[: len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    offset = len(CHECKPOINT_MAGIC)
    (blob_len,) = struct.unpack_from("<q", buf, offset)
    offset += 8
    header = json.loads(buf[offset:offset + blob_len].decode("utf-8"))
    offset += blob_len
    matrices = {}
    for name in header["matrices"]:
        matrices[name], offset = dense_from_bytes(buf, offset)
    if offset != len(buf):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    return header, matrices

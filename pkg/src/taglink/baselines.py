"""Graph-free reference models sharing the evaluation interface.

Both baselines learn free per-object and per-tag embedding tables (no
encoders) and score pairs by inner product. They differ only in the loss:
the factorization baseline fits squared error against 1 for observed
pairs and 0 for sampled unobserved ones, while the skip-gram baseline
reuses the exact noise-contrastive loss of the main model. Sharing one
training loop makes the two bit-identical whenever the loss kind matches.
"""

from __future__ import annotations

import math

import numpy as np

from . import model as M
from .errors import DataError, NumericalError
from .trainer import (AdamState, NoiseDistribution, TrainConfig, TrainedModel,
                      adam_step, build_noise, glorot, iterate_batches,
                      sample_negative_matrix, substream)

MSE = "mse"
NCE = "nce"
LOSS_KINDS = (MSE, NCE)


def mse_loss_and_grads(batch: M.Batch, z_obj, z_tag):
    """Squared error against targets 1 (positives) / 0 (negatives), with
    gradients scattered into the touched embedding rows."""
    if batch.size == 0:
        raise ValueError("empty batch")
    zo = z_obj[batch.objects]
    r_pos = np.einsum("bd,bd->b", zo, z_tag[batch.positives]) - 1.0
    r_neg = np.einsum("bd,bkd->bk", zo, z_tag[batch.negatives])
    loss = float(np.square(r_pos).sum() + np.square(r_neg).sum())
    dz_obj, dz_tag = M.scatter_pair_grads(batch, z_obj, z_tag,
                                          2.0 * r_pos, 2.0 * r_neg)
    return loss, dz_obj, dz_tag


def train_factor(kg, split, config: TrainConfig, loss_kind: str) -> TrainedModel:
    """Shared training loop for both baselines."""
    if loss_kind not in LOSS_KINDS:
        raise DataError(f"unknown loss kind {loss_kind!r}")
    config.validate()
    if not split.train:
        raise DataError("training split is empty")

    noise = build_noise(split.train, kg.n_tags, config.noise_exponent,
                        config.noise_smoothing)
    if loss_kind == MSE and config.mf_uniform_negatives:
        sampling = NoiseDistribution(np.full(kg.n_tags, 1.0 / kg.n_tags))
    else:
        sampling = noise

    rng_init = substream(config.seed, "init")
    params = {
        "object_embeddings": glorot(rng_init, kg.n_objects, config.output_dim),
        "tag_embeddings": glorot(rng_init, kg.n_tags, config.output_dim),
    }
    adam = AdamState.zeros_like(params)
    rng_shuffle = substream(config.seed, "shuffle")
    rng_neg = substream(config.seed, "negatives")

    pairs = np.asarray(split.train, dtype=np.int64)
    trace: list[float] = []
    step = 0
    for epoch in range(1, config.epochs + 1):
        epoch_loss = 0.0
        for idx in iterate_batches(len(pairs), config.batch_size, rng_shuffle):
            batch = M.Batch(
                pairs[idx, 0],
                pairs[idx, 1],
                sample_negative_matrix(rng_neg, sampling, pairs[idx, 1],
                                       config.negatives),
            )
            if loss_kind == NCE:
                loss, dz_obj, dz_tag = M.nce_loss_and_grads(
                    batch, params["object_embeddings"], params["tag_embeddings"],
                    noise.probabilities)
            else:
                loss, dz_obj, dz_tag = mse_loss_and_grads(
                    batch, params["object_embeddings"], params["tag_embeddings"])
            if not math.isfinite(loss):
                raise NumericalError(f"non-finite loss at epoch {epoch}, step {step}")
            step += 1
            adam_step(params, {"object_embeddings": dz_obj,
                               "tag_embeddings": dz_tag}, adam, step, config)
            epoch_loss += loss
        trace.append(epoch_loss / len(pairs))

    kind = "mf" if loss_kind == MSE else "skipgram"
    return TrainedModel(
        kind=kind,
        params={k: v.copy() for k, v in params.items()},
        object_embeddings=params["object_embeddings"],
        tag_embeddings=params["tag_embeddings"],
        config=config,
        loss_trace=trace,
        epoch=config.epochs,
    )


def train_mf(kg, split, config: TrainConfig) -> TrainedModel:
    return train_factor(kg, split, config, MSE)


def train_skipgram(kg, split, config: TrainConfig) -> TrainedModel:
    return train_factor(kg, split, config, NCE)

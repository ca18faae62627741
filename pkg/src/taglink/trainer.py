"""Mini-batch noise-contrastive training with Adam.

All randomness fans out from one root seed through named substreams
(init, shuffle, negatives, split, synthetic), so a run is reproducible
from its manifest alone. Negatives are drawn fresh for every batch from a
smoothed unigram distribution raised to a configurable exponent.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import model as M
from .dualgraph import NormalizedAdjacency
from .errors import DataError, NumericalError

ENCODER_LAYOUTS = {
    "dge": (M.GCN, M.GCN),
    "so-ge": (M.GCN, M.MLP),
    "st-ge": (M.MLP, M.GCN),
}

# Per-dataset presets: 2-layer sizes plus the SPPMI shifts used when
# building the dual graphs.
PROFILES = {
    "movielens": {"hidden_dim": 32, "output_dim": 16, "k_object": 0.1, "k_tag": 1.0},
    "lastfm": {"hidden_dim": 64, "output_dim": 64, "k_object": 1.0, "k_tag": 1.0},
    "steam": {"hidden_dim": 32, "output_dim": 16, "k_object": 5.0, "k_tag": 5.0},
}


@dataclass
class TrainConfig:
    batch_size: int = 64
    epochs: int = 300
    learning_rate: float = 2e-3
    negatives: int = 15            # negatives sampled per positive
    noise_exponent: float = 0.75   # unigram distortion for the noise distribution
    noise_smoothing: float = 1.0   # additive count smoothing; keeps unseen tags sampleable
    hidden_dim: int = 32
    output_dim: int = 16
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    object_encoder: str = M.GCN
    tag_encoder: str = M.GCN
    mf_uniform_negatives: bool = True  # squared-error baseline samples unobserved pairs uniformly
    checkpoint_interval: int = 0       # epochs between snapshots; 0 = final only

    def validate(self) -> None:
        if self.batch_size < 1 or self.epochs < 0 or self.negatives < 1:
            raise DataError("batch_size, epochs, negatives must be positive")
        if self.learning_rate < 0 or self.noise_exponent < 0 or self.noise_smoothing < 0:
            raise DataError("learning_rate, noise_exponent, noise_smoothing must be >= 0")
        if min(self.hidden_dim, self.output_dim) < 1:
            raise DataError("encoder dimensions must be positive")
        if self.object_encoder not in M.ENCODER_KINDS or self.tag_encoder not in M.ENCODER_KINDS:
            raise DataError("encoder kinds must be 'gcn' or 'mlp'")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def layout_name(self) -> str:
        for name, kinds in ENCODER_LAYOUTS.items():
            if kinds == (self.object_encoder, self.tag_encoder):
                return name
        return f"{self.object_encoder}-{self.tag_encoder}"


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named purpose under the root seed."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    key = int.from_bytes(digest, "big")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))


@dataclass
class NoiseDistribution:
    """Probability of each tag under the negative-sampling distribution."""

    probabilities: np.ndarray

    @property
    def n(self) -> int:
        return int(self.probabilities.shape[0])


def build_noise(train_pairs, n_tags: int, exponent: float = 0.75,
                smoothing: float = 1.0) -> NoiseDistribution:
    """Smoothed unigram^exponent over tag frequencies in the training pairs."""
    if not len(train_pairs):
        raise DataError("cannot build a noise distribution from zero training pairs")
    tags = np.asarray([t for _, t in train_pairs], dtype=np.int64)
    counts = np.bincount(tags, minlength=n_tags).astype(np.float64)
    weights = (counts + smoothing) ** exponent
    total = weights.sum()
    if total <= 0:
        raise DataError("noise distribution has zero mass; increase smoothing")
    return NoiseDistribution(weights / total)


def sample_negatives(rng: np.random.Generator, noise: NoiseDistribution,
                     count: int, exclude: int) -> np.ndarray:
    """`count` i.i.d. draws; draws colliding with the positive are redrawn
    up to 16 times, then kept."""
    draws = rng.choice(noise.n, size=count, p=noise.probabilities)
    for _ in range(16):
        collide = draws == exclude
        if not collide.any():
            break
        draws[collide] = rng.choice(noise.n, size=int(collide.sum()),
                                    p=noise.probabilities)
    return draws


def sample_negative_matrix(rng: np.random.Generator, noise: NoiseDistribution,
                           positives: np.ndarray, count: int) -> np.ndarray:
    """Vectorized sampling for a whole batch, same redraw policy."""
    draws = rng.choice(noise.n, size=(len(positives), count), p=noise.probabilities)
    for _ in range(16):
        collide = draws == positives[:, None]
        if not collide.any():
            break
        draws[collide] = rng.choice(noise.n, size=int(collide.sum()),
                                    p=noise.probabilities)
    return draws


@dataclass
class AdamState:
    first: dict[str, np.ndarray]
    second: dict[str, np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(
            first={k: np.zeros_like(v) for k, v in params.items()},
            second={k: np.zeros_like(v) for k, v in params.items()},
        )


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, t: int, config: TrainConfig):
    """Bias-corrected Adam update, applied in place in a fixed key order."""
    b1, b2 = config.adam_beta1, config.adam_beta2
    for name in sorted(params):
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"non-finite gradient for {name} at step {t}")
        m, v = state.first[name], state.second[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        params[name] -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    state.step = t
    return params, state


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(n_objects: int, n_tags: int, hidden_dim: int, output_dim: int,
                seed: int) -> M.ModelParams:
    """Uniform Glorot init for all four weights, fixed draw order."""
    rng = substream(seed, "init")
    return M.ModelParams(
        obj_w0=glorot(rng, n_objects, hidden_dim),
        obj_w1=glorot(rng, hidden_dim, output_dim),
        tag_w0=glorot(rng, n_tags, hidden_dim),
        tag_w1=glorot(rng, hidden_dim, output_dim),
    )


@dataclass
class TrainedModel:
    """Trained parameters plus embeddings from a final full forward pass.

    The embeddings are recomputable bit-exactly from the parameters (and
    adjacencies), which checkpoint tests rely on.
    """

    kind: str
    params: dict[str, np.ndarray]
    object_embeddings: np.ndarray
    tag_embeddings: np.ndarray
    config: TrainConfig
    loss_trace: list[float] = field(default_factory=list)
    epoch: int = 0

    def checkpoint_header(self) -> dict:
        return {
            "format": 1,
            "kind": self.kind,
            "epoch": self.epoch,
            "seed": self.config.seed,
            "encoders": {"object": self.config.object_encoder,
                         "tag": self.config.tag_encoder},
            "dims": {
                "n_objects": int(self.object_embeddings.shape[0]),
                "n_tags": int(self.tag_embeddings.shape[0]),
                "hidden": self.config.hidden_dim,
                "output": int(self.object_embeddings.shape[1]),
            },
            "config": self.config.to_dict(),
        }


def save_model(path, trained: TrainedModel) -> None:
    matrices = dict(trained.params)
    matrices["object_embeddings"] = trained.object_embeddings
    matrices["tag_embeddings"] = trained.tag_embeddings
    M.save_checkpoint(path, trained.checkpoint_header(), matrices)


def load_model(path) -> TrainedModel:
    header, matrices = M.load_checkpoint(path)
    config = TrainConfig.from_dict(header["config"])
    z_obj = matrices.pop("object_embeddings")
    z_tag = matrices.pop("tag_embeddings")
    return TrainedModel(
        kind=header["kind"],
        params=matrices,
        object_embeddings=z_obj,
        tag_embeddings=z_tag,
        config=config,
        epoch=header.get("epoch", 0),
    )


def iterate_batches(n: int, batch_size: int, rng: np.random.Generator):
    """Seeded random permutation of range(n), chunked."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train(kg, adjacencies, split, config: TrainConfig, *,
          checkpoint_dir=None, log=None) -> TrainedModel:
    """Run the full training loop over the dual encoders.

    `adjacencies` is an (object, tag) pair of NormalizedAdjacency; a side
    whose encoder is graph-free may pass None there. Each batch runs a
    full forward over both encoders, scores the batch positives against
    fresh negatives, backpropagates, and applies one Adam step. Aborts
    with NumericalError on a non-finite loss, dumping an emergency
    checkpoint when a checkpoint directory is configured.
    """
    config.validate()
    if not split.train:
        raise DataError("training split is empty")
    obj_adj, tag_adj = adjacencies
    obj_spec = M.EncoderSpec(config.object_encoder, kg.n_objects,
                             config.hidden_dim, config.output_dim, obj_adj)
    tag_spec = M.EncoderSpec(config.tag_encoder, kg.n_tags,
                             config.hidden_dim, config.output_dim, tag_adj)
    obj_spec.validate()
    tag_spec.validate()

    noise = build_noise(split.train, kg.n_tags, config.noise_exponent,
                        config.noise_smoothing)
    params = init_params(kg.n_objects, kg.n_tags, config.hidden_dim,
                         config.output_dim, config.seed)
    pdict = params.as_dict()
    adam = AdamState.zeros_like(pdict)
    rng_shuffle = substream(config.seed, "shuffle")
    rng_neg = substream(config.seed, "negatives")

    pairs = np.asarray(split.train, dtype=np.int64)
    kind = config.layout_name()
    trace: list[float] = []
    step = 0

    def snapshot(path, epoch):
        z_obj, z_tag, _ = M.dual_forward(obj_spec, tag_spec, params)
        trained = TrainedModel(kind, dict(pdict), z_obj, z_tag, config,
                               list(trace), epoch)
        save_model(path, trained)

    for epoch in range(1, config.epochs + 1):
        epoch_loss = 0.0
        for idx in iterate_batches(len(pairs), config.batch_size, rng_shuffle):
            objects = pairs[idx, 0]
            positives = pairs[idx, 1]
            negatives = sample_negative_matrix(rng_neg, noise, positives,
                                               config.negatives)
            batch = M.Batch(objects, positives, negatives)
            z_obj, z_tag, cache = M.dual_forward(obj_spec, tag_spec, params)
            loss, dz_obj, dz_tag = M.nce_loss_and_grads(batch, z_obj, z_tag,
                                                        noise.probabilities)
            if not math.isfinite(loss):
                if checkpoint_dir is not None:
                    snapshot(Path(checkpoint_dir) / "checkpoint_diverged.tlck", epoch)
                raise NumericalError(f"non-finite loss at epoch {epoch}, step {step}")
            grads = M.end_to_end_backward(obj_spec, tag_spec, params, cache,
                                          dz_obj, dz_tag)
            step += 1
            adam_step(pdict, grads, adam, step, config)
            params.bump()
            epoch_loss += loss
        trace.append(epoch_loss / len(pairs))
        if log is not None:
            log(epoch, trace[-1])
        if (checkpoint_dir is not None and config.checkpoint_interval > 0
                and epoch % config.checkpoint_interval == 0):
            snapshot(Path(checkpoint_dir) / f"checkpoint_epoch{epoch}.tlck", epoch)

    z_obj, z_tag, _ = M.dual_forward(obj_spec, tag_spec, params)
    return TrainedModel(kind, dict(pdict), z_obj, z_tag, config, trace,
                        config.epochs)

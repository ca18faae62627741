"""Acceptance suite: one test per exit criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines. The planted-structure thresholds were realized by running the
pipeline once at the frozen seeds and are asserted as regression bounds.
"""

import contextlib
import math
import os
from pathlib import Path

import numpy as np
import pytest

from conftest import (central_difference, max_relative_error,
                      normalize_oracle, path_count_oracle, ppmi_oracle,
                      random_kg)
from taglink import model as M
from taglink.baselines import train_mf, train_skipgram
from taglink.cli import main as cli_main
from taglink.dualgraph import (build_graphs, normalize, object_cooccurrence,
                               sppmi, tag_cooccurrence)
from taglink.evaluation import (SyntheticSpec, evaluate, generate_synthetic,
                                split_pairs)
from taglink.kg import load_triples
from taglink.linalg import csr_from_coo
from taglink.trainer import TrainConfig, train


@contextlib.contextmanager
def criterion(number, description):
    try:
        yield
    except Exception:
        print(f"[criterion {number}] FAIL  {description}")
        raise
    print(f"[criterion {number}] PASS  {description}")


def random_adjacency(rng, n):
    upper = np.triu((rng.random((n, n)) < 0.35) * rng.random((n, n)), 1)
    dense = upper + upper.T
    norm = normalize_oracle(dense)
    rows, cols = np.nonzero(norm)
    from taglink.dualgraph import NormalizedAdjacency
    return NormalizedAdjacency(csr_from_coo(rows, cols, norm[rows, cols], (n, n)))


def test_criterion_1_gradient_correctness():
    """Analytic gradients of the full encoder/decoder stack match central
    finite differences (eps 1e-5) within 1e-4 relative error."""
    with criterion(1, "gradient correctness on N=M=20, h=8, d=4, batch 6, K=3"):
        rng = np.random.default_rng(100)
        n = m = 20
        obj_spec = M.EncoderSpec(M.GCN, n, 8, 4, random_adjacency(rng, n))
        tag_spec = M.EncoderSpec(M.GCN, m, 8, 4, random_adjacency(rng, m))
        params = M.ModelParams(
            obj_w0=rng.standard_normal((n, 8)) * 0.4,
            obj_w1=rng.standard_normal((8, 4)) * 0.4,
            tag_w0=rng.standard_normal((m, 8)) * 0.4,
            tag_w1=rng.standard_normal((8, 4)) * 0.4,
        )
        pn = rng.random(m) + 0.05
        pn /= pn.sum()
        batch = M.Batch(
            objects=rng.integers(0, n, size=6),
            positives=rng.integers(0, m, size=6),
            negatives=rng.integers(0, m, size=(6, 3)),
        )

        def loss():
            z_obj, z_tag, _ = M.dual_forward(obj_spec, tag_spec, params)
            value, _, _ = M.nce_loss_and_grads(batch, z_obj, z_tag, pn)
            return value

        z_obj, z_tag, cache = M.dual_forward(obj_spec, tag_spec, params)
        _, dz_obj, dz_tag = M.nce_loss_and_grads(batch, z_obj, z_tag, pn)
        grads = M.end_to_end_backward(obj_spec, tag_spec, params, cache,
                                      dz_obj, dz_tag)
        fd = central_difference(loss, params.as_dict(), eps=1e-5)
        worst = max(max_relative_error(grads[k], fd[k]) for k in grads)
        assert worst < 1e-4, f"max relative gradient error {worst:.2e}"


def test_criterion_2_oracle_equivalence():
    """Pair counts equal literal 2-hop path enumeration, shift-1 weights
    equal plain positive PMI, and the normalized adjacency matches dense
    arithmetic, on every generated graph with at most 50 entities."""
    with criterion(2, "co-occurrence/SPPMI/normalization oracle equivalence"):
        rng = np.random.default_rng(101)
        for _ in range(25):
            kg = random_kg(rng)
            assert kg.n_users + kg.n_objects + kg.n_tags <= 50
            for counts, edges, size in (
                (object_cooccurrence(kg), kg.interact_pairs, kg.n_objects),
                (tag_cooccurrence(kg), kg.tagged_pairs, kg.n_tags),
            ):
                np.testing.assert_array_equal(
                    counts.pair_counts.toarray(),
                    path_count_oracle(list(edges), size))
                graph = sppmi(counts, 1.0)
                np.testing.assert_allclose(
                    graph.weights.toarray(),
                    ppmi_oracle(counts.pair_counts.toarray()),
                    rtol=1e-12, atol=1e-12)
                np.testing.assert_allclose(
                    normalize(graph).matrix.toarray(),
                    normalize_oracle(graph.weights.toarray()),
                    rtol=1e-12, atol=1e-12)


def test_criterion_3_nce_identities():
    """Posterior balance point, softmax normalization, and softmax shift
    invariance all hold to 1e-12."""
    with criterion(3, "NCE and softmax identities at 1e-12"):
        rng = np.random.default_rng(102)
        for k, pn in ((1, 0.5), (15, 0.01), (7, 0.003), (3, 1.0)):
            assert abs(M.nce_posterior(math.log(k * pn), k, pn) - 0.5) < 1e-12
        for _ in range(50):
            scores = rng.standard_normal(40) * 10
            p = M.softmax_row(scores)
            assert abs(p.sum() - 1.0) < 1e-12
            shifted = M.softmax_row(scores + float(rng.uniform(-50, 50)))
            assert np.max(np.abs(p - shifted)) < 1e-12


ACCEPTANCE_SPEC = SyntheticSpec(
    clusters=4, objects_per_cluster=20, tags_per_cluster=10,
    users_per_cluster=15, intra_probability=0.3, noise_probability=0.01,
    heldout_per_object=2, cold_per_cluster=1, seed=7,
)
ACCEPTANCE_EPOCHS = 50
ACCEPTANCE_TRAIN_SEED = 1


def test_criterion_4_determinism(tmp_path):
    """Two full command-line training runs from the same manifest produce
    bitwise-identical loss traces and checkpoints."""
    with criterion(4, "bitwise determinism of repeated training runs"):
        data_dir = tmp_path / "data"
        assert cli_main(["synth", "--out", str(data_dir), "--seed", "7",
                         "--heldout-per-object", "2",
                         "--cold-per-cluster", "1"]) == 0
        blobs = []
        for name in ("run_a", "run_b"):
            out = tmp_path / name
            assert cli_main([
                "train", "--kg", str(data_dir / "triples.tsv"),
                "--split", str(data_dir / "split.json"),
                "--out", str(out), "--model", "dge",
                "--epochs", "20", "--hidden-dim", "32", "--output-dim", "16",
                "--seed", str(ACCEPTANCE_TRAIN_SEED),
            ]) == 0
            blobs.append(((out / "checkpoint.tlck").read_bytes(),
                          (out / "loss_trace.csv").read_bytes()))
        assert blobs[0][0] == blobs[1][0], "checkpoints differ"
        assert blobs[0][1] == blobs[1][1], "loss traces differ"


def _train_variant(kg, split, adjacencies, object_encoder, tag_encoder):
    cfg = TrainConfig(epochs=ACCEPTANCE_EPOCHS, hidden_dim=32, output_dim=16,
                      seed=ACCEPTANCE_TRAIN_SEED, object_encoder=object_encoder,
                      tag_encoder=tag_encoder)
    obj_adj, tag_adj = adjacencies
    adj = (obj_adj if object_encoder == "gcn" else None,
           tag_adj if tag_encoder == "gcn" else None)
    return train(kg, adj, split, cfg)


def test_criterion_5_planted_structure_recovery():
    """The dual model recovers held-out intra-cluster links (Recall@3 at
    least 0.9) and strictly beats both single-graph variants and the
    free-embedding baseline on the same split and seed.

    Realized values at the frozen seeds: dge 0.9650, so-ge 0.2188,
    st-ge 0.7488, skipgram 0.0588.
    """
    with criterion(5, "planted-structure recovery and strict ordering"):
        data = generate_synthetic(ACCEPTANCE_SPEC)
        kg, split = data.kg, data.split()
        adjacencies = build_graphs(kg, 1.0, 1.0).normalized()

        recall = {}
        for name, kinds in (("dge", ("gcn", "gcn")), ("so-ge", ("gcn", "mlp")),
                            ("st-ge", ("mlp", "gcn"))):
            model = _train_variant(kg, split, adjacencies, *kinds)
            recall[name] = evaluate(model, split).overall["recall@3"]
        sg_cfg = TrainConfig(epochs=ACCEPTANCE_EPOCHS, output_dim=16,
                             seed=ACCEPTANCE_TRAIN_SEED)
        recall["skipgram"] = evaluate(train_skipgram(kg, split, sg_cfg),
                                      split).overall["recall@3"]

        print("  recall@3:", {k: round(v, 4) for k, v in recall.items()})
        assert recall["dge"] >= 0.9
        for other in ("so-ge", "st-ge", "skipgram"):
            assert recall["dge"] > recall[other], \
                f"dge ({recall['dge']:.4f}) not above {other} ({recall[other]:.4f})"
        # regression bounds from the recorded run, with slack
        assert recall["dge"] >= 0.95
        assert recall["skipgram"] <= 0.30


REPRODUCTION_ENV = "TAGLINK_ML1M"


def test_criterion_6_movielens_reproduction():
    """Full Movielens-1M pipeline with the movielens profile, averaged over
    3 seeds. The numeric reference targets (Recall@3 0.8464, NDCG@3 0.4850,
    both within 0.05) are reported, not gated; the gated claim is the
    ordering dge > skipgram > mf on Recall@3. Needs the converted triple
    file via $TAGLINK_ML1M and about an hour of CPU, skipped otherwise."""
    triples = os.environ.get(REPRODUCTION_ENV)
    if not triples or not Path(triples).exists():
        print(f"[criterion 6] SKIP  Movielens-1M reproduction "
              f"(set ${REPRODUCTION_ENV} to the converted triple file)")
        pytest.skip(f"{REPRODUCTION_ENV} not set; dataset not available")
    with criterion(6, "Movielens-1M reproduction"):
        kg = load_triples(triples)
        results = {"dge": [], "skipgram": [], "mf": []}
        for seed in (0, 1, 2):
            split = split_pairs(kg.tagged_pairs, 0.8, seed)
            adjacencies = build_graphs(kg, 0.1, 1.0).normalized()
            cfg = TrainConfig(epochs=300, batch_size=64, learning_rate=2e-3,
                              negatives=15, hidden_dim=32, output_dim=16,
                              seed=seed)
            results["dge"].append(
                evaluate(train(kg, adjacencies, split, cfg),
                         split).overall["recall@3"])
            base_cfg = TrainConfig(epochs=300, batch_size=64,
                                   learning_rate=2e-3, negatives=15,
                                   output_dim=100, seed=seed)
            results["skipgram"].append(
                evaluate(train_skipgram(kg, split, base_cfg),
                         split).overall["recall@3"])
            results["mf"].append(
                evaluate(train_mf(kg, split, base_cfg),
                         split).overall["recall@3"])
        means = {k: float(np.mean(v)) for k, v in results.items()}
        print("  recall@3 means:", means)
        print("  reported target: dge within 0.8464 +/- 0.05 "
              f"(got {means['dge']:.4f}, difference {abs(means['dge'] - 0.8464):.4f})")
        assert means["dge"] > means["skipgram"] > means["mf"]


def test_criterion_7_metric_fixtures():
    """Hand-computed ranking-metric fixtures hold exactly."""
    with criterion(7, "recall/NDCG hand fixtures"):
        from taglink.evaluation import ndcg_at_k, recall_at_k
        assert ndcg_at_k([7, 8, 4], {4}, 3) == 0.5
        assert ndcg_at_k([4, 8, 7], {4}, 3) == 1.0
        assert ndcg_at_k([1, 2, 3], {9}, 3) == 0.0
        assert recall_at_k([1, 2, 3], {2, 5}, 3) == 0.5
        assert recall_at_k([1, 2, 3], {1, 2}, 3) == 1.0
        ideal_two = 1.0 / math.log2(2) + 1.0 / math.log2(3)
        assert ndcg_at_k([4, 9, 5], {4, 5}, 3) == \
            (1.0 / math.log2(2) + 1.0 / math.log2(4)) / ideal_two

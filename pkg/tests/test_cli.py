import json

import numpy as np
import pytest

from taglink.cli import main
from taglink.kg import load_triples
from taglink.linalg import load_dense


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def synth_dir(tmp_path):
    out = tmp_path / "data"
    assert run("synth", "--out", str(out), "--clusters", "2",
               "--objects-per-cluster", "6", "--tags-per-cluster", "5",
               "--users-per-cluster", "5", "--heldout-per-object", "1",
               "--seed", "3") == 0
    return out


@pytest.fixture()
def trained_dir(tmp_path, synth_dir):
    out = tmp_path / "run"
    assert run("train", "--kg", str(synth_dir / "triples.tsv"),
               "--split", str(synth_dir / "split.json"),
               "--out", str(out), "--model", "dge", "--epochs", "3",
               "--hidden-dim", "8", "--output-dim", "4", "--seed", "1") == 0
    return out


class TestSynthCommand:
    def test_outputs_exist(self, synth_dir):
        for name in ("triples.tsv", "split.json", "heldout.json",
                     "stats.json", "manifest.json"):
            assert (synth_dir / name).exists(), name
        manifest = json.loads((synth_dir / "manifest.json").read_text())
        assert manifest["status"] == "complete"
        assert manifest["command"] == "synth"


class TestBuildGraphs:
    def test_snapshots_written_and_loadable(self, tmp_path, synth_dir):
        out = tmp_path / "graphs"
        assert run("build-graphs", "--kg", str(synth_dir / "triples.tsv"),
                   "--k-object", "0.5", "--k-tag", "2", "--out", str(out)) == 0
        from taglink.dualgraph import load_graph
        g = load_graph(out / "object_graph.txt")
        assert g.side == "object" and g.shift == 0.5
        t = load_graph(out / "tag_graph.txt")
        assert t.side == "tag" and t.shift == 2.0


class TestTrainCommand:
    def test_outputs(self, trained_dir):
        for name in ("checkpoint.tlck", "loss_trace.csv", "loss_trace.png",
                     "split.json", "config.json", "manifest.json"):
            assert (trained_dir / name).exists(), name
        rows = (trained_dir / "loss_trace.csv").read_text().strip().splitlines()
        assert rows[0] == "epoch,mean_loss"
        assert len(rows) == 4  # header + 3 epochs

    def test_prebuilt_graphs_accepted(self, tmp_path, synth_dir):
        graphs = tmp_path / "g"
        run("build-graphs", "--kg", str(synth_dir / "triples.tsv"),
            "--out", str(graphs))
        out = tmp_path / "run2"
        assert run("train", "--kg", str(synth_dir / "triples.tsv"),
                   "--graphs", str(graphs), "--out", str(out),
                   "--epochs", "1", "--hidden-dim", "4",
                   "--output-dim", "2") == 0

    def test_baseline_model(self, tmp_path, synth_dir):
        out = tmp_path / "mf"
        assert run("train", "--kg", str(synth_dir / "triples.tsv"),
                   "--out", str(out), "--model", "mf", "--epochs", "1") == 0
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["output_dim"] == 100  # baseline default width

    def test_profile_sets_dims(self, tmp_path, synth_dir):
        out = tmp_path / "prof"
        assert run("train", "--kg", str(synth_dir / "triples.tsv"),
                   "--out", str(out), "--profile", "lastfm",
                   "--epochs", "1") == 0
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["hidden_dim"] == 64 and cfg["output_dim"] == 64


class TestEvaluateCommand:
    def test_report_files(self, tmp_path, synth_dir, trained_dir):
        out = tmp_path / "eval"
        assert run("evaluate", "--checkpoint", str(trained_dir / "checkpoint.tlck"),
                   "--kg", str(synth_dir / "triples.tsv"),
                   "--split", str(trained_dir / "split.json"),
                   "--out", str(out)) == 0
        for name in ("report.json", "report.txt", "report_per_object.csv",
                     "report_buckets.png", "manifest.json"):
            assert (out / name).exists(), name
        payload = json.loads((out / "report.json").read_text())
        assert set(payload["overall"]) == {"recall@3", "ndcg@3",
                                           "recall@5", "ndcg@5"}


class TestPredictCommand:
    def test_deterministic_top_one(self, tmp_path, capsys):
        # two tags with known embeddings: t_good scores higher
        kg_path = tmp_path / "toy.tsv"
        kg_path.write_text("u1\tinteract\to1\n"
                           "o1\ttagged_with\tt_good\n"
                           "o1\ttagged_with\tt_bad\n"
                           "o2\ttagged_with\tt_good\n")
        from taglink.model import save_checkpoint
        from taglink.trainer import TrainConfig
        header = {"format": 1, "kind": "skipgram", "epoch": 0, "seed": 0,
                  "encoders": {"object": "mlp", "tag": "mlp"},
                  "dims": {}, "config": TrainConfig().to_dict()}
        save_checkpoint(tmp_path / "m.tlck", header, {
            "object_embeddings": np.array([[1.0, 0.0], [0.0, 1.0]]),
            "tag_embeddings": np.array([[2.0, 0.0], [1.0, 0.0]]),
        })
        assert run("predict", "--checkpoint", str(tmp_path / "m.tlck"),
                   "--kg", str(kg_path), "--object", "o2",
                   "--no-exclude-train", "-k", "2") == 0
        lines = capsys.readouterr().out.splitlines()
        ranked = [ln.split()[1] for ln in lines if ln.strip().startswith(("1 ", "2 "))]
        assert ranked[0] == "t_good"

    def test_unknown_object_is_data_error(self, tmp_path, synth_dir, trained_dir):
        assert run("predict", "--checkpoint", str(trained_dir / "checkpoint.tlck"),
                   "--kg", str(synth_dir / "triples.tsv"),
                   "--object", "no_such_object") == 3


class TestExportCommand:
    def test_round_trip_bit_identical(self, tmp_path, synth_dir, trained_dir):
        out = tmp_path / "emb"
        assert run("export-embeddings",
                   "--checkpoint", str(trained_dir / "checkpoint.tlck"),
                   "--kg", str(synth_dir / "triples.tsv"),
                   "--out", str(out)) == 0
        from taglink.trainer import load_model
        model = load_model(trained_dir / "checkpoint.tlck")
        np.testing.assert_array_equal(load_dense(out / "objects.dmx"),
                                      model.object_embeddings)
        np.testing.assert_array_equal(load_dense(out / "tags.dmx"),
                                      model.tag_embeddings)
        first = (out / "objects.tsv").read_text()
        kg = load_triples(synth_dir / "triples.tsv")
        assert len(first.splitlines()) == kg.n_objects
        name, *values = first.splitlines()[0].split("\t")
        assert name == kg.objects.name_of(0)
        assert len(values) == model.object_embeddings.shape[1]
        # reparsing the TSV reproduces the matrix exactly (17 sig digits)
        parsed = np.array([[float(v) for v in line.split("\t")[1:]]
                           for line in first.splitlines()])
        np.testing.assert_array_equal(parsed, model.object_embeddings)


class TestSweepAndAblate:
    def test_sweep_emits_report_per_level(self, tmp_path, synth_dir):
        out = tmp_path / "sweep"
        assert run("sweep", "--kg", str(synth_dir / "triples.tsv"),
                   "--out", str(out), "--levels", "0.4,0.8",
                   "--epochs", "1", "--hidden-dim", "4",
                   "--output-dim", "2") == 0
        for name in ("sweep.csv", "sweep.json", "sweep.png"):
            assert (out / name).exists(), name
        payload = json.loads((out / "sweep.json").read_text())
        assert set(payload) == {"0.4", "0.8"}
        assert (out / "level_0.4" / "report.json").exists()

    def test_ablate_compares_three_variants(self, tmp_path, synth_dir):
        out = tmp_path / "ablate"
        assert run("ablate", "--kg", str(synth_dir / "triples.tsv"),
                   "--out", str(out), "--epochs", "1",
                   "--hidden-dim", "4", "--output-dim", "2") == 0
        payload = json.loads((out / "ablation.json").read_text())
        assert set(payload) == {"dge", "so-ge", "st-ge"}
        for name in ("ablation.csv", "ablation.png", "split.json"):
            assert (out / name).exists(), name


class TestConvert:
    def write_movielens(self, raw):
        raw.mkdir()
        (raw / "ratings.dat").write_text(
            "1::10::5::978300760\n1::20::3::978302109\n2::10::4::978301968\n")
        (raw / "movies.dat").write_text(
            "10::Toy Story (1995)::Animation\n20::Heat (1995)::Action\n")
        (raw / "tags.dat").write_text(
            "1::10::Pixar::1240597180\n2::10::animated::1240597180\n"
            "2::20::Heist::1240597180\n")

    def test_movielens(self, tmp_path):
        raw = tmp_path / "ml"
        self.write_movielens(raw)
        out = tmp_path / "ml.tsv"
        assert run("convert", "movielens", "--raw", str(raw),
                   "--out", str(out)) == 0
        kg = load_triples(out)
        assert kg.n_users == 2 and kg.n_objects == 2 and kg.n_tags == 3
        assert "Toy Story (1995)" in kg.objects
        assert "pixar" in kg.tags  # lowercased
        stats = json.loads((tmp_path / "ml.tsv.stats.json").read_text())
        assert stats["n_interact"] == 3 and stats["n_tagged"] == 3

    def test_idempotent_rerun(self, tmp_path):
        raw = tmp_path / "ml"
        self.write_movielens(raw)
        out1, out2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        run("convert", "movielens", "--raw", str(raw), "--out", str(out1))
        run("convert", "movielens", "--raw", str(raw), "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()

    def test_lastfm(self, tmp_path):
        raw = tmp_path / "fm"
        raw.mkdir()
        (raw / "artists.dat").write_text(
            "id\tname\turl\tpictureURL\n"
            "1\tMorcheeba\thttp://x\thttp://y\n2\tEnigma\thttp://x\thttp://y\n")
        (raw / "tags.dat").write_text("tagID\ttagValue\n1\tchillout\n2\tDowntempo\n")
        (raw / "user_artists.dat").write_text(
            "userID\tartistID\tweight\n2\t1\t13883\n2\t2\t11690\n")
        (raw / "user_taggedartists.dat").write_text(
            "userID\tartistID\ttagID\tday\tmonth\tyear\n"
            "2\t1\t1\t1\t4\t2009\n2\t1\t2\t1\t4\t2009\n2\t2\t1\t1\t4\t2009\n")
        out = tmp_path / "fm.tsv"
        assert run("convert", "lastfm", "--raw", str(raw), "--out", str(out)) == 0
        kg = load_triples(out)
        assert kg.n_users == 1 and kg.n_objects == 2 and kg.n_tags == 2
        assert "downtempo" in kg.tags

    def test_steam(self, tmp_path):
        raw = tmp_path / "st"
        raw.mkdir()
        (raw / "apps.csv").write_text("app_id,name\n100,Half-Life\n200,Portal\n")
        (raw / "reviews.csv").write_text(
            "user_id,app_id\n1,100\n1,200\n2,100\n")
        (raw / "app_tags.csv").write_text(
            "app_id,tag\n100,FPS\n100,Classic\n200,Puzzle\n")
        out = tmp_path / "st.tsv"
        assert run("convert", "steam", "--raw", str(raw), "--out", str(out)) == 0
        kg = load_triples(out)
        assert kg.n_objects == 2 and kg.n_tags == 3
        assert "Half-Life" in kg.objects

    def test_missing_raw_dir(self, tmp_path):
        assert run("convert", "movielens", "--raw", str(tmp_path / "nope"),
                   "--out", str(tmp_path / "x.tsv")) == 3


class TestCliContract:
    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run("train", "--bogus-flag", "1")
        assert exc.value.code == 2

    def test_missing_kg_is_data_error(self, tmp_path):
        assert run("build-graphs", "--kg", str(tmp_path / "absent.tsv"),
                   "--out", str(tmp_path / "g")) == 3

    def test_help_documents_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("train", "--help")
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--kg", "--model", "--epochs", "--seed", "--profile",
                     "--k-object", "--split"):
            assert flag in text

    def test_data_root_resolution(self, tmp_path, synth_dir, monkeypatch):
        monkeypatch.setenv("TAGLINK_DATA_ROOT", str(synth_dir))
        out = tmp_path / "g"
        assert run("build-graphs", "--kg", "triples.tsv", "--out", str(out)) == 0

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("--version")
        assert exc.value.code == 0

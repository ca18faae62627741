"""Command-line orchestration.

Subcommands: convert, synth, build-graphs, train, evaluate, predict,
export-embeddings, sweep, ablate. Every file-producing run writes a
manifest (resolved config, seeds, input digests, output paths, timing)
before doing work and finalizes it afterwards; together with the single
root seed this is enough to reproduce a run bit-exactly. Relative input
paths are looked up in the working directory first, then under
$TAGLINK_DATA_ROOT.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import fields as dc_fields
from pathlib import Path

from . import __version__, baselines, convert as convert_mod, dualgraph
from . import evaluation as ev
from . import kg as kg_mod
from . import report as report_mod
from . import trainer
from .errors import DataError, NumericalError, TaglinkError
from .linalg import save_dense

DATA_ROOT_ENV = "TAGLINK_DATA_ROOT"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

MODEL_CHOICES = ("dge", "so-ge", "st-ge", "mf", "skipgram")
FACTOR_MODELS = ("mf", "skipgram")


def resolve_input(path: str) -> Path:
    """Relative inputs resolve against the cwd, then the data root."""
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    root = os.environ.get(DATA_ROOT_ENV)
    if root:
        rooted = Path(root) / p
        if rooted.exists():
            return rooted
    return p


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Run record written before work starts and finalized after."""

    def __init__(self, command: str, out_dir, config: dict, seed):
        self.out_dir = Path(out_dir)
        self.data = {
            "command": command,
            "argv": sys.argv[1:],
            "version": __version__,
            "config": config,
            "config_digest": hashlib.sha256(
                json.dumps(config, sort_keys=True, default=str).encode()
            ).hexdigest(),
            "seed": seed,
            "inputs": {},
            "outputs": [],
            "status": "running",
            "started_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        self._t0 = time.monotonic()

    def add_input(self, path) -> None:
        self.data["inputs"][str(path)] = file_digest(path)

    def add_input_dir(self, directory) -> None:
        for p in sorted(Path(directory).iterdir()):
            if p.is_file():
                self.add_input(p)

    def add_outputs(self, paths) -> None:
        self.data["outputs"].extend(str(p) for p in paths)

    def write(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / "manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.data, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        return path

    def finish(self) -> Path:
        self.data["status"] = "complete"
        self.data["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        self.data["elapsed_seconds"] = round(time.monotonic() - self._t0, 3)
        return self.write()


# --- config assembly ---------------------------------------------------------

CONFIG_FLAGS = ("batch_size", "epochs", "learning_rate", "negatives",
                "noise_exponent", "noise_smoothing", "hidden_dim",
                "output_dim", "seed", "checkpoint_interval")


def add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=MODEL_CHOICES, default="dge")
    parser.add_argument("--profile", choices=sorted(trainer.PROFILES),
                        help="per-dataset preset for dims and SPPMI shifts")
    parser.add_argument("--config", help="JSON file with training settings")
    parser.add_argument("--train-ratio", type=float, default=0.8,
                        help="fraction of tag pairs used for training")
    parser.add_argument("--split", help="reuse an existing split file")
    parser.add_argument("--graphs",
                        help="directory with prebuilt graph snapshots")
    parser.add_argument("--k-object", type=float,
                        help="SPPMI shift for the object graph")
    parser.add_argument("--k-tag", type=float,
                        help="SPPMI shift for the tag graph")
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--negatives", type=int)
    parser.add_argument("--noise-exponent", type=float)
    parser.add_argument("--noise-smoothing", type=float)
    parser.add_argument("--hidden-dim", type=int)
    parser.add_argument("--output-dim", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--checkpoint-interval", type=int)


def assemble_config(args) -> tuple[trainer.TrainConfig, float, float]:
    """Merge profile, config file, and explicit flags (later wins);
    returns the TrainConfig plus the two SPPMI shifts."""
    settings: dict = {}
    k_object = k_tag = 1.0
    if args.profile:
        preset = dict(trainer.PROFILES[args.profile])
        k_object = preset.pop("k_object")
        k_tag = preset.pop("k_tag")
        settings.update(preset)
    if args.config:
        path = resolve_input(args.config)
        try:
            with open(path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except FileNotFoundError:
            raise DataError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
        k_object = file_cfg.pop("k_object", k_object)
        k_tag = file_cfg.pop("k_tag", k_tag)
        settings.update(file_cfg)
    for name in CONFIG_FLAGS:
        value = getattr(args, name)
        if value is not None:
            settings[name] = value
    if args.k_object is not None:
        k_object = args.k_object
    if args.k_tag is not None:
        k_tag = args.k_tag
    if args.model in FACTOR_MODELS:
        settings.setdefault("output_dim", 100)
    if args.model in trainer.ENCODER_LAYOUTS:
        obj_kind, tag_kind = trainer.ENCODER_LAYOUTS[args.model]
        settings["object_encoder"] = obj_kind
        settings["tag_encoder"] = tag_kind
    known = {f.name for f in dc_fields(trainer.TrainConfig)}
    unknown = set(settings) - known
    if unknown:
        raise DataError(f"unknown config keys: {sorted(unknown)}")
    return trainer.TrainConfig.from_dict(settings), k_object, k_tag


def obtain_split(args, kg) -> tuple[ev.Split, bool]:
    """Load the split file when given, otherwise draw one; the flag says
    whether it was newly drawn (and should be persisted)."""
    if args.split:
        return ev.load_split(resolve_input(args.split)), False
    seed = args.seed if args.seed is not None else trainer.TrainConfig().seed
    return ev.split_pairs(kg.tagged_pairs, args.train_ratio, seed), True


def adjacencies_for(config: trainer.TrainConfig, kg, args,
                    k_object: float, k_tag: float):
    """Normalized adjacencies for whichever sides run a graph encoder."""
    need_obj = config.object_encoder == "gcn"
    need_tag = config.tag_encoder == "gcn"
    if not (need_obj or need_tag):
        return (None, None)
    if args.graphs:
        gdir = resolve_input(args.graphs)
        obj_g = dualgraph.load_graph(Path(gdir) / "object_graph.txt")
        tag_g = dualgraph.load_graph(Path(gdir) / "tag_graph.txt")
        graphs = dualgraph.DualGraphs(obj_g, tag_g)
    else:
        graphs = dualgraph.build_graphs(kg, k_object, k_tag)
    obj_adj, tag_adj = graphs.normalized()
    return (obj_adj if need_obj else None, tag_adj if need_tag else None)


def train_model(kg, split, config, args, k_object, k_tag,
                checkpoint_dir=None) -> trainer.TrainedModel:
    if args.model in FACTOR_MODELS:
        loss_kind = baselines.MSE if args.model == "mf" else baselines.NCE
        return baselines.train_factor(kg, split, config, loss_kind)
    adj = adjacencies_for(config, kg, args, k_object, k_tag)
    return trainer.train(kg, adj, split, config, checkpoint_dir=checkpoint_dir)


# --- subcommand handlers ------------------------------------------------------


def cmd_convert(args) -> int:
    raw_dir = resolve_input(args.raw)
    if not Path(raw_dir).is_dir():
        raise DataError(f"raw directory not found: {raw_dir}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    manifest = Manifest("convert", out.parent,
                        {"dataset": args.dataset, "raw": str(raw_dir)}, None)
    manifest.add_input_dir(raw_dir)
    manifest.write()
    stats = convert_mod.convert(args.dataset, raw_dir, out)
    stats_path = out.with_suffix(out.suffix + ".stats.json")
    with open(stats_path, "w", encoding="utf-8") as fh:
        json.dump(stats.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest.add_outputs([out, stats_path])
    manifest.finish()
    print(f"wrote {out} ({stats.n_users} users, {stats.n_objects} objects, "
          f"{stats.n_tags} tags)")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = ev.SyntheticSpec(
        clusters=args.clusters,
        objects_per_cluster=args.objects_per_cluster,
        tags_per_cluster=args.tags_per_cluster,
        users_per_cluster=args.users_per_cluster,
        intra_probability=args.intra_probability,
        noise_probability=args.noise_probability,
        heldout_per_object=args.heldout_per_object,
        cold_per_cluster=args.cold_per_cluster,
        seed=args.seed,
    )
    out_dir = Path(args.out)
    manifest = Manifest("synth", out_dir, dict(spec.__dict__), args.seed)
    manifest.write()
    data = ev.generate_synthetic(spec)
    triples = out_dir / "triples.tsv"
    kg_mod.save_triples(data.kg, triples)
    heldout = out_dir / "heldout.json"
    with open(heldout, "w", encoding="utf-8") as fh:
        json.dump({
            "held_out": [list(p) for p in data.held_out],
            "object_clusters": {str(k): v for k, v in data.object_clusters.items()},
            "tag_clusters": {str(k): v for k, v in data.tag_clusters.items()},
        }, fh)
        fh.write("\n")
    split_path = out_dir / "split.json"
    ev.save_split(data.split(), split_path)
    stats_path = out_dir / "stats.json"
    with open(stats_path, "w", encoding="utf-8") as fh:
        json.dump(kg_mod.compute_stats(data.kg).to_dict(), fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    manifest.add_outputs([triples, heldout, split_path, stats_path])
    manifest.finish()
    print(f"wrote {triples} and {split_path}")
    return EXIT_OK


def cmd_build_graphs(args) -> int:
    kg_path = resolve_input(args.kg)
    kg = kg_mod.load_triples(kg_path)
    out_dir = Path(args.out)
    manifest = Manifest("build-graphs", out_dir,
                        {"k_object": args.k_object, "k_tag": args.k_tag}, None)
    manifest.add_input(kg_path)
    manifest.write()
    graphs = dualgraph.build_graphs(kg, args.k_object, args.k_tag)
    out_dir.mkdir(parents=True, exist_ok=True)
    obj_path = out_dir / "object_graph.txt"
    tag_path = out_dir / "tag_graph.txt"
    dualgraph.save_graph(graphs.object_graph, obj_path)
    dualgraph.save_graph(graphs.tag_graph, tag_path)
    manifest.add_outputs([obj_path, tag_path])
    manifest.finish()
    print(f"object graph: {graphs.object_graph.nnz} links "
          f"(density {graphs.object_graph.density():.4%}); "
          f"tag graph: {graphs.tag_graph.nnz} links "
          f"(density {graphs.tag_graph.density():.4%})")
    return EXIT_OK


def cmd_train(args) -> int:
    kg_path = resolve_input(args.kg)
    kg = kg_mod.load_triples(kg_path)
    config, k_object, k_tag = assemble_config(args)
    split, fresh = obtain_split(args, kg)
    out_dir = Path(args.out)
    run_config = {"model": args.model, "k_object": k_object, "k_tag": k_tag,
                  "train_ratio": split.ratio, **config.to_dict()}
    manifest = Manifest("train", out_dir, run_config, config.seed)
    manifest.add_input(kg_path)
    manifest.write()
    out_dir.mkdir(parents=True, exist_ok=True)

    split_path = out_dir / "split.json"
    ev.save_split(split, split_path)
    with open(out_dir / "config.json", "w", encoding="utf-8") as fh:
        json.dump(run_config, fh, indent=2, sort_keys=True)
        fh.write("\n")

    trained = train_model(kg, split, config, args, k_object, k_tag,
                          checkpoint_dir=out_dir)
    ckpt = out_dir / "checkpoint.tlck"
    trainer.save_model(ckpt, trained)
    trace_paths = report_mod.write_loss_trace(trained.loss_trace, out_dir)
    manifest.add_outputs([split_path, out_dir / "config.json", ckpt] + trace_paths)
    manifest.finish()
    final = trained.loss_trace[-1] if trained.loss_trace else float("nan")
    print(f"trained {trained.kind} for {config.epochs} epochs; "
          f"final mean loss {final:.6f}; checkpoint at {ckpt}")
    return EXIT_OK


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise DataError(f"expected a comma-separated integer list, got {text!r}")


def cmd_evaluate(args) -> int:
    model = trainer.load_model(resolve_input(args.checkpoint))
    split = ev.load_split(resolve_input(args.split))
    kg = kg_mod.load_triples(resolve_input(args.kg))
    ks = _parse_int_list(args.ks)
    edges = _parse_int_list(args.buckets)
    out_dir = Path(args.out)
    manifest = Manifest("evaluate", out_dir,
                        {"ks": list(ks), "buckets": list(edges),
                         "exclude_train": not args.no_exclude_train}, None)
    manifest.add_input(resolve_input(args.checkpoint))
    manifest.add_input(resolve_input(args.split))
    manifest.write()
    rep = ev.evaluate(model, split, ks=ks, bucket_edges=edges,
                      exclude_train=not args.no_exclude_train)
    rep.metadata["model"] = model.kind
    names = [kg.objects.name_of(i) for i in range(kg.n_objects)]
    paths = report_mod.write_report(rep, out_dir, object_names=names)
    manifest.add_outputs(paths)
    manifest.finish()
    print(report_mod.report_to_text(rep, f"evaluation ({model.kind})"))
    return EXIT_OK


def cmd_predict(args) -> int:
    model = trainer.load_model(resolve_input(args.checkpoint))
    kg = kg_mod.load_triples(resolve_input(args.kg))
    if args.split:
        exclude_map = ev.load_split(resolve_input(args.split)).train_tags_by_object()
    else:
        exclude_map = {}
        for obj, tag in kg.tagged_pairs:
            exclude_map.setdefault(obj, set()).add(tag)
    results = {}
    for name in args.object:
        obj = kg.objects.id_of(name)
        exclude = () if args.no_exclude_train else exclude_map.get(obj, set())
        ranked = ev.rank_tags(model.object_embeddings, model.tag_embeddings,
                              obj, exclude)[: args.top]
        scores = model.tag_embeddings[ranked] @ model.object_embeddings[obj]
        results[name] = [(kg.tags.name_of(int(t)), float(s))
                         for t, s in zip(ranked, scores)]
        print(f"object: {name}")
        print(f"  {'rank':>4}  {'tag':<30} {'score':>10}")
        for rank, (tag, s) in enumerate(results[name], start=1):
            print(f"  {rank:>4}  {tag:<30} {s:>10.4f}")
        print()
    if args.out:
        out_dir = Path(args.out)
        manifest = Manifest("predict", out_dir,
                            {"objects": args.object, "top": args.top}, None)
        manifest.write()
        pred_path = out_dir / "predictions.json"
        with open(pred_path, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
            fh.write("\n")
        manifest.add_outputs([pred_path])
        manifest.finish()
    return EXIT_OK


def cmd_export_embeddings(args) -> int:
    model = trainer.load_model(resolve_input(args.checkpoint))
    kg = kg_mod.load_triples(resolve_input(args.kg))
    if model.object_embeddings.shape[0] != kg.n_objects or \
            model.tag_embeddings.shape[0] != kg.n_tags:
        raise DataError("checkpoint dimensions do not match the graph")
    out_dir = Path(args.out)
    manifest = Manifest("export-embeddings", out_dir, {}, None)
    manifest.write()
    written = []
    for label, z, index in (("objects", model.object_embeddings, kg.objects),
                            ("tags", model.tag_embeddings, kg.tags)):
        tsv = out_dir / f"{label}.tsv"
        with open(tsv, "w", encoding="utf-8") as fh:
            for i in range(z.shape[0]):
                values = "\t".join(f"{v:.17g}" for v in z[i])
                fh.write(f"{index.name_of(i)}\t{values}\n")
        binary = out_dir / f"{label}.dmx"
        save_dense(binary, z)
        written += [tsv, binary]
    manifest.add_outputs(written)
    manifest.finish()
    print(f"exported embeddings to {out_dir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    kg_path = resolve_input(args.kg)
    kg = kg_mod.load_triples(kg_path)
    config, k_object, k_tag = assemble_config(args)
    try:
        levels = [float(x) for x in args.levels.split(",") if x.strip()]
    except ValueError:
        raise DataError(f"bad sparsity levels: {args.levels!r}")
    out_dir = Path(args.out)
    manifest = Manifest("sweep", out_dir,
                        {"model": args.model, "levels": levels,
                         **config.to_dict()}, config.seed)
    manifest.add_input(kg_path)
    manifest.write()
    results = {}
    for level in levels:
        split = ev.split_pairs(kg.tagged_pairs, level, config.seed,
                               stream=f"split-{level:g}")
        trained = train_model(kg, split, config, args, k_object, k_tag)
        rep = ev.evaluate(trained, split)
        rep.metadata["train_fraction"] = level
        results[f"{level:g}"] = rep
        run_dir = out_dir / f"level_{level:g}"
        run_dir.mkdir(parents=True, exist_ok=True)
        trainer.save_model(run_dir / "checkpoint.tlck", trained)
        ev.save_split(split, run_dir / "split.json")
        report_mod.write_report(rep, run_dir)
    paths = report_mod.write_comparison(results, out_dir, "sweep",
                                        "train_fraction")
    manifest.add_outputs(paths)
    manifest.finish()
    for level, rep in results.items():
        print(f"level {level}: " + "  ".join(
            f"{k}={v:.4f}" for k, v in rep.overall.items()))
    return EXIT_OK


def cmd_ablate(args) -> int:
    kg_path = resolve_input(args.kg)
    kg = kg_mod.load_triples(kg_path)
    out_dir = Path(args.out)
    args.model = "dge"
    base_config, _, _ = assemble_config(args)
    split, _ = obtain_split(args, kg)
    manifest = Manifest("ablate", out_dir,
                        {"models": ["dge", "so-ge", "st-ge"],
                         **base_config.to_dict()}, base_config.seed)
    manifest.add_input(kg_path)
    manifest.write()
    results = {}
    for model_name in ("dge", "so-ge", "st-ge"):
        args.model = model_name
        config, k_object, k_tag = assemble_config(args)
        trained = train_model(kg, split, config, args, k_object, k_tag)
        rep = ev.evaluate(trained, split)
        rep.metadata["model"] = model_name
        results[model_name] = rep
        run_dir = out_dir / model_name
        run_dir.mkdir(parents=True, exist_ok=True)
        trainer.save_model(run_dir / "checkpoint.tlck", trained)
        report_mod.write_report(rep, run_dir)
    ev.save_split(split, out_dir / "split.json")
    paths = report_mod.write_comparison(results, out_dir, "ablation", "model")
    manifest.add_outputs(paths + [out_dir / "split.json"])
    manifest.finish()
    for name, rep in results.items():
        print(f"{name}: " + "  ".join(
            f"{k}={v:.4f}" for k, v in rep.overall.items()))
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taglink",
        description="Object-tag link prediction over user/object/tag graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a raw dataset dump to a triple file")
    p.add_argument("dataset", choices=convert_mod.DATASETS)
    p.add_argument("--raw", required=True, help="directory with the raw dump")
    p.add_argument("--out", required=True, help="triple file to write")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("synth", help="generate the planted-cluster dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--clusters", type=int, default=4)
    p.add_argument("--objects-per-cluster", type=int, default=20)
    p.add_argument("--tags-per-cluster", type=int, default=10)
    p.add_argument("--users-per-cluster", type=int, default=15)
    p.add_argument("--intra-probability", type=float, default=0.3)
    p.add_argument("--noise-probability", type=float, default=0.01)
    p.add_argument("--heldout-per-object", type=int, default=2)
    p.add_argument("--cold-per-cluster", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build-graphs",
                       help="build and snapshot both co-occurrence graphs")
    p.add_argument("--kg", required=True, help="triple file")
    p.add_argument("--k-object", type=float, default=1.0)
    p.add_argument("--k-tag", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_graphs)

    p = sub.add_parser("train", help="train one model on a triple file")
    p.add_argument("--kg", required=True)
    p.add_argument("--out", required=True)
    add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="rank test tags and report metrics")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--kg", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ks", default="3,5", help="comma-separated cutoffs")
    p.add_argument("--buckets", default="10,20,30,40",
                   help="training-tag-count bucket edges")
    p.add_argument("--no-exclude-train", action="store_true",
                   help="keep training tags in the candidate list")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="print top-k tags for named objects")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--kg", required=True)
    p.add_argument("--split", help="exclude this split's training tags "
                                   "(default: all observed tags)")
    p.add_argument("--object", action="append", required=True,
                   help="object name; repeatable")
    p.add_argument("-k", "--top", type=int, default=5)
    p.add_argument("--no-exclude-train", action="store_true")
    p.add_argument("--out", help="also write predictions.json here")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("export-embeddings",
                       help="write embeddings as TSV and binary snapshots")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--kg", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_embeddings)

    p = sub.add_parser("sweep",
                       help="train/evaluate across training-fraction levels")
    p.add_argument("--kg", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--levels", default="0.2,0.4,0.6,0.8")
    add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate",
                       help="compare the dual model against its single-graph variants")
    p.add_argument("--kg", required=True)
    p.add_argument("--out", required=True)
    add_train_flags(p)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TaglinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

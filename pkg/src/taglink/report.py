"""Report rendering: JSON for machines, aligned text for humans, CSV for
external tooling, and PNG figures next to each delimited output."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import EvalReport


def report_to_text(report: EvalReport, title: str = "evaluation") -> str:
    """Aligned-column rendering of the overall and bucketed metrics."""
    names = [f"{m}@{k}" for k in report.ks for m in ("recall", "ndcg")]
    width = max(len(n) for n in names) + 2
    lines = [title, "=" * len(title), ""]
    lines.append(f"objects evaluated: {report.n_objects}")
    lines.append("")
    header = f"{'group':<14}{'n':>6}  " + "".join(f"{n:>{width}}" for n in names)
    lines.append(header)
    lines.append("-" * len(header))

    def row(label, n, metrics):
        cells = "".join(f"{metrics[n]:>{width}.4f}" for n in names)
        return f"{label:<14}{n:>6}  {cells}"

    lines.append(row("all", report.n_objects, report.overall))
    for bucket in report.buckets:
        lines.append(row(f"tags {bucket.label}", bucket.n_objects, bucket.metrics))
    lines.append("")
    for key, value in sorted(report.metadata.items()):
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, out_dir, basename: str = "report",
                 object_names=None) -> list[Path]:
    """Write report.json, report.txt, the per-object CSV, and the bucket
    figure into `out_dir`; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    json_path = out_dir / f"{basename}.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(include_per_object=False), fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
    paths.append(json_path)

    txt_path = out_dir / f"{basename}.txt"
    txt_path.write_text(report_to_text(report, basename), encoding="utf-8")
    paths.append(txt_path)

    csv_path = out_dir / f"{basename}_per_object.csv"
    metric_cols = [f"{m}@{k}" for k in report.ks for m in ("recall", "ndcg")]
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["object_id", "object_name", "n_train_tags",
                         "n_test_tags"] + metric_cols)
        for row in report.per_object:
            name = object_names[row["object_id"]] if object_names else ""
            writer.writerow(
                [row["object_id"], name, row["n_train_tags"], row["n_test_tags"]]
                + [f"{row[c]:.6f}" for c in metric_cols])
    paths.append(csv_path)

    fig_path = out_dir / f"{basename}_buckets.png"
    plot_bucket_metrics(report, fig_path)
    paths.append(fig_path)
    return paths


def plot_bucket_metrics(report: EvalReport, path) -> None:
    """Bar chart of recall per training-tag-count bucket, one bar group per
    cutoff k, with object counts under the labels."""
    buckets = report.buckets
    labels = [f"{b.label}\n({b.n_objects})" for b in buckets]
    x = range(len(buckets))
    width = 0.8 / len(report.ks)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, k in enumerate(report.ks):
        vals = [b.metrics[f"recall@{k}"] for b in buckets]
        ax.bar([xi + i * width for xi in x], vals, width, label=f"Recall@{k}")
    ax.set_xticks([xi + width * (len(report.ks) - 1) / 2 for xi in x])
    ax.set_xticklabels(labels)
    ax.set_xlabel("training tags per object (objects in group)")
    ax.set_ylabel("recall")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_loss_trace(trace, out_dir, basename: str = "loss_trace") -> list[Path]:
    """Per-epoch mean loss as CSV plus a line figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{basename}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss"])
        for epoch, loss in enumerate(trace, start=1):
            writer.writerow([epoch, f"{loss:.17g}"])
    fig_path = out_dir / f"{basename}.png"
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(range(1, len(trace) + 1), trace)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean loss per pair")
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [csv_path, fig_path]


def write_comparison(results: dict[str, EvalReport], out_dir,
                     basename: str, x_label: str) -> list[Path]:
    """Shared writer for sweep/ablation summaries: one row per run in CSV
    and JSON, plus a figure alongside."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    first = next(iter(results.values()))
    metric_cols = [f"{m}@{k}" for k in first.ks for m in ("recall", "ndcg")]

    csv_path = out_dir / f"{basename}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([x_label, "n_objects"] + metric_cols)
        for key, rep in results.items():
            writer.writerow([key, rep.n_objects]
                            + [f"{rep.overall[c]:.6f}" for c in metric_cols])

    json_path = out_dir / f"{basename}.json"
    payload = {key: rep.to_dict(include_per_object=False)
               for key, rep in results.items()}
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

    fig_path = out_dir / f"{basename}.png"
    numeric_keys = all(_is_number(k) for k in results)
    fig, ax = plt.subplots(figsize=(6.5, 4))
    if numeric_keys:
        xs = [float(k) for k in results]
        for col in metric_cols:
            ax.plot(xs, [rep.overall[col] for rep in results.values()],
                    marker="o", label=col)
        ax.set_xlabel(x_label)
    else:
        keys = list(results)
        width = 0.8 / len(metric_cols)
        for i, col in enumerate(metric_cols):
            ax.bar([j + i * width for j in range(len(keys))],
                   [results[k].overall[col] for k in keys], width, label=col)
        ax.set_xticks([j + width * (len(metric_cols) - 1) / 2
                       for j in range(len(keys))])
        ax.set_xticklabels(keys)
        ax.set_xlabel(x_label)
    ax.set_ylabel("metric value")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return [csv_path, json_path, fig_path]


def _is_number(s) -> bool:
    try:
        float(s)
        return True
    except (TypeError, ValueError):
        return False

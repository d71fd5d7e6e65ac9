"""CSV / JSON writers and readers for run records, summaries and curves."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .rosenbrock import RunRecord, RunSummary, Status

RECORD_COLUMNS = ["run", "optimizer", "converged", "iterations", "final_loss",
                  "final_gradient_norm", "distance_to_minimum", "time_s"]
MLP_CURVE_COLUMNS = ["iteration", "train_loss", "train_acc", "test_acc"]
TRACE_COLUMNS = ["iteration", "loss", "smoothed_loss", "grad_norm"]
ABLATION_COLUMNS = ["arch", "checkpoint", "eta_low_a", "eta_low_b", "test_acc_a",
                    "test_acc_b", "delta", "best_acc_a", "best_acc_b"]
SUMMARY_FIELDS = ["test_set", "optimizer", "total_runs", "converged_runs",
                  "convergence_rate_pct", "avg_iterations", "avg_time", "avg_distance",
                  "avg_final_loss", "avg_final_gradnorm"]


def fmt(value) -> str:
    """17 significant digits in scientific notation, enough to round-trip a float64."""
    return f"{float(value):.16e}"


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps the "\n" line endings the csv module was given
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def records_csv_text(records: Iterable[RunRecord], include_time=True) -> str:
    rows = []
    for r in sorted(records, key=lambda r: (r.run, r.optimizer)):
        row = [r.run, r.optimizer, "TRUE" if r.converged else "FALSE", r.iterations,
               fmt(r.final_loss), fmt(r.final_grad_norm), fmt(r.distance_to_minimum)]
        if include_time:
            row.append(f"{r.wall_time_s:.6e}")
        rows.append(row)
    columns = RECORD_COLUMNS if include_time else RECORD_COLUMNS[:-1]
    return _csv_text(columns, rows)


def emit_run_csv(records: Iterable[RunRecord], path, include_time=True):
    """Write one row per run, ordered by run index then optimizer name."""
    return _write(path, records_csv_text(records, include_time))


def read_run_csv(path, test_set="") -> List[RunRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            converged = row["converged"] == "TRUE"
            out.append(RunRecord(
                optimizer=row["optimizer"],
                converged=converged,
                iterations=int(row["iterations"]),
                final_loss=float(row["final_loss"]),
                final_grad_norm=float(row["final_gradient_norm"]),
                distance_to_minimum=float(row["distance_to_minimum"]),
                wall_time_s=float(row.get("time_s") or "nan"),
                run=int(row["run"]),
                test_set=test_set,
                status=Status.CONVERGED if converged else Status.FAILED_HIGH_LOSS,
            ))
    return out


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def summaries_payload(summaries: Sequence[RunSummary], metadata: Optional[dict] = None):
    items = [{k: _clean(v) for k, v in asdict(s).items()} for s in summaries]
    payload = {"summaries": items}
    if metadata is not None:
        payload["metadata"] = metadata
    return payload


def emit_summary_json(summaries: Sequence[RunSummary], path, metadata: Optional[dict] = None):
    """One object per (test_set, optimizer); averages with no converged runs become null."""
    text = json.dumps(summaries_payload(summaries, metadata), sort_keys=True, indent=2)
    return _write(path, text + "\n")


def read_summary_json(path) -> List[RunSummary]:
    with open(path) as fh:
        payload = json.load(fh)
    return [RunSummary(**{k: item[k] for k in SUMMARY_FIELDS}) for item in payload["summaries"]]


def emit_curve_csv(curve, path, mode="mlp", every=10):
    """Write a training curve (``mode="mlp"``) or a Rosenbrock trace (``mode="trace"``).

    MLP curves are dicts with ``iteration/train_loss/train_acc/test_acc``;
    traces are ``(iteration, loss, smoothed_loss, grad_norm)`` tuples, thinned
    to iterations divisible by ``every`` (the last row is always kept).
    """
    if mode == "mlp":
        rows = [[int(r["iteration"]), fmt(r["train_loss"]), fmt(r["train_acc"]),
                 fmt(r["test_acc"])] for r in curve]
        return _write(path, _csv_text(MLP_CURVE_COLUMNS, rows))
    if mode == "trace":
        if every < 1:
            raise ValueError("every must be >= 1")
        curve = list(curve)
        keep = [r for i, r in enumerate(curve) if r[0] % every == 0 or i == len(curve) - 1]
        rows = [[int(r[0]), fmt(r[1]), fmt(r[2]), fmt(r[3])] for r in keep]
        return _write(path, _csv_text(TRACE_COLUMNS, rows))
    raise ValueError(f"unknown curve mode {mode!r}")


def read_curve_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: (int(v) if k == "iteration" else float(v)) for k, v in row.items()}
                for row in reader]


def emit_ablation_csv(rows, path):
    out = [[r["arch"], r["checkpoint"], r["eta_low_a"], r["eta_low_b"], fmt(r["test_acc_a"]),
            fmt(r["test_acc_b"]), fmt(r["delta"]), fmt(r["best_acc_a"]), fmt(r["best_acc_b"])]
           for r in rows]
    return _write(path, _csv_text(ABLATION_COLUMNS, out))


def emit_metadata(metadata: dict, path):
    return _write(path, json.dumps(metadata, sort_keys=True, indent=2, default=str) + "\n")

"""Scoring trained networks and comparing network designs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .dataset import to_arrays
from .inference import check_assignment, evaluate_batch
from .network import Network
from .training import TrainHistory


def binarize(output_value: float, threshold: float = 0.5) -> bool:
    """True (positive) iff the output reaches the threshold."""
    return output_value >= threshold


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    tn: int
    fn: int
    mae: float

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mae": self.mae,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "cases": self.total,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        rows = [(k, v) for k, v in self.to_dict().items()]
        width = max(len(k) for k, _ in rows)
        return "\n".join(
            f"{k:<{width}}  {v:>10.6f}" if isinstance(v, float) else f"{k:<{width}}  {v:>10d}"
            for k, v in rows
        ) + "\n"

    @classmethod
    def from_dict(cls, doc) -> Metrics:
        return cls(int(doc["tp"]), int(doc["fp"]), int(doc["tn"]), int(doc["fn"]),
                   float(doc["mae"]))


def truth_labels(cases) -> np.ndarray:
    """Ground-truth classes: the Boolean column when present, else target >= 0.5."""
    return np.array(
        [bool(c.binary) if c.binary is not None else c.target >= 0.5 for c in cases],
        dtype=bool,
    )


def predict(network: Network, cases) -> np.ndarray:
    ids = network.input_ids
    for case in cases:
        check_assignment(ids, case.inputs)
    x, _ = to_arrays(cases, ids)
    return evaluate_batch(network, x, ids)


def score_split(network: Network, cases, threshold: float = 0.5) -> Metrics:
    """Confusion counts at ``threshold`` plus mean absolute error of raw outputs."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    outputs = predict(network, cases)
    targets = np.array([c.target for c in cases], dtype=float)
    truth = truth_labels(cases)
    positive = outputs >= threshold
    return Metrics(
        tp=int(np.sum(positive & truth)),
        fp=int(np.sum(positive & ~truth)),
        tn=int(np.sum(~positive & ~truth)),
        fn=int(np.sum(~positive & truth)),
        mae=float(np.mean(np.abs(outputs - targets))) if len(cases) else 0.0,
    )


# -- design comparison --------------------------------------------------


@dataclass
class DesignResult:
    name: str
    network: Network
    metrics: Metrics | None = None
    history: TrainHistory | None = None


@dataclass
class DesignSummary:
    name: str
    facts: int
    rules: int
    inputs: int
    max_fan_out: int
    epochs: int | None
    final_mae: float | None
    metrics: dict | None = field(default=None)


def summarize(result: DesignResult) -> DesignSummary:
    fan_out = result.network.premise_fan_out()
    history = result.history
    return DesignSummary(
        name=result.name,
        facts=len(result.network.facts),
        rules=len(result.network.rules),
        inputs=len(fan_out),
        max_fan_out=max(fan_out.values(), default=0),
        epochs=history.epochs_run if history else None,
        final_mae=history.epoch_mae[-1] if history and history.epoch_mae else None,
        metrics=result.metrics.to_dict() if result.metrics else None,
    )


def _numeric_fields(summary: DesignSummary) -> dict:
    out = {}
    for k, v in asdict(summary).items():
        if k == "metrics" and v:
            out.update({f"metrics.{mk}": mv for mk, mv in v.items()})
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out[k] = v
    return out


def compare_designs(a: DesignResult, b: DesignResult) -> dict:
    """Side-by-side summary of two designs with ``b - a`` deltas."""
    sa, sb = summarize(a), summarize(b)
    na, nb = _numeric_fields(sa), _numeric_fields(sb)
    deltas = {k: nb[k] - na[k] for k in na if k in nb}
    return {"a": asdict(sa), "b": asdict(sb), "delta": deltas}


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def comparison_markdown(report: dict) -> str:
    a, b = report["a"], report["b"]
    keys = ["facts", "rules", "inputs", "max_fan_out", "epochs", "final_mae"]
    metric_keys = sorted(set((a.get("metrics") or {})) | set((b.get("metrics") or {})))
    lines = [
        f"# Design comparison: {a['name']} vs {b['name']}",
        "",
        "Positive class is the high end of each network's output "
        "(phishing / true statement).",
        "",
        f"| quantity | {a['name']} | {b['name']} | delta |",
        "|---|---:|---:|---:|",
    ]
    for k in keys:
        lines.append(f"| {k} | {_fmt(a[k])} | {_fmt(b[k])} | {_fmt(report['delta'].get(k))} |")
    for k in metric_keys:
        va = (a.get("metrics") or {}).get(k)
        vb = (b.get("metrics") or {}).get(k)
        lines.append(
            f"| {k} | {_fmt(va)} | {_fmt(vb)} | {_fmt(report['delta'].get('metrics.' + k))} |"
        )
    return "\n".join(lines) + "\n"

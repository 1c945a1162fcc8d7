"""Labeled cases and the JSON-lines processed-dataset format.

One case per line::

    {"inputs": {"fact_id": value, ...}, "target": 0.75, "binary": 1}

``binary`` is optional; the fake-news pipeline fills it from the corpus'
Boolean truthfulness column.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class LabeledCase:
    inputs: Mapping[str, float]
    target: float
    binary: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.target <= 1.0:
            raise ValueError(f"target {self.target!r} lies outside [0, 1]")

    def to_json(self) -> str:
        doc = {"inputs": dict(sorted(self.inputs.items())), "target": self.target}
        if self.binary is not None:
            doc["binary"] = self.binary
        return json.dumps(doc)


def write_cases(path, cases: Iterable[LabeledCase]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            fh.write(case.to_json())
            fh.write("\n")
            n += 1
    return n


def read_cases(path) -> list[LabeledCase]:
    cases = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{os.fspath(path)}:{lineno}"
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, where) from None
            if not isinstance(doc, dict) or "inputs" not in doc or "target" not in doc:
                raise ParseError("expected an object with 'inputs' and 'target'", where)
            try:
                inputs = {str(k): float(v) for k, v in doc["inputs"].items()}
                cases.append(LabeledCase(inputs, float(doc["target"]), doc.get("binary")))
            except (AttributeError, TypeError, ValueError) as exc:
                raise ParseError(str(exc), where) from None
    return cases


def fact_id_mismatches(input_ids, cases: Iterable[LabeledCase]) -> list[str]:
    """Human-readable differences between case keys and network inputs."""
    expected = set(input_ids)
    problems = []
    for i, case in enumerate(cases):
        keys = set(case.inputs)
        for fid in sorted(expected - keys):
            problems.append(f"case {i}: missing input {fid!r}")
        for fid in sorted(keys - expected):
            problems.append(f"case {i}: unexpected input {fid!r}")
    return problems


def to_arrays(cases, input_ids) -> tuple[np.ndarray, np.ndarray]:
    """Stack cases into an input matrix (columns = ``input_ids``) and targets."""
    x = np.array([[c.inputs[fid] for fid in input_ids] for c in cases], dtype=float)
    x = x.reshape(len(cases), len(input_ids))
    y = np.array([c.target for c in cases], dtype=float)
    return x, y

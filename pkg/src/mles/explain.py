"""Exact per-rule and per-input decomposition of one evaluation.

Because every rule is a convex combination and every fact has a single
producer, the output is linear in the inputs once weights are fixed.  The
influence of input ``i`` is the sum over all directed paths from ``i`` to
the output of the product of the weights along the path, and
``output == sum(c_i * v_i)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping

from .inference import compile_network, run_plan
from .network import Network


@dataclass(frozen=True)
class RuleRecord:
    rule_id: str
    target: str
    premises: tuple[str, str]
    premise_values: tuple[float, float]
    weights: tuple[float, float]
    contributions: tuple[float, float]
    target_value: float
    contributing: bool


@dataclass(frozen=True)
class ExplanationTrace:
    rules: tuple[RuleRecord, ...]
    influence: dict[str, float]
    inputs: dict[str, float]
    output: str
    output_value: float

    def reconstruction(self) -> float:
        return sum(self.influence[f] * self.inputs[f] for f in sorted(self.inputs))

    def to_dict(self) -> dict:
        return {
            "output": self.output,
            "output_value": self.output_value,
            "influence": dict(self.influence),
            "inputs": dict(self.inputs),
            "rules": [asdict(r) for r in self.rules],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self, top: int | None = None) -> str:
        lines = [f"{self.output} = {self.output_value:.6f}", "", "rules:"]
        for r in self.rules:
            mark = "" if r.contributing else "   (does not reach the output)"
            lines.append(
                f"  {r.target} = {r.weights[0]:.4f}*{r.premises[0]} + "
                f"{r.weights[1]:.4f}*{r.premises[1]}"
                f" = {r.weights[0]:.4f}*{r.premise_values[0]:.4f} + "
                f"{r.weights[1]:.4f}*{r.premise_values[1]:.4f}"
                f" = {r.target_value:.6f}{mark}"
            )
        lines += ["", "input influence (coefficient x value = share of output):"]
        for fid, c, v, share in rank_influences(self, top or len(self.inputs)):
            lines.append(f"  {fid:<32} {c:.6f} x {v:.6f} = {share:.6f}")
        return "\n".join(lines) + "\n"


def influence_by_accumulation(network: Network) -> dict[str, float]:
    """Path-weight sums, accumulated backward from the output."""
    plan = compile_network(network)
    adjoint = {plan.output: 1.0}
    for r in reversed(plan.rules):
        a = adjoint.get(r.target, 0.0)
        adjoint[r.premise1] = adjoint.get(r.premise1, 0.0) + r.w1 * a
        adjoint[r.premise2] = adjoint.get(r.premise2, 0.0) + r.w2 * a
    return {fid: adjoint.get(fid, 0.0) for fid in plan.input_ids}


def influence_by_paths(network: Network) -> dict[str, float]:
    """Path-weight sums by explicit enumeration of every input-output path.

    Exponential in the worst case; kept as an independent check of
    :func:`influence_by_accumulation`.
    """
    plan = compile_network(network)
    producers = {r.target: r for r in plan.rules}
    totals = {fid: 0.0 for fid in plan.input_ids}

    def walk(fact, product):
        rule = producers.get(fact)
        if rule is None:
            totals[fact] += product
            return
        walk(rule.premise1, product * rule.w1)
        walk(rule.premise2, product * rule.w2)

    walk(plan.output, 1.0)
    return totals


def explain(network: Network, assignment: Mapping[str, float]) -> ExplanationTrace:
    plan = compile_network(network)
    values = run_plan(plan, assignment)
    records = []
    for r in plan.rules:
        v1, v2 = values[r.premise1], values[r.premise2]
        records.append(
            RuleRecord(
                rule_id=r.id,
                target=r.target,
                premises=(r.premise1, r.premise2),
                premise_values=(v1, v2),
                weights=(r.w1, r.w2),
                contributions=(r.w1 * v1, r.w2 * v2),
                target_value=values[r.target],
                contributing=r.id in plan.contributing,
            )
        )
    return ExplanationTrace(
        rules=tuple(records),
        influence=influence_by_accumulation(network),
        inputs={fid: values[fid] for fid in plan.input_ids},
        output=plan.output,
        output_value=values[plan.output],
    )


def rank_influences(trace: ExplanationTrace, k: int):
    """Top ``k`` inputs as ``(fact_id, coefficient, value, coefficient*value)``."""
    rows = [
        (fid, trace.influence[fid], v, trace.influence[fid] * v)
        for fid, v in trace.inputs.items()
    ]
    rows.sort(key=lambda row: (-row[3], row[0]))
    return rows[: max(k, 0)]

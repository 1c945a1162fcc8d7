"""Forward evaluation and backward rule identification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import MissingInput, UnexpectedInput
from .network import Network, Rule, require_valid, topological_order


@dataclass(frozen=True)
class EvaluationResult:
    values: dict[str, float]
    output_value: float


@dataclass(frozen=True)
class Plan:
    """A validated network flattened into evaluation order."""

    rules: tuple[Rule, ...]
    input_ids: tuple[str, ...]
    output: str
    contributing: frozenset[str]

    @property
    def n_contributing(self) -> int:
        return len(self.contributing)


def compile_network(network: Network) -> Plan:
    order = topological_order(network)  # validates
    by_id = {r.id: r for r in network.rules}
    return Plan(
        rules=tuple(by_id[rid] for rid in order),
        input_ids=tuple(network.input_ids),
        output=network.output,
        contributing=frozenset(_contributing(network)),
    )


def combine(w1: float, v1: float, w2: float, v2: float) -> float:
    """Weighted sum of two premise values.

    Clipped to the premises' range so rounding can never push a fact
    outside ``[min(v1, v2), max(v1, v2)]``.
    """
    mixed = w1 * v1 + w2 * v2
    lo, hi = (v1, v2) if v1 <= v2 else (v2, v1)
    return min(max(mixed, lo), hi)


def check_assignment(input_ids, assignment: Mapping[str, float]) -> None:
    for fid in input_ids:
        if fid not in assignment:
            raise MissingInput(fid)
    expected = set(input_ids)
    for fid in sorted(assignment):
        if fid not in expected:
            raise UnexpectedInput(fid)
    for fid in input_ids:
        v = assignment[fid]
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"input {fid!r} = {v!r} lies outside [0, 1]")


def run_plan(plan: Plan, assignment: Mapping[str, float]) -> dict[str, float]:
    check_assignment(plan.input_ids, assignment)
    values = {fid: float(assignment[fid]) for fid in plan.input_ids}
    for r in plan.rules:
        values[r.target] = combine(r.w1, values[r.premise1], r.w2, values[r.premise2])
    return values


def evaluate(network: Network, assignment: Mapping[str, float]) -> EvaluationResult:
    """Propagate input values through every rule in topological order.

    >>> from mles.network import Fact, Rule, Network
    >>> n = Network()
    >>> for fid, kind in [("A", "input"), ("B", "input"), ("O", "output")]:
    ...     _ = n.add_fact(Fact(fid, kind=kind))
    >>> _ = n.add_rule(Rule("r", "A", "B", "O", 0.5, 0.5))
    >>> evaluate(n, {"A": 0.4, "B": 0.8}).output_value
    0.6000000000000001
    """
    plan = compile_network(network)
    values = run_plan(plan, assignment)
    return EvaluationResult(values, values[plan.output])


def evaluate_batch(network: Network, inputs: np.ndarray, input_ids=None) -> np.ndarray:
    """Output values for a ``(n_cases, n_inputs)`` array.

    Columns follow ``input_ids`` (default: the network's sorted input ids).
    Arithmetic matches :func:`evaluate` element for element.
    """
    plan = compile_network(network)
    if input_ids is None:
        input_ids = plan.input_ids
    if sorted(input_ids) != sorted(plan.input_ids):
        missing = sorted(set(plan.input_ids) - set(input_ids))
        if missing:
            raise MissingInput(missing[0])
        raise UnexpectedInput(sorted(set(input_ids) - set(plan.input_ids))[0])
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != len(input_ids):
        raise ValueError(f"expected shape (n, {len(input_ids)}), got {inputs.shape}")
    if inputs.size and (inputs.min() < 0.0 or inputs.max() > 1.0):
        raise ValueError("input values must lie in [0, 1]")
    columns = {fid: inputs[:, j] for j, fid in enumerate(input_ids)}
    for r in plan.rules:
        a, b = columns[r.premise1], columns[r.premise2]
        mixed = r.w1 * a + r.w2 * b
        columns[r.target] = np.minimum(np.maximum(mixed, np.minimum(a, b)), np.maximum(a, b))
    return columns[plan.output].copy()


def _contributing(network: Network) -> set[str]:
    producers = network.producers()
    found: set[str] = set()
    stack = [network.output]
    seen = {network.output}
    while stack:
        rule = producers.get(stack.pop())
        if rule is None:
            continue
        found.add(rule.id)
        for p in rule.premises:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return found


def contributing_rules(network: Network) -> set[str]:
    """Ids of the rules lying on some directed path to the output fact."""
    require_valid(network)
    return _contributing(network)

"""Facts, rules and the rule-fact network that holds them.

A network is a directed acyclic graph: every rule reads two premise facts
and writes one target fact as a weighted sum ``w1*v1 + w2*v2`` with
``w1 + w2 == 1``.  Each non-input fact is produced by exactly one rule and
exactly one fact is the network output.

Networks are stored as a single JSON document::

    {"facts": [{"id": ..., "name": ..., "kind": ...}, ...],
     "rules": [{"id": ..., "premises": [a, b], "target": t,
                "weights": [w1, w2]}, ...],
     "output": id,
     "metadata": {...}}
"""

from __future__ import annotations

import copy
import heapq
import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterable

from .errors import (
    CycleIntroduced,
    DuplicateId,
    DuplicateTarget,
    InvalidNetwork,
    InvalidRule,
    ParseError,
    SecondOutputFact,
    UnknownFact,
    WeightSumViolation,
)

INPUT = "input"
INTERMEDIATE = "intermediate"
OUTPUT = "output"
FACT_KINDS = (INPUT, INTERMEDIATE, OUTPUT)

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Fact:
    id: str
    name: str = ""
    kind: str = INPUT


@dataclass
class Rule:
    id: str
    premise1: str
    premise2: str
    target: str
    w1: float = 0.5
    w2: float = 0.5

    @property
    def premises(self) -> tuple[str, str]:
        return (self.premise1, self.premise2)

    @property
    def weights(self) -> tuple[float, float]:
        return (self.w1, self.w2)


def weights_valid(w1: float, w2: float) -> bool:
    return 0.0 <= w1 <= 1.0 and 0.0 <= w2 <= 1.0 and abs(w1 + w2 - 1.0) <= WEIGHT_TOLERANCE


class Network:
    """Mutable container of facts and rules.

    The constructor performs no checks so that damaged files can still be
    loaded and reported on; use :meth:`add_fact`/:meth:`add_rule` to build a
    network incrementally with every invariant enforced, and :func:`validate`
    to audit one built any other way.
    """

    def __init__(
        self,
        facts: Iterable[Fact] = (),
        rules: Iterable[Rule] = (),
        output: str | None = None,
        metadata: dict | None = None,
    ):
        self.facts: dict[str, Fact] = {}
        for fact in facts:
            self.facts[fact.id] = fact
        self.rules: list[Rule] = list(rules)
        self.output = output
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return (
            f"Network({len(self.facts)} facts, {len(self.rules)} rules, "
            f"output={self.output!r})"
        )

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.facts == other.facts
            and self.rules == other.rules
            and self.output == other.output
            and self.metadata == other.metadata
        )

    def copy(self) -> Network:
        return copy.deepcopy(self)

    # -- construction -------------------------------------------------

    def add_fact(self, fact: Fact) -> Network:
        if not fact.id:
            raise ValueError("fact id must be a nonempty string")
        if fact.kind not in FACT_KINDS:
            raise ValueError(f"unknown fact kind {fact.kind!r}")
        if fact.id in self.facts:
            raise DuplicateId(f"fact {fact.id!r} already present")
        if fact.kind == OUTPUT:
            if self.output is not None:
                raise SecondOutputFact(
                    f"cannot add {fact.id!r}: {self.output!r} is already the output"
                )
            self.output = fact.id
        self.facts[fact.id] = fact
        return self

    def add_rule(self, rule: Rule) -> Network:
        if any(r.id == rule.id for r in self.rules):
            raise DuplicateId(f"rule {rule.id!r} already present")
        for fid in (rule.premise1, rule.premise2, rule.target):
            if fid not in self.facts:
                raise UnknownFact(f"rule {rule.id!r} references unknown fact {fid!r}")
        if rule.premise1 == rule.premise2:
            raise InvalidRule(f"rule {rule.id!r} uses {rule.premise1!r} twice")
        if rule.target in rule.premises:
            raise InvalidRule(f"rule {rule.id!r} reads its own target")
        if self.facts[rule.target].kind == INPUT:
            raise InvalidRule(f"rule {rule.id!r} targets input fact {rule.target!r}")
        if not weights_valid(rule.w1, rule.w2):
            raise WeightSumViolation(
                f"rule {rule.id!r} weights ({rule.w1!r}, {rule.w2!r}) must lie in "
                "[0, 1] and sum to 1"
            )
        if rule.target in self.producers():
            raise DuplicateTarget(f"fact {rule.target!r} already has a producing rule")
        # the new edges close a cycle iff the target already feeds a premise
        downstream = self.descendants(rule.target)
        if rule.premise1 in downstream or rule.premise2 in downstream:
            raise CycleIntroduced(f"rule {rule.id!r} would create a cycle")
        self.rules.append(rule)
        return self

    # -- queries ------------------------------------------------------

    @property
    def input_ids(self) -> list[str]:
        return sorted(f.id for f in self.facts.values() if f.kind == INPUT)

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def producers(self) -> dict[str, Rule]:
        """Map each produced fact to its (first) producing rule."""
        out: dict[str, Rule] = {}
        for r in self.rules:
            out.setdefault(r.target, r)
        return out

    def consumers(self) -> dict[str, list[Rule]]:
        """Map each fact to the rules that read it as a premise."""
        out: dict[str, list[Rule]] = {fid: [] for fid in self.facts}
        for r in self.rules:
            for p in r.premises:
                out.setdefault(p, []).append(r)
        return out

    def descendants(self, fact_id: str) -> set[str]:
        """Facts reachable from ``fact_id`` along premise -> target edges."""
        consumers = self.consumers()
        seen: set[str] = set()
        stack = [fact_id]
        while stack:
            for r in consumers.get(stack.pop(), ()):
                if r.target not in seen:
                    seen.add(r.target)
                    stack.append(r.target)
        return seen

    def premise_fan_out(self) -> dict[str, int]:
        """Number of rules reading each input fact."""
        consumers = self.consumers()
        return {fid: len(consumers.get(fid, ())) for fid in self.input_ids}


# -- validation ---------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    severity: str = "error"  # or "warning"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.findings

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]

    def __str__(self):
        if self.clean:
            return "network is well-formed"
        return "\n".join(f"{f.severity}: {f.code}: {f.message}" for f in self.findings)


def validate(network: Network) -> ValidationReport:
    """Audit every structural invariant; never raises."""
    findings: list[Finding] = []

    def err(code, msg):
        findings.append(Finding(code, msg))

    for fid, fact in network.facts.items():
        if not fid or fid != fact.id:
            err("BadFactId", f"fact key {fid!r} does not match id {fact.id!r}")
        if fact.kind not in FACT_KINDS:
            err("BadFactKind", f"fact {fid!r} has unknown kind {fact.kind!r}")

    outputs = [f.id for f in network.facts.values() if f.kind == OUTPUT]
    if len(outputs) > 1:
        err("SecondOutputFact", f"several output facts: {sorted(outputs)}")
    if network.output is None:
        err("NoOutput", "no output fact designated")
    elif network.output not in network.facts:
        err("UnknownFact", f"output {network.output!r} is not a fact")
    elif network.facts[network.output].kind != OUTPUT:
        err("OutputKind", f"output {network.output!r} is not of kind 'output'")
    elif not outputs:
        err("NoOutput", "no fact of kind 'output'")

    seen_rule_ids: set[str] = set()
    produced: dict[str, str] = {}
    for r in network.rules:
        if r.id in seen_rule_ids:
            err("DuplicateId", f"rule id {r.id!r} used more than once")
        seen_rule_ids.add(r.id)
        for fid in (r.premise1, r.premise2, r.target):
            if fid not in network.facts:
                err("UnknownFact", f"rule {r.id!r} references unknown fact {fid!r}")
        if r.premise1 == r.premise2:
            err("InvalidRule", f"rule {r.id!r} uses {r.premise1!r} twice")
        if r.target in r.premises:
            err("InvalidRule", f"rule {r.id!r} reads its own target")
        target = network.facts.get(r.target)
        if target is not None and target.kind == INPUT:
            err("InvalidRule", f"rule {r.id!r} targets input fact {r.target!r}")
        if not weights_valid(r.w1, r.w2):
            err(
                "WeightSumViolation",
                f"rule {r.id!r} weights ({r.w1!r}, {r.w2!r}) must lie in [0, 1] "
                "and sum to 1",
            )
        if r.target in produced:
            err(
                "DuplicateTarget",
                f"fact {r.target!r} produced by both {produced[r.target]!r} and {r.id!r}",
            )
        produced.setdefault(r.target, r.id)

    for fid, fact in network.facts.items():
        if fact.kind != INPUT and fid not in produced:
            err("MissingProducer", f"{fact.kind} fact {fid!r} has no producing rule")

    if _kahn(network)[1]:
        err("Cycle", "the premise -> target graph contains a cycle")
    elif network.output in network.facts:
        ancestors = _ancestors(network, network.output)
        inputs = [fid for fid in network.input_ids]
        if not any(fid in ancestors for fid in inputs):
            err("OutputUnreachable", "no input fact reaches the output")
        for fid in inputs:
            if fid not in ancestors:
                findings.append(
                    Finding(
                        "UnreachableInput",
                        f"unreachable input: {fid!r} has no path to the output",
                        "warning",
                    )
                )
    return ValidationReport(findings)


def require_valid(network: Network) -> None:
    report = validate(network)
    if report.errors:
        raise InvalidNetwork(
            "invalid network: " + "; ".join(f.message for f in report.errors),
            report.errors,
        )


def _ancestors(network: Network, fact_id: str) -> set[str]:
    producers = network.producers()
    seen = {fact_id}
    stack = [fact_id]
    while stack:
        rule = producers.get(stack.pop())
        if rule is None:
            continue
        for p in rule.premises:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _kahn(network: Network) -> tuple[list[str], bool]:
    """Kahn's algorithm over rules, smallest ready rule id first.

    Returns the order and whether rules were left over (a cycle).
    """
    producers: dict[str, list[str]] = {}
    for r in network.rules:
        producers.setdefault(r.target, []).append(r.id)
    waiting: dict[str, int] = {}
    dependents: dict[str, list[str]] = {}
    for r in network.rules:
        deps = {d for p in set(r.premises) for d in producers.get(p, ())}
        waiting[r.id] = len(deps)
        for d in deps:
            dependents.setdefault(d, []).append(r.id)
    ready = [rid for rid, n in waiting.items() if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        rid = heapq.heappop(ready)
        order.append(rid)
        for nxt in dependents.get(rid, ()):
            waiting[nxt] -= 1
            if waiting[nxt] == 0:
                heapq.heappush(ready, nxt)
    return order, len(order) < len(waiting)


def topological_order(network: Network) -> list[str]:
    """Rule ids ordered so that producers precede consumers.

    Ties are broken by lexicographic rule id, so the result does not depend
    on the order of ``network.rules``.
    """
    require_valid(network)
    return _kahn(network)[0]


# -- serialization ------------------------------------------------------


def to_dict(network: Network, *, mask_weights: bool = False) -> dict:
    rules = []
    for r in network.rules:
        # w2 is re-derived so that the pair sums to 1 after a decimal round trip
        weights = None if mask_weights else [r.w1, 1.0 - r.w1]
        rules.append(
            {
                "id": r.id,
                "premises": [r.premise1, r.premise2],
                "target": r.target,
                "weights": weights,
            }
        )
    return {
        "facts": [
            {"id": f.id, "name": f.name, "kind": f.kind} for f in network.facts.values()
        ],
        "rules": rules,
        "output": network.output,
        "metadata": network.metadata,
    }


def dumps(network: Network, *, mask_weights: bool = False) -> str:
    return json.dumps(to_dict(network, mask_weights=mask_weights), indent=2) + "\n"


def save(network: Network, destination) -> None:
    """Write ``network`` as JSON to a path or a text file object."""
    require_valid(network)
    text = dumps(network)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        destination.write(text)


def _field(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"field {key!r} has wrong type", where)
    return value


def from_dict(doc, *, check: bool = True) -> Network:
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", "document")
    facts = []
    for i, item in enumerate(_field(doc, "facts", "document", list)):
        where = f"facts[{i}]"
        facts.append(
            Fact(
                id=_field(item, "id", where, str),
                name=item.get("name", "") if isinstance(item, dict) else "",
                kind=_field(item, "kind", where, str),
            )
        )
    rules = []
    for i, item in enumerate(_field(doc, "rules", "document", list)):
        where = f"rules[{i}]"
        premises = _field(item, "premises", where, list)
        weights = _field(item, "weights", where, list)
        if len(premises) != 2 or not all(isinstance(p, str) for p in premises):
            raise ParseError("'premises' must hold two fact ids", where)
        if len(weights) != 2 or not all(
            isinstance(w, (int, float)) and not isinstance(w, bool) for w in weights
        ):
            raise ParseError("'weights' must hold two numbers", where)
        rules.append(
            Rule(
                id=_field(item, "id", where, str),
                premise1=premises[0],
                premise2=premises[1],
                target=_field(item, "target", where, str),
                w1=float(weights[0]),
                w2=float(weights[1]),
            )
        )
    output = _field(doc, "output", "document", str)
    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("'metadata' must be an object", "document")
    ids = [f.id for f in facts]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ParseError(f"duplicate fact ids {dup}", "facts")
    network = Network(facts, rules, output, metadata)
    if check:
        require_valid(network)
    return network


def loads(text: str, *, check: bool = True) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return from_dict(doc, check=check)


def load(source, *, check: bool = True) -> Network:
    """Read a network from a path or a text file object.

    With ``check=False`` structurally damaged networks are returned as-is so
    they can be passed to :func:`validate`.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        text = source.read()
    else:
        raise TypeError("source must be a path or a readable file object")
    return loads(text, check=check)

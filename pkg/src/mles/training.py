"""Rule-weight training and synthetic ground-truth ("perfect system") data.

Training never touches structure.  For one labeled case the network is
evaluated once, the error ``e = target - output`` is split across the rules
that lie on a path to the output, and each such rule shifts weight toward
the premise that moves its own output in the direction of ``e``::

    delta = velocity * e / n_contributing      # "uniform"
    delta = velocity * e                       # "flat"
    w1 <- clip(w1 + delta * sign(v1 - v2), 0, 1);  w2 <- 1 - w1

Rules whose two premises are equal are left alone.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledCase, to_arrays
from .errors import InfeasibleShape
from .inference import compile_network, evaluate_batch, run_plan
from .network import INPUT, INTERMEDIATE, OUTPUT, Fact, Network, Rule

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

DISTRIBUTIONS = ("uniform", "flat")


@dataclass(frozen=True)
class TrainConfig:
    velocity: float = 0.1
    epochs: int = 1
    distribution: str = "uniform"
    shuffle_seed: int = 0
    stop_tolerance: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.velocity <= 1.0:
            raise ValueError(f"velocity must lie in (0, 1], got {self.velocity!r}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if self.stop_tolerance < 0:
            raise ValueError("stop_tolerance must be nonnegative")


@dataclass
class TrainHistory:
    epoch_mae: list[float] = field(default_factory=list)
    cases_seen: int = 0

    @property
    def epochs_run(self) -> int:
        return len(self.epoch_mae)

    def rows(self):
        n = self.cases_seen // self.epochs_run if self.epochs_run else 0
        for i, mae in enumerate(self.epoch_mae):
            yield i + 1, (i + 1) * n, mae

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "index", "mae"])
            for epoch, index, mae in self.rows():
                writer.writerow([epoch, index, repr(mae)])

    @classmethod
    def from_csv(cls, path) -> TrainHistory:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(
            [float(r["mae"]) for r in rows], int(rows[-1]["index"]) if rows else 0
        )


def train_case(network: Network, case: LabeledCase, config: TrainConfig) -> Network:
    """Return a copy of ``network`` with one correction step applied."""
    plan = compile_network(network)
    values = run_plan(plan, case.inputs)
    error = case.target - values[plan.output]
    trained = network.copy()
    if error == 0.0:
        return trained
    n = plan.n_contributing
    if config.distribution == "flat":
        delta = config.velocity * error
    else:
        delta = config.velocity * error / n
    for rule in trained.rules:
        if rule.id not in plan.contributing:
            continue
        v1, v2 = values[rule.premise1], values[rule.premise2]
        if v1 == v2:
            continue
        shifted = rule.w1 + delta * (1.0 if v1 > v2 else -1.0)
        rule.w1 = min(max(shifted, 0.0), 1.0)
        rule.w2 = 1.0 - rule.w1
    return trained


def epoch_order(n_cases: int, seed: int, epoch: int) -> np.ndarray:
    """Visiting order for one epoch; a function of (seed, epoch) only."""
    return np.random.default_rng([seed, epoch]).permutation(n_cases)


@njit(cache=True)
def _epoch_kernel(p1, p2, tgt, w1, w2, contrib, input_cols, out_col, n_facts,
                  x, y, order, velocity, flat, n_contrib):
    values = np.zeros(n_facts)
    total = 0.0
    for c in order:
        for j in range(input_cols.size):
            values[input_cols[j]] = x[c, j]
        for k in range(p1.size):
            a = values[p1[k]]
            b = values[p2[k]]
            mixed = w1[k] * a + w2[k] * b
            values[tgt[k]] = min(max(mixed, min(a, b)), max(a, b))
        error = y[c] - values[out_col]
        total += abs(error)
        if error == 0.0:
            continue
        if flat:
            delta = velocity * error
        else:
            delta = velocity * error / n_contrib
        for k in range(p1.size):
            if not contrib[k]:
                continue
            a = values[p1[k]]
            b = values[p2[k]]
            if a == b:
                continue
            if a > b:
                shifted = w1[k] + delta * 1.0
            else:
                shifted = w1[k] + delta * -1.0
            shifted = min(max(shifted, 0.0), 1.0)
            w1[k] = shifted
            w2[k] = 1.0 - shifted
    return total


class _Arrays:
    """Index arrays for the compiled epoch loop."""

    def __init__(self, network: Network):
        plan = compile_network(network)
        index = {fid: i for i, fid in enumerate(network.facts)}
        self.rule_ids = [r.id for r in plan.rules]
        self.p1 = np.array([index[r.premise1] for r in plan.rules], dtype=np.int64)
        self.p2 = np.array([index[r.premise2] for r in plan.rules], dtype=np.int64)
        self.tgt = np.array([index[r.target] for r in plan.rules], dtype=np.int64)
        self.w1 = np.array([r.w1 for r in plan.rules], dtype=float)
        self.w2 = np.array([r.w2 for r in plan.rules], dtype=float)
        self.contrib = np.array([r.id in plan.contributing for r in plan.rules])
        self.input_ids = list(plan.input_ids)
        self.input_cols = np.array([index[f] for f in plan.input_ids], dtype=np.int64)
        self.out_col = index[plan.output]
        self.n_facts = len(index)
        self.n_contrib = plan.n_contributing

    def run_epoch(self, x, y, order, config: TrainConfig) -> float:
        if len(order) == 0:
            return 0.0
        total = _epoch_kernel(
            self.p1, self.p2, self.tgt, self.w1, self.w2, self.contrib,
            self.input_cols, self.out_col, self.n_facts, x, y,
            np.asarray(order, dtype=np.int64), float(config.velocity),
            config.distribution == "flat", float(self.n_contrib),
        )
        return total / len(order)

    def write_back(self, network: Network) -> Network:
        trained = network.copy()
        by_id = {r.id: r for r in trained.rules}
        for rid, a, b in zip(self.rule_ids, self.w1, self.w2):
            by_id[rid].w1 = float(a)
            by_id[rid].w2 = float(b)
        return trained


def _case_arrays(arrays: _Arrays, cases):
    from .inference import check_assignment

    for case in cases:
        check_assignment(arrays.input_ids, case.inputs)
    return to_arrays(cases, arrays.input_ids)


def train_epoch(network: Network, cases, config: TrainConfig, epoch: int = 0):
    """One pass over ``cases`` in seeded order.

    Returns the trained copy and the mean absolute error measured before
    each case's update.
    """
    arrays = _Arrays(network)
    x, y = _case_arrays(arrays, cases)
    mae = arrays.run_epoch(x, y, epoch_order(len(cases), config.shuffle_seed, epoch), config)
    return arrays.write_back(network), mae


def train(network: Network, cases, config: TrainConfig) -> tuple[Network, TrainHistory]:
    arrays = _Arrays(network)
    x, y = _case_arrays(arrays, cases)
    history = TrainHistory()
    for epoch in range(config.epochs):
        order = epoch_order(len(cases), config.shuffle_seed, epoch)
        mae = arrays.run_epoch(x, y, order, config)
        history.epoch_mae.append(mae)
        history.cases_seen += len(cases)
        if mae <= config.stop_tolerance:
            break
    return arrays.write_back(network), history


# -- synthetic ground truth --------------------------------------------

TOPOLOGIES = ("dag", "chain")


@dataclass(frozen=True)
class ShapeSpec:
    """Size of a synthetic network.

    ``dag`` wires premises at random (a tree when ``n_rules == n_inputs - 1``);
    ``chain`` feeds each rule's result into the next one.
    """

    n_inputs: int
    n_rules: int
    n_cases: int = 1000
    topology: str = "dag"


def _random_weight(rng) -> float:
    a, b = rng.uniform(0.0, 1.0, size=2)
    if a + b == 0.0:
        return 0.5
    return float(a / (a + b))


def _random_structure(shape: ShapeSpec, rng) -> Network:
    if shape.topology not in TOPOLOGIES:
        raise InfeasibleShape(f"unknown topology {shape.topology!r}")
    if shape.n_inputs < 2:
        raise InfeasibleShape("need at least two input facts")
    if shape.n_rules < shape.n_inputs - 1:
        raise InfeasibleShape(
            f"{shape.n_rules} binary rules cannot connect {shape.n_inputs} inputs"
        )
    if shape.topology == "chain" and shape.n_rules != shape.n_inputs - 1:
        raise InfeasibleShape("a chain needs exactly n_inputs - 1 rules")
    if shape.n_cases < 0:
        raise InfeasibleShape("n_cases must be nonnegative")

    width = len(str(max(shape.n_inputs, shape.n_rules)))
    network = Network()
    inputs = [f"x{i:0{width}d}" for i in range(shape.n_inputs)]
    for fid in inputs:
        network.add_fact(Fact(fid, fid, INPUT))

    dangling = list(inputs)
    used: list[str] = []
    for k in range(1, shape.n_rules + 1):
        remaining = shape.n_rules - k + 1
        last = k == shape.n_rules
        target = "out" if last else f"h{k:0{width}d}"
        network.add_fact(Fact(target, target, OUTPUT if last else INTERMEDIATE))
        if shape.topology == "chain":
            pair = [dangling.pop(0), dangling.pop(0)]
            dangling.insert(0, target)
        else:
            merge = len(dangling) >= 2 and (
                not used or len(dangling) - 1 == remaining or rng.random() < 0.5
            )
            if merge:
                i, j = rng.choice(len(dangling), size=2, replace=False)
                pair = [dangling[i], dangling[j]]
                for fid in pair:
                    dangling.remove(fid)
            else:
                pair = [dangling.pop(int(rng.integers(len(dangling)))),
                        used[int(rng.integers(len(used)))]]
                if rng.random() < 0.5:
                    pair.reverse()
            dangling.append(target)
        used.extend(fid for fid in pair if fid not in used)
        w1 = _random_weight(rng)
        network.add_rule(Rule(f"r{k:0{width}d}", pair[0], pair[1], target, w1, 1.0 - w1))
    return network


def randomize_weights(network: Network, seed) -> Network:
    """Copy of ``network`` with every rule's weights redrawn."""
    rng = np.random.default_rng(seed)
    out = network.copy()
    for rule in out.rules:
        rule.w1 = _random_weight(rng)
        rule.w2 = 1.0 - rule.w1
    return out


def generate_perfect_system(shape: ShapeSpec, seed) -> tuple[Network, list[LabeledCase]]:
    """Random ground-truth network plus cases labeled by evaluating it."""
    rng = np.random.default_rng(seed)
    network = _random_structure(shape, rng)
    network.metadata = {
        "generator": "perfect-system",
        "seed": seed,
        "topology": shape.topology,
    }
    ids = network.input_ids
    x = rng.uniform(0.0, 1.0, size=(shape.n_cases, len(ids)))
    y = evaluate_batch(network, x, ids)
    cases = [
        LabeledCase(dict(zip(ids, map(float, row))), float(t)) for row, t in zip(x, y)
    ]
    return network, cases

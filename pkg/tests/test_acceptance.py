"""Exit criteria, one test per criterion.

The full corpora are not bundled.  Point ``MLES_PHISH_CSV`` at the
phishing ``dataset_full.csv`` and ``MLES_LIAR_DIR`` at a directory holding
the Sentimental LIAR train/test/validation CSVs; the default locations are
under ``datasets/`` in the repository root.
"""

import csv
import os
import statistics
import time

import numpy as np
import pytest

from mles import data
from mles.cli import main
from mles.dataset import LabeledCase, read_cases, to_arrays
from mles.explain import explain
from mles.inference import evaluate, evaluate_batch
from mles.liar import LABEL_VALUES, ingest_liar, map_label, preprocess_liar
from mles.network import dumps, load
from mles.phishing import (
    RAW_FEATURES,
    combine_table,
    fit_stats,
    ingest_phish,
    preprocess_phish,
    split_phish,
    transform_table,
)
from mles.training import (
    ShapeSpec,
    TrainConfig,
    generate_perfect_system,
    randomize_weights,
    train,
    train_case,
    train_epoch,
)

from helpers import LIAR_DIR, PHISH_CSV, make_network

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FULL_PHISH = os.environ.get(
    "MLES_PHISH_CSV", os.path.join(ROOT, "datasets", "phishing", "dataset_full.csv")
)
FULL_LIAR = os.environ.get(
    "MLES_LIAR_DIR", os.path.join(ROOT, "datasets", "sentimental_liar")
)


def report(criterion, ok, detail):
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_structure_invariance():
    start = time.perf_counter()
    net = load(str(data.path(data.LIAR_NETWORK)))
    rng = np.random.default_rng(2024)
    ids = net.input_ids
    cases = [
        LabeledCase(dict(zip(ids, map(float, rng.uniform(size=len(ids))))), float(rng.uniform()))
        for _ in range(1000)
    ]
    trained, history = train(net, cases, TrainConfig(velocity=0.1, epochs=3, shuffle_seed=1))
    stepped = net
    for case in cases[:200]:
        stepped = train_case(stepped, case, TrainConfig())
    before = dumps(net, mask_weights=True)
    elapsed = time.perf_counter() - start
    ok = (
        dumps(trained, mask_weights=True) == before
        and dumps(stepped, mask_weights=True) == before
        and dumps(trained) != dumps(net)
        and elapsed < 5
    )
    report(1, ok, f"masked structure identical after {history.cases_seen} updates, {elapsed:.2f}s")
    assert ok


def test_criterion_02_weight_validity():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    triples = violations = 0
    for k in range(1100):
        n_inputs = int(rng.integers(2, 9))
        shape = ShapeSpec(n_inputs, n_inputs - 1 + int(rng.integers(0, 8)), n_cases=0)
        net, _ = generate_perfect_system(shape, k)
        # push some weights to the boundary so clamping is exercised
        for rule in net.rules:
            if rng.random() < 0.3:
                rule.w1 = float(rng.choice([0.0, 1.0, 1e-12, 1 - 1e-12]))
                rule.w2 = 1.0 - rule.w1
        config = TrainConfig(
            velocity=float(rng.uniform(1e-3, 1.0)),
            distribution=str(rng.choice(["uniform", "flat"])),
        )
        for _ in range(3):
            case = LabeledCase(
                dict(zip(net.input_ids, map(float, rng.uniform(size=n_inputs)))),
                float(rng.choice([0.0, 1.0, rng.uniform()])),
            )
            net = train_case(net, case, config)
            triples += 1
            for rule in net.rules:
                if not (0.0 <= rule.w1 <= 1.0 and 0.0 <= rule.w2 <= 1.0
                        and rule.w1 + rule.w2 == 1.0):
                    violations += 1
        # the compiled epoch loop must keep the same guarantees
        cases = [
            LabeledCase(dict(zip(net.input_ids, map(float, rng.uniform(size=n_inputs)))),
                        float(rng.uniform()))
            for _ in range(5)
        ]
        net, _ = train_epoch(net, cases, config)
        triples += 5
        for rule in net.rules:
            if not (0.0 <= rule.w1 <= 1.0 and 0.0 <= rule.w2 <= 1.0 and rule.w1 + rule.w2 == 1.0):
                violations += 1
    elapsed = time.perf_counter() - start
    ok = triples >= 1000 and violations == 0 and elapsed < 10
    report(2, ok, f"{triples} updates, {violations} violations, {elapsed:.2f}s")
    assert ok


def test_criterion_03_bounds_and_linearity():
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    worst_rec = worst_norm = 0.0
    bound_failures = 0
    for k in range(600):
        n_inputs = int(rng.integers(2, 12))
        shape = ShapeSpec(n_inputs, n_inputs - 1 + int(rng.integers(0, 15)), n_cases=0)
        net, _ = generate_perfect_system(shape, 10_000 + k)
        assignment = dict(zip(net.input_ids, map(float, rng.uniform(size=n_inputs))))
        if rng.random() < 0.2:
            assignment = {f: float(rng.choice([0.0, 1.0])) for f in assignment}
        out = evaluate(net, assignment).output_value
        trace = explain(net, assignment)
        reach = [assignment[f] for f, c in trace.influence.items() if c > 0]
        if not min(reach) <= out <= max(reach):
            bound_failures += 1
        worst_rec = max(worst_rec, abs(trace.reconstruction() - out))
        worst_norm = max(worst_norm, abs(sum(trace.influence.values()) - 1.0))
    elapsed = time.perf_counter() - start
    ok = bound_failures == 0 and worst_rec <= 1e-9 and worst_norm <= 1e-9 and elapsed < 10
    report(3, ok, f"600 networks, bound failures {bound_failures}, max reconstruction error "
                  f"{worst_rec:.2e}, max |sum c - 1| {worst_norm:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_04_synthetic_convergence():
    start = time.perf_counter()
    initial, final = [], []
    for seed in range(20):
        truth, cases = generate_perfect_system(ShapeSpec(10, 9, n_cases=1200), seed)
        begin = randomize_weights(truth, [seed, 99])
        holdout = cases[1000:]
        x, y = to_arrays(holdout, truth.input_ids)
        initial.append(float(np.mean(np.abs(evaluate_batch(begin, x, truth.input_ids) - y))))
        trained, _ = train(begin, cases[:1000],
                           TrainConfig(velocity=0.1, epochs=500, distribution="uniform",
                                       shuffle_seed=seed))
        final.append(float(np.mean(np.abs(evaluate_batch(trained, x, truth.input_ids) - y))))
    elapsed = time.perf_counter() - start
    decreased = sum(f < i for i, f in zip(initial, final))
    ratio = statistics.median(final) / statistics.median(initial)
    ok = decreased >= 18 and statistics.median(final) <= 0.5 * statistics.median(initial) and elapsed < 60
    report(4, ok, f"held-out MAE decreased on {decreased}/20 seeds, median final/initial "
                  f"{ratio:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_05_label_mapping():
    expected = {"pants-fire": 0.0, "FALSE": 0.1, "half-true": 0.5, "barely-true": 0.6,
                "mostly-true": 0.75, "TRUE": 1.0}
    got = {label: map_label(label) for label in expected}
    ok = got == expected and len(LABEL_VALUES) == 6
    report(5, ok, f"{got}")
    assert ok


def test_criterion_06_split_constants():
    start = time.perf_counter()
    have_phish = os.path.exists(FULL_PHISH)
    have_liar = os.path.isdir(FULL_LIAR)
    if not (have_phish and have_liar):
        report(6, False, f"full corpora not found (phishing: {FULL_PHISH}, "
                         f"Sentimental LIAR: {FULL_LIAR})")
        pytest.fail("full corpora unavailable; set MLES_PHISH_CSV and MLES_LIAR_DIR")
    with open(FULL_PHISH, newline="") as fh:
        header = next(csv.reader(fh))
    phish = ingest_phish(FULL_PHISH)
    liar = ingest_liar(FULL_LIAR)
    elapsed = time.perf_counter() - start
    ok = (
        len(phish) == 88_647
        and len(header) - 1 == 111
        and phish.features.shape[1] == len(RAW_FEATURES) == 111
        and liar.sizes() == (10_236, 1_267, 1_283)
        and elapsed < 30
    )
    report(6, ok, f"phishing {len(phish)} rows x {len(header) - 1} features; "
                  f"LIAR {liar.sizes()}, {elapsed:.2f}s")
    assert ok


def _range_check(phish_csv, liar_dir, tmp_path):
    bad = 0
    total = 0
    preprocess_phish(phish_csv, tmp_path / "phish", seed=0)
    preprocess_liar(liar_dir, tmp_path / "liar")
    for kind in ("phish", "liar"):
        for name in ("train", "test", "validation"):
            for case in read_cases(tmp_path / kind / f"{name}.jsonl"):
                total += len(case.inputs)
                bad += sum(not 0.0 <= v <= 1.0 for v in case.inputs.values())
    train_part, _, _ = split_phish(combine_table(ingest_phish(phish_csv)), seed=0)
    stats = fit_stats(train_part)
    scaled = transform_table(train_part, stats)
    extremes_ok = all(
        scaled[f].min() == 0.0 and scaled[f].max() == 1.0
        for f in stats.features if stats.minimum[f] != stats.maximum[f]
    )
    return total, bad, extremes_ok


def test_criterion_07_preprocessing_range(tmp_path):
    start = time.perf_counter()
    total, bad, extremes_ok = _range_check(PHISH_CSV, LIAR_DIR, tmp_path / "fixtures")
    elapsed = time.perf_counter() - start
    ok = bad == 0 and extremes_ok and elapsed < 2
    detail = f"fixtures: {total} values, {bad} outside [0,1], train extremes 0/1: {extremes_ok}, {elapsed:.2f}s"
    if os.path.exists(FULL_PHISH) and os.path.isdir(FULL_LIAR):
        start = time.perf_counter()
        total, bad, extremes_ok = _range_check(FULL_PHISH, FULL_LIAR, tmp_path / "full")
        elapsed = time.perf_counter() - start
        ok = ok and bad == 0 and extremes_ok and elapsed < 60
        detail += f"; full data: {total} values, {bad} outside, {elapsed:.2f}s"
    report(7, ok, detail)
    assert ok


def test_criterion_08_topology_contrast():
    liar = load(str(data.path(data.LIAR_NETWORK)))
    phish = load(str(data.path(data.PHISH_NETWORK)))
    liar_fan = liar.premise_fan_out()
    phish_fan = phish.premise_fan_out()
    ok = set(liar_fan.values()) == {1} and max(phish_fan.values()) >= 2
    report(8, ok, f"fake-news input fan-out {sorted(set(liar_fan.values()))}, "
                  f"phishing max fan-out {max(phish_fan.values())}")
    assert ok


def _pipeline(out):
    """Every CLI stage on the fixtures; returns the produced files."""
    liar_net = str(data.path(data.LIAR_NETWORK))
    phish_net = str(data.path(data.PHISH_NETWORK))
    steps = [
        ["preprocess", "phishing", "--data", PHISH_CSV, "--out", f"{out}/phish", "--seed", "5"],
        ["preprocess", "fake-news", "--data", LIAR_DIR, "--out", f"{out}/liar"],
        ["train", "--network", phish_net, "--data", f"{out}/phish/train.jsonl",
         "--out", f"{out}/phish_run", "--epochs", "20", "--seed", "3"],
        ["train", "--network", liar_net, "--data", f"{out}/liar/train.jsonl",
         "--out", f"{out}/liar_run", "--epochs", "20", "--seed", "3", "--distribution", "flat"],
        ["eval", "--network", f"{out}/phish_run/network.json", "--data",
         f"{out}/phish/test.jsonl", "--format", "json", "--out", f"{out}/phish_run"],
        ["eval", "--network", f"{out}/liar_run/network.json", "--data",
         f"{out}/liar/test.jsonl", "--format", "json", "--out", f"{out}/liar_run"],
        ["predict", "--network", f"{out}/liar_run/network.json", "--data",
         f"{out}/liar/validation.jsonl", "--out", f"{out}/predictions.jsonl"],
        ["explain", "--network", f"{out}/phish_run/network.json", "--data",
         f"{out}/phish/test.jsonl", "--case-index", "2", "--format", "json",
         "--out", f"{out}/trace.json"],
        ["compare", f"{out}/liar_run", f"{out}/phish_run", "--out", f"{out}/comparison.md"],
        ["gen-synthetic", "--seed", "42", "--out", f"{out}/synthetic"],
    ]
    for argv in steps:
        assert main(argv) == 0, argv
    files = {}
    for root, _, names in os.walk(out):
        for name in names:
            path = os.path.join(root, name)
            with open(path, "rb") as fh:
                files[os.path.relpath(path, out)] = fh.read()
    return files


def test_criterion_09_determinism(tmp_path):
    start = time.perf_counter()
    first = _pipeline(str(tmp_path / "one"))
    second = _pipeline(str(tmp_path / "two"))
    elapsed = time.perf_counter() - start
    differing = sorted(k for k in first if first[k] != second.get(k))
    ok = set(first) == set(second) and not differing and len(first) >= 15 and elapsed < 120
    report(9, ok, f"{len(first)} files byte-identical across runs "
                  f"(differing: {differing}), {elapsed:.2f}s")
    assert ok


def test_criterion_10_fixpoint_and_equal_premise_skip():
    net = make_network(["A", "B"], [("r", "A", "B", "O", 0.3, 0.7)])
    inputs = {"A": 0.25, "B": 0.9}
    exact = LabeledCase(inputs, evaluate(net, inputs).output_value)
    fixpoint = train_case(net, exact, TrainConfig(velocity=1.0)) == net
    equal = all(
        train_case(net, LabeledCase({"A": 0.7, "B": 0.7}, t), TrainConfig(velocity=v)) == net
        for t in (0.0, 0.5, 1.0) for v in (0.1, 1.0)
    )
    ok = fixpoint and equal
    report(10, ok, f"zero-error fixpoint {fixpoint}, equal-premise skip {equal}")
    assert ok

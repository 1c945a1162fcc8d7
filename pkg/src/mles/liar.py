"""Sentimental LIAR corpus: ingestion, encoding and the linear truth network.

The corpus ships as three CSV splits.  Each statement carries a six-level
truth label, speaker metadata, the speaker's history of past ratings, a
sentiment score in [-1, 1] and five emotion scores in [0, 1].

Every network input lands in [0, 1]:

* categorical fields (subject, context, job, state, party) become the mean
  truth score of their category on the training split, with categories
  seen fewer than 20 times pooled as ``"unknown"``;
* the speaker history counts become a credibility score, the count-weighted
  mean of the truth scores of past ratings;
* sentiment is mapped affinely from [-1, 1]; emotions are clipped.
"""

from __future__ import annotations

import csv
import glob
import json
import logging
import math
import os
import re
from dataclasses import dataclass, field
from typing import Mapping

from .dataset import LabeledCase, write_cases
from .errors import EmptySplit, HeaderMismatch, ParseError, UnknownFeature, UnknownLabel
from .network import INPUT, OUTPUT, Fact, Network
from .topology import cascade

log = logging.getLogger(__name__)

LABEL_VALUES = {
    "pants-fire": 0.0,
    "false": 0.1,
    "half-true": 0.5,
    "barely-true": 0.6,
    "mostly-true": 0.75,
    "true": 1.0,
}

MIN_CATEGORY_COUNT = 20
UNKNOWN = "unknown"

LABEL_COLUMN = "label"
# network fact id -> source column
CATEGORICAL = {
    "subject": "subject",
    "context": "context",
    "job": "speaker_job",
    "state": "state_info",
    "party": "party_affiliation",
}
MULTI_VALUED = {"subject"}  # comma-separated lists of topics
HISTORY = {
    "barely_true_counts": "barely-true",
    "false_counts": "false",
    "half_true_counts": "half-true",
    "mostly_true_counts": "mostly-true",
    "pants_on_fire_counts": "pants-fire",
}
SENTIMENT = ("sentiment_score", "sentiment")
EMOTIONS = {
    "anger": ("anger",),
    "fear": ("fear",),
    "joy": ("joy",),
    "disgust": ("disgust",),
    "sadness": ("sad", "sadness"),
}
BINARY = ("binary_label", "label_binary", "binary", "truthfulness")

GROUPS = {
    "text_background": ("context", "sentiment", "subject"),
    "speaker_background": ("credibility", "job", "party", "state"),
    "emotion_score": ("anger", "disgust", "fear", "joy", "sadness"),
}
OUTPUT_FACT = "TRUTH"


def map_label(label: str) -> float:
    try:
        return LABEL_VALUES[label.strip().lower()]
    except (KeyError, AttributeError):
        raise UnknownLabel(f"unknown truth label {label!r}") from None


# -- ingestion ----------------------------------------------------------


@dataclass
class LiarSplits:
    train: list[dict]
    test: list[dict]
    validation: list[dict]
    header: list[str]
    columns: dict[str, str] = field(default_factory=dict)  # role -> column

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.test), len(self.validation)


def _resolve_columns(header, where) -> dict[str, str]:
    present = set(header)
    roles = {}
    required = [LABEL_COLUMN, *CATEGORICAL.values(), *HISTORY]
    missing = [c for c in required if c not in present]
    for role, options in [("sentiment", SENTIMENT), *EMOTIONS.items()]:
        found = next((c for c in options if c in present), None)
        if found is None:
            missing.append("/".join(options))
        roles[role] = found
    if missing:
        raise HeaderMismatch(f"{where}: missing columns {missing}")
    roles["binary"] = next((c for c in BINARY if c in present), None)
    return roles


def _read_split(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", os.fspath(path)) from None
        columns = _resolve_columns(header, os.fspath(path))
        records = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                log.warning(
                    "%s line %d rejected: %d fields, expected %d",
                    os.fspath(path), lineno, len(row), len(header),
                )
                continue
            records.append(dict(zip(header, row)))
    return header, columns, records


def _find_splits(directory):
    patterns = {
        "train": ("train*.csv",),
        "test": ("test*.csv",),
        "validation": ("val*.csv", "valid*.csv", "dev*.csv"),
    }
    paths = []
    for split, globs in patterns.items():
        hits = sorted({p for g in globs for p in glob.glob(os.path.join(directory, g))})
        if len(hits) != 1:
            raise ParseError(f"expected one {split} CSV, found {hits}", os.fspath(directory))
        paths.append(hits[0])
    return paths


def ingest_liar(source) -> LiarSplits:
    """Read the three splits from a directory or a (train, test, validation) tuple."""
    if isinstance(source, (str, os.PathLike)):
        paths = _find_splits(source)
    else:
        paths = list(source)
        if len(paths) != 3:
            raise ValueError("expected train, test and validation paths")
    parts = [_read_split(p) for p in paths]
    header, columns = parts[0][0], parts[0][1]
    for (h, _, _), p in zip(parts[1:], paths[1:]):
        if h != header:
            raise HeaderMismatch(f"{os.fspath(p)}: header differs from the training split")
    splits = LiarSplits(parts[0][2], parts[1][2], parts[2][2], header, columns)
    log.info("splits: train %d, test %d, validation %d", *splits.sizes())
    return splits


# -- encoding -----------------------------------------------------------


def normalize_category(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().lower())


def phrases(fact_id: str, raw: str) -> list[str]:
    """Distinct normalized categories in one field value (empty if blank)."""
    parts = raw.split(",") if fact_id in MULTI_VALUED else [raw]
    out = []
    for p in parts:
        p = normalize_category(p)
        if p and p not in out:
            out.append(p)
    return out


def _number(raw, where) -> float | None:
    if raw is None or not str(raw).strip():
        return None
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"not a number: {raw!r}", where) from None


@dataclass
class FieldEncoding:
    counts: dict[str, int]
    values: dict[str, float]
    fallback: float

    def encode(self, cats: list[str]) -> float:
        if not cats:
            return self.fallback
        pooled = {c if self.retained(c) else UNKNOWN for c in cats}
        scores = [self.values.get(c, self.fallback) for c in sorted(pooled)]
        return sum(scores) / len(scores)

    def retained(self, category: str) -> bool:
        return self.counts.get(category, 0) >= MIN_CATEGORY_COUNT


@dataclass
class CategoryEncoder:
    fields: dict[str, FieldEncoding]
    credibility_fallback: float
    numeric_means: dict[str, float]
    columns: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "fields": {
                k: {"counts": f.counts, "values": f.values, "fallback": f.fallback}
                for k, f in self.fields.items()
            },
            "credibility_fallback": self.credibility_fallback,
            "numeric_means": self.numeric_means,
            "columns": self.columns,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc) -> CategoryEncoder:
        return cls(
            {
                k: FieldEncoding(dict(v["counts"]), dict(v["values"]), float(v["fallback"]))
                for k, v in doc["fields"].items()
            },
            float(doc["credibility_fallback"]),
            dict(doc["numeric_means"]),
            dict(doc["columns"]),
        )


def credibility(record: Mapping[str, str]) -> float | None:
    """Count-weighted mean truth score of the speaker's past ratings."""
    total = weighted = 0.0
    for column, label in HISTORY.items():
        count = _number(record.get(column), column) or 0.0
        total += count
        weighted += count * LABEL_VALUES[label]
    if total <= 0:
        return None
    return min(max(weighted / total, 0.0), 1.0)


def fit_encoder(train: list[Mapping[str, str]], columns=None) -> CategoryEncoder:
    if not train:
        raise EmptySplit("cannot fit the encoder on an empty training split")
    if columns is None:
        columns = _resolve_columns(list(train[0]), "training records")
    labels = [map_label(r[LABEL_COLUMN]) for r in train]
    label_mean = sum(labels) / len(labels)

    fields = {}
    for fid, column in CATEGORICAL.items():
        per_record = [phrases(fid, r.get(column, "")) for r in train]
        counts: dict[str, int] = {}
        for cats in per_record:
            for c in cats:
                counts[c] = counts.get(c, 0) + 1
        sums: dict[str, float] = {}
        hits: dict[str, int] = {}
        present = []
        for cats, y in zip(per_record, labels):
            if not cats:
                continue
            present.append(y)
            pooled = {c if counts[c] >= MIN_CATEGORY_COUNT else UNKNOWN for c in cats}
            for c in pooled:
                sums[c] = sums.get(c, 0.0) + y
                hits[c] = hits.get(c, 0) + 1
        values = {c: sums[c] / hits[c] for c in sorted(sums)}
        fallback = sum(present) / len(present) if present else label_mean
        fields[fid] = FieldEncoding(dict(sorted(counts.items())), values, fallback)

    creds = [c for c in map(credibility, train) if c is not None]
    numeric_means = {}
    for role in ["sentiment", *EMOTIONS]:
        column = columns[role]
        vals = [v for v in (_number(r.get(column), column) for r in train) if v is not None]
        numeric_means[role] = sum(vals) / len(vals) if vals else 0.0
    return CategoryEncoder(
        fields,
        sum(creds) / len(creds) if creds else label_mean,
        numeric_means,
        {k: v for k, v in columns.items() if v is not None},
    )


def _clip(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def encode_record(record: Mapping[str, str], encoder: CategoryEncoder):
    """Return ``(assignment, target, binary)`` for one statement.

    ``binary`` is None when the corpus has no Boolean truthfulness column.
    """
    needed = [LABEL_COLUMN, *CATEGORICAL.values(), *HISTORY] + [
        encoder.columns[r] for r in ["sentiment", *EMOTIONS]
    ]
    absent = [c for c in needed if c not in record]
    if absent:
        raise UnknownFeature(f"record lacks fields {absent}")
    inputs = {}
    for fid, column in CATEGORICAL.items():
        inputs[fid] = _clip(encoder.fields[fid].encode(phrases(fid, record[column])))
    cred = credibility(record)
    inputs["credibility"] = encoder.credibility_fallback if cred is None else cred
    sentiment = _number(record[encoder.columns["sentiment"]], "sentiment")
    if sentiment is None:
        sentiment = encoder.numeric_means["sentiment"]
    inputs["sentiment"] = _clip((sentiment + 1.0) / 2.0)
    for fid in EMOTIONS:
        v = _number(record[encoder.columns[fid]], fid)
        inputs[fid] = _clip(encoder.numeric_means[fid] if v is None else v)
    binary = None
    if "binary" in encoder.columns:
        binary = _parse_bool(record[encoder.columns["binary"]])
    return inputs, map_label(record[LABEL_COLUMN]), binary


def _parse_bool(raw: str) -> int | None:
    text = str(raw).strip().lower()
    if text in ("1", "true", "1.0", "yes"):
        return 1
    if text in ("0", "false", "0.0", "no"):
        return 0
    if text:
        raise ParseError(f"not a Boolean: {raw!r}", "binary")
    return None


def to_cases(records, encoder: CategoryEncoder) -> list[LabeledCase]:
    cases = []
    for r in records:
        inputs, target, binary = encode_record(r, encoder)
        cases.append(LabeledCase(inputs, target, binary))
    return cases


def preprocess_liar(source, out_dir):
    """Full pipeline; writes ``{train,test,validation}.jsonl`` and ``encoder.json``."""
    splits = ingest_liar(source)
    encoder = fit_encoder(splits.train, splits.columns)
    os.makedirs(out_dir, exist_ok=True)
    sizes = {}
    for name, part in (("train", splits.train), ("test", splits.test),
                       ("validation", splits.validation)):
        sizes[name] = write_cases(os.path.join(out_dir, f"{name}.jsonl"), to_cases(part, encoder))
    with open(os.path.join(out_dir, "encoder.json"), "w", encoding="utf-8") as fh:
        fh.write(encoder.to_json())
    return sizes


# -- network ------------------------------------------------------------


def build_liar_network() -> Network:
    """Linear design: every input feeds exactly one rule."""
    network = Network(
        metadata={
            "name": "fake-news",
            "design": "linear",
            "positive_class": "true statement",
            "groups": {k: list(v) for k, v in GROUPS.items()},
        }
    )
    for group in GROUPS.values():
        for fid in group:
            network.add_fact(Fact(fid, fid, INPUT))
    leaves = {}
    for group, members in GROUPS.items():
        cascade(network, members, Fact(group, group.replace("_", " "), "intermediate"))
        leaves[group] = len(members)
    cascade(
        network,
        ["text_background", "speaker_background"],
        Fact("macroscopic", "macroscopic score", "intermediate"),
        leaves=leaves,
    )
    leaves["macroscopic"] = leaves["text_background"] + leaves["speaker_background"]
    cascade(
        network,
        ["macroscopic", "emotion_score"],
        Fact(OUTPUT_FACT, "statement truthfulness", OUTPUT),
        leaves=leaves,
    )
    return network

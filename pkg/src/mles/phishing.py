"""Phishing-URL dataset: ingestion, preprocessing and the interconnected network.

The source table has 111 numeric features and a 0/1 ``phishing`` label.
Features are grouped by URL section (whole URL, domain, directory, file,
parameters) plus general site properties.  Absent URL components are
encoded as ``-1`` in the source and treated as missing here.

Preprocessing:

1. per section, the 17 per-symbol counts are summed into one
   ``qty_symbols_<section>`` feature (missing if any count is missing);
2. a random train/test/validation split;
3. training-split min/max/mean per feature;
4. missing values imputed with the training mean, then min-max scaled and
   clipped to ``[0, 1]``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import pandas as pd

from .dataset import LabeledCase, write_cases
from .errors import BadRatios, EmptySplit, HeaderMismatch, ParseError, UnknownFeature
from .network import OUTPUT, Fact, Network, Rule, INPUT, INTERMEDIATE
from .topology import cascade, rule_id

log = logging.getLogger(__name__)

MISSING = -1.0
LABEL = "phishing"

SYMBOLS = (
    "dot", "hyphen", "underline", "slash", "questionmark", "equal", "at", "and",
    "exclamation", "space", "tilde", "comma", "plus", "asterisk", "hashtag",
    "dollar", "percent",
)
SECTIONS = ("url", "domain", "directory", "file", "params")

_SECTION_EXTRAS = {
    "url": ("qty_tld_url", "length_url"),
    "domain": ("qty_vowels_domain", "domain_length", "domain_in_ip", "server_client_domain"),
    "directory": ("directory_length",),
    "file": ("file_length",),
    "params": ("params_length", "tld_present_params", "qty_params"),
}
GENERAL_FEATURES = (
    "email_in_url", "time_response", "domain_spf", "asn_ip", "time_domain_activation",
    "time_domain_expiration", "qty_ip_resolved", "qty_nameservers", "qty_mx_servers",
    "ttl_hostname", "tls_ssl_certificate", "qty_redirects", "url_google_index",
    "domain_google_index", "url_shortened",
)


def symbol_columns(section: str) -> list[str]:
    return [f"qty_{s}_{section}" for s in SYMBOLS]


RAW_FEATURES: tuple[str, ...] = tuple(
    [c for sec in SECTIONS for c in symbol_columns(sec) + list(_SECTION_EXTRAS[sec])]
    + list(GENERAL_FEATURES)
)

COMBINED_FEATURES: dict[str, tuple[str, ...]] = {}
for _sec in SECTIONS:
    COMBINED_FEATURES[f"qty_symbols_{_sec}"] = tuple(symbol_columns(_sec))
    for _c in _SECTION_EXTRAS[_sec]:
        COMBINED_FEATURES[_c] = (_c,)
for _c in GENERAL_FEATURES:
    COMBINED_FEATURES[_c] = (_c,)
del _sec, _c

# Network regions; directory and file share the "path" region.
REGIONS: dict[str, tuple[str, ...]] = {
    "general": GENERAL_FEATURES,
    "url": ("qty_symbols_url",) + _SECTION_EXTRAS["url"],
    "domain": ("qty_symbols_domain",) + _SECTION_EXTRAS["domain"],
    "path": ("qty_symbols_directory", "directory_length", "qty_symbols_file", "file_length"),
    "params": ("qty_symbols_params",) + _SECTION_EXTRAS["params"],
}
OUTPUT_FACT = "phishing_score"


def feature_map() -> dict:
    """Documentation of how raw columns become network inputs."""
    return {
        "missing_sentinel": MISSING,
        "label": LABEL,
        "raw_features": list(RAW_FEATURES),
        "combined_features": {k: list(v) for k, v in COMBINED_FEATURES.items()},
        "regions": {k: sorted(v) for k, v in REGIONS.items()},
    }


# -- ingestion ----------------------------------------------------------


@dataclass
class PhishData:
    """Rows of the phishing table.

    ``features`` holds one column per feature (raw or combined), with NaN
    marking missing values once :func:`combine_symbols` has run.
    """

    features: pd.DataFrame
    labels: np.ndarray
    rejected: list[tuple[int, str]] = field(default_factory=list)
    n_source_features: int = 0

    def __len__(self):
        return len(self.labels)

    def take(self, index) -> PhishData:
        index = np.asarray(index, dtype=np.int64)
        return PhishData(
            self.features.iloc[index].reset_index(drop=True),
            self.labels[index],
            n_source_features=self.n_source_features,
        )

    def records(self):
        """Iterate ``(feature mapping, label)`` pairs."""
        for row, label in zip(self.features.to_dict("records"), self.labels):
            yield row, int(label)


def ingest_phish(source) -> PhishData:
    """Read the published CSV; malformed rows are skipped and reported."""
    with open(source, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", os.fspath(source)) from None
        expected = set(RAW_FEATURES) | {LABEL}
        if set(header) != expected or len(header) != len(expected):
            missing = sorted(expected - set(header))
            extra = sorted(set(header) - expected)
            raise HeaderMismatch(
                f"{os.fspath(source)}: header has {len(header)} columns; "
                f"missing {missing[:10]}, unexpected {extra[:10]}"
            )
        label_col = header.index(LABEL)
        order = [header.index(c) for c in RAW_FEATURES]
        rows, labels, rejected = [], [], []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                rejected.append((lineno, f"{len(row)} fields, expected {len(header)}"))
                continue
            try:
                values = [float(row[j]) for j in order]
                label = float(row[label_col])
            except ValueError as exc:
                rejected.append((lineno, f"non-numeric field: {exc}"))
                continue
            if label not in (0.0, 1.0) or not all(map(math.isfinite, values)):
                rejected.append((lineno, "label must be 0 or 1 and features finite"))
                continue
            rows.append(values)
            labels.append(int(label))
    for lineno, reason in rejected:
        log.warning("%s line %d rejected: %s", os.fspath(source), lineno, reason)
    log.info("%s: %d records, %d rejected", os.fspath(source), len(rows), len(rejected))
    table = pd.DataFrame(
        np.array(rows, dtype=float).reshape(len(rows), len(RAW_FEATURES)),
        columns=list(RAW_FEATURES),
    )
    return PhishData(table, np.array(labels, dtype=np.int64), rejected, len(RAW_FEATURES))


# -- preprocessing ------------------------------------------------------


def _missing(v) -> bool:
    return v is None or v == MISSING or (isinstance(v, float) and math.isnan(v))


def combine_symbols(record: Mapping[str, float]) -> dict[str, float]:
    """Collapse per-symbol counts into one count per URL section.

    Missing components come out as NaN.
    """
    out = {}
    for name, columns in COMBINED_FEATURES.items():
        values = [record[c] for c in columns]
        out[name] = math.nan if any(_missing(v) for v in values) else float(sum(values))
    return out


def combine_table(data: PhishData) -> PhishData:
    """Vectorized :func:`combine_symbols` over every row."""
    raw = data.features.replace(MISSING, np.nan)
    combined = {}
    for name, columns in COMBINED_FEATURES.items():
        block = raw[list(columns)]
        if len(columns) == 1:
            combined[name] = block.iloc[:, 0]
        else:
            # min_count=len keeps NaN whenever any component is missing
            combined[name] = block.sum(axis=1, min_count=len(columns))
    return PhishData(
        pd.DataFrame(combined), data.labels.copy(), list(data.rejected), data.n_source_features
    )


@dataclass
class FeatureStats:
    minimum: dict[str, float]
    maximum: dict[str, float]
    mean: dict[str, float]
    no_data: list[str] = field(default_factory=list)

    @property
    def features(self) -> list[str]:
        return list(self.minimum)

    def to_dict(self) -> dict:
        return {
            f: {"min": self.minimum[f], "max": self.maximum[f], "mean": self.mean[f]}
            for f in self.minimum
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc) -> FeatureStats:
        stats = cls(
            {f: float(v["min"]) for f, v in doc.items()},
            {f: float(v["max"]) for f, v in doc.items()},
            {f: float(v["mean"]) for f, v in doc.items()},
        )
        return stats


def fit_stats(train) -> FeatureStats:
    """Min, max and mean of the present values of each feature.

    ``train`` is a :class:`PhishData` or a DataFrame; NaN marks missing.
    """
    table = train.features if isinstance(train, PhishData) else train
    if len(table) == 0:
        raise EmptySplit("cannot fit statistics on an empty split")
    lo, hi, mean, empty = {}, {}, {}, []
    for name in table.columns:
        present = table[name].dropna().to_numpy(dtype=float)
        if present.size == 0:
            empty.append(name)
            lo[name] = hi[name] = mean[name] = 0.0
            continue
        lo[name] = float(present.min())
        hi[name] = float(present.max())
        # mean of floats can land an ulp outside [min, max]
        mean[name] = min(max(float(present.mean()), lo[name]), hi[name])
    if empty:
        log.warning("features with no present training values: %s", empty)
    return FeatureStats(lo, hi, mean, empty)


def scale(value: float, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.5
    return min(max((value - lo) / (hi - lo), 0.0), 1.0)


def transform(record: Mapping[str, float], stats: FeatureStats) -> dict[str, float]:
    """Impute missing values with the training mean and scale into [0, 1]."""
    unknown = sorted(set(record) - set(stats.minimum))
    if unknown:
        raise UnknownFeature(f"features without statistics: {unknown[:10]}")
    absent = sorted(set(stats.minimum) - set(record))
    if absent:
        raise UnknownFeature(f"record lacks features {absent[:10]}")
    out = {}
    for name in stats.minimum:
        v = record[name]
        if _missing(v):
            v = stats.mean[name]
        out[name] = scale(float(v), stats.minimum[name], stats.maximum[name])
    return out


def transform_table(data: PhishData, stats: FeatureStats) -> pd.DataFrame:
    """Vectorized :func:`transform`; same arithmetic per element."""
    table = data.features
    if set(table.columns) != set(stats.minimum):
        raise UnknownFeature(
            f"table columns differ from fitted features: "
            f"{sorted(set(table.columns) ^ set(stats.minimum))[:10]}"
        )
    out = {}
    for name in stats.minimum:
        col = table[name].fillna(stats.mean[name]).to_numpy(dtype=float)
        lo, hi = stats.minimum[name], stats.maximum[name]
        if hi == lo:
            out[name] = np.full(len(col), 0.5)
        else:
            out[name] = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
    return pd.DataFrame(out)


def split_sizes(n: int, ratios) -> tuple[int, int, int]:
    """Test and validation sizes round down; the remainder goes to training."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or min(ratios) <= 0 or abs(sum(ratios) - 1.0) > 1e-9:
        raise BadRatios(f"ratios must be three positive numbers summing to 1, got {ratios}")
    n_test = math.floor(n * ratios[1] + 1e-9)
    n_val = math.floor(n * ratios[2] + 1e-9)
    return n - n_test - n_val, n_test, n_val


def split_phish(data: PhishData, ratios=(0.70, 0.15, 0.15), seed: int = 0):
    """Seeded shuffle into (train, test, validation)."""
    n_train, n_test, _ = split_sizes(len(data), ratios)
    perm = np.random.default_rng(seed).permutation(len(data))
    return (
        data.take(perm[:n_train]),
        data.take(perm[n_train:n_train + n_test]),
        data.take(perm[n_train + n_test:]),
    )


def to_cases(data: PhishData, stats: FeatureStats) -> list[LabeledCase]:
    scaled = transform_table(data, stats)
    ids = sorted(scaled.columns)
    values = scaled[ids].to_numpy()
    return [
        LabeledCase(dict(zip(ids, map(float, row))), float(label))
        for row, label in zip(values, data.labels)
    ]


def preprocess_phish(source, out_dir, *, seed: int = 0, ratios=(0.70, 0.15, 0.15)):
    """Full pipeline; writes ``{train,test,validation}.jsonl`` and ``stats.json``.

    Returns the split sizes and the ingested row count.
    """
    data = combine_table(ingest_phish(source))
    train, test, val = split_phish(data, ratios, seed)
    stats = fit_stats(train)
    os.makedirs(out_dir, exist_ok=True)
    sizes = {}
    for name, part in (("train", train), ("test", test), ("validation", val)):
        sizes[name] = write_cases(os.path.join(out_dir, f"{name}.jsonl"), to_cases(part, stats))
    with open(os.path.join(out_dir, "stats.json"), "w", encoding="utf-8") as fh:
        fh.write(stats.to_json())
    return {"records": len(data), "rejected": len(data.rejected), **sizes}


# -- network ------------------------------------------------------------


def _region_pairs(features):
    """Neighbouring pairs around a ring of the sorted features.

    With three or more features every input feeds exactly two rules.
    """
    fs = sorted(features)
    if len(fs) == 2:
        return [(fs[0], fs[1])]
    return [(fs[i], fs[(i + 1) % len(fs)]) for i in range(len(fs))]


def build_phish_network() -> Network:
    network = Network(
        metadata={
            "name": "phishing",
            "design": "interconnected",
            "positive_class": "phishing",
            "regions": {k: sorted(v) for k, v in REGIONS.items()},
        }
    )
    for name in sorted(COMBINED_FEATURES):
        network.add_fact(Fact(name, name.replace("_", " "), INPUT))
    region_facts = []
    for region, features in REGIONS.items():
        encapsulating = Fact(f"{region}_score", f"{region} region score", INTERMEDIATE)
        pairs = _region_pairs(features)
        pair_ids = []
        for a, b in pairs:
            if len(pairs) == 1:
                fact = encapsulating
            else:
                fact = Fact(f"{region}__{a}__{b}", f"{a} with {b}", INTERMEDIATE)
            network.add_fact(fact)
            network.add_rule(Rule(rule_id(fact.id), a, b, fact.id, 0.5, 0.5))
            pair_ids.append(fact.id)
        if len(pair_ids) > 1:
            cascade(network, pair_ids, encapsulating)
        region_facts.append(encapsulating.id)
    cascade(network, region_facts, Fact(OUTPUT_FACT, "phishing score", OUTPUT))
    return network

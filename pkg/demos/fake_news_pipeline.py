"""
Fake-news truthfulness from statement metadata
==============================================

Each statement's categorical fields are replaced by the mean truth label
seen for that category in training.  Speaker history becomes a credibility
score, and sentiment and emotion scores are used as given.  The network
groups the inputs into text, speaker and emotion scores and merges them
into a single truth value.

The bundled fixture corpus is used unless a directory holding the
Sentimental LIAR train/test/validation CSVs is passed as the first argument.
"""

# %%
import json
import sys
import tempfile
from pathlib import Path

from mles import TrainConfig, read_cases, score_split, train
from mles.liar import CategoryEncoder, build_liar_network, map_label, preprocess_liar

source = sys.argv[1] if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent / "tests" / "data" / "liar"
)
out = Path(tempfile.mkdtemp()) / "liar"
print(preprocess_liar(source, out))
print({label: map_label(label) for label in ("pants-fire", "false", "half-true", "true")})

# %%
encoder = CategoryEncoder.from_dict(json.loads((out / "encoder.json").read_text()))
party = encoder.fields["party"]
print("party encodings:", party.values, "fallback", round(party.fallback, 3))

# %%
net = build_liar_network()
train_cases = read_cases(out / "train.jsonl")
test_cases = read_cases(out / "test.jsonl")
trained, history = train(net, train_cases, TrainConfig(velocity=0.1, epochs=50, shuffle_seed=1))
print("epoch MAE first/last:", history.epoch_mae[0], history.epoch_mae[-1])
print(score_split(trained, test_cases).to_text())

# %%
# Learned weight for each group merge.
for rule in trained.rules:
    print(f"{rule.target:<22} {rule.premise1:>20} {rule.w1:.3f} | {rule.premise2:<20} {rule.w2:.3f}")

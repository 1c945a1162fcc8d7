"""
Phishing URL scoring from raw features
======================================

Raw URL features are collapsed per URL section, scaled into [0, 1] with
statistics from the training split, and fed to a network that scores each
URL region before merging the regions into one phishing score.

This runs on the small sample bundled with the tests.  Pass the path of the
full ``dataset_full.csv`` as the first argument to use the real corpus.
"""

# %%
import sys
import tempfile
from pathlib import Path

from mles import TrainConfig, explain, rank_influences, read_cases, score_split, train
from mles.phishing import build_phish_network, preprocess_phish

source = sys.argv[1] if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent / "tests" / "data" / "phishing_sample.csv"
)
out = Path(tempfile.mkdtemp()) / "phish"
sizes = preprocess_phish(source, out, seed=0)
print(sizes)

# %%
net = build_phish_network()
print(f"{len(net.facts)} facts, {len(net.rules)} rules, {len(net.input_ids)} inputs")

train_cases = read_cases(out / "train.jsonl")
test_cases = read_cases(out / "test.jsonl")
print("untrained:", score_split(net, test_cases).to_dict())

# %%
trained, history = train(net, train_cases, TrainConfig(velocity=0.05, epochs=30, shuffle_seed=0))
print("trained:  ", score_split(trained, test_cases).to_dict())

# %%
# Which features drove the score of the first test URL?
trace = explain(trained, test_cases[0].inputs)
for fid, coef, value, share in rank_influences(trace, 5):
    print(f"{fid:<28} c={coef:.3f} v={value:.3f} contributes {share:.3f}")
print("score", trace.output_value)

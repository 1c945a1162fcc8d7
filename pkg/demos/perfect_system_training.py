"""
Recovering known weights by training
====================================

A random ground-truth network labels random inputs.  Its weights are then
scrambled and the trainer is asked to bring the error on held-out cases
back down.  Because the labels come from a network of the same shape, the
achievable error is zero.
"""

# %%
import numpy as np

from mles import ShapeSpec, TrainConfig, evaluate_batch, generate_perfect_system
from mles import randomize_weights, train
from mles.dataset import to_arrays

truth, cases = generate_perfect_system(ShapeSpec(n_inputs=10, n_rules=9, n_cases=1200), seed=3)
fit, holdout = cases[:1000], cases[1000:]
x, y = to_arrays(holdout, truth.input_ids)


def holdout_mae(network):
    return float(np.mean(np.abs(evaluate_batch(network, x, truth.input_ids) - y)))


start = randomize_weights(truth, seed=17)
print(f"held-out MAE before training: {holdout_mae(start):.4f}")

# %%
# Each epoch visits the cases in a seeded random order.
trained, history = train(start, fit, TrainConfig(velocity=0.1, epochs=500, shuffle_seed=3))
print(f"held-out MAE after {history.epochs_run} epochs: {holdout_mae(trained):.2e}")
for epoch in (0, 9, 99, 499):
    print(f"  epoch {epoch + 1:>3}: training MAE {history.epoch_mae[epoch]:.2e}")

# %%
# Weights that matter converge towards the truth.  A rule whose premises
# rarely differ receives little signal, so its weight can stay further off.
for rule in truth.rules:
    print(f"{rule.id}: true w1 {rule.w1:.3f}  learned {trained.rule(rule.id).w1:.3f}")

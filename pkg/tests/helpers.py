"""Shared test helpers."""

import os

from mles.network import INPUT, INTERMEDIATE, OUTPUT, Fact, Network, Rule

DATA = os.path.join(os.path.dirname(__file__), "data")
PHISH_CSV = os.path.join(DATA, "phishing_sample.csv")
LIAR_DIR = os.path.join(DATA, "liar")


def make_network(inputs, rules, output="O", intermediates=()):
    """Build a network from fact ids and ``(id, p1, p2, target, w1, w2)`` tuples."""
    net = Network()
    for fid in inputs:
        net.add_fact(Fact(fid, fid, INPUT))
    for fid in intermediates:
        net.add_fact(Fact(fid, fid, INTERMEDIATE))
    net.add_fact(Fact(output, output, OUTPUT))
    for spec in rules:
        net.add_rule(Rule(*spec))
    return net

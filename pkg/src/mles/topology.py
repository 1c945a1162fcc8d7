"""Helpers for assembling the application networks."""

from __future__ import annotations

from .network import INTERMEDIATE, Fact, Network, Rule


def rule_id(target: str) -> str:
    return f"r_{target}"


def cascade(network: Network, members, target: Fact, *, leaves=None) -> Network:
    """Reduce ``members`` to ``target`` through a balanced tree of binary rules.

    Initial weights are proportional to the number of leaves under each
    premise, so a fresh cascade computes the plain mean of its leaves.
    ``target`` is added to the network; intermediate facts are named
    ``<target.id>__<level>_<index>``.
    """
    members = list(members)
    if len(members) < 2:
        raise ValueError("a cascade needs at least two members")
    leaves = leaves or {}
    level = [(m, leaves.get(m, 1)) for m in members]
    depth = 0
    while len(level) > 1:
        depth += 1
        merged = []
        for i in range(0, len(level) - 1, 2):
            (a, na), (b, nb) = level[i], level[i + 1]
            if len(level) == 2:
                fact = target
            else:
                fid = f"{target.id}__{depth}_{i // 2}"
                fact = Fact(fid, f"{target.name} partial {depth}.{i // 2}", INTERMEDIATE)
            network.add_fact(fact)
            w1 = na / (na + nb)
            network.add_rule(Rule(rule_id(fact.id), a, b, fact.id, w1, 1.0 - w1))
            merged.append((fact.id, na + nb))
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return network

import io
import json
import random

import pytest

from mles import data
from mles.errors import (
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
from mles.liar import build_liar_network
from mles.network import (
    INPUT,
    INTERMEDIATE,
    OUTPUT,
    Fact,
    Network,
    Rule,
    dumps,
    load,
    loads,
    save,
    to_dict,
    topological_order,
    validate,
)
from mles.phishing import build_phish_network
from mles.training import ShapeSpec, generate_perfect_system

from helpers import make_network


def test_add_fact():
    net = Network().add_fact(Fact("url_len", "URL length", INPUT))
    assert list(net.facts) == ["url_len"]


def test_add_fact_duplicate():
    net = Network().add_fact(Fact("a"))
    with pytest.raises(DuplicateId):
        net.add_fact(Fact("a", kind=INTERMEDIATE))


def test_second_output():
    net = Network().add_fact(Fact("o1", kind=OUTPUT))
    with pytest.raises(SecondOutputFact):
        net.add_fact(Fact("o2", kind=OUTPUT))


def test_add_rule_accepted(single):
    assert [r.id for r in single.rules] == ["r"]
    assert validate(single).clean


@pytest.mark.parametrize(
    "rule, error",
    [
        (Rule("x", "A", "B", "O", 0.7, 0.7), WeightSumViolation),
        (Rule("x", "A", "B", "O", 1.2, -0.2), WeightSumViolation),
        (Rule("x", "A", "Z", "O", 0.5, 0.5), UnknownFact),
        (Rule("x", "A", "A", "O", 0.5, 0.5), InvalidRule),
        (Rule("x", "A", "O", "B", 0.5, 0.5), InvalidRule),
    ],
)
def test_add_rule_rejects(rule, error):
    net = make_network(["A", "B"], [])
    with pytest.raises(error):
        net.add_rule(rule)


def test_duplicate_target(single):
    with pytest.raises(DuplicateTarget):
        single.add_rule(Rule("r2", "B", "A", "O", 0.5, 0.5))


def _has_cycle(edges):
    """Depth-first cycle search on an edge list."""
    graph = {}
    for a, b in edges:
        graph.setdefault(a, []).append(b)
    state = {}

    def visit(node):
        state[node] = 1
        for nxt in graph.get(node, ()):
            if state.get(nxt) == 1 or (nxt not in state and visit(nxt)):
                return True
        state[node] = 2
        return False

    return any(visit(n) for n in list(graph) if n not in state)


def test_cycle_introduced():
    net = Network()
    net.add_fact(Fact("A", kind=INTERMEDIATE)).add_fact(Fact("B")).add_fact(Fact("C", kind=OUTPUT))
    net.add_rule(Rule("r1", "A", "B", "C", 0.5, 0.5))
    candidate = Rule("r2", "C", "B", "A", 0.5, 0.5)
    edges = [(p, r.target) for r in net.rules + [candidate] for p in r.premises]
    assert _has_cycle(edges)
    with pytest.raises(CycleIntroduced):
        net.add_rule(candidate)
    assert len(net.rules) == 1


def test_validate_clean(single):
    assert validate(single).clean
    assert str(validate(single)) == "network is well-formed"


def test_validate_orphan_input():
    net = make_network(["A", "B", "Z"], [("r", "A", "B", "O", 0.5, 0.5)])
    report = validate(net)
    assert not report.clean and not report.errors
    assert any("unreachable input" in f.message for f in report.warnings)


def test_validate_hand_edited_weights(single):
    single.rules[0].w1 = single.rules[0].w2 = 0.6
    assert "WeightSumViolation" in validate(single).codes()


def test_validate_structural_damage():
    net = Network(
        [Fact("A"), Fact("B"), Fact("I", kind=INTERMEDIATE), Fact("O", kind=OUTPUT)],
        [Rule("r1", "A", "B", "O"), Rule("r2", "B", "A", "O")],
        "O",
    )
    codes = validate(net).codes()
    assert "DuplicateTarget" in codes and "MissingProducer" in codes
    cyclic = Network(
        [Fact("A"), Fact("X", kind=INTERMEDIATE), Fact("O", kind=OUTPUT)],
        [Rule("r1", "A", "O", "X"), Rule("r2", "X", "A", "O")],
        "O",
    )
    assert "Cycle" in validate(cyclic).codes()
    assert "NoOutput" in validate(Network([Fact("A")])).codes()


def test_topological_order_chain(chain):
    assert topological_order(chain) == ["r1", "r2"]


def test_topological_order_tie_break():
    net = make_network(
        ["A", "B", "C", "D"],
        [
            ("r_b", "C", "D", "J", 0.5, 0.5),
            ("r_a", "A", "B", "I", 0.5, 0.5),
            ("r_c", "I", "J", "O", 0.5, 0.5),
        ],
        intermediates=["I", "J"],
    )
    assert topological_order(net) == ["r_a", "r_b", "r_c"]


def _relaxation_order(network):
    """Brute force: repeatedly emit the smallest-id rule whose inputs are ready."""
    produced_by = {r.target: r.id for r in network.rules}
    done, order = set(), []
    pending = sorted(network.rules, key=lambda r: r.id)
    while pending:
        for r in pending:
            if all(produced_by.get(p) in done or p not in produced_by for p in r.premises):
                order.append(r.id)
                done.add(r.id)
                pending.remove(r)
                break
        else:
            raise AssertionError("no progress")
    return order


def test_topological_order_permutation_invariant():
    net, _ = generate_perfect_system(ShapeSpec(12, 20, n_cases=0), seed=3)
    expected = _relaxation_order(net)
    assert topological_order(net) == expected
    rng = random.Random(0)
    for _ in range(10):
        shuffled = net.copy()
        rng.shuffle(shuffled.rules)
        assert topological_order(shuffled) == expected


def test_topological_order_invalid(single):
    single.rules[0].w1 = 0.9
    with pytest.raises(InvalidNetwork):
        topological_order(single)


def test_round_trip(single, tmp_path):
    path = tmp_path / "n.json"
    save(single, path)
    assert load(path) == single
    buf = io.StringIO()
    save(single, buf)
    assert loads(buf.getvalue()) == single


def test_round_trip_random_weights():
    net, _ = generate_perfect_system(ShapeSpec(8, 12, n_cases=0), seed=11)
    again = loads(dumps(net))
    assert again == net
    assert [r.w1 for r in again.rules] == [r.w1 for r in net.rules]


def test_missing_output_field(single):
    doc = to_dict(single)
    del doc["output"]
    with pytest.raises(ParseError, match="output"):
        loads(json.dumps(doc))


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        loads('{\n  "facts": [\n')
    assert "line" in str(info.value)
    with pytest.raises(ParseError, match=r"rules\[0\]"):
        loads('{"facts": [], "rules": [{"id": "r"}], "output": "O"}')


def test_load_invalid_raises(single):
    single.rules[0].w1 = 0.6
    single.rules[0].w2 = 0.6
    text = json.dumps({**to_dict(single), "rules": [
        {"id": "r", "premises": ["A", "B"], "target": "O", "weights": [0.6, 0.6]}]})
    with pytest.raises(InvalidNetwork):
        loads(text)
    assert "WeightSumViolation" in validate(loads(text, check=False)).codes()


def test_save_renormalizes_w2():
    net = make_network(["A", "B"], [("r", "A", "B", "O", 0.3, 0.7 + 1e-12)])
    doc = json.loads(dumps(net))
    w1, w2 = doc["rules"][0]["weights"]
    assert w2 == 1.0 - w1


@pytest.mark.parametrize(
    "name, builder",
    [(data.PHISH_NETWORK, build_phish_network), (data.LIAR_NETWORK, build_liar_network)],
)
def test_shipped_topologies(name, builder):
    shipped = load(str(data.path(name)))
    assert validate(shipped).clean
    assert shipped == builder()
    assert data.path(name).read_text() == dumps(builder())

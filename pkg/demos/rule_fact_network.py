"""
A small rule-fact network, evaluated and explained
==================================================

Two inputs feed an intermediate fact, which is merged with a third input
to give the output.  Every rule is a convex mix of its two premises, so the
output is a convex mix of the inputs and the mixing coefficients can be
read off exactly.
"""

# %%
from mles import Fact, Network, Rule, evaluate, explain, validate
from mles.network import INPUT, INTERMEDIATE, OUTPUT, dumps

net = Network(metadata={"name": "loan-risk toy"})
for fid in ("income", "debt", "history"):
    net.add_fact(Fact(fid, fid, INPUT))
net.add_fact(Fact("finances", "financial position", INTERMEDIATE))
net.add_fact(Fact("risk", "overall risk", OUTPUT))
net.add_rule(Rule("r1", "income", "debt", "finances", 0.4, 0.6))
net.add_rule(Rule("r2", "finances", "history", "risk", 0.7, 0.3))
print(validate(net))

# %%
# Forward evaluation visits rules in dependency order.
case = {"income": 0.2, "debt": 0.9, "history": 0.5}
result = evaluate(net, case)
print(result.output_value, result.values["finances"])

# %%
# The explanation gives each input a coefficient; coefficient times value
# summed over inputs reproduces the output.
trace = explain(net, case)
print(trace.to_text())
print("reconstruction:", trace.reconstruction())

# %%
# The on-disk form is plain JSON.
print(dumps(net))

"""
Two ways to wire the same kind of network
=========================================

In the fake-news network every input feeds exactly one rule.  The phishing
network pairs features in a ring, so each feature reaches the output along
two routes.  This script compares the two designs side by side.
"""

# %%
from mles.evaluation import DesignResult, compare_designs, comparison_markdown
from mles.explain import influence_by_accumulation
from mles.liar import build_liar_network
from mles.phishing import build_phish_network

liar = build_liar_network()
phish = build_phish_network()
for name, net in (("fake news", liar), ("phishing", phish)):
    fan = net.premise_fan_out()
    print(f"{name}: inputs {len(fan)}, fan-out counts {sorted(set(fan.values()))}")

# %%
print(comparison_markdown(compare_designs(DesignResult("fake news", liar),
                                          DesignResult("phishing", phish))))

# %%
# With the initial weights, how much can a single input move the output?
for name, net in (("fake news", liar), ("phishing", phish)):
    influence = influence_by_accumulation(net)
    top = max(influence, key=influence.get)
    print(f"{name}: largest coefficient {influence[top]:.4f} on {top}")

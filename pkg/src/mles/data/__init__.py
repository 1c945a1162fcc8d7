"""Shipped network topologies and the phishing feature map."""

from importlib import resources

PHISH_NETWORK = "phishing_network.json"
LIAR_NETWORK = "liar_network.json"
PHISH_FEATURES = "phishing_features.json"


def path(name: str):
    return resources.files(__name__).joinpath(name)

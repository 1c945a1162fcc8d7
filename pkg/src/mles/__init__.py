"""Expert systems whose rule weights are trained from data.

A :class:`~mles.network.Network` of facts and weighted binary rules is
evaluated forward, trained by distributing output error across the rules
that reach the output, and explained exactly as a linear decomposition of
its inputs.
"""

from .dataset import LabeledCase, read_cases, write_cases
from .errors import MLESError
from .evaluation import Metrics, binarize, compare_designs, score_split
from .explain import ExplanationTrace, explain, rank_influences
from .inference import EvaluationResult, contributing_rules, evaluate, evaluate_batch
from .network import (
    Fact,
    Network,
    Rule,
    ValidationReport,
    load,
    save,
    topological_order,
    validate,
)
from .training import (
    ShapeSpec,
    TrainConfig,
    TrainHistory,
    generate_perfect_system,
    randomize_weights,
    train,
    train_case,
    train_epoch,
)

__version__ = "0.1.0"

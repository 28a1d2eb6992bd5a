"""Masking numerical microdata by sequential restricted permutations, with
disclosure-risk / information-loss evaluation and parameter tuning."""

__version__ = "0.1.0"

from .baselines import MaskSpec, Method, add_noise, apply_mask, mdav_microaggregate, rank_swap
from .core import DataMatrix, InvalidInputError, InvalidParameterError, categorize_data, rank_column
from .metrics import MetricBundle, averaged_sorted, evaluate
from .scoring import ScoreBundle, TuningResult, compute_scores, select_best_parameter
from .shuffle import ShuffleVariant, jppds_full, jppds_simplified, sjppds

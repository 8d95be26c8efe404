"""Named RNG streams derived from one run seed.

Each training run owns independent generators for initialization, data
collection, gradient updates, the mixing-coefficient perturbation, and
evaluation, so that disabling one consumer never shifts the draws seen by
another.
"""

from __future__ import annotations

import numpy as np

INIT_STREAM = 0
COLLECT_STREAM = 1
UPDATE_STREAM = 2
LAMBDA_STREAM = 3
EVAL_STREAM = 4


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(stream)])


def eval_seed(seed: int, ordinal: int) -> list[int]:
    """Seed material for one evaluation; equal ordinals across runs share initial states."""
    return [int(seed), EVAL_STREAM, int(ordinal)]

import numpy as np

# Stream tags keep the entropy words of different purposes apart.
PAIR_TRIAL_STREAM = 1
SEARCH_TRIAL_STREAM = 2
MATRIX_STREAM = 3
FRAME_STREAM = 4
BASELINE_TRIAL_STREAM = 5


def substream(master_seed: int, *indices: int) -> np.random.Generator:
    """
    Deterministically derive an independent generator for a unit of work.

    The generator depends only on `master_seed` and the index path, never on
    which worker executes the unit, so results do not change with the worker count.
    """
    return np.random.default_rng(np.random.SeedSequence([master_seed, *indices]))


def draw_master_seed() -> int:
    return int(np.random.SeedSequence().entropy % (2**32))


def derive_seed(master_seed: int, *indices: int) -> int:
    """Integer seed for APIs that take a seed rather than a generator."""
    return int(np.random.SeedSequence([master_seed, *indices]).generate_state(1)[0])

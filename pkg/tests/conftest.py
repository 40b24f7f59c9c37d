import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import CORPUS_SEEDS, benchmark_image, benchmark_mark


@pytest.fixture(scope="session")
def corpus():
    """The five synthetic benchmark covers, keyed by seed."""
    return {seed: benchmark_image(seed) for seed in CORPUS_SEEDS}


@pytest.fixture(scope="session")
def mark():
    return benchmark_mark()


def random_mark(seed):
    rng = np.random.default_rng(seed)
    return np.where(rng.random((16, 16)) < 0.5, -1, 1).astype(np.int8)


@pytest.fixture(scope="session")
def lena_like(corpus):
    """One designated cover for single-image checks."""
    return corpus[CORPUS_SEEDS[0]]

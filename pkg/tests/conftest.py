from fractions import Fraction

import numpy as np
import pytest

from diamondlim import build_level


@pytest.fixture(scope="session")
def graphs():
    """Levels 0..4, built once; fine levels share their coarser chain."""
    g4 = build_level(4)
    chain = g4.chain()
    return {g.level: g for g in chain}


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def random_word(rng, level) -> str:
    return "".join(str(d) for d in rng.integers(1, 7, size=level))


def random_point(rng, level):
    from diamondlim import PointAddress

    word = random_word(rng, level)
    grid = 4**level * 8
    return PointAddress(word, Fraction(int(rng.integers(0, grid + 1)), grid) * Fraction(1, 4**level))

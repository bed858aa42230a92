from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from liaison_forge.ring import QQ, PolyRing, PrimeField  # noqa: E402

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

P = 32003
R3_QQ = PolyRing(("x", "y", "z"), QQ)
R3_P = PolyRing(("x", "y", "z"), PrimeField(P))


def random_poly(ring, rng: random.Random, terms: int = 4, max_deg: int = 3, coeff: int = 9, homogeneous_deg=None):
    data = {}
    n = ring.num_vars
    for _ in range(terms):
        if homogeneous_deg is None:
            e = tuple(rng.randint(0, max_deg) for _ in range(n))
        else:
            e = [0] * n
            for _ in range(homogeneous_deg):
                e[rng.randrange(n)] += 1
            e = tuple(e)
        data[e] = data.get(e, 0) + rng.randint(-coeff, coeff)
    return ring.from_dict(data)


@st.composite
def polys(draw, ring=R3_QQ, max_terms: int = 4, max_deg: int = 3):
    n = ring.num_vars
    k = draw(st.integers(0, max_terms))
    data = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        data[e] = draw(st.integers(-20, 20))
    return ring.from_dict(data)


@pytest.fixture
def rng():
    return random.Random(12345)

import random

import pytest

from app.services.coeff_engine import CASE_D1


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def g_terms():
    """g = m_1^d + … + m_9^d"""
    return [(1, m) for m in CASE_D1.ms]

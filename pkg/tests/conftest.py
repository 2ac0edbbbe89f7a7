# ============================================================
# tests/conftest.py — Shared Fixtures
# ============================================================
# The reference instance is a (3, 2) first integral with
# p = 3, q = 2 whose curves are smooth and transversal; the
# Gröbner-backed fixtures are session scoped because every
# module that touches H_f reuses them.
# ============================================================

import numpy as np
import pytest

from foliation_kit.brieskorn import hf_basis, relative_module
from foliation_kit.foliation import first_integral_from_text
from foliation_kit.pullback import domain_ring, morphism

P_TEXT = "X^3 + 2*Y^3 - 3*Z^3 + X^2*Y - 2*X*Z^2 + Y^2*Z"
Q_TEXT = "X^2 + 3*Y^2 + 5*Z^2 + X*Y - Y*Z"


@pytest.fixture(scope='session')
def first_integral():
    return first_integral_from_text(P_TEXT, Q_TEXT, 3, 2, ('X', 'Y', 'Z'))


@pytest.fixture(scope='session')
def module(first_integral):
    return relative_module(first_integral)


@pytest.fixture(scope='session')
def basis(first_integral, module):
    return hf_basis(first_integral, module)


@pytest.fixture(scope='session')
def square_map(first_integral):
    x, y, z = domain_ring().gens
    return morphism([x ** 2, y ** 2, z ** 2], first_integral.ring)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def problem_data():
    """A minimal valid problem document for the reference instance."""
    return {
        'schema': 1,
        'variables': ['X', 'Y', 'Z'],
        'P': P_TEXT,
        'Q': Q_TEXT,
        'p': 3,
        'q': 2,
        'commands': ['milnor'],
    }

"""Shared fixtures: reference measures and their gradations."""

from fractions import Fraction

import numpy as np
import pytest

import mvop


@pytest.fixture(scope="session")
def circle():
    return mvop.circle_functional(max_degree=18)


@pytest.fixture(scope="session")
def circle_gradation(circle):
    return mvop.build_gradations(circle, 8)


@pytest.fixture(scope="session")
def circle_fock(circle_gradation):
    return mvop.assemble_fock(circle_gradation)


@pytest.fixture(scope="session")
def half_circle():
    return mvop.circle_functional(half=True, max_degree=14)


@pytest.fixture(scope="session")
def square_measure():
    # uniform measure on the four corners of [-1, 1]^2
    return mvop.DiscreteMeasure(
        atoms=((1, 1), (-1, 1), (-1, -1), (1, -1)),
        weights=(Fraction(1, 4),) * 4,
    )


@pytest.fixture(scope="session")
def square_fn(square_measure):
    return mvop.discrete_functional(square_measure)


@pytest.fixture(scope="session")
def square_gradation(square_fn):
    return mvop.build_gradations(square_fn, 3)


@pytest.fixture(scope="session")
def skew_measure():
    # four points with a non-symmetric x-marginal
    return mvop.DiscreteMeasure(
        atoms=((2, 0), (1, 1), (0, 0), (1, -1)),
        weights=(Fraction(1, 4),) * 4,
    )


@pytest.fixture(scope="session")
def skew_fn(skew_measure):
    return mvop.discrete_functional(skew_measure)


@pytest.fixture(scope="session")
def diamond_fn():
    m = mvop.DiscreteMeasure(
        atoms=((1, 0), (-1, 0), (0, 1), (0, -1)),
        weights=(Fraction(1, 4),) * 4,
    )
    return mvop.discrete_functional(m)


@pytest.fixture(scope="session")
def gauss2():
    return mvop.product_functional(
        (mvop.gaussian_functional(), mvop.gaussian_functional())
    )


@pytest.fixture(scope="session")
def gauss2_fock(gauss2):
    return mvop.assemble_fock(mvop.build_gradations(gauss2, 10))


@pytest.fixture(scope="session")
def cylinder():
    return mvop.product_functional(
        (mvop.circle_functional(max_degree=18), mvop.gaussian_functional())
    )


@pytest.fixture(scope="session")
def sine_table():
    # pushforward of N(0,1) under x -> (x, sin x), tabulated to degree 8
    nodes, wts = np.polynomial.hermite_e.hermegauss(200)
    wts = wts / wts.sum()
    entries = {}
    for a in range(9):
        for b in range(9 - a):
            entries[(a, b)] = float(np.sum(wts * nodes**a * np.sin(nodes) ** b))
    return mvop.table_functional(2, entries, 8)


def random_rational_measure(rng, max_atoms=6):
    """Random planar measure with rational atoms and weights.

    Keeps at least two distinct first coordinates so every draw has a
    nondegenerate degree-1 Gram block.
    """
    while True:
        k = int(rng.integers(2, max_atoms + 1))
        atoms = set()
        while len(atoms) < k:
            atoms.add(
                tuple(
                    Fraction(int(rng.integers(-8, 9)), int(rng.integers(1, 5)))
                    for _ in range(2)
                )
            )
        if len({a[0] for a in atoms}) < 2:
            continue
        raw = [int(rng.integers(1, 10)) for _ in range(k)]
        weights = tuple(Fraction(r, sum(raw)) for r in raw)
        return mvop.DiscreteMeasure(atoms=tuple(sorted(atoms)), weights=weights)


@pytest.fixture(scope="session")
def rational_measures():
    rng = np.random.default_rng(20260817)
    return [random_rational_measure(rng) for _ in range(25)]

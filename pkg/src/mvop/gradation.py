"""Degree-graded orthogonal decomposition of a moment functional.

For each degree n the monomials x^alpha are corrected by their projection
onto everything of lower degree, producing candidate polynomials whose span
is the degree-n slice of the orthogonal gradation. The Gram matrix of the
candidates (in graded lexicographic order) carries the geometry: its range
gives an orthogonal basis of the slice, its kernel the degree-n null
directions of the functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg
from .errors import DepthExceededError
from .measures import MomentFunctional, as_float_functional
from .polynomial import Polynomial, monomials_of_degree
from .scalars import Tolerances


def index_weight(alpha) -> Fraction:
    """w(alpha) = alpha! / |alpha|!, the reciprocal multinomial coefficient."""
    num = math.prod(math.factorial(e) for e in alpha)
    return Fraction(num, math.factorial(sum(alpha)))


def resolve_mode(functional: MomentFunctional, mode: str) -> str:
    if mode == "auto":
        return "exact" if functional.exact else "float"
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and not functional.exact:
        raise ValueError("exact mode requires a functional with rational moments")
    return mode


@dataclass
class DegreeBasis:
    """One degree slice: candidates, their Gram matrix, and its splitting."""

    degree: int
    monomials: tuple
    weights: tuple
    candidates: list
    gram: np.ndarray
    split: _linalg.GramSplit
    _ortho_cache: list | None = None

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    @property
    def rank(self) -> int:
        return self.split.rank

    @property
    def nullity(self) -> int:
        return self.split.nullity

    def omega(self) -> np.ndarray:
        """Form generator: the Gram matrix with rows rescaled by 1/w(alpha)."""
        out = self.gram.copy()
        for i, w in enumerate(self.weights):
            scale = w if self.gram.dtype == object else float(w)
            out[i, :] = out[i, :] / scale
        return out

    def _combined(self, coeffs) -> Polynomial:
        f = Polynomial.zero(self.candidates[0].dimension)
        for c, cand in zip(coeffs, self.candidates):
            if c != 0:
                f = f + c * cand
        return f

    def ortho_basis(self) -> list:
        """Orthogonal polynomials spanning the slice; squared norms in split.norms2."""
        if self._ortho_cache is None:
            self._ortho_cache = [
                self._combined(self.split.combos[:, j]) for j in range(self.rank)
            ]
        return self._ortho_cache

    def null_basis(self) -> list:
        """Polynomials of this degree annihilated by the seminorm."""
        return [self._combined(self.split.null[:, j]) for j in range(self.nullity)]


class GradationBasis:
    """Orthogonal gradation of a functional up to a fixed maximal degree."""

    def __init__(self, functional, max_degree, mode, tol, levels):
        self.functional = functional
        self.max_degree = max_degree
        self.mode = mode
        self.tol = tol
        self.levels = levels

    @property
    def dimension(self) -> int:
        return self.functional.dimension

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def level(self, n: int) -> DegreeBasis:
        if not 0 <= n <= self.max_degree:
            raise ValueError(f"degree {n} outside built range 0..{self.max_degree}")
        return self.levels[n]

    def inner(self, f: Polynomial, g: Polynomial):
        return self.functional.expectation(f * g)

    def project(self, f: Polynomial, n: int, space: str = "level") -> Polynomial:
        """Seminorm projection of f onto the degree-n slice (or all slices <= n)."""
        if space not in ("level", "upto"):
            raise ValueError(f"unknown space {space!r}")
        degrees = range(n + 1) if space == "upto" else (n,)
        out = Polynomial.zero(self.dimension)
        for m in degrees:
            lev = self.level(m)
            for j, u in enumerate(lev.ortho_basis()):
                coeff = self.inner(f, u) / lev.split.norms2[j]
                if coeff != 0:
                    out = out + coeff * u
        return out

    def dimension_table(self) -> list:
        return [(lev.degree, lev.dimension, lev.rank, lev.nullity) for lev in self.levels]


def build_gradations(
    functional: MomentFunctional,
    max_degree: int,
    *,
    mode: str = "auto",
    tol: Tolerances | None = None,
) -> GradationBasis:
    """Construct the orthogonal gradation of a functional up to max_degree.

    Parameters
    ----------
    functional : MomentFunctional
        Moment source; must reliably cover degree 2*max_degree.
    max_degree : int
        Largest degree slice to build.
    mode : {"auto", "exact", "float"}
        Scalar arithmetic. "auto" picks exact when the functional is rational.
    tol : Tolerances, optional
        Rank and positivity cutoffs (float mode only).

    Returns
    -------
    GradationBasis

    Raises
    ------
    DepthExceededError
        If the functional cannot supply moments to degree 2*max_degree.
    InconsistentMomentsError
        If a Gram matrix fails positive semidefiniteness.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    tol = tol or Tolerances()
    mode = resolve_mode(functional, mode)
    if 2 * max_degree > functional.max_reliable_degree:
        raise DepthExceededError(
            f"gradation to degree {max_degree} needs moments to {2 * max_degree}, "
            f"but only {functional.max_reliable_degree} are reliable"
        )
    if mode == "float" and functional.exact:
        functional = as_float_functional(functional)
    exact = mode == "exact"
    d = functional.dimension

    levels = []
    for n in range(max_degree + 1):
        monos = monomials_of_degree(d, n)
        candidates = []
        for alpha in monos:
            c = Polynomial.monomial(alpha)
            for lev in levels:
                for j, u in enumerate(lev.ortho_basis()):
                    coeff = functional.expectation(c * u) / lev.split.norms2[j]
                    if coeff != 0:
                        c = c - coeff * u
            candidates.append(c)

        k = len(monos)
        gram = np.empty((k, k), dtype=object if exact else float)
        for i in range(k):
            for j in range(i, k):
                v = functional.expectation(candidates[i] * candidates[j])
                gram[i, j] = v
                gram[j, i] = v
        split = _linalg.split_gram(gram, exact=exact, tol_rank=tol.rank, tol_psd=tol.psd)
        levels.append(
            DegreeBasis(
                degree=n,
                monomials=monos,
                weights=tuple(index_weight(a) for a in monos),
                candidates=candidates,
                gram=gram,
                split=split,
            )
        )

    return GradationBasis(functional, max_degree, mode, tol, levels)

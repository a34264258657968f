"""Rank deficiency of the gradation and generators of the null ideal.

Polynomials annihilated by the seminorm of a functional form an ideal. Per
degree, the Gram kernel consists of the top coefficient vectors of the null
polynomials; stripping the directions inherited from lower degrees (shifted
earlier generators) leaves the genuinely new generators of that degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .gradation import GradationBasis
from .polynomial import Polynomial, monomials_of_degree


@dataclass(frozen=True)
class RankSequence:
    degrees: tuple
    dims: tuple
    ranks: tuple
    nullities: tuple

    @property
    def has_deficiency(self) -> bool:
        return any(v > 0 for v in self.nullities)

    @property
    def first_deficient_degree(self) -> int | None:
        for n, v in zip(self.degrees, self.nullities):
            if v > 0:
                return n
        return None


def rank_sequence(g: GradationBasis) -> RankSequence:
    """Dimension, rank, and nullity of every built degree slice."""
    table = g.dimension_table()
    return RankSequence(
        degrees=tuple(row[0] for row in table),
        dims=tuple(row[1] for row in table),
        ranks=tuple(row[2] for row in table),
        nullities=tuple(row[3] for row in table),
    )


def _monic(f: Polynomial) -> Polynomial:
    # graded-lex leading term: highest degree, then lexicographically largest
    lead = max(f.terms, key=lambda a: (sum(a), a))
    return f / f.terms[lead]


def null_polynomials(g: GradationBasis, n: int) -> list:
    """Monic null polynomials of degree n (leading term in graded-lex order)."""
    return [_monic(f) for f in g.level(n).null_basis()]


@dataclass
class NullIdealBasis:
    dimension: int
    max_degree: int
    generators: list
    by_degree: dict
    reduction_log: list = field(default_factory=list)

    def degrees(self) -> list:
        return sorted(self.by_degree)


def _new_kernel_directions(kernel: np.ndarray, inherited: np.ndarray, exact: bool, tol_rank: float):
    """Basis of (column span of kernel) orthogonal to the inherited columns."""
    if kernel.shape[1] == 0:
        return kernel
    if inherited.shape[1] == 0:
        return kernel
    if exact:
        # v = kernel @ y with inherited^T v = 0
        coeffs = _linalg.exact_nullspace((inherited.T @ kernel).tolist())
        if not coeffs:
            return kernel[:, :0]
        y = np.array([[c for c in col] for col in coeffs], dtype=object).T
        return kernel @ y
    u, s, _ = np.linalg.svd(inherited, full_matrices=False)
    cut = _linalg.rank_cutoff(inherited.shape[0], s[0] if s.size else 0.0, tol_rank)
    u = u[:, s > cut]
    if u.shape[1] == 0:
        return kernel
    # kernel columns are orthonormal, so the singular values of u^T kernel are
    # cosines of principal angles; trailing near-zero ones are the new
    # directions
    _, s2, vt = np.linalg.svd(u.T @ kernel, full_matrices=True)
    rank = int(np.sum(s2 > 1e-7))
    return kernel @ vt.T[:, rank:]


def base_generators(g: GradationBasis) -> NullIdealBasis:
    """Degree-minimal generators of the null ideal up to the built depth.

    At each degree the Gram kernel is compared with the span of the top
    coefficient vectors of shifted lower-degree generators; only kernel
    directions outside that span yield new generators, returned as monic
    polynomials. The reduction log records, per deficient degree, how many
    kernel directions were inherited versus new.
    """
    exact = g.exact
    d = g.dimension
    generators: list = []
    by_degree: dict = {}
    log = []
    for n in range(g.max_degree + 1):
        lev = g.level(n)
        kernel = lev.split.null
        if kernel.shape[1] == 0:
            continue
        monos = monomials_of_degree(d, n)
        pos = {a: j for j, a in enumerate(monos)}
        columns = []
        for m, gen in generators:
            for beta in monomials_of_degree(d, n - m):
                shifted = Polynomial.monomial(beta) * gen
                col = np.zeros(len(monos), dtype=object if exact else float)
                for alpha, coeff in zip(monomials_of_degree(d, n), shifted.top_homogeneous(n)):
                    col[pos[alpha]] = coeff
                columns.append(col)
        inherited = (
            np.column_stack(columns)
            if columns
            else np.zeros((len(monos), 0), dtype=object if exact else float)
        )
        new_dirs = _new_kernel_directions(kernel, inherited, exact, g.tol.rank)
        fresh = []
        for j in range(new_dirs.shape[1]):
            f = Polynomial.zero(d)
            for r in range(new_dirs.shape[0]):
                if new_dirs[r, j] != 0:
                    f = f + new_dirs[r, j] * lev.candidates[r]
            fresh.append(_monic(f))
        for f in fresh:
            generators.append((n, f))
        if fresh:
            by_degree[n] = fresh
        log.append(
            {
                "degree": n,
                "kernel": kernel.shape[1],
                "inherited": kernel.shape[1] - len(fresh),
                "new": len(fresh),
            }
        )
    return NullIdealBasis(
        dimension=d,
        max_degree=g.max_degree,
        generators=[f for _, f in generators],
        by_degree=by_degree,
        reduction_log=log,
    )


def support_membership(basis: NullIdealBasis, point, tol_eval: float = 1e-8) -> bool:
    """Whether a point annihilates every generator (candidate support point)."""
    point = tuple(point)
    if len(point) != basis.dimension:
        raise ValueError(f"point has length {len(point)}, expected {basis.dimension}")
    for f in basis.generators:
        value = f.evaluate(point)
        if isinstance(value, float):
            if abs(value) > tol_eval:
                return False
        elif value != 0:
            return False
    return True

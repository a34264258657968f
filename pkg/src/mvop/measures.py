"""Moment functionals with several backends.

Every backend produces a MomentFunctional: a normalized supplier of mixed
moments of multi-index arguments up to a reliable depth. Backends: discrete
atom lists, products of lower-dimensional functionals, the uniform measures on
the unit circle and half circle, explicit moment tables, standard Gaussian
factors, and moments generated from 1-D recurrence coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DepthExceededError, SpecFormatError
from .polynomial import Polynomial, monomials_up_to
from .scalars import is_rational

UNBOUNDED_DEPTH = 10**9


def _double_factorial(k: int) -> int:
    """(k)!! with the empty-product convention for k <= 0."""
    return math.prod(range(k, 0, -2)) if k > 0 else 1


class MomentFunctional:
    """Supplier of mixed moments Lambda(x^alpha).

    Parameters
    ----------
    dimension : int
        Number of variables.
    compute : callable
        Maps a multi-index tuple to the moment value.
    max_reliable_degree : int
        Depth up to which moments are available; requests beyond raise
        DepthExceededError (moments are never extrapolated).
    exact : bool
        True when every returned value is rational (int/Fraction).
    tag : str
        Backend label, for reports.
    """

    def __init__(self, dimension, compute, max_reliable_degree, exact, tag):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        if max_reliable_degree < 0:
            raise ValueError("max_reliable_degree must be >= 0")
        self.dimension = dimension
        self.max_reliable_degree = max_reliable_degree
        self.exact = bool(exact)
        self.tag = tag
        self._compute = compute
        self._cache: dict = {}
        zero = self.moment((0,) * dimension)
        if is_rational(zero):
            ok = zero == 1
        else:
            ok = abs(zero - 1.0) <= 1e-12
        if not ok:
            raise SpecFormatError(f"functional is not normalized: moment(0) = {zero}")

    def moment(self, alpha):
        """The mixed moment Lambda(x^alpha)."""
        alpha = tuple(alpha)
        if len(alpha) != self.dimension:
            raise ValueError(
                f"multi-index {alpha} has length {len(alpha)}, expected {self.dimension}"
            )
        if any(e < 0 for e in alpha):
            raise ValueError(f"multi-index {alpha} must be non-negative")
        if sum(alpha) > self.max_reliable_degree:
            raise DepthExceededError(
                f"moment of degree {sum(alpha)} requested, but only degrees "
                f"<= {self.max_reliable_degree} are reliable"
            )
        if alpha not in self._cache:
            self._cache[alpha] = self._compute(alpha)
        return self._cache[alpha]

    def expectation(self, f: Polynomial):
        """Lambda applied to a polynomial (term-wise moments)."""
        if f.dimension != self.dimension:
            raise ValueError(f"dimension mismatch: {f.dimension} vs {self.dimension}")
        total = 0
        for alpha, coeff in f.terms.items():
            total = total + coeff * self.moment(alpha)
        return total

    def __repr__(self):
        return (
            f"MomentFunctional(d={self.dimension}, tag={self.tag!r}, "
            f"depth={self.max_reliable_degree}, exact={self.exact})"
        )


def as_float_functional(f: MomentFunctional) -> MomentFunctional:
    """Same moments coerced to binary64 (used when the run mode is float)."""
    return MomentFunctional(
        f.dimension,
        lambda alpha: float(f.moment(alpha)),
        f.max_reliable_degree,
        exact=False,
        tag=f.tag,
    )


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure: atoms and positive weights."""

    atoms: tuple
    weights: tuple
    raw_atoms: tuple | None = field(default=None, compare=False)
    raw_weights: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        atoms = tuple(tuple(a) for a in self.atoms)
        weights = tuple(self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if not atoms:
            raise ValueError("measure needs at least one atom")
        if len(atoms) != len(weights):
            raise ValueError(
                f"got {len(atoms)} atoms but {len(weights)} weights"
            )
        d = len(atoms[0])
        if any(len(a) != d for a in atoms):
            raise ValueError("atoms must all have the same dimension")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be pairwise distinct")
        if any(not w > 0 for w in weights):
            raise ValueError("weights must be positive")
        total = sum(weights)
        if all(is_rational(w) for w in weights):
            ok = total == 1
        else:
            ok = abs(float(total) - 1.0) <= 1e-12
        if not ok:
            raise ValueError(f"weights must sum to 1, got {total}")

    @property
    def dimension(self) -> int:
        return len(self.atoms[0])

    @property
    def is_exact(self) -> bool:
        return all(is_rational(w) for w in self.weights) and all(
            is_rational(x) for a in self.atoms for x in a
        )


def discrete_functional(m: DiscreteMeasure, max_degree: int | None = None) -> MomentFunctional:
    """Moments of a finitely supported measure: sum of weighted atom powers."""
    def compute(alpha):
        total = 0
        for atom, w in zip(m.atoms, m.weights):
            value = w
            for x, e in zip(atom, alpha):
                if e:
                    value = value * x**e
            total = total + value
        return total

    cap = UNBOUNDED_DEPTH if max_degree is None else max_degree
    return MomentFunctional(m.dimension, compute, cap, exact=m.is_exact, tag="discrete")


def product_functional(factors: list) -> MomentFunctional:
    """Product measure: moments factor across the component functionals.

    Factors are usually 1-D; higher-dimensional factors are allowed, with the
    multi-index split across consecutive coordinate blocks.
    """
    if not factors:
        raise ValueError("need at least one factor")
    dims = [f.dimension for f in factors]
    dimension = sum(dims)
    offsets = [0]
    for d in dims:
        offsets.append(offsets[-1] + d)

    def compute(alpha):
        value = 1
        for f, lo, hi in zip(factors, offsets, offsets[1:]):
            value = value * f.moment(alpha[lo:hi])
        return value

    cap = min(f.max_reliable_degree for f in factors)
    exact = all(f.exact for f in factors)
    return MomentFunctional(dimension, compute, cap, exact=exact, tag="product")


def gaussian_functional() -> MomentFunctional:
    """Standard 1-D Gaussian: m_{2k} = (2k-1)!!, odd moments 0. No sampling."""
    def compute(alpha):
        k = alpha[0]
        return _double_factorial(k - 1) if k % 2 == 0 else 0

    return MomentFunctional(1, compute, UNBOUNDED_DEPTH, exact=True, tag="gaussian")


def circle_functional(half: bool = False, max_degree: int = 12) -> MomentFunctional:
    """Uniform measure on the unit circle (d=2), or on its upper half.

    Full circle: equispaced trapezoid quadrature with 4*max_degree + 8 nodes,
    exact to rounding for every requested trigonometric moment. Half circle:
    closed-form values (a beta-function reduction); the symmetric quadrature
    argument does not apply on the half period, so no quadrature is used.
    """
    if half:
        def compute(alpha):
            a, b = alpha
            if a % 2 == 1:
                return 0.0
            s, t = a // 2, b // 2
            if b % 2 == 0:
                rat = Fraction(
                    _double_factorial(a - 1) * _double_factorial(b - 1),
                    _double_factorial(a + b),
                )
                return float(rat)
            rat = Fraction(
                _double_factorial(a - 1) * math.factorial(t) * 2 ** (t + 1),
                _double_factorial(a + b),
            )
            return float(rat) / math.pi

        return MomentFunctional(2, compute, max_degree, exact=False, tag="half_circle")

    n_q = 4 * max_degree + 8
    theta = 2.0 * math.pi * np.arange(n_q) / n_q
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    def compute(alpha):
        a, b = alpha
        return float(np.mean(cos_t**a * sin_t**b))

    return MomentFunctional(2, compute, max_degree, exact=False, tag="circle")


@dataclass(frozen=True)
class JacobiPair1D:
    """1-D recurrence coefficients: omegas (off-diagonal squares) and alphas (shifts).

    Either every omega is positive, or the sequence terminates: all entries
    from the first zero onward are zero (finitely supported measure).
    """

    omegas: tuple
    alphas: tuple

    def __post_init__(self):
        omegas = tuple(self.omegas)
        alphas = tuple(self.alphas)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "alphas", alphas)
        if len(alphas) != len(omegas):
            raise ValueError(
                f"got {len(omegas)} omegas but {len(alphas)} alphas"
            )
        if any(w < 0 for w in omegas):
            raise ValueError(f"negative omega in {omegas}")
        seen_zero = False
        for w in omegas:
            if w == 0:
                seen_zero = True
            elif seen_zero:
                raise ValueError("omegas must stay zero after the first zero entry")

    @property
    def terminated(self) -> bool:
        return any(w == 0 for w in self.omegas)

    @property
    def is_exact(self) -> bool:
        return all(is_rational(v) for v in self.omegas + self.alphas)

    def extended(self, depth: int) -> tuple:
        """(omega_1..omega_depth, alpha_1..alpha_depth); zero-padded once terminated."""
        if depth <= len(self.omegas):
            return self.omegas[:depth], self.alphas[:depth]
        if not self.terminated:
            raise DepthExceededError(
                f"recurrence data has {len(self.omegas)} coefficients; "
                f"depth {depth} would extrapolate"
            )
        pad = depth - len(self.omegas)
        return self.omegas + (0,) * pad, self.alphas + (0,) * pad


def jacobi_to_moments(pair: JacobiPair1D, depth: int) -> MomentFunctional:
    """1-D moments from recurrence coefficients.

    m_k is the (0,0) entry of the k-th power of the truncated transfer matrix
    of size depth+1 (monic normalization: unit subdiagonal, alphas on the
    diagonal, omegas on the superdiagonal); rational inputs stay rational.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    omegas, alphas = pair.extended(depth)
    exact = pair.is_exact
    size = depth + 1
    zero = Fraction(0) if exact else 0.0
    t = [[zero] * size for _ in range(size)]
    for k in range(size):
        if k < depth:
            t[k][k] = alphas[k] if exact else float(alphas[k])
            t[k + 1][k] = Fraction(1) if exact else 1.0
            t[k][k + 1] = omegas[k] if exact else float(omegas[k])
    moments = []
    v = [zero] * size
    v[0] = Fraction(1) if exact else 1.0
    for _ in range(depth + 1):
        moments.append(v[0])
        v = [sum(t[i][j] * v[j] for j in range(size)) for i in range(size)]

    def compute(alpha):
        return moments[alpha[0]]

    return MomentFunctional(1, compute, depth, exact=exact, tag="jacobi")


def table_functional(dimension: int, entries: dict, depth: int) -> MomentFunctional:
    """Lookup-backed functional from an explicit moment table.

    Every multi-index of total degree <= depth must be present, and the
    zero-index entry must equal 1.
    """
    table = {tuple(k): v for k, v in entries.items()}
    missing = [a for a in monomials_up_to(dimension, depth) if a not in table]
    if missing:
        raise SpecFormatError(
            f"moment table is missing {len(missing)} entries within depth {depth}, "
            f"first missing: {missing[0]}"
        )
    zero_entry = table[(0,) * dimension]
    normalized = (
        zero_entry == 1 if is_rational(zero_entry) else abs(zero_entry - 1.0) <= 1e-12
    )
    if not normalized:
        raise SpecFormatError(f"moment table is not normalized: entry at 0 is {zero_entry}")
    exact = all(is_rational(v) for v in table.values())
    return MomentFunctional(dimension, table.__getitem__, depth, exact=exact, tag="table")

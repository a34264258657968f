"""Creation, preservation, and annihilation block operators on a gradation.

The degree slices of a gradation serve as levels of a finite-depth Fock
representation. Creation blocks are the canonical index shifts in candidate
coordinates; preservation and annihilation blocks are recovered from the Gram
matrices so that multiplication by each coordinate decomposes as
X_i = A_i^+ + A_i^0 + A_i^-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .errors import DepthExceededError, InternalConsistencyError
from .gradation import GradationBasis
from .polynomial import Polynomial, monomials_of_degree
from .scalars import Tolerances


def creation_matrix(dimension: int, i: int, n: int, dtype=float) -> np.ndarray:
    """Canonical shift block for coordinate i (0-based) from degree n to n+1.

    Column alpha has a single unit entry in the row of alpha + e_i.
    """
    cols = monomials_of_degree(dimension, n)
    rows = monomials_of_degree(dimension, n + 1)
    row_pos = {a: r for r, a in enumerate(rows)}
    out = np.zeros((len(rows), len(cols)), dtype=dtype)
    one = 1 if dtype == object else 1.0
    for c, alpha in enumerate(cols):
        shifted = tuple(e + (1 if k == i else 0) for k, e in enumerate(alpha))
        out[row_pos[shifted], c] = one
    return out


def gram_of(g: GradationBasis, n: int) -> np.ndarray:
    return g.level(n).gram


def omega_matrix(g: GradationBasis, n: int) -> np.ndarray:
    return g.level(n).omega()


def nonzero_spectrum(g: GradationBasis, n: int, *, tol: Tolerances | None = None) -> list:
    """Distinct nonzero eigenvalues of the degree-n form generator, ascending.

    The generator is similar to a symmetric matrix via the weight rescaling,
    so its spectrum is real; eigenvalues are computed in binary64 regardless
    of mode. Values closer than 1e-9 relative are merged.
    """
    tol = tol or g.tol
    lev = g.level(n)
    scale = np.array([1.0 / math.sqrt(float(w)) for w in lev.weights])
    sym = _linalg.to_float(lev.gram) * np.outer(scale, scale)
    evals = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    cut = _linalg.rank_cutoff(len(evals), float(np.max(np.abs(evals), initial=0.0)), tol.rank)
    kept = sorted(v for v in evals if abs(v) > cut)
    distinct: list = []
    for v in kept:
        if distinct and abs(v - distinct[-1][-1]) <= 1e-9 * max(1.0, abs(v)):
            distinct[-1].append(v)
        else:
            distinct.append([v])
    return [sum(c) / len(c) for c in distinct]


@dataclass
class FockData:
    """Block operators of the Fock representation up to a fixed depth.

    aplus[i][n] maps degree n to n+1 (n = 0..depth-1); azero[i][n] acts on
    degree n (n = 0..depth); aminus[i][n] maps degree n to n-1 (n = 1..depth,
    entry 0 is None). gradation is set when the blocks were assembled from a
    moment functional, None when they came from external data.
    """

    dimension: int
    depth: int
    exact: bool
    grams: list
    aplus: list
    azero: list
    aminus: list
    gradation: GradationBasis | None = None

    @property
    def tolerances(self) -> Tolerances:
        return self.gradation.tol if self.gradation is not None else Tolerances()


def _max_abs(mat) -> float:
    a = _linalg.to_float(mat)
    return float(np.max(np.abs(a))) if a.size else 0.0


def assemble_fock(g: GradationBasis, *, tol: Tolerances | None = None) -> FockData:
    """Assemble creation, preservation, and annihilation blocks from a gradation.

    Preservation blocks solve G_n A = M with M the coordinate-multiplication
    Gram; annihilation blocks solve G_{n-1} A = (A^+)^T G_n. Both solves use
    the range part of the Gram splitting, and the defining identities are
    re-checked afterwards (they must hold because the right-hand sides lie in
    the Gram range for moment-born data).

    Raises
    ------
    DepthExceededError
        If the functional does not reliably cover degree 2*depth + 2.
    InternalConsistencyError
        If a defining identity fails its tolerance after the solve.
    """
    tol = tol or g.tol
    depth = g.max_degree
    functional = g.functional
    if 2 * depth + 2 > functional.max_reliable_degree:
        raise DepthExceededError(
            f"fock assembly at depth {depth} needs moments to {2 * depth + 2}, "
            f"but only {functional.max_reliable_degree} are reliable"
        )
    d = g.dimension
    exact = g.exact
    dtype = object if exact else float
    grams = [g.level(n).gram for n in range(depth + 1)]

    aplus = [
        [creation_matrix(d, i, n, dtype=dtype) for n in range(depth)]
        for i in range(d)
    ]

    azero = []
    for i in range(d):
        xi = Polynomial.variable(d, i)
        per_level = []
        for n in range(depth + 1):
            lev = g.level(n)
            k = lev.dimension
            m = np.empty((k, k), dtype=dtype)
            for r in range(k):
                shifted = lev.candidates[r] * xi
                for c in range(r, k):
                    v = functional.expectation(shifted * lev.candidates[c])
                    m[r, c] = v
                    m[c, r] = v
            a = _linalg.pseudo_apply(lev.split, m)
            residual = _max_abs(grams[n] @ a - m)
            if residual > tol.adj * max(1.0, _max_abs(m)):
                raise InternalConsistencyError(
                    f"preservation solve failed at coordinate {i + 1}, degree {n}: "
                    f"residual {residual:.3e}"
                )
            per_level.append(a)
        azero.append(per_level)

    aminus = []
    for i in range(d):
        per_level: list = [None]
        for n in range(1, depth + 1):
            rhs = aplus[i][n - 1].T @ grams[n]
            a = _linalg.pseudo_apply(g.level(n - 1).split, rhs)
            residual = _max_abs(grams[n - 1] @ a - rhs)
            if residual > tol.adj * max(1.0, _max_abs(rhs)):
                raise InternalConsistencyError(
                    f"annihilation solve failed at coordinate {i + 1}, degree {n}: "
                    f"residual {residual:.3e}"
                )
            per_level.append(a)
        aminus.append(per_level)

    return FockData(
        dimension=d,
        depth=depth,
        exact=exact,
        grams=grams,
        aplus=aplus,
        azero=azero,
        aminus=aminus,
        gradation=g,
    )


def adjointness_residuals(fock: FockData) -> dict:
    """Max-entry residual of G_{n-1} A_i^- = (A_i^+)^T G_n, keyed by (i+1, n)."""
    out = {}
    for i in range(fock.dimension):
        for n in range(1, fock.depth + 1):
            lhs = fock.grams[n - 1] @ fock.aminus[i][n]
            rhs = fock.aplus[i][n - 1].T @ fock.grams[n]
            out[(i + 1, n)] = _max_abs(lhs - rhs) / max(1.0, _max_abs(rhs))
    return out


def azero_symmetry_residuals(fock: FockData) -> dict:
    """Max-entry asymmetry of G_n A_i^0, keyed by (i+1, n)."""
    out = {}
    for i in range(fock.dimension):
        for n in range(fock.depth + 1):
            s = fock.grams[n] @ fock.azero[i][n]
            out[(i + 1, n)] = _max_abs(s - s.T) / max(1.0, _max_abs(s))
    return out


def _seminorm_residual(cols: np.ndarray, gram: np.ndarray, rank_tol: float = 1e-10) -> float:
    """Largest Gram seminorm over the columns of a block.

    Exact blocks are measured in rational arithmetic, so a column lying in
    the kernel scores exactly zero. Float blocks are measured against the
    rank-retained eigenspace of the Gram matrix: eigendirections below
    rank_tol (relative) belong to the quotient kernel, and evaluating the
    raw quadratic form there would turn rounding noise of size eps into a
    sqrt(eps) artifact.
    """
    if cols.size == 0:
        return 0.0
    if cols.dtype == object and gram.dtype == object:
        quad = cols.T @ gram @ cols
        worst = max(quad[i, i] for i in range(quad.shape[0]))
        return math.sqrt(max(0.0, float(worst)))
    c = _linalg.to_float(cols)
    g = _linalg.to_float(gram)
    w, v = np.linalg.eigh(0.5 * (g + g.T))
    top = float(np.max(w, initial=0.0))
    if top <= 0.0:
        return 0.0
    keep = w > rank_tol * top
    if not np.any(keep):
        return 0.0
    proj = (v[:, keep] * np.sqrt(w[keep])).T @ c
    return float(math.sqrt(max(0.0, float(np.max(np.einsum("ij,ij->j", proj, proj))))))


@dataclass
class CommutationEntry:
    relation: str
    pair: tuple
    degree: int
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class CommutationReport:
    depth: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_residual(self) -> float:
        return max((e.residual for e in self.entries), default=0.0)

    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]


def check_commutation(fock: FockData, *, tol: Tolerances | None = None) -> CommutationReport:
    """Residuals of the three quantum decomposition commutation relations.

    For every coordinate pair j < k: the creation blocks must commute
    (checked up to degree depth-2), and the two mixed relations
    [A_j^+, A_k^0] + [A_j^0, A_k^+] = 0 and
    [A_j^+, A_k^-] + [A_j^0, A_k^0] + [A_j^-, A_k^+] = 0
    must vanish (checked up to degree depth-1). Residuals are measured as the
    largest target-level Gram seminorm over block columns, so components in
    the null directions of the functional do not register.
    """
    tol = tol or fock.tolerances
    n_max = fock.depth
    report = CommutationReport(depth=n_max)

    def ap(i, n):
        return fock.aplus[i][n]

    def az(i, n):
        return fock.azero[i][n]

    def am(i, n):
        # annihilation kills the vacuum level
        if n == 0:
            size = fock.grams[0].shape[0]
            return np.zeros((0, size), dtype=object if fock.exact else float)
        return fock.aminus[i][n]

    def record(relation, pair, n, block, target_level, parts):
        scale = max([1.0] + [_max_abs(p) for p in parts])
        residual = _seminorm_residual(block, fock.grams[target_level])
        report.entries.append(
            CommutationEntry(
                relation=relation,
                pair=pair,
                degree=n,
                residual=residual,
                tolerance=tol.comm * scale,
            )
        )

    for j in range(fock.dimension):
        for k in range(j + 1, fock.dimension):
            pair = (j + 1, k + 1)
            for n in range(n_max - 1):
                block = ap(j, n + 1) @ ap(k, n) - ap(k, n + 1) @ ap(j, n)
                record("CR1", pair, n, block, n + 2, [ap(j, n), ap(k, n + 1)])
            for n in range(n_max):
                block = (
                    ap(j, n) @ az(k, n)
                    - az(k, n + 1) @ ap(j, n)
                    + az(j, n + 1) @ ap(k, n)
                    - ap(k, n) @ az(j, n)
                )
                parts = [ap(j, n), ap(k, n), az(j, n + 1), az(k, n + 1)]
                record("CR2", pair, n, block, n + 1, parts)
            for n in range(n_max):
                if n == 0:
                    block = (
                        -am(k, n + 1) @ ap(j, n)
                        + az(j, n) @ az(k, n)
                        - az(k, n) @ az(j, n)
                        + am(j, n + 1) @ ap(k, n)
                    )
                else:
                    block = (
                        ap(j, n - 1) @ am(k, n)
                        - am(k, n + 1) @ ap(j, n)
                        + az(j, n) @ az(k, n)
                        - az(k, n) @ az(j, n)
                        + am(j, n + 1) @ ap(k, n)
                        - ap(k, n - 1) @ am(j, n)
                    )
                parts = [az(j, n), az(k, n), am(j, n + 1), am(k, n + 1)]
                record("CR3", pair, n, block, n, parts)
    return report


def apply_coordinate(fock: FockData, i: int, state: dict) -> dict:
    """One application of X_i = A_i^+ + A_i^0 + A_i^- to a level-indexed state."""
    out: dict = {}

    def accumulate(level, vec):
        if level in out:
            out[level] = out[level] + vec
        else:
            out[level] = vec

    for n, v in state.items():
        if n + 1 > fock.depth:
            raise DepthExceededError(
                f"word reaches degree {n + 1}, beyond built depth {fock.depth}"
            )
        accumulate(n + 1, fock.aplus[i][n] @ v)
        accumulate(n, fock.azero[i][n] @ v)
        if n >= 1:
            accumulate(n - 1, fock.aminus[i][n] @ v)
    return out


def vacuum_moment(fock: FockData, alpha):
    """Vacuum expectation of the coordinate word x^alpha.

    The word X_1^{a_1} ... X_d^{a_d} is applied to the vacuum rightmost
    factor first; the result is the vacuum coefficient of the final state.
    For moment-born data this reproduces the mixed moments.
    """
    alpha = tuple(alpha)
    if len(alpha) != fock.dimension:
        raise ValueError(
            f"multi-index {alpha} has length {len(alpha)}, expected {fock.dimension}"
        )
    if any(e < 0 for e in alpha):
        raise ValueError(f"multi-index {alpha} must be non-negative")
    if sum(alpha) > fock.depth:
        raise DepthExceededError(
            f"word of degree {sum(alpha)} exceeds built depth {fock.depth}"
        )
    one = 1 if fock.exact else 1.0
    state = {0: np.array([one], dtype=object if fock.exact else float)}
    for i in range(fock.dimension - 1, -1, -1):
        for _ in range(alpha[i]):
            state = apply_coordinate(fock, i, state)
    vac = state.get(0)
    if vac is None:
        return 0 if fock.exact else 0.0
    return vac[0]


def x_commutator_residual(fock: FockData, j: int, k: int, n: int) -> float:
    """Seminorm residual of [X_j, X_k] applied to the degree-n slice.

    Needs n <= depth - 2 so both applications stay within the built blocks.
    Coordinates are 0-based.
    """
    if n > fock.depth - 2:
        raise DepthExceededError(
            f"commutator at degree {n} needs depth {n + 2}, built {fock.depth}"
        )
    size = fock.grams[n].shape[0]
    worst = 0.0
    for col in range(size):
        e = np.zeros(size, dtype=object if fock.exact else float)
        e[col] = 1 if fock.exact else 1.0
        state = {n: e}
        jk = apply_coordinate(fock, j, apply_coordinate(fock, k, state))
        kj = apply_coordinate(fock, k, apply_coordinate(fock, j, state))
        total = 0.0
        for level in set(jk) | set(kj):
            zero = np.zeros(fock.grams[level].shape[0], dtype=object if fock.exact else float)
            diff = jk.get(level, zero) - kj.get(level, zero)
            total += _seminorm_residual(diff[:, None], fock.grams[level]) ** 2
        worst = max(worst, math.sqrt(total))
    return worst

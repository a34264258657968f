"""Favard-type validation and reconstruction for externally supplied blocks.

Given candidate Gram matrices (or form generators) and preservation blocks,
this module checks the conditions under which the data comes from a genuine
moment functional, and, when every Gram slice eventually degenerates to rank
zero, reconstructs the finitely supported representing measure by jointly
diagonalizing the coordinate operators on the non-degenerate quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _linalg
from .errors import (
    InconsistentMomentsError,
    NotFinitelySupportedError,
    SpecFormatError,
    ValidationFailedError,
)
from .fock import FockData, _seminorm_residual, check_commutation, creation_matrix
from .gradation import index_weight
from .measures import DiscreteMeasure
from .polynomial import monomials_of_degree, space_dimension
from .scalars import Tolerances, format_scalar, is_rational, parse_scalar


def _as_matrix(rows, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[v for v in row] for row in rows], dtype=object)
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


@dataclass
class FockInput:
    """Externally supplied Gram and preservation blocks up to a fixed depth.

    grams[n] is the symmetric candidate Gram at degree n (n = 0..depth);
    bzero[i][n] is the proposed preservation block of coordinate i+1 acting
    on degree n. Creation blocks are always the canonical index shifts.
    """

    dimension: int
    depth: int
    grams: list
    bzero: list

    def __post_init__(self):
        d, n_max = self.dimension, self.depth
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        if n_max < 0:
            raise ValueError(f"depth must be >= 0, got {n_max}")
        if len(self.grams) != n_max + 1:
            raise ValueError(f"expected {n_max + 1} Gram blocks, got {len(self.grams)}")
        if len(self.bzero) != d:
            raise ValueError(f"expected {d} preservation families, got {len(self.bzero)}")
        for n, g in enumerate(self.grams):
            k = space_dimension(d, n)
            if g.shape != (k, k):
                raise ValueError(f"Gram at degree {n} has shape {g.shape}, expected ({k}, {k})")
            asym = _linalg.to_float(g - g.T)
            scale = max(1.0, float(np.max(np.abs(_linalg.to_float(g)), initial=0.0)))
            if asym.size and float(np.max(np.abs(asym))) > 1e-10 * scale:
                raise ValueError(f"Gram at degree {n} is not symmetric")
        for i, per_level in enumerate(self.bzero):
            if len(per_level) != n_max + 1:
                raise ValueError(
                    f"coordinate {i + 1} has {len(per_level)} preservation blocks, "
                    f"expected {n_max + 1}"
                )
            for n, b in enumerate(per_level):
                k = space_dimension(d, n)
                if b.shape != (k, k):
                    raise ValueError(
                        f"preservation block at coordinate {i + 1}, degree {n} "
                        f"has shape {b.shape}, expected ({k}, {k})"
                    )

    @property
    def exact(self) -> bool:
        return all(
            is_rational(v) for g in self.grams for v in g.flat
        ) and all(is_rational(v) for per in self.bzero for b in per for v in b.flat)

    @classmethod
    def from_fock_data(cls, fock: FockData) -> "FockInput":
        return cls(
            dimension=fock.dimension,
            depth=fock.depth,
            grams=[g.copy() for g in fock.grams],
            bzero=[[b.copy() for b in per] for per in fock.azero],
        )

    @classmethod
    def from_omegas(cls, dimension: int, omegas: list, bzero: list = None) -> "FockInput":
        """Recover Grams from form generators: G_n = diag(w(alpha)) @ Omega_n."""
        grams = []
        for n, om in enumerate(omegas):
            weights = [index_weight(a) for a in monomials_of_degree(dimension, n)]
            exact = all(is_rational(v) for v in om.flat)
            g = om.copy()
            for j, w in enumerate(weights):
                g[j, :] = g[j, :] * (w if exact else float(w))
            grams.append(g)
        if bzero is None:
            bzero = [
                [
                    np.zeros((space_dimension(dimension, n),) * 2, dtype=object)
                    for n in range(len(omegas))
                ]
                for _ in range(dimension)
            ]
        return cls(dimension=dimension, depth=len(omegas) - 1, grams=grams, bzero=bzero)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "FockInput":
        try:
            d = int(payload["dimension"])
            n_max = int(payload["depth"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"bad fock payload header: {exc}") from None
        if "gram" in payload and "omega" in payload:
            raise SpecFormatError("give either 'gram' or 'omega' blocks, not both")
        key = "gram" if "gram" in payload else "omega" if "omega" in payload else None
        if key is None:
            raise SpecFormatError("fock payload needs 'gram' or 'omega' blocks")
        raw_blocks = payload[key]
        if not isinstance(raw_blocks, list) or len(raw_blocks) != n_max + 1:
            raise SpecFormatError(f"'{key}' must list {n_max + 1} blocks")
        blocks = []
        for n, rows in enumerate(raw_blocks):
            parsed = [[parse_scalar(v) for v in row] for row in rows]
            exact = all(is_rational(v) for row in parsed for v in row)
            mat = _as_matrix(parsed, exact)
            k = space_dimension(d, n)
            if mat.shape != (k, k):
                raise SpecFormatError(
                    f"'{key}' block at degree {n} has shape {mat.shape}, expected ({k}, {k})"
                )
            blocks.append(mat)
        raw_b = payload.get("bzero")
        if raw_b is None:
            # object dtype keeps an all-rational payload in exact mode
            bzero = [
                [
                    np.zeros((space_dimension(d, n),) * 2, dtype=object)
                    for n in range(n_max + 1)
                ]
                for _ in range(d)
            ]
        else:
            if not isinstance(raw_b, list) or len(raw_b) != d:
                raise SpecFormatError(f"'bzero' must list {d} coordinate families")
            bzero = []
            for per in raw_b:
                if not isinstance(per, list) or len(per) != n_max + 1:
                    raise SpecFormatError(f"each 'bzero' family must list {n_max + 1} blocks")
                mats = []
                for rows in per:
                    parsed = [[parse_scalar(v) for v in row] for row in rows]
                    exact = all(is_rational(v) for row in parsed for v in row)
                    mats.append(_as_matrix(parsed, exact))
                bzero.append(mats)
        try:
            if key == "omega":
                return cls.from_omegas(d, blocks, bzero)
            return cls(dimension=d, depth=n_max, grams=blocks, bzero=bzero)
        except ValueError as exc:
            raise SpecFormatError(str(exc)) from None

    def to_json_dict(self) -> dict:
        exact = self.exact

        def dump(mat):
            return [[format_scalar(v, exact) for v in row] for row in mat]

        return {
            "dimension": self.dimension,
            "depth": self.depth,
            "gram": [dump(g) for g in self.grams],
            "bzero": [[dump(b) for b in per] for per in self.bzero],
        }


@dataclass
class ValidationCheck:
    name: str
    detail: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class ValidationReport:
    depth: int
    checks: list = field(default_factory=list)
    fock: FockData | None = None

    def _group(self, names) -> bool:
        return all(c.passed for c in self.checks if c.name in names)

    @property
    def positive(self) -> bool:
        return self._group({"psd", "normalization"})

    @property
    def condition_i(self) -> bool:
        return self._group({"kernel_creation", "kernel_preservation"})

    @property
    def condition_ii(self) -> bool:
        return self._group({"adjointness", "CR1", "CR2", "CR3"})

    @property
    def hermiticity(self) -> bool:
        return self._group({"hermiticity"})

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        bad = self.failures()
        if not bad:
            return f"all {len(self.checks)} checks passed"
        worst = max(bad, key=lambda c: c.residual / max(c.tolerance, 1e-300))
        return (
            f"{len(bad)} of {len(self.checks)} checks failed; worst: {worst.name} "
            f"({worst.detail}) residual {worst.residual:.3e} > {worst.tolerance:.3e}"
        )


def _resolve_exact(fi: FockInput, mode: str) -> bool:
    if mode == "auto":
        return fi.exact
    if mode == "exact":
        if not fi.exact:
            raise ValueError("exact mode requires rational blocks")
        return True
    if mode == "float":
        return False
    raise ValueError(f"unknown mode {mode!r}")


def validate(
    fi: FockInput, *, mode: str = "auto", tol: Tolerances | None = None
) -> ValidationReport:
    """Check whether the blocks extend to a moment-functional representation.

    Checks, in order: Gram positive semidefiniteness and vacuum normalization;
    kernel compatibility (creation and preservation map Gram-kernel directions
    to seminorm-zero vectors); Gram-hermiticity of the preservation blocks;
    solvability of the annihilation blocks; and the three commutation
    relations of the quantum decomposition. The report carries one entry per
    check; `passed` is the overall verdict. If positivity already fails the
    dependent checks are skipped.
    """
    tol = tol or Tolerances()
    exact = _resolve_exact(fi, mode)
    d, n_max = fi.dimension, fi.depth
    grams = (
        [g.copy() for g in fi.grams]
        if exact
        else [_linalg.to_float(g) for g in fi.grams]
    )
    bzero = (
        [[b.copy() for b in per] for per in fi.bzero]
        if exact
        else [[_linalg.to_float(b) for b in per] for per in fi.bzero]
    )
    report = ValidationReport(depth=n_max)

    def add(name, detail, residual, tolerance):
        report.checks.append(
            ValidationCheck(name=name, detail=detail, residual=float(residual), tolerance=tolerance)
        )

    add("normalization", "vacuum Gram", abs(float(grams[0][0, 0]) - 1.0), tol.comm)
    psd_ok = True
    splits = []
    for n, g in enumerate(grams):
        gf = _linalg.to_float(g)
        evals = np.linalg.eigvalsh(0.5 * (gf + gf.T))
        lam_max = float(np.max(np.abs(evals), initial=0.0))
        residual = max(0.0, -float(evals[0])) if evals.size else 0.0
        add("psd", f"degree {n}", residual, tol.psd * max(1.0, lam_max))
        if not report.checks[-1].passed:
            psd_ok = False
    if not psd_ok or not report.checks[0].passed:
        return report

    for n, g in enumerate(grams):
        splits.append(_linalg.split_gram(g, exact=exact, tol_rank=tol.rank, tol_psd=tol.psd))

    dtype = object if exact else float
    aplus = [
        [creation_matrix(d, i, n, dtype=dtype) for n in range(n_max)] for i in range(d)
    ]

    # condition (i): kernel directions stay seminorm-zero under creation and
    # preservation
    for n in range(n_max + 1):
        null = splits[n].null
        if null.shape[1] == 0:
            continue
        for i in range(d):
            if n < n_max:
                residual = _seminorm_residual(aplus[i][n] @ null, grams[n + 1])
                scale = max(1.0, float(np.max(np.abs(_linalg.to_float(grams[n + 1])))))
                add("kernel_creation", f"coordinate {i + 1}, degree {n}", residual, tol.null * scale)
            residual = _seminorm_residual(bzero[i][n] @ null, grams[n])
            scale = max(1.0, float(np.max(np.abs(_linalg.to_float(grams[n])))))
            add("kernel_preservation", f"coordinate {i + 1}, degree {n}", residual, tol.null * scale)

    for i in range(d):
        for n in range(n_max + 1):
            s = grams[n] @ bzero[i][n]
            residual = float(np.max(np.abs(_linalg.to_float(s - s.T)), initial=0.0))
            scale = max(1.0, float(np.max(np.abs(_linalg.to_float(s)), initial=0.0)))
            add("hermiticity", f"coordinate {i + 1}, degree {n}", residual, tol.adj * scale)

    aminus = []
    for i in range(d):
        per: list = [None]
        for n in range(1, n_max + 1):
            rhs = aplus[i][n - 1].T @ grams[n]
            a = _linalg.pseudo_apply(splits[n - 1], rhs)
            residual = float(
                np.max(np.abs(_linalg.to_float(grams[n - 1] @ a - rhs)), initial=0.0)
            )
            scale = max(1.0, float(np.max(np.abs(_linalg.to_float(rhs)), initial=0.0)))
            add("adjointness", f"coordinate {i + 1}, degree {n}", residual, tol.adj * scale)
            per.append(a)
        aminus.append(per)

    fock = FockData(
        dimension=d,
        depth=n_max,
        exact=exact,
        grams=grams,
        aplus=aplus,
        azero=bzero,
        aminus=aminus,
    )
    for entry in check_commutation(fock, tol=tol).entries:
        add(
            entry.relation,
            f"pair {entry.pair}, degree {entry.degree}",
            entry.residual,
            entry.tolerance,
        )
    report.fock = fock
    return report


def _snap(value: float, tol: float = 1e-8, max_den: int = 64):
    fr = Fraction(value).limit_denominator(max_den)
    if abs(float(fr) - value) <= tol:
        return int(fr) if fr.denominator == 1 else fr
    return value


def reconstruct_discrete(
    fi: FockInput,
    *,
    seed: int = 0,
    mode: str = "auto",
    tol: Tolerances | None = None,
) -> DiscreteMeasure:
    """Reconstruct the finitely supported measure behind validated blocks.

    Requires some Gram slice of rank zero within the depth (otherwise the
    data does not certify finite support and NotFinitelySupportedError is
    raised). The coordinate operators are compressed to the orthonormal
    quotient of the non-degenerate slices and jointly diagonalized; atoms are
    read off the diagonals, weights off the squared vacuum row. Coordinates
    and weights within 1e-8 of a fraction with denominator <= 64 are snapped;
    the raw binary64 values are kept alongside.

    Raises
    ------
    ValidationFailedError
        If `validate` rejects the blocks.
    NotFinitelySupportedError
        If no Gram slice within the depth has rank zero.
    """
    tol = tol or Tolerances()
    report = validate(fi, mode=mode, tol=tol)
    if not report.passed:
        raise ValidationFailedError(f"blocks failed validation: {report.summary()}")
    fock = report.fock
    splits = [
        _linalg.split_gram(_linalg.to_float(g), exact=False, tol_rank=tol.rank, tol_psd=tol.psd)
        for g in fock.grams
    ]
    cutoff = None
    for n, split in enumerate(splits):
        if split.rank == 0:
            cutoff = n
            break
    if cutoff is None:
        raise NotFinitelySupportedError(
            f"no Gram slice of rank zero within depth {fi.depth}; "
            f"finite support is not certified"
        )

    qs = [_linalg.orthonormal_columns(splits[n]) for n in range(cutoff)]
    sizes = [q.shape[1] for q in qs]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    grams_f = [_linalg.to_float(g) for g in fock.grams]

    operators = []
    for i in range(fi.dimension):
        x = np.zeros((total, total))
        for n in range(cutoff):
            lo, hi = offsets[n], offsets[n + 1]
            b = qs[n].T @ grams_f[n] @ _linalg.to_float(fock.azero[i][n]) @ qs[n]
            x[lo:hi, lo:hi] = 0.5 * (b + b.T)
            if n + 1 < cutoff:
                lo2, hi2 = offsets[n + 1], offsets[n + 2]
                c = qs[n + 1].T @ grams_f[n + 1] @ _linalg.to_float(fock.aplus[i][n]) @ qs[n]
                x[lo2:hi2, lo:hi] = c
                x[lo:hi, lo2:hi2] = c.T
        operators.append(x)

    try:
        w, _method = _linalg.simultaneous_diagonalize(operators, seed=seed, tol=1e-8)
    except ArithmeticError as exc:
        raise ValidationFailedError(
            f"coordinate operators could not be jointly diagonalized: {exc}"
        ) from None

    found = []
    for j in range(total):
        v = w[:, j]
        coords = tuple(float(v @ op @ v) for op in operators)
        found.append((tuple(_snap(c) for c in coords), coords, float(w[0, j] ** 2)))
    # canonical order: snapped coordinates, so float jitter cannot flip ties
    found.sort(key=lambda t: tuple(float(c) for c in t[0]))
    atoms = tuple(snapped for snapped, _, _ in found)
    raw_atoms = tuple(coords for _, coords, _ in found)
    raw_weights = tuple(wt for _, _, wt in found)

    snapped_weights = tuple(_snap(wt) for wt in raw_weights)
    if all(is_rational(wt) for wt in snapped_weights) and sum(snapped_weights) == 1:
        weights = snapped_weights
    else:
        weights = raw_weights
    return DiscreteMeasure(
        atoms=atoms, weights=weights, raw_atoms=raw_atoms, raw_weights=raw_weights
    )


@dataclass
class ProductCheckResult:
    is_product: bool
    omegas: tuple
    etas: tuple
    max_residual: float
    failures: list


def diagonal_product_check(
    dtable: list, *, tol: Tolerances | None = None
) -> ProductCheckResult:
    """Decide whether a diagonal Gram table factors over the two coordinates.

    dtable[n][k] is the diagonal Gram entry at degree n with k first-coordinate
    factors (so dtable[n] has n+1 entries and dtable[0] == [1]). A table of a
    product functional must be d(n, k) = prod(omega_1..omega_k) *
    prod(eta_1..eta_{n-k}); the candidate coefficient sequences are read off
    the two pure-coordinate edges and the product form is then verified
    entrywise.
    """
    tol = tol or Tolerances()
    if not dtable or len(dtable[0]) != 1:
        raise ValueError("dtable must start with the single degree-0 entry")
    for n, row in enumerate(dtable):
        if len(row) != n + 1:
            raise ValueError(f"dtable row {n} has {len(row)} entries, expected {n + 1}")
        for v in row:
            if is_rational(v):
                if v < 0:
                    raise InconsistentMomentsError(f"negative diagonal entry {v} at degree {n}")
            elif v < -tol.psd:
                raise InconsistentMomentsError(f"negative diagonal entry {v} at degree {n}")
    if dtable[0][0] != 1:
        raise ValueError(f"degree-0 entry must be 1, got {dtable[0][0]}")

    exact = all(is_rational(v) for row in dtable for v in row)
    n_max = len(dtable) - 1

    def ratio(num, den):
        if den == 0:
            return None if num != 0 else 0
        return num / den if exact else float(num) / float(den)

    omegas, etas = [], []
    for k in range(1, n_max + 1):
        omegas.append(ratio(dtable[k][k], dtable[k - 1][k - 1]))
        etas.append(ratio(dtable[k][0], dtable[k - 1][0]))

    failures = []
    max_residual = 0.0
    if any(v is None for v in omegas + etas):
        # a zero edge entry followed by a nonzero one can never factor
        return ProductCheckResult(False, tuple(omegas), tuple(etas), math.inf, [("edge", 0, 0)])

    for n in range(n_max + 1):
        for k in range(n + 1):
            expected = math.prod(omegas[:k]) * math.prod(etas[: n - k]) if not exact else None
            if exact:
                expected = 1
                for v in omegas[:k]:
                    expected *= v
                for v in etas[: n - k]:
                    expected *= v
            actual = dtable[n][k]
            if exact:
                ok = actual == expected
                residual = 0.0 if ok else 1.0
            else:
                scale = max(1.0, abs(float(expected)))
                residual = abs(float(actual) - float(expected)) / scale
                ok = residual <= tol.comm
            max_residual = max(max_residual, residual)
            if not ok:
                failures.append((n, k, expected, actual))
    return ProductCheckResult(
        is_product=not failures,
        omegas=tuple(omegas),
        etas=tuple(etas),
        max_residual=max_residual,
        failures=failures,
    )


def grams_from_diagonal_table(dtable: list) -> list:
    """Diagonal Gram blocks (d = 2, graded lexicographic order) from a d-table."""
    exact = all(is_rational(v) for row in dtable for v in row)
    grams = []
    for n, row in enumerate(dtable):
        if len(row) != n + 1:
            raise ValueError(f"dtable row {n} has {len(row)} entries, expected {n + 1}")
        g = np.zeros((n + 1, n + 1), dtype=object if exact else float)
        for j in range(n + 1):
            # position j in graded-lex order has n - j first-coordinate factors
            g[j, j] = row[n - j]
        grams.append(g)
    return grams


def diagonal_table_from_grams(grams: list, *, tol: Tolerances | None = None) -> list:
    """Inverse of grams_from_diagonal_table; rejects non-diagonal blocks."""
    tol = tol or Tolerances()
    dtable = []
    for n, g in enumerate(grams):
        if g.shape != (n + 1, n + 1):
            raise ValueError(f"Gram at degree {n} has shape {g.shape}, expected 2 variables")
        gf = _linalg.to_float(g)
        off = gf - np.diag(np.diag(gf))
        scale = max(1.0, float(np.max(np.abs(gf), initial=0.0)))
        if off.size and float(np.max(np.abs(off))) > tol.comm * scale:
            raise ValueError(f"Gram at degree {n} is not diagonal")
        dtable.append([g[n - k, n - k] for k in range(n + 1)])
    return dtable


@dataclass
class SelfAdjointnessReport:
    degrees: list
    bounds: list
    exponent: float | None
    coefficient: float | None
    divergent: bool | None


def self_adjointness_bound(
    fock: FockData, degrees=None, *, tol: Tolerances | None = None
) -> SelfAdjointnessReport:
    """Growth certificate for essential self-adjointness of the coordinates.

    For each degree n the largest singular value a_n of the orthonormalized
    two-step raising part (creation twice, and creation mixed with
    preservation) is computed over all coordinates; a_n bounds how fast the
    coordinate operators can push mass upward. A power-law fit
    log a_n ~ log C + p log n is reported, and `divergent` is True when the
    fitted growth keeps sum a_n^(-1/2) divergent (p <= 2), which is
    consistent with essential self-adjointness; nothing here constitutes a
    proof. Degenerate data (all a_n zero, finite support) reports divergent
    True with no exponent.
    """
    tol = tol or Tolerances()
    n_max = fock.depth
    if degrees is None:
        degrees = list(range(1, n_max - 1))
    degrees = sorted(set(int(n) for n in degrees))
    if not degrees:
        raise ValueError("no degrees to bound")
    if degrees[0] < 1 or degrees[-1] > n_max - 2:
        raise ValueError(
            f"degrees must lie in 1..{n_max - 2} so both raising steps stay in depth"
        )

    splits = [
        _linalg.split_gram(_linalg.to_float(g), exact=False, tol_rank=tol.rank, tol_psd=tol.psd)
        for g in fock.grams
    ]
    qs = [_linalg.orthonormal_columns(s) for s in splits]
    grams_f = [_linalg.to_float(g) for g in fock.grams]

    def lift(mat, target, source):
        return qs[target].T @ grams_f[target] @ _linalg.to_float(mat) @ qs[source]

    bounds = []
    for n in degrees:
        worst = 0.0
        for i in range(fock.dimension):
            ap = lambda m: fock.aplus[i][m]
            az = lambda m: fock.azero[i][m]
            upper_left = lift(ap(n) @ ap(n - 1), n + 1, n - 1)
            upper_right = lift(ap(n) @ az(n) + az(n + 1) @ ap(n), n + 1, n)
            lower_right = lift(ap(n + 1) @ ap(n), n + 2, n)
            block = np.block(
                [
                    [upper_left, upper_right],
                    [np.zeros((lower_right.shape[0], upper_left.shape[1])), lower_right],
                ]
            )
            if block.size:
                worst = max(worst, float(np.linalg.norm(block, 2)))
        bounds.append(worst)

    points = [(n, a) for n, a in zip(degrees, bounds) if a > 0]
    if len(points) < 2:
        return SelfAdjointnessReport(degrees, bounds, None, None, True)
    logs_n = np.log([n for n, _ in points])
    logs_a = np.log([a for _, a in points])
    p, log_c = np.polyfit(logs_n, logs_a, 1)
    return SelfAdjointnessReport(
        degrees=degrees,
        bounds=bounds,
        exponent=float(p),
        coefficient=float(math.exp(log_c)),
        divergent=bool(p <= 2 + 1e-9),
    )

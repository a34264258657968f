import math
from fractions import Fraction

import numpy as np
import pytest

import mvop


def test_creation_matrix_structure():
    a1 = mvop.creation_matrix(2, 0, 1)
    a2 = mvop.creation_matrix(2, 1, 1)
    # degree-1 order (x, y); degree-2 order (x^2, xy, y^2)
    assert a1.tolist() == [[1, 0], [0, 1], [0, 0]]
    assert a2.tolist() == [[0, 0], [1, 0], [0, 1]]
    for d, i, n in [(2, 0, 3), (3, 2, 2)]:
        mat = mvop.creation_matrix(d, i, n)
        assert mat.shape == (
            mvop.space_dimension(d, n + 1),
            mvop.space_dimension(d, n),
        )
        assert np.all(mat.sum(axis=0) == 1)


def test_circle_spectra(circle_gradation):
    assert mvop.nonzero_spectrum(circle_gradation, 0) == pytest.approx([1.0])
    for n, want in [(1, 0.5), (2, 0.25), (3, 0.125)]:
        spec = mvop.nonzero_spectrum(circle_gradation, n)
        assert len(spec) == 1
        assert spec[0] == pytest.approx(want, abs=1e-10)


def test_assemble_fock_shapes(circle_fock):
    f = circle_fock
    assert f.depth == 8
    assert f.aminus[0][0] is None
    for i in range(2):
        for n in range(f.depth):
            rows, cols = f.aplus[i][n].shape
            assert (rows, cols) == (n + 2, n + 1)
        for n in range(1, f.depth + 1):
            rows, cols = f.aminus[i][n].shape
            assert (rows, cols) == (n, n + 1)


def test_adjointness_residuals_vanish(circle_fock):
    res = mvop.adjointness_residuals(circle_fock)
    assert res
    assert max(res.values()) <= 1e-12


def test_azero_symmetry_residuals_vanish(circle_fock):
    res = mvop.azero_symmetry_residuals(circle_fock)
    assert max(res.values()) <= 1e-12


def test_symmetric_measures_have_zero_preservation(circle_fock, square_gradation):
    for i in range(2):
        for block in circle_fock.azero[i]:
            assert np.max(np.abs(block)) <= 1e-12
    square_fock = mvop.assemble_fock(square_gradation)
    for i in range(2):
        for block in square_fock.azero[i]:
            assert all(v == 0 for v in block.flat)


def test_commutation_passes_on_circle(circle_fock):
    report = mvop.check_commutation(circle_fock)
    assert report.passed
    assert report.max_residual <= 1e-10
    assert {e.relation for e in report.entries} == {"CR1", "CR2", "CR3"}
    assert all(e.pair == (1, 2) for e in report.entries)
    cr1_degrees = [e.degree for e in report.entries if e.relation == "CR1"]
    cr3_degrees = [e.degree for e in report.entries if e.relation == "CR3"]
    assert max(cr1_degrees) == circle_fock.depth - 2
    assert max(cr3_degrees) == circle_fock.depth - 1
    assert report.failures() == []


def test_commutation_passes_exact(square_gradation, skew_fn):
    square_fock = mvop.assemble_fock(square_gradation)
    report = mvop.check_commutation(square_fock)
    assert report.passed
    assert report.max_residual == 0
    skew_fock = mvop.assemble_fock(mvop.build_gradations(skew_fn, 4))
    assert mvop.check_commutation(skew_fock).passed


def test_perturbed_preservation_fails_commutation(square_gradation):
    fock = mvop.assemble_fock(square_gradation)
    fock.azero[0][1][0, 1] += 0.001
    report = mvop.check_commutation(fock)
    assert not report.passed
    assert any(e.relation in ("CR2", "CR3") for e in report.failures())


def test_vacuum_moment_circle(circle_fock, circle):
    vacuum = mvop.vacuum_moment(circle_fock, (2, 2))
    assert vacuum == pytest.approx(0.125, abs=1e-12)
    for a in range(5):
        for b in range(5 - a):
            got = mvop.vacuum_moment(circle_fock, (a, b))
            assert got == pytest.approx(circle.moment((a, b)), abs=1e-9)


def test_vacuum_moment_exact(square_gradation, square_fn):
    fock = mvop.assemble_fock(square_gradation)
    for a in range(4):
        for b in range(4 - a):
            assert mvop.vacuum_moment(fock, (a, b)) == square_fn.moment((a, b))


def test_vacuum_moment_depth_guard(circle_fock):
    with pytest.raises(mvop.DepthExceededError):
        mvop.vacuum_moment(circle_fock, (9, 0))


def test_apply_coordinate_moves_levels(circle_fock):
    state = {0: np.array([1.0])}
    out = mvop.apply_coordinate(circle_fock, 0, state)
    assert set(out) <= {0, 1}
    assert np.allclose(out[1], [1.0, 0.0])
    top = {circle_fock.depth: np.ones(circle_fock.depth + 1)}
    with pytest.raises(mvop.DepthExceededError):
        mvop.apply_coordinate(circle_fock, 0, top)


def test_spectrum_invariant_under_coordinate_swap(skew_fn):
    swapped = mvop.discrete_functional(
        mvop.DiscreteMeasure(
            atoms=((0, 2), (1, 1), (0, 0), (-1, 1)),
            weights=(Fraction(1, 4),) * 4,
        )
    )
    g1 = mvop.build_gradations(skew_fn, 3)
    g2 = mvop.build_gradations(swapped, 3)
    for n in range(4):
        s1 = mvop.nonzero_spectrum(g1, n)
        s2 = mvop.nonzero_spectrum(g2, n)
        assert s1 == pytest.approx(s2, abs=1e-9)


def test_x_commutator_residual(circle_fock):
    for n in range(circle_fock.depth - 1):
        assert mvop.x_commutator_residual(circle_fock, 0, 1, n) <= 1e-10
    with pytest.raises(mvop.DepthExceededError):
        mvop.x_commutator_residual(circle_fock, 0, 1, circle_fock.depth - 1)


def test_gram_accessors(circle_gradation):
    g2 = mvop.gram_of(circle_gradation, 2)
    o2 = mvop.omega_matrix(circle_gradation, 2)
    assert g2.shape == (3, 3)
    assert o2[1, 1] == pytest.approx(2.0 * g2[1, 1])


def test_assemble_depth_guard(circle):
    g = mvop.build_gradations(circle, 8)
    assert mvop.assemble_fock(g).depth == 8
    g9 = mvop.build_gradations(circle, 9)
    with pytest.raises(mvop.DepthExceededError):
        mvop.assemble_fock(g9)

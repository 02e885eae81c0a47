import dataclasses

import pytest
from mpmath import mp

from polyrho import content, geometry, moments
from polyrho.errors import AreaNotNormalized, GramNotPD, InsufficientMoments


def test_build_gram_layout(square):
    t = moments.moment_table(square, 8)
    g = content.build_gram(t, 3)
    assert g.n == 3
    assert len(g.matrix) == 4 and all(len(row) == 4 for row in g.matrix)
    with mp.workprec(300):
        for j in range(4):
            for k in range(4):
                assert g.matrix[j][k] == t.c(k, j)
        assert g.rhs[2] == t.c(0, 3)
        assert g.target_norm == t.c(1, 1).real


def test_build_gram_needs_enough_moments(square):
    t = moments.moment_table(square, 6)
    with pytest.raises(InsufficientMoments):
        content.build_gram(t, 3)  # needs degree 2N+2 = 8


def test_square_rho1_is_one_sixth(square):
    r = content.rho_n(square, 1)
    with mp.workprec(300):
        assert abs(r.value - mp.mpf(1) / 6) < mp.mpf("1e-70")
    assert r.method == content.METHOD_CHOLESKY
    assert r.n == 1
    assert r.precision_bits == moments.precision_for_degree(1)


def test_dual_paths_agree(any_polygon):
    n = 8
    prec = moments.precision_for_degree(n)
    table = moments.moment_table(any_polygon, 2 * n + 2, prec)
    direct = content.rho_n(any_polygon, n, prec, table=table)
    telescoped, basis, partials = content.rho_n_telescoping(
        any_polygon, n, prec, table=table)
    with mp.workprec(prec + 16):
        tol = mp.mpf(2) ** (-(prec // 4))
        assert abs(direct.value - telescoped.value) <= tol * (1 + abs(direct.value))
        assert len(partials) == n + 1
        assert partials[-1] == telescoped.value
        # partial sequence is the value at every lower degree
        for k in (0, 3, 5):
            lower = content.rho_n(any_polygon, k, prec, table=table)
            assert abs(partials[k] - lower.value) <= tol * (1 + abs(lower.value))


def test_partials_non_increasing(any_polygon):
    result, _, partials = content.rho_n_telescoping(any_polygon, 10)
    with mp.workprec(result.precision_bits + 16):
        slack = mp.mpf(2) ** -120
        for k in range(len(partials) - 1):
            assert partials[k + 1] <= partials[k] + slack


def test_orthonormality_residual(any_polygon):
    n = 6
    prec = moments.precision_for_degree(n)
    table = moments.moment_table(any_polygon, 2 * n + 2, prec)
    _, basis, _ = content.rho_n_telescoping(any_polygon, n, prec, table=table)
    resid = content.orthonormality_residual(basis, table)
    assert resid <= mp.mpf(2) ** (-(prec // 4))


def test_rho1_closed_matches_gram(any_polygon):
    closed = content.rho1_closed(any_polygon)
    direct = content.rho_n(any_polygon, 1)
    with mp.workprec(300):
        assert abs(closed - direct.value) <= mp.mpf("1e-60") * (1 + abs(closed))


def test_rho1_closed_ignores_position(triangle):
    base = content.rho1_closed(triangle)
    moved = content.rho1_closed(geometry.translate(triangle, (7, -4)))
    with mp.workprec(300):
        assert abs(base - moved) <= mp.mpf("1e-55") * (1 + abs(base))


def test_rho2_closed_matches_gram(pentagon):
    closed = content.rho2_closed(pentagon)
    direct = content.rho_n(pentagon, 2)
    with mp.workprec(300):
        assert abs(closed - direct.value) <= mp.mpf("1e-60") * (1 + abs(closed))


def test_rho2_closed_requires_unit_area(triangle):
    # the scalene fixture has area 0.4
    with pytest.raises(AreaNotNormalized):
        content.rho2_closed(triangle)
    val = content.rho2_closed(geometry.normalize(triangle))
    assert val > 0


def test_scaling_law(triangle):
    n = 3
    base = content.rho_n(triangle, n).value
    scaled = content.rho_n(geometry.scale(triangle, 1.75), n).value
    with mp.workprec(300):
        r4 = mp.mpf("1.75") ** 4
        assert abs(scaled - r4 * base) <= mp.mpf("1e-60") * (1 + abs(scaled))


def test_rigid_motion_invariance(pentagon):
    n = 4
    base = content.rho_n(pentagon, n).value
    rotated = content.rho_n(geometry.rotate(pentagon, 0.9), n).value
    moved = content.rho_n(geometry.translate(pentagon, (-2, 5)), n).value
    with mp.workprec(300):
        assert abs(rotated - base) <= mp.mpf("1e-60") * (1 + abs(base))
        assert abs(moved - base) <= mp.mpf("1e-60") * (1 + abs(base))


def test_gram_not_pd_on_tampered_table(square):
    t = moments.moment_table(square, 6)
    bad = dict(t.complex_entries)
    with mp.workprec(300):
        bad[(1, 1)] = mp.mpc(-1)  # breaks positive definiteness
    tampered = dataclasses.replace(t, complex_entries=bad)
    with pytest.raises(GramNotPD):
        content.rho_n(square, 2, table=tampered)
    with pytest.raises(GramNotPD):
        content.rho_n_telescoping(square, 2, table=tampered)


def test_degree_zero(square):
    # best constant approximation of conj(z); for a centered shape the
    # projection is zero and rho_0 equals the second moment
    r = content.rho_n(square, 0)
    with mp.workprec(300):
        assert abs(r.value - mp.mpf(1) / 6) < mp.mpf("1e-70")
    with pytest.raises(ValueError):
        content.rho_n(square, -1)


def test_explicit_precision_respected(square):
    r = content.rho_n(square, 2, precision_bits=512)
    assert r.precision_bits == 512
    t, _, _ = content.rho_n_telescoping(square, 2, precision_bits=512)
    assert t.precision_bits == 512

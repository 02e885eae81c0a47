import dataclasses
import json

import pytest
from mpmath import mp

from polyrho import geometry, moments
from polyrho.errors import InsufficientMoments, PrecisionTooLow


def test_low_order_square_moments(square):
    t = moments.moment_table(square, 4)
    with mp.workprec(300):
        assert abs(t.c(0, 0) - 1) < mp.mpf("1e-70")
        # integral of |z|^2 = integral of x^2 + y^2 = 1/12 + 1/12
        assert abs(t.c(1, 1) - mp.mpf(1) / 6) < mp.mpf("1e-70")
        assert abs(t.c(1, 0)) < mp.mpf("1e-70")
        assert abs(t.c(2, 0)) < mp.mpf("1e-70")  # I20 = I02 and I11 = 0
        assert abs(t.real(2, 0) - mp.mpf(1) / 12) < mp.mpf("1e-70")
        assert abs(t.real(1, 1)) < mp.mpf("1e-70")


def test_real_moments_match_area_and_centroid(triangle):
    t = moments.moment_table(triangle, 3)
    ar = geometry.area(triangle)
    cx, cy = geometry.centroid(triangle)
    with mp.workprec(300):
        assert abs(t.real(0, 0) - ar) < mp.mpf("1e-70")
        assert abs(t.real(1, 0) - ar * cx) < mp.mpf("1e-70")
        assert abs(t.real(0, 1) - ar * cy) < mp.mpf("1e-70")


def test_single_entry_matches_table(any_polygon):
    t = moments.moment_table(any_polygon, 6)
    with mp.workprec(300):
        for m, n in ((0, 3), (2, 2), (4, 1), (3, 0)):
            assert abs(moments.complex_moment(any_polygon, m, n) - t.c(m, n)) \
                < mp.mpf("1e-70")
        for m, n in ((1, 2), (5, 0), (0, 6)):
            assert abs(moments.real_moment(any_polygon, m, n) - t.real(m, n)) \
                < mp.mpf("1e-70")


def test_hermitian_symmetry_is_exact(triangle):
    t = moments.moment_table(triangle, 7)
    with mp.workprec(t.precision_bits + 16):
        for (m, n), val in t.complex_entries.items():
            assert t.c(n, m) == mp.conj(val)
        for m in range(4):
            assert t.c(m, m).imag == 0


def test_missing_entry_raises(square):
    t = moments.moment_table(square, 4)
    with pytest.raises(InsufficientMoments):
        t.c(3, 2)
    with pytest.raises(InsufficientMoments):
        t.real(5, 0)


def test_cross_check_residual_small(any_polygon):
    t = moments.moment_table(any_polygon, 8)
    assert moments.cross_check(t) < mp.mpf(2) ** (-t.precision_bits + 20)


def test_cross_check_flags_tampered_table(square):
    t = moments.moment_table(square, 6)
    bad_real = dict(t.real_entries)
    with mp.workprec(300):
        bad_real[(2, 2)] = bad_real[(2, 2)] + mp.mpf("1e-30")
    tampered = dataclasses.replace(t, real_entries=bad_real)
    assert moments.cross_check(tampered) > mp.mpf("1e-32")


def test_doubling_precision_regression(any_polygon):
    # recomputing at doubled precision moves no entry by more than the
    # stated-accuracy bound of the coarser table
    prec = 128
    t1 = moments.moment_table(any_polygon, 8, prec)
    t2 = moments.moment_table(any_polygon, 8, 2 * prec)
    with mp.workprec(2 * prec + 16):
        bound = mp.mpf(2) ** (-prec // 2)
        for key, v1 in t1.complex_entries.items():
            assert abs(v1 - t2.complex_entries[key]) <= bound * (1 + abs(v1))
        for key, v1 in t1.real_entries.items():
            assert abs(v1 - t2.real_entries[key]) <= bound * (1 + abs(v1))


def test_validation_errors(square):
    with pytest.raises(PrecisionTooLow):
        moments.moment_table(square, 4, 32)
    with pytest.raises(PrecisionTooLow):
        moments.complex_moment(square, 1, 1, 48)
    with pytest.raises(ValueError):
        moments.moment_table(square, 1)
    with pytest.raises(ValueError):
        moments.complex_moment(square, -1, 2)
    with pytest.raises(ValueError):
        moments.real_moment(square, 0, -3)


def test_precision_policy():
    assert moments.precision_for_degree(0) == moments.DEFAULT_PRECISION_BITS
    assert moments.precision_for_degree(33) == 24 * 33 + 64
    degrees = range(0, 40)
    vals = [moments.precision_for_degree(n) for n in degrees]
    assert vals == sorted(vals)


def test_cache_round_trip_is_exact(tmp_path, pentagon):
    t = moments.moment_table(pentagon, 7, 320)
    path = tmp_path / "table.json"
    moments.save_table(t, path)
    back = moments.load_table(path)
    assert back.fingerprint == t.fingerprint
    assert back.maxdeg == t.maxdeg
    assert back.precision_bits == t.precision_bits
    assert set(back.complex_entries) == set(t.complex_entries)
    with mp.workprec(t.precision_bits + 16):
        for key, val in t.complex_entries.items():
            assert back.complex_entries[key] == val
        for key, val in t.real_entries.items():
            assert back.real_entries[key] == val


def test_cache_rejects_unknown_version(tmp_path, square):
    t = moments.moment_table(square, 4)
    path = tmp_path / "table.json"
    moments.save_table(t, path)
    doc = json.loads(path.read_text())
    doc["version"] = 999
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError):
        moments.load_table(path)


def test_table_fingerprint_depends_on_polygon_and_precision(square, triangle):
    assert moments.table_fingerprint(square, 256) != moments.table_fingerprint(triangle, 256)
    assert moments.table_fingerprint(square, 256) != moments.table_fingerprint(square, 320)
    assert moments.moment_table(square, 4).fingerprint == \
        moments.table_fingerprint(square, moments.DEFAULT_PRECISION_BITS)

"""Boundary-integral moments of simple polygons.

c[m][n] = integral of z^m conj(z)^n dA over the polygon and I[m][n] = integral
of x^m y^n dx dy.  Green's theorem turns both into per-edge integrals of
polynomials in the edge parameter, which are expanded binomially and summed
termwise, so every entry is exact up to roundoff at the working precision.
Working precision carries maxdeg + 32 guard bits above the requested
precision because the binomial expansion can cancel up to ~maxdeg bits.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from math import comb

from mpmath import mp

from . import geometry
from .errors import InsufficientMoments, PrecisionTooLow

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64
CACHE_FORMAT_VERSION = 1


def precision_for_degree(n: int) -> int:
    """Precision serving a degree-n content computation.  The monomial Gram
    condition number grows roughly exponentially in n; the doubling regression
    test guards this policy."""
    return max(DEFAULT_PRECISION_BITS, 24 * n + 64)


def _check_precision(precision_bits: int) -> None:
    if precision_bits < MIN_PRECISION_BITS:
        raise PrecisionTooLow(
            f"precision_bits must be >= {MIN_PRECISION_BITS}, got {precision_bits}")


def table_fingerprint(p: geometry.Polygon, precision_bits: int) -> str:
    h = hashlib.sha256()
    h.update(geometry.fingerprint(p).encode())
    h.update(str(precision_bits).encode())
    return h.hexdigest()[:16]


@dataclass
class MomentTable:
    """All complex and real moments of one polygon up to total degree maxdeg.

    Treated as immutable once built; safe to share across workers.
    """

    fingerprint: str
    maxdeg: int
    precision_bits: int
    complex_entries: dict
    real_entries: dict

    def c(self, m: int, n: int):
        try:
            return self.complex_entries[(m, n)]
        except KeyError:
            raise InsufficientMoments(
                f"c[{m}][{n}] not in table (maxdeg {self.maxdeg})") from None

    def real(self, m: int, n: int):
        try:
            return self.real_entries[(m, n)]
        except KeyError:
            raise InsufficientMoments(
                f"I[{m}][{n}] not in table (maxdeg {self.maxdeg})") from None


def _edge_complex(verts, i):
    x0, y0 = verts[i]
    x1, y1 = verts[(i + 1) % len(verts)]
    v = mp.mpc(x0, y0)
    return v, mp.mpc(x1, y1) - v


def _powers(base, count):
    out = [base * 0 + 1]
    for _ in range(count):
        out.append(out[-1] * base)
    return out


def complex_moment(p: geometry.Polygon, m: int, n: int,
                   precision_bits: int = DEFAULT_PRECISION_BITS):
    """Single entry c[m][n]; for many entries build a moment_table instead."""
    _check_precision(precision_bits)
    if m < 0 or n < 0:
        raise ValueError("moment orders must be nonnegative")
    with mp.workprec(precision_bits + m + n + 32):
        acc = mp.mpc(0)
        for i in range(len(p.vertices)):
            v, d = _edge_complex(p.vertices, i)
            cv, cd = mp.conj(v), mp.conj(d)
            vp = _powers(v, m)
            dp = _powers(d, m)
            cvp = _powers(cv, n + 1)
            cdp = _powers(cd, n + 1)
            s = mp.mpc(0)
            for j in range(m + 1):
                aj = comb(m, j) * vp[m - j] * dp[j]
                t = mp.mpc(0)
                for k in range(n + 2):
                    t += comb(n + 1, k) * cvp[n + 1 - k] * cdp[k] / (j + k + 1)
                s += aj * t
            acc += d * s
        val = acc / (mp.mpc(0, 2) * (n + 1))
        if m == n:
            val = mp.mpc(val.real)  # diagonal entries are squared norms, real
    with mp.workprec(precision_bits):
        return +val


def real_moment(p: geometry.Polygon, m: int, n: int,
                precision_bits: int = DEFAULT_PRECISION_BITS):
    """Single entry I[m][n] via the boundary form -(1/(n+1)) closed-integral of
    x^m y^(n+1) dx."""
    _check_precision(precision_bits)
    if m < 0 or n < 0:
        raise ValueError("moment orders must be nonnegative")
    with mp.workprec(precision_bits + m + n + 32):
        acc = mp.mpf(0)
        verts = p.vertices
        for i in range(len(verts)):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % len(verts)]
            dx, dy = x1 - x0, y1 - y0
            xp = _powers(x0, m)
            dxp = _powers(dx, m)
            yp = _powers(y0, n + 1)
            dyp = _powers(dy, n + 1)
            s = mp.mpf(0)
            for j in range(m + 1):
                aj = comb(m, j) * xp[m - j] * dxp[j]
                t = mp.mpf(0)
                for k in range(n + 2):
                    t += comb(n + 1, k) * yp[n + 1 - k] * dyp[k] / (j + k + 1)
                s += aj * t
            acc += dx * s
        val = -acc / (n + 1)
    with mp.workprec(precision_bits):
        return +val


def moment_table(p: geometry.Polygon, maxdeg: int,
                 precision_bits: int = DEFAULT_PRECISION_BITS) -> MomentTable:
    """All c[m][n] and I[m][n] with m + n <= maxdeg.

    Complex entries are computed for m >= n and filled by conjugation, so
    Hermitian symmetry holds exactly.  Per edge, the inner sums over the
    conjugate factor are precomputed once per n and reused for every m, which
    makes the table roughly cubic rather than quartic in maxdeg.
    """
    if maxdeg < 2:
        raise ValueError(f"maxdeg must be >= 2, got {maxdeg}")
    _check_precision(precision_bits)
    verts = p.vertices
    nv = len(verts)
    binom = [[comb(q, j) for j in range(q + 1)] for q in range(maxdeg + 2)]
    with mp.workprec(precision_bits + maxdeg + 32):
        inv = [mp.mpf(0)] + [mp.mpf(1) / q for q in range(1, 2 * maxdeg + 5)]

        acc_c = {}
        for m in range(maxdeg + 1):
            for n in range(min(m, maxdeg - m) + 1):
                acc_c[(m, n)] = mp.mpc(0)
        for i in range(nv):
            v, d = _edge_complex(verts, i)
            cv, cd = mp.conj(v), mp.conj(d)
            vp = _powers(v, maxdeg + 1)
            dp = _powers(d, maxdeg + 1)
            cvp = _powers(cv, maxdeg + 1)
            cdp = _powers(cd, maxdeg + 1)
            arows = [[binom[m][j] * vp[m - j] * dp[j] for j in range(m + 1)]
                     for m in range(maxdeg + 1)]
            brows = [[binom[q][k] * cvp[q - k] * cdp[k] for k in range(q + 1)]
                     for q in range(maxdeg + 2)]
            # inner[n][j] = sum_k brows[n+1][k] / (j+k+1)
            inner = []
            for n in range(maxdeg + 1):
                bn = brows[n + 1]
                row = []
                for j in range(maxdeg - n + 1):
                    t = mp.mpc(0)
                    for k, bk in enumerate(bn):
                        t += bk * inv[j + k + 1]
                    row.append(t)
                inner.append(row)
            for m in range(maxdeg + 1):
                am = arows[m]
                for n in range(min(m, maxdeg - m) + 1):
                    row = inner[n]
                    s = mp.mpc(0)
                    for j in range(m + 1):
                        s += am[j] * row[j]
                    acc_c[(m, n)] += d * s

        acc_r = {}
        for m in range(maxdeg + 1):
            for n in range(maxdeg - m + 1):
                acc_r[(m, n)] = mp.mpf(0)
        for i in range(nv):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % nv]
            dx, dy = x1 - x0, y1 - y0
            xp = _powers(x0, maxdeg + 1)
            dxp = _powers(dx, maxdeg + 1)
            yp = _powers(y0, maxdeg + 1)
            dyp = _powers(dy, maxdeg + 1)
            arows = [[binom[m][j] * xp[m - j] * dxp[j] for j in range(m + 1)]
                     for m in range(maxdeg + 1)]
            brows = [[binom[q][k] * yp[q - k] * dyp[k] for k in range(q + 1)]
                     for q in range(maxdeg + 2)]
            inner = []
            for n in range(maxdeg + 1):
                bn = brows[n + 1]
                row = []
                for j in range(maxdeg - n + 1):
                    t = mp.mpf(0)
                    for k, bk in enumerate(bn):
                        t += bk * inv[j + k + 1]
                    row.append(t)
                inner.append(row)
            for m in range(maxdeg + 1):
                am = arows[m]
                for n in range(maxdeg - m + 1):
                    row = inner[n]
                    s = mp.mpf(0)
                    for j in range(m + 1):
                        s += am[j] * row[j]
                    acc_r[(m, n)] += dx * s

    complex_entries = {}
    real_entries = {}
    with mp.workprec(precision_bits):
        for (m, n), val in acc_c.items():
            c = +(val / (mp.mpc(0, 2) * (n + 1)))
            if m == n:
                # c[m][m] is a squared norm; dropping the roundoff imaginary
                # part is the exact Hermitian average (c + conj(c)) / 2
                c = mp.mpc(c.real)
            complex_entries[(m, n)] = c
            if m != n:
                complex_entries[(n, m)] = mp.conj(c)
        for (m, n), val in acc_r.items():
            real_entries[(m, n)] = +(-val / (n + 1))

    return MomentTable(table_fingerprint(p, precision_bits), maxdeg,
                       precision_bits, complex_entries, real_entries)


def cross_check(t: MomentTable):
    """Max residual of the identity expanding z^m conj(z)^n over real moments:
    c[m][n] = sum_{j,k} C(m,j) C(n,k) i^j (-i)^k I[m+n-j-k][j+k]."""
    worst = mp.mpf(0)
    with mp.workprec(t.precision_bits + t.maxdeg + 32):
        iu = [mp.mpc(1), mp.mpc(0, 1), mp.mpc(-1), mp.mpc(0, -1)]
        for (m, n), cval in t.complex_entries.items():
            acc = mp.mpc(0)
            for j in range(m + 1):
                for k in range(n + 1):
                    unit = iu[(j + 3 * k) % 4]
                    acc += comb(m, j) * comb(n, k) * unit * t.real(m + n - j - k, j + k)
            worst = max(worst, abs(cval - acc))
    return +worst


# ---- cache files ----------------------------------------------------------------

def _num_to_json(x):
    # x is an mpf; x._mpf_ is exact, while mp.mpf(x) would round to the
    # ambient context precision
    sign, man, exp, _ = x._mpf_
    return [int(sign), hex(int(man)), int(exp)]


def _num_from_json(rec):
    sign, man_hex, exp = rec
    man = int(man_hex, 16)
    with mp.workprec(max(man.bit_length() + 8, 64)):
        val = mp.ldexp(mp.mpf(man), int(exp))
    return -val if sign else val


def save_table(t: MomentTable, path) -> None:
    """Write a table as JSON with exact (sign, mantissa, exponent) numbers."""
    doc = {
        "version": CACHE_FORMAT_VERSION,
        "fingerprint": t.fingerprint,
        "maxdeg": t.maxdeg,
        "precision_bits": t.precision_bits,
        "complex": {
            f"{m},{n}": [_num_to_json(val.real), _num_to_json(val.imag)]
            for (m, n), val in t.complex_entries.items() if m >= n
        },
        "real": {
            f"{m},{n}": _num_to_json(val)
            for (m, n), val in t.real_entries.items()
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_table(path) -> MomentTable:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != CACHE_FORMAT_VERSION:
        raise ValueError(f"unsupported moment cache version in {path}")
    precision_bits = int(doc["precision_bits"])
    complex_entries = {}
    real_entries = {}
    # mpc construction and conj round at context precision, so reconstruct
    # above the precision the entries were stored with
    with mp.workprec(precision_bits + 16):
        for key, (re_rec, im_rec) in doc["complex"].items():
            m, n = (int(s) for s in key.split(","))
            val = mp.mpc(_num_from_json(re_rec), _num_from_json(im_rec))
            complex_entries[(m, n)] = val
            if m != n:
                complex_entries[(n, m)] = mp.conj(val)
        for key, rec in doc["real"].items():
            m, n = (int(s) for s in key.split(","))
            real_entries[(m, n)] = _num_from_json(rec)
    return MomentTable(doc["fingerprint"], int(doc["maxdeg"]),
                       precision_bits, complex_entries, real_entries)

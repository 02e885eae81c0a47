"""Parameter sweeps and critical points of rho_N over the polygon families.

Values are computed by content.rho_n; the closed forms in the sweep parameter
live here as well.  Optimization is derivative-free: a coarse scan locates
every interior local extremum, golden-section refines each one, and the
classification comes from a second difference at the refined point.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from mpmath import mp

from . import content, geometry, moments
from .errors import (
    AngleOutOfRange,
    ApexDegenerate,
    ConstraintViolated,
    EmptyFeasibleSet,
    NoBracketFound,
    NonpositiveParameter,
)

_WORK_BITS = 288

CLASS_LOCAL_MAX = "local-max"
CLASS_LOCAL_MIN = "local-min"
CLASS_UNKNOWN = "unknown"

_INFEASIBLE = (ConstraintViolated, ApexDegenerate, AngleOutOfRange)


def windmill_rho_closed(a, order: int = 1):
    """Closed-form rho_1 or rho_2 of the unit-area windmill hexagon; both grow
    like a^2, which is the divergence the family exists to exhibit."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    with mp.workprec(_WORK_BITS):
        a = mp.mpf(a)
        if not a > 0:
            raise NonpositiveParameter(f"windmill parameter must be positive, got {a}")
        s3 = mp.sqrt(3)
        base = 3 * s3 + 4 / a ** 2 + 27 * a ** 2
        if order == 1:
            value = base / 162
        else:
            value = (3 * s3 + 4 / a ** 2
                     + 27 * a ** 2 * (1 + 90 / (27 * a ** 4 - 6 * s3 * a ** 2 + 4))) / 1620
    with mp.workprec(256):
        return +value


def t_star():
    """Unique positive root t of 999 x^4/64 - 93 x^3 - 664 x^2 - 5376 x - 9216
    (one sign change, so exactly one by Descartes), and its fourth root.

    The fourth root is the base-length threshold separating the regimes where
    the isosceles apex position is a local max vs. local min of rho_2.
    """
    with mp.workprec(_WORK_BITS):
        c4 = mp.mpf(999) / 64

        def poly(x):
            return (((c4 * x - 93) * x - 664) * x - 5376) * x - 9216

        lo, hi = mp.mpf(1), mp.mpf(64)
        for _ in range(_WORK_BITS + 16):
            mid = (lo + hi) / 2
            if poly(mid) > 0:
                hi = mid
            else:
                lo = mid
        t = (lo + hi) / 2
        threshold = mp.root(t, 4)
    with mp.workprec(256):
        return +t, +threshold


def t_star_poly(x):
    """The quartic whose positive root defines t_star, for residual checks."""
    with mp.workprec(_WORK_BITS):
        x = mp.mpf(x)
        val = (((mp.mpf(999) / 64 * x - 93) * x - 664) * x - 5376) * x - 9216
    return val


@dataclass(frozen=True)
class SweepResult:
    family: geometry.FamilySpec
    grid: tuple        # parameter tuples, one per point
    values: tuple      # float rho_N, or None where infeasible
    n: int
    precision_bits: int
    argmax: tuple
    max_value: float


@dataclass(frozen=True)
class CriticalPoint:
    param: float
    classification: str
    first_derivative_residual: float


@dataclass(frozen=True)
class CriticalPointReport:
    family: geometry.FamilySpec
    n: int
    points: tuple  # CriticalPoint, ascending by param


def _eval_point(args):
    kind, fixed, free, vals, n, prec, skip_infeasible = args
    spec = geometry.FamilySpec(kind, fixed, free)
    try:
        poly = spec.build(*vals)
    except _INFEASIBLE:
        if skip_infeasible:
            return None
        raise
    return float(content.rho_n(poly, n, prec).value)


def _run_points(family, build_points, n, prec, parallelism, skip_infeasible):
    args = [(family.kind, family.fixed, family.free, vals, n, prec, skip_infeasible)
            for vals in build_points]
    if parallelism and parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(_eval_point, args))
    return [_eval_point(a) for a in args]


def _linspace(lo: float, hi: float, steps: int):
    lo, hi = float(lo), float(hi)
    if steps < 2:
        raise ValueError(f"need at least 2 grid points, got {steps}")
    return [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]


def _assemble(family, grid, values, n, prec) -> SweepResult:
    best = None
    for pt, val in zip(grid, values):
        if val is not None and (best is None or val > best[1]):
            best = (pt, val)
    if best is None:
        raise EmptyFeasibleSet("no feasible grid point in the requested range")
    return SweepResult(family, tuple(grid), tuple(values), n, prec, best[0], best[1])


def sweep_family(family: geometry.FamilySpec, lo, hi, steps: int, n: int,
                 precision_bits=None, parallelism: int = 1) -> SweepResult:
    """rho_N over a 1-D grid of the family's single free parameter."""
    if len(family.free) != 1:
        raise ValueError(f"1-D sweep needs exactly one free parameter, got {family.free}")
    prec = precision_bits or moments.precision_for_degree(n)
    xs = _linspace(lo, hi, steps)
    values = _run_points(family, [(x,) for x in xs], n, prec, parallelism, False)
    return _assemble(family, [(x,) for x in xs], values, n, prec)


def sweep_fixed_base(a, lam_range, steps: int, n: int,
                     precision_bits=None, parallelism: int = 1) -> SweepResult:
    """rho_N of unit-area triangles with fixed base a, apex ordinate swept."""
    if steps < 3:
        raise ValueError(f"sweep needs at least 3 steps, got {steps}")
    family = geometry.FamilySpec("triangle-base", (("a", float(a)),), ("lambda",))
    return sweep_family(family, lam_range[0], lam_range[1], steps, n,
                        precision_bits, parallelism)


def sweep_fixed_angle(theta, a_range, steps: int, n: int,
                      precision_bits=None, parallelism: int = 1) -> SweepResult:
    """rho_N of unit-area triangles with fixed interior angle, side length swept."""
    if steps < 3:
        raise ValueError(f"sweep needs at least 3 steps, got {steps}")
    family = geometry.FamilySpec("triangle-angle", (("theta", float(theta)),), ("a",))
    return sweep_family(family, a_range[0], a_range[1], steps, n,
                        precision_bits, parallelism)


def pentagon_grid(theta_range, phi_range, steps_per_axis: int, n: int,
                  precision_bits=None, parallelism: int = 1) -> SweepResult:
    """rho_N over a (theta, phi) degree grid of equilateral pentagons.

    Grid points outside the feasibility region come back as None values, not
    errors; a grid with no feasible point raises EmptyFeasibleSet.
    """
    if steps_per_axis < 2:
        raise ValueError(f"need at least 2 steps per axis, got {steps_per_axis}")
    prec = precision_bits or moments.precision_for_degree(n)
    family = geometry.FamilySpec("pentagon", (), ("theta_deg", "phi_deg"))
    thetas = _linspace(theta_range[0], theta_range[1], steps_per_axis)
    phis = _linspace(phi_range[0], phi_range[1], steps_per_axis)
    grid = [(th, ph) for th in thetas for ph in phis]
    values = _run_points(family, grid, n, prec, parallelism, True)
    return _assemble(family, grid, values, n, prec)


def _golden_max(f, a, b, tol):
    invphi = (mp.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def maximize_1d(family: geometry.FamilySpec, lo, hi, n: int, tol=1e-6,
                steps: int = 33, precision_bits=None) -> CriticalPointReport:
    """Locate and classify every interior critical point of rho_N over one free
    parameter: coarse scan, golden-section refinement of each interior
    extremum, second-difference classification."""
    if len(family.free) != 1:
        raise ValueError(f"need exactly one free parameter, got {family.free}")
    if steps < 5:
        raise ValueError(f"coarse scan needs at least 5 steps, got {steps}")
    prec = precision_bits or moments.precision_for_degree(n)
    cache = {}

    def f(x):
        if x not in cache:
            cache[x] = content.rho_n(family.build(x), n, prec).value
        return cache[x]

    with mp.workprec(_WORK_BITS):
        tol = mp.mpf(tol)
        lo, hi = mp.mpf(float(lo)), mp.mpf(float(hi))
        xs = [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]
        ys = [f(x) for x in xs]
        found = []
        for i in range(1, steps - 1):
            if ys[i] > ys[i - 1] and ys[i] > ys[i + 1]:
                found.append((i, True))
            elif ys[i] < ys[i - 1] and ys[i] < ys[i + 1]:
                found.append((i, False))
        if not found:
            raise NoBracketFound(
                f"no interior extremum of rho_{n} in [{float(lo)}, {float(hi)}] "
                f"at {steps} samples")
        points = []
        for i, is_max in found:
            # refine to tol/4 so the reported derivative residual sits below tol
            if is_max:
                x = _golden_max(f, xs[i - 1], xs[i + 1], tol / 4)
            else:
                x = _golden_max(lambda u: -f(u), xs[i - 1], xs[i + 1], tol / 4)
            h = max(tol, mp.mpf("1e-8")) * 2
            fm, f0, fp = f(x - h), f(x), f(x + h)
            second = fp - 2 * f0 + fm
            if second < 0:
                kind = CLASS_LOCAL_MAX
            elif second > 0:
                kind = CLASS_LOCAL_MIN
            else:
                kind = CLASS_UNKNOWN
            resid = abs(fp - fm) / (2 * h)
            points.append(CriticalPoint(float(x), kind, float(resid)))
        points.sort(key=lambda cp: cp.param)
    return CriticalPointReport(family, n, tuple(points))


# ---- sweep serialization ---------------------------------------------------------

CSV_HEADER = ("param1", "param2", "rho_N", "feasible")


def write_sweep(sweep: SweepResult, csv_path) -> None:
    """CSV of grid values plus a JSON sidecar (same path + '.json') holding the
    family, N, precision, and argmax.  Floats are written as repr so the pair
    of files round-trips exactly."""
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for pt, val in zip(sweep.grid, sweep.values):
            p1 = repr(float(pt[0]))
            p2 = repr(float(pt[1])) if len(pt) > 1 else ""
            writer.writerow([p1, p2,
                             "" if val is None else repr(val),
                             "true" if val is not None else "false"])
    with open(str(csv_path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar_dict(sweep), fh, indent=2)
        fh.write("\n")


def sidecar_dict(sweep: SweepResult) -> dict:
    return {
        "family": {
            "kind": sweep.family.kind,
            "fixed": [[name, val] for name, val in sweep.family.fixed],
            "free": list(sweep.family.free),
        },
        "n": sweep.n,
        "precision_bits": sweep.precision_bits,
        "argmax": list(sweep.argmax),
        "max_value": sweep.max_value,
    }


def read_sweep(csv_path) -> SweepResult:
    with open(str(csv_path) + ".json", "r", encoding="utf-8") as fh:
        side = json.load(fh)
    family = geometry.FamilySpec(
        side["family"]["kind"],
        tuple((name, val) for name, val in side["family"]["fixed"]),
        tuple(side["family"]["free"]),
    )
    grid = []
    values = []
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected sweep CSV header {header}")
        for p1, p2, rho, feasible in reader:
            grid.append((float(p1), float(p2)) if p2 else (float(p1),))
            values.append(float(rho) if feasible == "true" else None)
    return SweepResult(family, tuple(grid), tuple(values), int(side["n"]),
                       int(side["precision_bits"]), tuple(side["argmax"]),
                       float(side["max_value"]))

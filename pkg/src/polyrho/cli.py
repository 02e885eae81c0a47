"""Command-line interface.

Exit codes: 0 success; 1 verify found failing checks; 2 invalid input
(arguments, files, family parameters); 3 numerical failure.  Output files are
deterministic for a fixed configuration: wall-clock timings go to stdout only.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from dataclasses import dataclass

from mpmath import mp

from . import content, extremal, geometry, moments, oracle
from .errors import GeometryError, NumericalError

ENV_PRECISION = "POLYRHO_PRECISION_BITS"


@dataclass
class RunConfig:
    command: str
    polygon_path: str = None
    family: str = None
    n: int = 1
    precision_bits: int = None
    output: str = None
    fmt: str = "json"
    parallelism: int = 1
    moment_cache: str = None
    param: str = None
    sweep_range: tuple = None
    steps: int = 0
    theta_range: tuple = None
    phi_range: tuple = None
    maxdeg: int = 4
    long_checks: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"--n must be >= 0, got {self.n}")
        if self.parallelism < 1:
            raise ValueError(f"--parallelism must be >= 1, got {self.parallelism}")
        if self.command in ("rho", "moments"):
            if bool(self.polygon_path) == bool(self.family):
                raise ValueError("give exactly one of --polygon or --family")


def _parse_range(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError(f"range must be lo:hi, got {text!r}")
    return (float(lo), float(hi))


def _parse_family(text: str, free_names=()) -> geometry.FamilySpec:
    """Parse 'kind:v1,v2' with values for the non-free parameters in their
    declared order."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in geometry.FAMILY_PARAMS:
        raise ValueError(
            f"unknown family {kind!r}; known: {', '.join(sorted(geometry.FAMILY_PARAMS))}")
    names = geometry.FAMILY_PARAMS[kind]
    for free in free_names:
        if free not in names:
            raise ValueError(f"family {kind!r} has no parameter {free!r} (it has {names})")
    fixed_names = [nm for nm in names if nm not in free_names]
    vals = [v.strip() for v in rest.split(",") if v.strip()] if rest else []
    if len(vals) != len(fixed_names):
        raise ValueError(
            f"family {kind!r} needs values for {fixed_names}, got {len(vals)}")
    fixed = tuple((nm, float(v)) for nm, v in zip(fixed_names, vals))
    return geometry.FamilySpec(kind, fixed, tuple(free_names))


def _default_precision(cfg: RunConfig, fallback: int) -> int:
    if cfg.precision_bits:
        return cfg.precision_bits
    env = os.environ.get(ENV_PRECISION)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{ENV_PRECISION} must be an integer, got {env!r}") from None
    return fallback


def _load_polygon(cfg: RunConfig) -> geometry.Polygon:
    if cfg.polygon_path:
        return geometry.read_polygon(cfg.polygon_path)
    return _parse_family(cfg.family).build()


def _get_table(poly, maxdeg, prec, cache_path):
    if cache_path and os.path.exists(cache_path):
        try:
            cached = moments.load_table(cache_path)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise ValueError(f"unreadable moment cache {cache_path}: {exc}") from exc
        if (cached.fingerprint == moments.table_fingerprint(poly, prec)
                and cached.maxdeg >= maxdeg
                and cached.precision_bits == prec):
            return cached
    table = moments.moment_table(poly, maxdeg, prec)
    if cache_path:
        moments.save_table(table, cache_path)
    return table


def _digits_for_bits(bits: int) -> int:
    return max(2, int(bits * 0.30103))


def _certified_digits(v1, v2, prec: int) -> int:
    cap = _digits_for_bits(prec)
    diff = abs(v1 - v2)
    if diff == 0:
        return cap
    rel = diff / max(abs(v1), mp.mpf(2) ** (-prec))
    if rel <= 0:
        return cap
    return max(1, min(cap, int(-mp.log10(rel))))


def _write_text(path, text) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_rho(cfg: RunConfig) -> int:
    poly = _load_polygon(cfg)
    prec = _default_precision(cfg, moments.precision_for_degree(cfg.n))
    t0 = time.perf_counter()
    table = _get_table(poly, 2 * cfg.n + 2, prec, cfg.moment_cache)
    direct = content.rho_n(poly, cfg.n, prec, table=table)
    telescoped, _, _ = content.rho_n_telescoping(poly, cfg.n, prec, table=table)
    wall = time.perf_counter() - t0
    digits = _certified_digits(direct.value, telescoped.value, prec)
    value_str = mp.nstr(direct.value, digits)
    if cfg.output:
        if cfg.fmt == "csv":
            payload = ("value,n,precision_bits,condition_estimate,certified_digits\n"
                       f"{value_str},{cfg.n},{prec},{direct.condition_estimate!r},{digits}\n")
        else:
            payload = json.dumps({
                "value": value_str,
                "n": cfg.n,
                "precision_bits": prec,
                "condition_estimate": direct.condition_estimate,
                "certified_digits": digits,
                "methods": [direct.method, telescoped.method],
            }, indent=2) + "\n"
        _write_text(cfg.output, payload)
    print(f"rho_{cfg.n} = {value_str}")
    print(f"precision {prec} bits, condition estimate {direct.condition_estimate:.3e}, "
          f"certified digits {digits}, wall time {wall:.3f}s")
    return 0


def cmd_moments(cfg: RunConfig) -> int:
    if cfg.maxdeg < 2:
        raise ValueError(f"--maxdeg must be >= 2, got {cfg.maxdeg}")
    poly = _load_polygon(cfg)
    prec = _default_precision(cfg, moments.DEFAULT_PRECISION_BITS)
    table = _get_table(poly, cfg.maxdeg, prec, cfg.moment_cache)
    dps = _digits_for_bits(prec)
    keys = sorted(k for k in table.complex_entries if k[0] + k[1] <= table.maxdeg)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        buf.write("m,n,c_re,c_im,I\n")
        for m, n in keys:
            c = table.c(m, n)
            buf.write(f"{m},{n},{mp.nstr(c.real, dps)},{mp.nstr(c.imag, dps)},"
                      f"{mp.nstr(table.real(m, n), dps)}\n")
        payload = buf.getvalue()
    else:
        doc = {
            "fingerprint": table.fingerprint,
            "maxdeg": table.maxdeg,
            "precision_bits": table.precision_bits,
            "entries": [
                {"m": m, "n": n,
                 "c": [mp.nstr(table.c(m, n).real, dps), mp.nstr(table.c(m, n).imag, dps)],
                 "I": mp.nstr(table.real(m, n), dps)}
                for m, n in keys
            ],
        }
        payload = json.dumps(doc, indent=2) + "\n"
    _write_text(cfg.output, payload)
    return 0


def _sweep_csv_text(sweep) -> str:
    buf = io.StringIO()
    buf.write(",".join(extremal.CSV_HEADER) + "\n")
    for pt, val in zip(sweep.grid, sweep.values):
        p2 = repr(float(pt[1])) if len(pt) > 1 else ""
        rho = "" if val is None else repr(val)
        feas = "true" if val is not None else "false"
        buf.write(f"{float(pt[0])!r},{p2},{rho},{feas}\n")
    return buf.getvalue()


def _emit_sweep(sweep, cfg: RunConfig) -> None:
    if cfg.output:
        extremal.write_sweep(sweep, cfg.output)
        print(f"wrote {cfg.output} and {cfg.output}.json")
        print(f"argmax {sweep.argmax} -> rho_{sweep.n} = {sweep.max_value!r}")
    else:
        sys.stdout.write(_sweep_csv_text(sweep))


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.family or not cfg.param or not cfg.sweep_range or cfg.steps < 3:
        raise ValueError("sweep needs --family, --param, --range lo:hi, --steps >= 3")
    spec = _parse_family(cfg.family, free_names=(cfg.param,))
    prec = _default_precision(cfg, moments.precision_for_degree(cfg.n))
    sweep = extremal.sweep_family(spec, cfg.sweep_range[0], cfg.sweep_range[1],
                                  cfg.steps, cfg.n, prec, cfg.parallelism)
    _emit_sweep(sweep, cfg)
    return 0


def cmd_pentagon_grid(cfg: RunConfig) -> int:
    if not cfg.theta_range or not cfg.phi_range or cfg.steps < 2:
        raise ValueError("pentagon-grid needs --theta lo:hi, --phi lo:hi, --steps >= 2")
    prec = _default_precision(cfg, moments.precision_for_degree(cfg.n))
    sweep = extremal.pentagon_grid(cfg.theta_range, cfg.phi_range, cfg.steps,
                                   cfg.n, prec, cfg.parallelism)
    _emit_sweep(sweep, cfg)
    return 0


# ---- verify suite -----------------------------------------------------------------

def _relerr(got, want):
    denom = max(abs(want), mp.mpf(2) ** -80)
    return abs(got - want) / denom


def _check_windmill_closed():
    worst = mp.mpf(0)
    for a in (0.5, 1, 2, 5, 10):
        poly = geometry.make_windmill(a)
        for order, closed in ((1, content.rho1_closed(poly)),
                              (2, content.rho2_closed(poly))):
            formula = extremal.windmill_rho_closed(a, order)
            gram = content.rho_n(poly, order).value
            worst = max(worst, _relerr(closed, formula), _relerr(gram, formula))
    return worst <= 1e-9, f"max rel err {mp.nstr(worst, 3)}"


def _check_t_star():
    t, threshold = extremal.t_star()
    resid = abs(extremal.t_star_poly(t))
    err = abs(threshold - mp.mpf("1.86637"))
    ok = err <= 5e-6 and resid <= mp.mpf("1e-30")
    return ok, f"threshold {mp.nstr(threshold, 8)}, poly residual {mp.nstr(resid, 3)}"


def _verify_fixtures():
    return (
        ("square", geometry.polygon_new([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])),
        ("triangle", geometry.polygon_new([(0, 0), (1, 0), (0.3, 0.8)])),
        ("windmill-1", geometry.make_windmill(1)),
        ("pentagon", geometry.make_regular_ngon(5)),
    )


def _check_cross_check():
    worst = mp.mpf(0)
    for _, poly in _verify_fixtures():
        worst = max(worst, moments.cross_check(moments.moment_table(poly, 8)))
    bound = mp.mpf(2) ** (-moments.DEFAULT_PRECISION_BITS + 20)
    return worst <= bound, f"max residual {mp.nstr(worst, 3)} (bound {mp.nstr(bound, 3)})"


def _check_hermitian():
    poly = _verify_fixtures()[1][1]
    t = moments.moment_table(poly, 6)
    with mp.workprec(t.precision_bits + 16):  # conj() rounds at context precision
        sym_ok = all(t.c(n, m) == mp.conj(t.c(m, n)) for (m, n) in t.complex_entries)
        worst = mp.mpf(0)
        for m, n in ((3, 2), (1, 4), (0, 5)):
            single = moments.complex_moment(poly, m, n)
            worst = max(worst, abs(single - t.c(m, n)))
    ok = sym_ok and worst <= mp.mpf(2) ** -200
    return ok, f"symmetry exact: {sym_ok}, single-entry recompute err {mp.nstr(worst, 3)}"


def _check_oracle_moments():
    worst = 0.0
    for _, poly in _verify_fixtures():
        mesh = oracle.triangulate(poly)
        for m in range(7):
            for n in range(7 - m):
                ref = complex(moments.complex_moment(poly, m, n))
                got = oracle.quad_moment(mesh, m, n)
                worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def _check_oracle_rho():
    worst = mp.mpf(0)
    for _, poly in _verify_fixtures():
        for n in (1, 3, 5):
            got = oracle.oracle_rho_n(poly, n)
            ref = content.rho_n(poly, n).value
            worst = max(worst, _relerr(mp.mpf(got), ref))
    return worst <= 1e-8, f"max rel err {mp.nstr(worst, 3)}"


def _check_monotonicity():
    ok = True
    for _, poly in _verify_fixtures():
        result, _, partials = content.rho_n_telescoping(poly, 12)
        slack = mp.mpf(2) ** -120
        with mp.workprec(result.precision_bits + 16):  # keep the + exact
            ok = ok and all(partials[k + 1] <= partials[k] + slack
                            for k in range(len(partials) - 1))
    return ok, "partials non-increasing through N=12"


def _check_invariance():
    poly = _verify_fixtures()[1][1]
    base = content.rho_n(poly, 2).value
    rot = content.rho_n(geometry.rotate(poly, 0.7), 2).value
    tra = content.rho_n(geometry.translate(poly, (0.3, -0.2)), 2).value
    scl = content.rho_n(geometry.scale(poly, 1.7), 2).value
    worst = max(_relerr(rot, base), _relerr(tra, base),
                _relerr(scl, base * mp.mpf(1.7) ** 4))
    return worst <= 1e-10, f"max rel err {mp.nstr(worst, 3)}"


def _check_random_closed_forms():
    worst = mp.mpf(0)
    for seed in range(10):
        poly = geometry.normalize(geometry.random_star_polygon(3 + seed % 6, seed=seed))
        _, _, partials = content.rho_n_telescoping(poly, 2)
        worst = max(worst, _relerr(partials[1], content.rho1_closed(poly)),
                    _relerr(partials[2], content.rho2_closed(poly)))
    return worst <= 1e-9, f"max rel err {mp.nstr(worst, 3)}"


def _check_steiner_contrast():
    details = []
    ok = True
    for a in (5, 10):
        g = geometry.make_windmill(a)
        sym = content.rho1_closed(geometry.steiner_symmetrize(g, "x"))
        raw = content.rho1_closed(g)
        ok = ok and sym < raw and sym < 1
        details.append(f"a={a}: {mp.nstr(sym, 4)} < {mp.nstr(raw, 4)}")
    return ok, "; ".join(details)


def _check_pentagon_swap():
    spec = geometry.FamilySpec("pentagon", (), ("theta_deg", "phi_deg"))
    v1 = content.rho_n(spec.build(107.7, 108.3), 6).value
    v2 = content.rho_n(spec.build(108.3, 107.7), 6).value
    err = _relerr(v1, v2)
    return err <= 1e-9, f"swap rel err {mp.nstr(err, 3)}"


def _check_pentagon_rho33():
    poly = geometry.make_regular_ngon(5)
    prec = moments.precision_for_degree(33)
    table = moments.moment_table(poly, 68, prec)
    direct = content.rho_n(poly, 33, prec, table=table)
    telescoped, _, _ = content.rho_n_telescoping(poly, 33, prec, table=table)
    err = _relerr(direct.value, telescoped.value)
    ok = direct.value >= mp.mpf("0.149429") and err <= 1e-9
    return ok, f"rho_33 = {mp.nstr(direct.value, 10)}, path rel err {mp.nstr(err, 3)}"


def verify_checks(long_checks: bool = False):
    checks = [
        ("windmill-closed-forms", _check_windmill_closed),
        ("t-star-threshold", _check_t_star),
        ("moment-cross-check", _check_cross_check),
        ("hermitian-symmetry", _check_hermitian),
        ("oracle-moments", _check_oracle_moments),
        ("oracle-rho", _check_oracle_rho),
        ("monotonicity", _check_monotonicity),
        ("invariance", _check_invariance),
        ("random-closed-forms", _check_random_closed_forms),
        ("steiner-contrast", _check_steiner_contrast),
        ("pentagon-swap", _check_pentagon_swap),
    ]
    if long_checks:
        checks.append(("pentagon-rho33", _check_pentagon_rho33))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    failures = 0
    t_start = time.perf_counter()
    for name, fn in verify_checks(cfg.long_checks):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status:4s} {name:24s} {detail}  ({time.perf_counter() - t0:.2f}s)")
    total = time.perf_counter() - t_start
    n = len(verify_checks(cfg.long_checks))
    print(f"{n - failures} passed, {failures} failed in {total:.1f}s")
    return 1 if failures else 0


# ---- argument parsing ---------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrho",
        description="Polynomial Bergman content rho_N of simple polygons")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_n=True):
        p.add_argument("--precision-bits", type=int, default=None,
                       help=f"working precision (default: policy, or ${ENV_PRECISION})")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
        p.add_argument("--output", default=None, help="write results to this file")
        p.add_argument("--moment-cache", default=None,
                       help="JSON moment-table cache file to reuse/create")
        p.add_argument("--parallelism", type=int, default=1)
        if with_n:
            p.add_argument("--n", type=int, default=1, help="polynomial degree N")

    rho = sub.add_parser("rho", help="compute rho_N for one polygon")
    rho.add_argument("--polygon", dest="polygon_path", help="polygon file (x y per line)")
    rho.add_argument("--family", help="family spec, e.g. windmill:2 or triangle-base:3,1.5")
    common(rho)

    mom = sub.add_parser("moments", help="dump a moment table")
    mom.add_argument("--polygon", dest="polygon_path")
    mom.add_argument("--family")
    mom.add_argument("--maxdeg", type=int, default=4)
    common(mom, with_n=False)

    swp = sub.add_parser("sweep", help="1-D parameter sweep of rho_N")
    swp.add_argument("--family", required=True,
                     help="family with the swept parameter omitted, e.g. triangle-base:3")
    swp.add_argument("--param", required=True, help="name of the swept parameter")
    swp.add_argument("--range", dest="sweep_range", type=_parse_range, required=True)
    swp.add_argument("--steps", type=int, required=True)
    common(swp)

    pg = sub.add_parser("pentagon-grid", help="rho_N over a (theta, phi) degree grid")
    pg.add_argument("--theta", dest="theta_range", type=_parse_range, required=True)
    pg.add_argument("--phi", dest="phi_range", type=_parse_range, required=True)
    pg.add_argument("--steps", type=int, required=True, help="grid steps per axis")
    common(pg)

    ver = sub.add_parser("verify", help="run the built-in verification suite")
    ver.add_argument("--long", dest="long_checks", action="store_true",
                     help="include the N=33 pentagon checks")
    return parser


_COMMANDS = {
    "rho": cmd_rho,
    "moments": cmd_moments,
    "sweep": cmd_sweep,
    "pentagon-grid": cmd_pentagon_grid,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(command=args.command,
                        **{k: v for k, v in vars(args).items() if k != "command"})
        return _COMMANDS[cfg.command](cfg)
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    except (GeometryError, ValueError, OSError) as exc:
        print(f"invalid input ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

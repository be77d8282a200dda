"""Command-line driver: ``verify <check> [options]``.

Every check returns a list of :class:`VerificationReport`; the process exit
code is 0 when no report failed, 1 when one did, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bloch_group, conifold_series, cube_regulator, dilog, mirror_curve
from .errors import MismatchDetail, UnknownCheck
from .report import DEFAULT_EPS_SCHEDULE, FAIL, Config, VerificationReport, stopwatch, timed

CATALAN_DIGITS = 0.915965594177219
SWEEP_POINTS = 1000


def _within(name: str, value: float, lo: float, hi: float, notes: str = "") -> VerificationReport:
    """Containment ``lo <= value <= hi`` expressed as a distance to the midpoint."""
    mid = 0.5 * (lo + hi)
    return VerificationReport.compare(name, value, mid, 0.5 * (hi - lo),
                                      (notes + "; " if notes else "") + f"allowed [{lo:.12g}, {hi:.12g}]")


def _quad_tol(cfg: Config) -> float:
    return min(1e-10, 1e-2 * cfg.tol)


def check_toy_model(cfg: Config) -> list[VerificationReport]:
    with stopwatch() as ms:
        im = cube_regulator.toy_model_im_regulator(_quad_tol(cfg))
    lo = 36.0 * math.pi * (2.0 / 3.0) * math.log(2.0)
    hi = 36.0 * math.pi * (5.0 / 3.0) * math.log(2.0)
    bound = _within("toy-model Im R inside the bound, margin 1", im, lo + 1.0, hi - 1.0,
                    f"Im R = {im:.12g}; bound [{lo:.6g}, {hi:.6g}] shrunk by 1 on each side")
    match = VerificationReport.compare("toy-model Im R vs 120 G", im, cube_regulator.TOY_REFERENCE, 1e-6,
                                       "path traversed from z = 0 to z = -inf")
    return timed([bound, match], ms[0])


def check_w_bounds(cfg: Config) -> list[VerificationReport]:
    with stopwatch() as ms:
        lo, hi = cube_regulator.verify_w_bounds(max(cfg.samples, 100))
    a, b = cube_regulator.W_MIN - 1e-9, cube_regulator.W_MAX + 1e-9
    return timed([
        _within("w-bounds min |w|", lo, a, b, f"{cfg.samples} Chebyshev samples"),
        _within("w-bounds max |w|", hi, a, b, f"{cfg.samples} Chebyshev samples"),
    ], ms[0])


def check_winding(cfg: Config) -> list[VerificationReport]:
    with stopwatch() as ms:
        n = cube_regulator.toy_model_winding()
    return timed([VerificationReport.compare("winding of w along gamma", n, -1, 0.0,
                                             "gamma traversed from z = 0 to z = -inf")], ms[0])


def check_collino(cfg: Config) -> list[VerificationReport]:
    with stopwatch() as ms:
        ex = cube_regulator.collino_extrapolation(cfg.eps_schedule, _quad_tol(cfg))
    q = cube_regulator.rational_multiple(ex.re_extrapolated, (2.0 * math.pi) ** 2)
    re_note = f"Re R = {ex.re_extrapolated:.10g}" + (f" = {q} (2 pi)^2" if q is not None else
                                                      " (no small rational multiple of (2 pi)^2)")
    return timed([
        VerificationReport.compare("collino Im R extrapolated vs 32 G", ex.im_extrapolated,
                                   cube_regulator.COLLINO_REFERENCE, 1e-4,
                                   f"eps schedule {list(cfg.eps_schedule)}; {re_note}"),
        VerificationReport.compare("collino eps-stability", ex.stability, 0.0, 5e-5),
    ], ms[0])


def _plane_points(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.normal(scale=2.0, size=count) + 1j * rng.normal(scale=2.0, size=count)


def check_bloch_relations(cfg: Config) -> list[VerificationReport]:
    reports = []
    with stopwatch() as ms:
        g = dilog.catalan()
    reports.append(VerificationReport.compare("catalan vs reference digits", g, CATALAN_DIGITS, 1e-14,
                                              runtime_ms=ms[0]))
    reports.append(VerificationReport.compare("catalan vs Cl2(pi/2)", g, dilog.clausen2(math.pi / 2), 1e-13))
    rng = np.random.default_rng(cfg.seed)
    with stopwatch() as ms:
        zs = _plane_points(rng, SWEEP_POINTS)
        for kind, tol in (("conjugation", 1e-11), ("inversion", 1e-11), ("complement", 1e-11)):
            worst = max(bloch_group.relation_defect(kind, z) for z in zs)
            reports.append(VerificationReport.compare(f"D2 {kind} relation, max over {SWEEP_POINTS}",
                                                      worst, 0.0, tol, f"seed {cfg.seed}"))
        xs, ys = _plane_points(rng, SWEEP_POINTS), _plane_points(rng, SWEEP_POINTS)
        worst = max(dilog.five_term_defect(x, y) for x, y in zip(xs, ys) if abs(1 - x * y) > 1e-6)
        reports.append(VerificationReport.compare(f"D2 five-term relation, max over {SWEEP_POINTS}",
                                                  worst, 0.0, 1e-10, f"seed {cfg.seed}"))
    return timed(reports, ms[0])


def check_congruence(cfg: Config) -> list[VerificationReport]:
    with stopwatch() as ms:
        reports = bloch_group.verify_congruence_chain(1e-10)
    return timed(reports, ms[0])


def check_curve(cfg: Config) -> list[VerificationReport]:
    tol = min(cfg.tol, 1e-10)
    with stopwatch() as ms:
        reports = [mirror_curve.node_check(1, tol), mirror_curve.node_check(2, tol)]
        for which in (1, 2):
            d = mirror_curve.divisor_constant(which)
            reports.append(VerificationReport.compare(f"divisor N{which} degree", d.degree, 11, 0.0, str(d)))
    return timed(reports, ms[0])


def check_uniformization(cfg: Config) -> list[VerificationReport]:
    rng = np.random.default_rng(cfg.seed)
    reports = []
    with stopwatch() as ms:
        for which, variant in ((1, "printed"), (2, "corrected")):
            u = mirror_curve.uniformization(which, variant)
            label = f"uniformization {which} ({variant})"
            reports.append(VerificationReport.compare(f"{label} residual at t = 2",
                                                      mirror_curve.uniformization_residual(u, 2.0), 0.0, 1e-9))
            worst = mirror_curve.max_residual_on_circle(u, 3.0, 50, rng)
            reports.append(VerificationReport.compare(f"{label} max residual, 50 points on |t| = 3",
                                                      worst, 0.0, min(cfg.tol, 1e-8)))
            reports.append(mirror_curve.node_limit_check(u))
        reports.append(mirror_curve.adjudicate_second_uniformization())
    return timed(reports, ms[0])


def check_series_identity(cfg: Config) -> list[VerificationReport]:
    reports = []
    for variant in (1, 2):
        with stopwatch() as ms:
            try:
                rep = conifold_series.compare_series_identity(variant, 30)
            except MismatchDetail as exc:
                closed = "eq1C" if variant == 1 else "eq2C"
                rep = VerificationReport.compare(f"series identity {variant} ({closed}) weight <= 30",
                                                 _as_number(exc.actual), _as_number(exc.expected), 0.0, str(exc))
        rep.runtime_ms = ms[0]
        reports.append(rep)
    return reports


def _as_number(x):
    return None if x is None else float(x)


def tube_points(seed: int) -> list[tuple[float, float]]:
    """``(0.01, 0.05)`` and one seeded point well inside the convergence region."""
    rng = np.random.default_rng(seed)
    return [(0.01, 0.05), (float(rng.uniform(0.002, 0.012)), float(rng.uniform(0.01, 0.06)))]


def tube_reports(variant: int, z1: float, z2: float, grid: int, max_weight: int) -> list[VerificationReport]:
    series = "eq1C" if variant == 1 else "eq2B"
    tube = conifold_series.tube_integral(variant, z1, z2, grid)
    value = conifold_series.series_value(series, z1, z2, 1e-13, max_weight)
    label = f"tube {variant} at ({z1:.6g}, {z2:.6g})"
    diff = (tube - value).imag
    k = int(round(diff / (2.0 * math.pi / 5.0)))
    target = 2.0 * math.pi * k / 5.0 if abs(k) <= 10 else 0.0
    return [
        VerificationReport.compare(f"{label} Re vs {series} series", tube.real, value.real, 1e-6,
                                   f"grid {grid}"),
        VerificationReport.compare(f"{label} Im difference vs 2 pi k / 5", diff, target, 1e-6, f"k = {k}"),
    ]


def check_tube(cfg: Config) -> list[VerificationReport]:
    reports = []
    with stopwatch() as ms:
        for z1, z2 in tube_points(cfg.seed):
            reports += tube_reports(1, z1, z2, cfg.grid, cfg.max_terms)
        reports += tube_reports(2, 0.01, 0.05, cfg.grid, cfg.max_terms)
    return timed(reports, ms[0])


def check_conifold(cfg: Config) -> list[VerificationReport]:
    reports = []
    for fn in (lambda: conifold_series.verify_identity("eq9", cfg.tol, max_weight=cfg.max_terms),
               lambda: conifold_series.verify_identity("eq10", cfg.tol, max_weight=cfg.max_terms),
               lambda: conifold_series.adjudicate_eq9(max_weight=cfg.max_terms),
               lambda: conifold_series.jensen_identity_report("eq9", cfg.tol),
               lambda: conifold_series.jensen_identity_report("eq10", cfg.tol),
               lambda: conifold_series.extrapolated_identity_report(cfg.tol)):
        with stopwatch() as ms:
            rep = fn()
        rep.runtime_ms = ms[0]
        reports.append(rep)
    return reports


CHECKS: dict[str, Callable[[Config], list[VerificationReport]]] = {
    "toy-model": check_toy_model,
    "w-bounds": check_w_bounds,
    "winding": check_winding,
    "collino": check_collino,
    "bloch-relations": check_bloch_relations,
    "congruence": check_congruence,
    "curve": check_curve,
    "uniformization": check_uniformization,
    "series-identity": check_series_identity,
    "tube": check_tube,
    "conifold": check_conifold,
}
CHECK_NAMES = tuple(CHECKS) + ("all",)


def _guarded(name: str, cfg: Config) -> list[VerificationReport]:
    try:
        return CHECKS[name](cfg)
    except Exception as exc:  # a crashing check is reported, never fatal
        return [VerificationReport(f"{name} (error)", FAIL, None, None, None, 0.0, 0,
                                   f"{type(exc).__name__}: {exc}")]


def thread_count() -> int:
    raw = os.environ.get("REGULATOR_LAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_check(name: str, cfg: Config | None = None) -> list[VerificationReport]:
    """Run one named check, or every check in registry order for ``"all"``.

    Raises:
        UnknownCheck: ``name`` is not in :data:`CHECK_NAMES`.
    """
    cfg = cfg or Config()
    if name not in CHECK_NAMES:
        raise UnknownCheck(f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES)}")
    names = list(CHECKS) if name == "all" else [name]
    workers = min(thread_count(), len(names))
    if workers <= 1:
        results = [_guarded(n, cfg) for n in names]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: _guarded(n, cfg), names))
    return [rep for chunk in results for rep in chunk]


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.3e}"


def format_table(reports: list[VerificationReport], timing: bool = True) -> str:
    width = max([len(r.name) for r in reports] + [5])
    head = f"{'check':<{width}}  {'status':<12}  {'abs_error':>10}  {'tolerance':>10}"
    if timing:
        head += f"  {'ms':>7}"
    lines = [head, "-" * len(head)]
    for r in reports:
        line = f"{r.name:<{width}}  {r.status:<12}  {_fmt(r.abs_error):>10}  {_fmt(r.tolerance):>10}"
        if timing:
            line += f"  {r.runtime_ms:>7d}"
        lines.append(line)
    counts = {s: sum(r.status == s for r in reports) for s in ("pass", "fail", "inconclusive")}
    lines.append(f"{counts['pass']} pass, {counts['fail']} fail, {counts['inconclusive']} inconclusive")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run numerical verification checks.")
    p.add_argument("check", help=f"one of: {', '.join(CHECK_NAMES)}")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-terms", type=int, default=10_000, help="weight budget for series sums")
    p.add_argument("--grid", type=int, default=256, help="torus grid size (power of two)")
    p.add_argument("--eps", type=float, nargs="+", default=list(DEFAULT_EPS_SCHEDULE),
                   help="decreasing regularization phases for the Collino class")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_path", metavar="PATH", default=None)
    p.add_argument("--no-timing", action="store_true", help="write runtime_ms = 0 for byte-stable output")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = Config(tol=args.tol, max_terms=args.max_terms, grid=args.grid, eps_schedule=tuple(args.eps),
                     samples=args.samples, seed=args.seed, json_path=args.json_path, timing=not args.no_timing)
    except ValueError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2
    try:
        reports = run_check(args.check, cfg)
    except UnknownCheck as exc:
        print(f"verify: {exc.args[0]}", file=sys.stderr)
        return 2
    print(format_table(reports, cfg.timing))
    if cfg.json_path:
        with open(cfg.json_path, "w", encoding="utf-8") as fh:
            json.dump([r.to_json(cfg.timing) for r in reports], fh, indent=2)
            fh.write("\n")
    return 1 if any(r.status == FAIL for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands
-----------
``compute``            one heat-content value by a chosen engine
``verify``             run bound verification cases, emit a report CSV
``sweep``              H and its first three derivatives over a time grid
``compare-constants``  improved-vs-baseline constants table

Exit codes: 0 success (all verdicts pass), 1 bound violation, 2 usage or
configuration error, 3 engine failure.

Time grids use a mini-language: ``geom:<lo>:<hi>:<n>`` for geometric grids
and ``list:v1,v2,...`` for explicit ones.  Scalar output is printed with 12
significant digits; CSV cells use shortest round-trip formatting.  CSV
metadata lives in leading comment lines starting with ``#`` and contains no
timestamps, so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .derivatives import sign_pattern
from .engines import GridConfig, MCConfig, heat_content, make_engine
from .errors import EngineError
from .geometry import load_domain
from .inequalities import (
    CASE_IDS,
    build_case,
    compare_constants,
    standard_t_grid,
    verify,
)

DEFAULT_SEED = 0x5EED


def parse_t_grid(spec: str) -> np.ndarray:
    """Parse ``geom:lo:hi:n`` or ``list:v1,v2,...`` into an ascending grid."""
    if spec.startswith("geom:"):
        parts = spec.split(":")[1:]
        if len(parts) != 3:
            raise ValueError(f"bad geometric grid spec {spec!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if not (lo > 0 and hi >= lo and n >= 1):
            raise ValueError(f"bad geometric grid spec {spec!r}")
        return np.geomspace(lo, hi, n)
    if spec.startswith("list:"):
        body = spec[len("list:") :]
        values = [float(v) for v in body.split(",") if v.strip()]
        if not values or any(v <= 0 for v in values):
            raise ValueError(f"time grid must be non-empty and positive: {spec!r}")
        if sorted(values) != values:
            raise ValueError(f"time grid must be ascending: {spec!r}")
        return np.asarray(values)
    raise ValueError(f"unknown t-grid spec {spec!r} (use geom:... or list:...)")


def _fmt(x: float) -> str:
    """Shortest round-trip formatting for CSV cells."""
    return repr(float(x))


def _grid_cfg(args) -> GridConfig:
    return GridConfig(
        h=args.h, padding_sigmas=args.padding_sigmas, richardson=args.richardson
    )


def _mc_cfg(args) -> MCConfig:
    return MCConfig(n_samples=args.n_samples, seed=args.seed)


def _write_csv(path: str, header_comments: list[str], columns: list[str], rows):
    lines = [f"# {line}" for line in header_comments]
    lines.append(",".join(columns))
    lines.extend(",".join(cells) for cells in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _common_meta(args) -> list[str]:
    meta = [
        f"domain: {args.domain}",
        f"engine: {args.engine}",
        f"seed: {args.seed}",
    ]
    if args.h is not None:
        meta.append(f"h: {_fmt(args.h)}")
    if args.raster_h is not None:
        meta.append(f"raster_h: {_fmt(args.raster_h)}")
    meta.append(f"padding_sigmas: {_fmt(args.padding_sigmas)}")
    meta.append(f"n_samples: {args.n_samples}")
    return meta


def cmd_compute(args) -> int:
    domain = load_domain(args.domain)
    est = heat_content(
        domain,
        args.t,
        engine=args.engine,
        grid_cfg=_grid_cfg(args),
        mc_cfg=_mc_cfg(args),
        raster_h=args.raster_h,
    )
    print(f"H({args.t:.12g}) = {est.value:.12g}")
    print(f"error_bound = {est.error_bound:.12g} ({est.kind})")
    print(f"method = {est.method}")
    return 0


def cmd_verify(args) -> int:
    domain = load_domain(args.domain)
    if args.cases.strip() == "all":
        case_ids = list(CASE_IDS)
    else:
        case_ids = [c.strip() for c in args.cases.split(",") if c.strip()]
    cases = [build_case(cid) for cid in case_ids]
    explicit_grid = parse_t_grid(args.t_grid) if args.t_grid else None

    handle = make_engine(
        domain,
        args.engine,
        grid_cfg=_grid_cfg(args),
        mc_cfg=_mc_cfg(args),
        raster_h=args.raster_h,
    )
    domain_id = f"{Path(args.domain).stem}|{handle.domain_label}"

    reports = []
    for case in cases:
        t_grid = (
            explicit_grid
            if explicit_grid is not None
            else standard_t_grid(case, handle.domain, n=args.grid_points)
        )
        reports.append(
            verify(case, domain, t_grid, handle, domain_id=domain_id)
        )

    if args.out:
        meta = [
            "heatcontent verify",
            *_common_meta(args),
            f"cases: {','.join(case_ids)}",
            f"t_grid: {args.t_grid or f'auto({args.grid_points} points per window)'}",
        ]
        columns = [
            "case_id",
            "domain_id",
            "m",
            "t",
            "lhs",
            "rhs",
            "margin",
            "tolerance",
            "verdict",
        ]
        rows = []
        for rep in reports:
            for r in rep.rows:
                rows.append(
                    [
                        rep.case_id,
                        rep.domain_id,
                        str(rep.m),
                        _fmt(r.t),
                        _fmt(r.lhs),
                        _fmt(r.rhs),
                        _fmt(r.margin),
                        _fmt(r.tolerance),
                        r.verdict,
                    ]
                )
        _write_csv(args.out, meta, columns, rows)

    for rep in reports:
        print(rep.summary())
    n_pass = sum(rep.overall_pass for rep in reports)
    print(f"verify: {n_pass}/{len(reports)} cases passed")
    return 0 if n_pass == len(reports) else 1


def cmd_sweep(args) -> int:
    domain = load_domain(args.domain)
    if args.engine == "mc":
        raise ValueError(
            "engine too noisy: sweeps take second and third derivatives, "
            "which the Monte Carlo engine cannot support"
        )
    t_grid = parse_t_grid(args.t_grid)
    handle = make_engine(
        domain,
        args.engine,
        grid_cfg=_grid_cfg(args),
        mc_cfg=_mc_cfg(args),
        raster_h=args.raster_h,
    )
    report = sign_pattern(handle, t_grid, levels=args.levels)

    columns = [
        "t",
        "H",
        "H_err",
        "dH1",
        "dH1_err",
        "dH2",
        "dH2_err",
        "dH3",
        "dH3_err",
    ]
    rows = [
        [
            _fmt(r.t),
            _fmt(r.h),
            _fmt(r.h_err),
            _fmt(r.d1),
            _fmt(r.d1_err),
            _fmt(r.d2),
            _fmt(r.d2_err),
            _fmt(r.d3),
            _fmt(r.d3_err),
        ]
        for r in report.rows
    ]
    if args.out:
        meta = [
            "heatcontent sweep",
            *_common_meta(args),
            f"t_grid: {args.t_grid}",
            f"domain_label: {handle.domain_label}",
        ]
        _write_csv(args.out, meta, columns, rows)
    else:
        print(",".join(columns))
        for cells in rows:
            print(",".join(cells))
    for t, name, value, tol in report.violations:
        print(
            f"sign violation at t={t:.12g}: {name} = {value:.12g} "
            f"(tolerance {tol:.12g})",
            file=sys.stderr,
        )
    return 0 if report.ok else 1


def cmd_compare(args) -> int:
    if args.m_min < 1 or args.m_max < args.m_min:
        raise ValueError("need 1 <= m-min <= m-max")
    rows_data = compare_constants(range(args.m_min, args.m_max + 1))
    columns = [
        "m",
        "improved_mono",
        "bg24_mono",
        "ratio_mono",
        "improved_conv",
        "bg24_conv",
        "ratio_conv",
        "integrated_sharper",
    ]
    rows = [
        [
            str(r.m),
            _fmt(r.improved_mono),
            _fmt(r.bg24_mono),
            _fmt(r.ratio_mono),
            _fmt(r.improved_conv),
            _fmt(r.bg24_conv),
            _fmt(r.ratio_conv),
            "true" if r.integrated_sharper else "false",
        ]
        for r in rows_data
    ]
    if args.out:
        meta = ["heatcontent compare-constants", f"m_range: [{args.m_min}, {args.m_max}]"]
        _write_csv(args.out, meta, columns, rows)
    else:
        print(",".join(columns))
        for cells in rows:
            print(",".join(cells))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatcontent",
        description="Heat content of bounded sets: computation, derivatives, "
        "and verification of decay/convexity bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_domain=True):
        if needs_domain:
            p.add_argument("--domain", required=True, help="domain JSON file")
        p.add_argument(
            "--engine",
            default="auto",
            choices=["auto", "closed", "grid", "mc", "brute"],
        )
        p.add_argument("--h", type=float, default=None, help="grid spacing")
        p.add_argument(
            "--padding-sigmas",
            type=float,
            default=8.0,
            dest="padding_sigmas",
            help="Gaussian truncation radius in standard deviations",
        )
        p.add_argument(
            "--richardson",
            action="store_true",
            help="add a step-halving term to the grid error bound",
        )
        p.add_argument("--raster-h", type=float, default=None, dest="raster_h")
        p.add_argument("--n-samples", type=int, default=100_000, dest="n_samples")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("compute", help="compute H(t) once")
    add_common(p)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="verify bound cases, write report CSV")
    add_common(p)
    p.add_argument(
        "--cases",
        default="all",
        help=f"comma-separated case ids or 'all' ({', '.join(CASE_IDS)})",
    )
    p.add_argument(
        "--t-grid",
        default=None,
        dest="t_grid",
        help="geom:<lo>:<hi>:<n> or list:v1,v2,... "
        "(default: per-case window grid)",
    )
    p.add_argument(
        "--grid-points",
        type=int,
        default=20,
        dest="grid_points",
        help="points for the default per-case grids",
    )
    p.add_argument("--out", default=None, help="report CSV path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="H and derivatives over a time grid")
    add_common(p)
    p.add_argument("--t-grid", required=True, dest="t_grid")
    p.add_argument("--levels", type=int, default=2, help="Richardson levels")
    p.add_argument("--out", default=None, help="sweep CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "compare-constants", help="improved vs baseline constants table"
    )
    p.add_argument("--m-min", type=int, default=1, dest="m_min")
    p.add_argument("--m-max", type=int, default=20, dest="m_max")
    p.add_argument("--out", default=None, help="table CSV path")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit codes
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"engine failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

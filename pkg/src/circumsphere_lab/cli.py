"""Command-line front end: ``csl simulate | pdf | compare | table1 | extremes``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 a comparison verdict failed.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, engine, extremes, specfun

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERDICT = 0, 1, 2, 3
PDF_VARS = ("h", "r", "delta", "omega", "sigma", "delta_c", "joint")
DEFAULT_KS = (25, 50, 75, 100, 125, 150, 175, 200)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("CSL_DEFAULT_SEED", "0")
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"CSL_DEFAULT_SEED must be an integer, got {raw!r}") from None
    return seed


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _count(text: str) -> int:
    """Event count accepting forms like 1000000, 1e6 or 2e7."""
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if val != int(val):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(val)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write_manifest(out: Path, argv, config: dict, seed, started: str, paths) -> Path:
    manifest = {
        "tool": "csl",
        "version": __version__,
        "command": list(argv),
        "config": config,
        "seed": seed,
        "started": started,
        "finished": _now(),
        "outputs": sorted(str(Path(p).relative_to(out)) for p in paths),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) or math.isnan(x) else f"{x:.10g}"


# --- commands -----------------------------------------------------------------


def cmd_simulate(args, argv) -> int:
    started = _now()
    try:
        sim = engine.SimConfig(
            args.d, args.n, args.N, seed=args.seed, workers=args.workers,
            bins=args.bins, family_filter=args.family,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = engine.run_simulation(sim)
    out = Path(args.out)
    paths = res.write(out)
    _write_manifest(out, argv, sim.to_dict(), sim.seed, started, paths)
    total = sum(res.family_counts.values())
    fr = {f: c / total for f, c in res.family_counts.items()}
    print(f"d={sim.d} n={sim.n} N={res.n_events} families " + " ".join(f"{k}={v:.6f}" for k, v in fr.items()))
    if res.truncated:
        print("warning: run truncated by memory exhaustion", file=sys.stderr)
    return EXIT_OK


def pdf_grid(var: str, cfg, grid: int):
    """Analytic curve on an endpoint-inclusive grid of [0, 1]; rows of (x, density) or (x, y, density)."""
    if grid < 2:
        raise UsageError("--grid must be >= 2")
    xs = np.linspace(0.0, 1.0, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        if var == "joint":
            X, Y = np.meshgrid(xs, xs, indexing="ij")
            dens = analytic.joint_pdf_delta_omega(X, Y, cfg)
            return [(x, y, v) for x, y, v in zip(X.ravel(), Y.ravel(), np.ravel(dens))]
        dens = np.array([_pdf_point(var, x, cfg) for x in xs])
    return list(zip(xs, dens))


def _pdf_point(var, x, cfg) -> float:
    try:
        return float(analytic.pdf(var, x, cfg))
    except ZeroDivisionError:
        return math.inf


def cmd_pdf(args, argv) -> int:
    started = _now()
    if args.var not in PDF_VARS:
        raise UsageError(f"--var must be one of {PDF_VARS}")
    try:
        cfg = analytic.BallConfig(args.d, args.n)
        if args.var in ("h", "r") and cfg.n == cfg.d:
            raise ValueError(f"{args.var} is identically {0 if args.var == 'h' else 1} when n = d; no density")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = args.grid if args.grid else (201 if args.var == "joint" else 2001)
    rows = pdf_grid(args.var, cfg, grid)
    header = "x,y,density" if args.var == "joint" else "x,density"
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"pdf_{args.var}_d{cfg.d}_n{cfg.n}.csv"
        path.write_text(text)
        _write_manifest(out, argv, {"d": cfg.d, "n": cfg.n, "var": args.var, "grid": grid}, None, started, [path])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _load_result(path: str) -> engine.SimResult:
    p = Path(path)
    if p.is_dir():
        p = p / "result.json"
    if not p.exists():
        raise UsageError(f"no result file at {p}")
    return engine.SimResult.from_json(p.read_text())


def cmd_compare(args, argv) -> int:
    started = _now()
    res = _load_result(args.result)
    d = args.d if args.d is not None else res.config.d
    n = args.n if args.n is not None else res.config.n
    try:
        target = analytic.BallConfig(d, n)
        cmp = engine.compare_to_analytic(res, args.var, target, alpha=args.alpha)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    report = cmp.to_dict()
    report["result"] = str(args.result)
    line = (
        f"{args.var} d={d} n={n} N_C={cmp.n_samples} KS={cmp.ks:.3e} crit={cmp.ks_critical:.3e} "
        f"chi2/dof={cmp.chi2 / cmp.chi2_dof:.3f} max|resid|={cmp.max_abs_density:.3e}@bin{cmp.max_abs_bin} "
        f"verdict={report['verdict']}"
    )
    print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        pj = out / f"compare_{args.var}.json"
        pj.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
        hist = res.histograms[args.var]
        edges = hist.edges
        pc = out / f"compare_{args.var}.csv"
        rows = ["bin_left,bin_right,residual"]
        rows += [f"{edges[i]:.10g},{edges[i + 1]:.10g},{r:.10g}" for i, r in enumerate(cmp.residuals)]
        pc.write_text("\n".join(rows) + "\n")
        _write_manifest(out, argv, {"d": d, "n": n, "var": args.var, "alpha": args.alpha}, None, started, [pj, pc])
    return EXIT_OK if cmp.passed else EXIT_VERDICT


def table1_rows(n_events: int, seed: int, workers: int = 1, dims=range(2, 10), n: int = 2) -> list[dict]:
    """Exact and simulated containment probabilities for the requested dimensions."""
    rows = []
    for d in dims:
        exact = analytic.prob_contained_exact((d, n))
        sim = engine.SimConfig(
            d, n, n_events, seed=seed, workers=workers, family_filter="all",
            tracked_vars=(), track_unfiltered=False,
        )
        res = engine.run_simulation(sim)
        p_hat, _ = res.family_fraction("C")
        p = float(exact)
        rows.append({
            "d": d, "n": n, "exact": str(exact), "exact_decimal": p, "estimate": p_hat,
            "abs_error": abs(p_hat - p), "se": math.sqrt(p * (1 - p) / res.n_events),
            "n_events": res.n_events,
        })
    return rows


def cmd_table1(args, argv) -> int:
    started = _now()
    dims = args.dims if args.dims else list(range(2, 10))
    if any(d < 2 for d in dims):
        raise UsageError("dimensions must be >= 2 for n = 2")
    if args.N < 1:
        raise UsageError("-N must be >= 1")
    rows = table1_rows(args.N, args.seed, args.workers, dims)
    cols = ["d", "exact", "exact_decimal", "estimate", "abs_error", "se"]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join([str(r["d"]), r["exact"]] + [f"{r[c]:.10g}" for c in cols[2:]]))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "table1.csv"
        path.write_text(text)
        _write_manifest(out, argv, {"N": args.N, "dims": dims, "n": 2}, args.seed, started, [path])
    return EXIT_OK


def cmd_extremes(args, argv) -> int:
    started = _now()
    ks = args.k_list if args.k_list else list(DEFAULT_KS)
    if any(k > args.N for k in ks):
        raise UsageError("every block size k must not exceed -N")
    try:
        sim = engine.SimConfig(
            args.d, args.n, args.N, seed=args.seed, workers=args.workers, bins=args.bins,
            family_filter="all", tracked_vars=(), track_unfiltered=True, block_max_ks=tuple(ks),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = engine.run_simulation(sim)
    samples = {k: res.blockmax(k) for k in ks}
    omax = res.max_history[-1][1] if res.max_history else None
    scan = extremes.tail_scan(samples, args.omega_max, res.power_sums["omega_all"], omax, seed=args.seed)
    out = Path(args.out)
    paths = scan.write(out)
    for row in scan.rows:
        if row.ok:
            paths.append(_write_fit_curve(out, row, samples[row.k], args.omega_max))
    _write_manifest(out, argv, sim.to_dict() | {"omega_max": args.omega_max}, sim.seed, started, paths)
    for row in scan.rows:
        status = "ok" if row.ok else f"failed: {row.error}"
        print(f"k={row.k} a={row.a:.4f} s={row.s:.4f} m={row.m:.4f} mode={row.mode:.4f} n={row.n_maxima} {status}")
    if scan.complete:
        print(f"slope(s_k)={scan.s_slope:.4f} R2={scan.s_r2:.4f} slope(mode)={scan.mode_slope:.4f}")
    else:
        print("scan incomplete: fewer than 3 successful fits", file=sys.stderr)
    return EXIT_OK if any(r.ok for r in scan.rows) else EXIT_NUMERIC


def _write_fit_curve(out: Path, row, maxima, omega_max: float, bins: int = 250) -> Path:
    x = np.asarray(maxima, dtype=float)
    x = x[x < omega_max]
    edges = np.linspace(0.0, omega_max, bins + 1)
    counts, _ = np.histogram(x, edges)
    width = edges[1] - edges[0]
    mid = 0.5 * (edges[:-1] + edges[1:])
    fitted = extremes.frechet_truncated_pdf(mid, extremes.FrechetParams(row.a, row.m, row.s, omega_max))
    emp = counts / (x.size * width)
    path = out / f"fit_k{row.k}.csv"
    lines = ["x,empirical,fitted"] + [f"{m:.10g},{e:.10g},{f:.10g}" for m, e, f in zip(mid, emp, fitted)]
    path.write_text("\n".join(lines) + "\n")
    return path


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csl", description="Circumspheres of random points in the unit ball.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_dn=True, with_n_events=True):
        sp.add_argument("-d", type=int, required=need_dn, default=None, help="ambient dimension")
        sp.add_argument("-n", type=int, required=need_dn, default=None, help="flat dimension")
        if with_n_events:
            sp.add_argument("-N", type=_count, default=1_000_000, help="number of events")
            sp.add_argument("--seed", type=int, default=None, help="seed (env CSL_DEFAULT_SEED otherwise)")
            sp.add_argument("--workers", type=int, default=1, help="event blocks / processes")

    s = sub.add_parser("simulate", help="run the Monte-Carlo engine")
    common(s)
    s.add_argument("--bins", type=int, default=1000)
    s.add_argument("--family", choices=engine.FAMILY_FILTERS, default="C")
    s.add_argument("--out", default="csl_out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("pdf", help="evaluate an analytic density on a grid")
    common(s, with_n_events=False)
    s.add_argument("--var", required=True)
    s.add_argument("--grid", type=int, default=None, help="grid points including both endpoints")
    s.add_argument("--out", default=None, help="directory; CSV goes to stdout if omitted")
    s.set_defaults(func=cmd_pdf)

    s = sub.add_parser("compare", help="compare a simulated histogram with its analytic law")
    s.add_argument("result", help="result.json or the directory holding it")
    common(s, need_dn=False, with_n_events=False)
    s.add_argument("--var", required=True)
    s.add_argument("--alpha", type=float, default=0.01)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("table1", help="containment probabilities, exact versus simulated (n = 2)")
    s.add_argument("-N", type=_count, default=1_000_000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dims", type=_int_list, default=None, help="comma-separated dimensions, default 2..9")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("extremes", help="block-maxima Frechet scan of the circumradius")
    s.add_argument("-d", type=int, default=2)
    s.add_argument("-n", type=int, default=2)
    s.add_argument("-N", type=_count, default=20_000_000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--bins", type=int, default=1000)
    s.add_argument("--k-list", dest="k_list", type=_int_list, default=None)
    s.add_argument("--omega-max", dest="omega_max", type=float, default=250.0)
    s.add_argument("--out", default="csl_extremes")
    s.set_defaults(func=cmd_extremes)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed"):
            if args.seed is None:
                args.seed = _default_seed()
            if args.seed < 0:
                raise UsageError("--seed must be non-negative")
        return args.func(args, ["csl"] + argv)
    except UsageError as exc:
        print(f"csl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (specfun.ConvergenceError, extremes.FitError, FloatingPointError, ArithmeticError) as exc:
        print(f"csl: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Monte-Carlo driver: simulate circumspheres, classify, accumulate mergeable state.

Events are split into ``workers`` contiguous blocks, block i drawing from
RngStream(seed, i) with a fixed internal batch size, so every block is a
pure function of (config, block index). Power sums are kept as exact
rationals of per-batch float sums, which makes merging exactly
associative and commutative.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import geometry, randvar
from .analytic import BallConfig

FILTERED_VARS = ("omega", "delta", "h", "delta_c", "sigma")
FAMILY_FILTERS = ("C", "D", "E", "all")
FILTERED_POWERS = 8
UNFILTERED_POWERS = 12
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SimConfig:
    d: int
    n: int
    n_events: int
    seed: int = 0
    workers: int = 1
    bins: int = 1000
    family_filter: str = "C"
    tracked_vars: tuple[str, ...] = FILTERED_VARS
    track_unfiltered: bool = True
    lin_range: tuple[float, float] = (0.0, 1.0)
    log_range: tuple[float, float] = (1e-3, 1e9)
    pivot_tol: float = geometry.PIVOT_TOL
    omega_slices: tuple[tuple[float, float], ...] = ()
    block_max_ks: tuple[int, ...] = ()
    keep_raw: int = 0
    batch_size: int = 65536
    normal_method: str = "box-muller"

    def __post_init__(self) -> None:
        BallConfig(self.d, self.n)
        if self.n_events < 1:
            raise ValueError(f"n_events must be >= 1, got {self.n_events}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.family_filter not in FAMILY_FILTERS:
            raise ValueError(f"family_filter must be one of {FAMILY_FILTERS}")
        bad = set(self.tracked_vars) - set(FILTERED_VARS)
        if bad:
            raise ValueError(f"unknown tracked variables {sorted(bad)}")
        if any(k < 2 for k in self.block_max_ks):
            raise ValueError("block sizes must be >= 2")
        if not self.lin_range[0] < self.lin_range[1]:
            raise ValueError("lin_range must be increasing")
        if not 0 < self.log_range[0] < self.log_range[1]:
            raise ValueError("log_range must be positive and increasing")
        for lo, hi in self.omega_slices:
            if not lo < hi:
                raise ValueError(f"empty omega slice ({lo}, {hi})")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    @property
    def ball(self) -> BallConfig:
        return BallConfig(self.d, self.n)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, val in out.items():
            if isinstance(val, tuple):
                out[key] = [list(v) if isinstance(v, tuple) else v for v in val]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> SimConfig:
        kw = dict(data)
        for key in ("tracked_vars", "lin_range", "log_range", "block_max_ks"):
            if key in kw:
                kw[key] = tuple(kw[key])
        if "omega_slices" in kw:
            kw["omega_slices"] = tuple(tuple(s) for s in kw["omega_slices"])
        return cls(**kw)

    def block_sizes(self) -> list[int]:
        q, r = divmod(self.n_events, self.workers)
        return [q + (1 if i < r else 0) for i in range(self.workers)]


# --- histogram ---------------------------------------------------------------


@dataclass
class Histogram:
    """Fixed-bin streaming histogram on [lo, hi), linear or log spacing."""

    lo: float
    hi: float
    nbins: int
    spacing: str = "linear"
    counts: np.ndarray = field(default=None)
    underflow: int = 0
    overflow: int = 0

    def __post_init__(self) -> None:
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError("log spacing needs lo > 0")
        if not self.lo < self.hi or self.nbins < 1:
            raise ValueError("bad histogram range or bin count")
        if self.counts is None:
            self.counts = np.zeros(self.nbins, dtype=np.int64)
        else:
            self.counts = np.asarray(self.counts, dtype=np.int64)
            if self.counts.shape != (self.nbins,):
                raise ValueError("counts length does not match nbins")

    @property
    def edges(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.lo, self.hi, self.nbins + 1)
        return np.geomspace(self.lo, self.hi, self.nbins + 1)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def in_range(self) -> int:
        return int(self.counts.sum())

    def _index(self, x: np.ndarray) -> np.ndarray:
        if self.spacing == "linear":
            t = (x - self.lo) / (self.hi - self.lo)
        else:
            t = np.log(x / self.lo) / math.log(self.hi / self.lo)
        return np.floor(t * self.nbins).astype(np.int64)

    def fill(self, values) -> None:
        x = np.asarray(values, dtype=float).ravel()
        if x.size == 0:
            return
        low = x < self.lo
        high = x >= self.hi
        self.underflow += int(low.sum())
        self.overflow += int(high.sum())
        idx = self._index(x[~(low | high)])
        np.clip(idx, 0, self.nbins - 1, out=idx)
        self.counts += np.bincount(idx, minlength=self.nbins)

    def same_shape(self, other: Histogram) -> bool:
        return (self.lo, self.hi, self.nbins, self.spacing) == (other.lo, other.hi, other.nbins, other.spacing)

    def merge(self, other: Histogram) -> Histogram:
        if not self.same_shape(other):
            raise ValueError("cannot merge histograms with different binning")
        return Histogram(
            self.lo,
            self.hi,
            self.nbins,
            self.spacing,
            self.counts + other.counts,
            self.underflow + other.underflow,
            self.overflow + other.overflow,
        )

    def copy(self) -> Histogram:
        return Histogram(self.lo, self.hi, self.nbins, self.spacing, self.counts.copy(), self.underflow, self.overflow)

    def density(self) -> np.ndarray:
        """Counts / (total * width); integrates to the in-range fraction."""
        tot = self.total
        if tot == 0:
            return np.zeros(self.nbins)
        return self.counts / (tot * np.diff(self.edges))

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "nbins": self.nbins,
            "spacing": self.spacing,
            "counts": self.counts.tolist(),
            "underflow": self.underflow,
            "overflow": self.overflow,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Histogram:
        return cls(
            data["lo"], data["hi"], data["nbins"], data["spacing"],
            np.asarray(data["counts"], dtype=np.int64), data["underflow"], data["overflow"],
        )

    def to_csv(self, path) -> None:
        e = self.edges
        mid = 0.5 * (e[:-1] + e[1:]) if self.spacing == "linear" else np.sqrt(e[:-1] * e[1:])
        dens = self.density()
        lines = ["bin_left,bin_mid,bin_right,count,density"]
        for i in range(self.nbins):
            lines.append(f"{e[i]:.10g},{mid[i]:.10g},{e[i + 1]:.10g},{int(self.counts[i])},{dens[i]:.10g}")
        Path(path).write_text("\n".join(lines) + "\n")


# --- result ------------------------------------------------------------------


def _zero_sums(k: int) -> list[Fraction]:
    return [Fraction(0)] * (k + 1)


def _add_powers(sums: list[Fraction], x: np.ndarray) -> None:
    sums[0] += x.size
    p = np.array(x, dtype=float)
    for j in range(1, len(sums)):
        s = float(p.sum())
        if not math.isfinite(s):
            raise OverflowError(f"power sum of order {j} overflowed")
        sums[j] += Fraction(s)
        p *= x


@dataclass
class SimResult:
    config: SimConfig
    n_events: int = 0
    family_counts: dict = field(default_factory=lambda: {"C": 0, "D": 0, "E": 0})
    n_degenerate: int = 0
    n_origin_outside: int = 0
    histograms: dict = field(default_factory=dict)
    power_sums: dict = field(default_factory=dict)
    max_history: list = field(default_factory=list)
    block_maxima: dict = field(default_factory=dict)
    block_max_discarded: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    offset: int = 0
    truncated: bool = False

    # -- derived quantities --
    @property
    def n_filtered(self) -> int:
        f = self.config.family_filter
        return self.n_events if f == "all" else self.family_counts[f]

    def family_fraction(self, fam: str) -> tuple[float, float]:
        """Binomial estimate and standard error of a family probability."""
        if self.n_events == 0:
            raise ValueError("no events")
        p = self.family_counts[fam] / self.n_events
        return p, math.sqrt(p * (1 - p) / self.n_events)

    def moment(self, var: str, k: int) -> float:
        s = self.power_sums[var]
        if s[0] == 0:
            raise ValueError(f"no samples recorded for {var}")
        return float(s[k] / s[0])

    def moment_se(self, var: str, k: int) -> float:
        """Plug-in standard error of the k-th sample moment (needs the 2k-th power sum)."""
        s = self.power_sums[var]
        if 2 * k >= len(s):
            raise ValueError(f"order {k} needs power sums up to {2 * k}")
        cnt = s[0]
        if cnt < 2:
            raise ValueError(f"too few samples for {var}")
        var_k = s[2 * k] / cnt - (s[k] / cnt) ** 2
        return math.sqrt(max(float(var_k), 0.0) / float(cnt))

    def blockmax(self, k: int) -> np.ndarray:
        segs = sorted(self.block_maxima.get(k, []), key=lambda t: t[0])
        if not segs:
            return np.zeros(0)
        return np.concatenate([s[1] for s in segs])

    def moment_table(self) -> list[dict]:
        rows = []
        for var, sums in sorted(self.power_sums.items()):
            if sums[0] == 0:
                continue
            kmax = len(sums) - 1
            for k in range(1, kmax + 1):
                row = {"var": var, "k": k, "mean": float(sums[k] / sums[0])}
                row["se"] = self.moment_se(var, k) if 2 * k <= kmax and sums[0] >= 2 else None
                rows.append(row)
        return rows

    # -- serialisation --
    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "n_events": self.n_events,
            "truncated": self.truncated,
            "family_counts": dict(self.family_counts),
            "n_degenerate": self.n_degenerate,
            "n_origin_outside": self.n_origin_outside,
            "histograms": {k: h.to_dict() for k, h in self.histograms.items()},
            "power_sums": {k: [str(v) for v in s] for k, s in self.power_sums.items()},
            "moments": self.moment_table(),
            "max_history": [
                {"event_index": i, "omega_max": w, "flat_residual": r} for i, w, r in self.max_history
            ],
            "block_max_discarded": {str(k): v for k, v in self.block_max_discarded.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> SimResult:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data.get('schema_version')}")
        res = cls(SimConfig.from_dict(data["config"]))
        res.n_events = data["n_events"]
        res.truncated = data["truncated"]
        res.family_counts = dict(data["family_counts"])
        res.n_degenerate = data["n_degenerate"]
        res.n_origin_outside = data["n_origin_outside"]
        res.histograms = {k: Histogram.from_dict(h) for k, h in data["histograms"].items()}
        res.power_sums = {k: [Fraction(v) for v in s] for k, s in data["power_sums"].items()}
        res.max_history = [
            (h["event_index"], h["omega_max"], h["flat_residual"]) for h in data["max_history"]
        ]
        res.block_max_discarded = {int(k): v for k, v in data["block_max_discarded"].items()}
        return res

    @classmethod
    def from_json(cls, text: str) -> SimResult:
        return cls.from_dict(json.loads(text))

    def write(self, out_dir) -> list[Path]:
        """Write result.json and one CSV per histogram; returns the paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / "result.json"]
        paths[0].write_text(self.to_json())
        for name, hist in sorted(self.histograms.items()):
            p = out / f"hist_{_safe(name)}.csv"
            hist.to_csv(p)
            paths.append(p)
        return paths


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "_-." else "_" for c in name)


def slice_key(lo: float, hi: float) -> str:
    return f"delta_c|omega[{lo!r},{hi!r})"


def empty_result(sim: SimConfig) -> SimResult:
    """Identity element for :func:`merge`."""
    res = SimResult(sim)
    lo, hi = sim.lin_range
    for v in sim.tracked_vars:
        res.histograms[v] = Histogram(lo, hi, sim.bins)
        res.power_sums[v] = _zero_sums(FILTERED_POWERS)
    for a, b in sim.omega_slices:
        res.histograms[slice_key(a, b)] = Histogram(lo, hi, sim.bins)
    if sim.track_unfiltered:
        res.histograms["omega_all"] = Histogram(*sim.log_range, sim.bins, "log")
        res.power_sums["omega_all"] = _zero_sums(UNFILTERED_POWERS)
    for k in sim.block_max_ks:
        res.block_maxima[k] = []
        res.block_max_discarded[k] = 0
    if sim.keep_raw:
        for v in sim.tracked_vars:
            res.raw[v] = np.zeros(0)
    return res


# --- simulation ----------------------------------------------------------------


def _family_code(name: str) -> int:
    return geometry.FAMILIES.index(name)


def run_block(sim: SimConfig, block_index: int) -> SimResult:
    """Simulate one contiguous block of events with its own random stream."""
    sizes = sim.block_sizes()
    if not 0 <= block_index < len(sizes):
        raise ValueError(f"block index {block_index} out of range")
    offset = sum(sizes[:block_index])
    todo = sizes[block_index]
    stream = randvar.RngStream(sim.seed, block_index, sim.normal_method)
    res = empty_result(sim)
    res.offset = offset
    d, n = sim.d, sim.n
    want = None if sim.family_filter == "all" else _family_code(sim.family_filter)
    best = -math.inf
    carry = {k: (0, -math.inf) for k in sim.block_max_ks}
    maxima = {k: [] for k in sim.block_max_ks}
    raw_parts = {v: [] for v in res.raw}
    raw_left = sim.keep_raw
    done = 0
    try:
        while done < todo:
            m = min(sim.batch_size, todo - done)
            pts = randvar.sample_uniform_ball(d, stream, m * (n + 1)).reshape(m, n + 1, d)
            batch = geometry.circumsphere_batch(pts, sim.pivot_tol)
            ok = ~batch.degenerate
            res.n_degenerate += int(m - ok.sum())
            if not ok.all():
                batch = _select(batch, ok)
            m_ok = batch.omega.size
            fam = batch.family
            for code, name in enumerate(geometry.FAMILIES):
                res.family_counts[name] += int(np.count_nonzero(fam == code))
            in_c = fam == 0
            res.n_origin_outside += int(np.count_nonzero(batch.delta[in_c] > batch.omega[in_c]))

            sel = slice(None) if want is None else fam == want
            n_sel = 0
            for v in sim.tracked_vars:
                x = getattr(batch, v)[sel]
                n_sel = x.size
                res.histograms[v].fill(x)
                _add_powers(res.power_sums[v], x)
                if raw_left > 0:
                    raw_parts[v].append(x[:raw_left])
            raw_left -= min(raw_left, n_sel)
            if sim.omega_slices:
                om_c, dc_c = batch.omega[in_c], batch.delta_c[in_c]
                for a, b in sim.omega_slices:
                    w = (om_c >= a) & (om_c < b)
                    res.histograms[slice_key(a, b)].fill(dc_c[w])

            om = batch.omega
            if sim.track_unfiltered:
                res.histograms["omega_all"].fill(om)
                _add_powers(res.power_sums["omega_all"], om)
            # running-maximum record history, 1-based global event index
            run = np.maximum(np.maximum.accumulate(om), best)
            new = np.flatnonzero(run > np.concatenate([[best], run[:-1]]))
            for i in new:
                res.max_history.append((offset + done + int(i) + 1, float(om[i]), float(batch.min_pivot[i])))
            best = max(best, float(run[-1])) if m_ok else best
            for k in sim.block_max_ks:
                got, cur = carry[k]
                x = om
                if got:
                    need = k - got
                    head = x[:need]
                    cur = max(cur, float(head.max())) if head.size else cur
                    got += head.size
                    x = x[need:]
                    if got == k:
                        maxima[k].append(np.array([cur]))
                        got, cur = 0, -math.inf
                full = x.size // k
                if full:
                    maxima[k].append(x[: full * k].reshape(full, k).max(axis=1))
                rest = x[full * k:]
                if rest.size:
                    got, cur = rest.size, float(rest.max())
                carry[k] = (got, cur)
            done += m_ok
    except MemoryError:
        res.truncated = True
    res.n_events = done
    for k in sim.block_max_ks:
        res.block_maxima[k] = [(offset, np.concatenate(maxima[k]) if maxima[k] else np.zeros(0))]
        res.block_max_discarded[k] = carry[k][0]
    for v, parts in raw_parts.items():
        res.raw[v] = np.concatenate(parts)[: sim.keep_raw] if parts else np.zeros(0)
    return res


def _select(batch: geometry.CircumBatch, mask: np.ndarray) -> geometry.CircumBatch:
    return geometry.CircumBatch(
        batch.omega[mask], batch.delta[mask], batch.h[mask], batch.delta_c[mask],
        batch.sigma[mask], batch.family[mask], batch.min_pivot[mask],
        batch.degenerate[mask], batch.center[mask],
    )


def _run_block_args(args):
    return run_block(*args)


def run_simulation(sim: SimConfig, parallel: bool | None = None) -> SimResult:
    """Run all blocks and merge them in block order.

    The result depends only on (config, seed, workers); ``parallel`` only
    decides whether blocks run in separate processes.
    """
    if parallel is None:
        parallel = sim.workers > 1 and (os.cpu_count() or 1) > 1
    jobs = [(sim, i) for i in range(sim.workers)]
    if parallel:
        with ProcessPoolExecutor(max_workers=min(sim.workers, os.cpu_count() or 1)) as pool:
            parts = list(pool.map(_run_block_args, jobs))
    else:
        parts = [run_block(*j) for j in jobs]
    return merge(parts)


# --- merging -----------------------------------------------------------------


def _compatible(a: SimConfig, b: SimConfig) -> bool:
    keys = ("d", "n", "bins", "family_filter", "tracked_vars", "track_unfiltered",
            "lin_range", "log_range", "omega_slices", "block_max_ks", "keep_raw")
    return all(getattr(a, k) == getattr(b, k) for k in keys)


def _merge_history(parts: list[list]) -> list:
    events = sorted((e for p in parts for e in p), key=lambda t: t[0])
    out = []
    best = -math.inf
    for e in events:
        if e[1] > best:
            out.append(e)
            best = e[1]
    return out


def merge(results: list[SimResult]) -> SimResult:
    """Combine results of compatible runs; exact, associative and commutative."""
    results = [r for r in results if r is not None]
    if not results:
        raise ValueError("nothing to merge")
    cfg = results[0].config
    for r in results[1:]:
        if not _compatible(cfg, r.config):
            raise ValueError("cannot merge results with different shapes")
    if len(results) == 1:
        return results[0]
    out = empty_result(cfg)
    out.n_events = sum(r.n_events for r in results)
    out.offset = min(r.offset for r in results)
    out.truncated = any(r.truncated for r in results)
    for fam in out.family_counts:
        out.family_counts[fam] = sum(r.family_counts[fam] for r in results)
    out.n_degenerate = sum(r.n_degenerate for r in results)
    out.n_origin_outside = sum(r.n_origin_outside for r in results)
    for name in out.histograms:
        h = out.histograms[name]
        for r in results:
            h = h.merge(r.histograms[name])
        out.histograms[name] = h
    for name in out.power_sums:
        out.power_sums[name] = [sum(col, Fraction(0)) for col in zip(*(r.power_sums[name] for r in results))]
    out.max_history = _merge_history([r.max_history for r in results])
    for k in out.block_maxima:
        out.block_maxima[k] = sorted((s for r in results for s in r.block_maxima[k]), key=lambda t: t[0])
        out.block_max_discarded[k] = sum(r.block_max_discarded[k] for r in results)
    if cfg.keep_raw:
        order = sorted(results, key=lambda r: r.offset)
        for v in out.raw:
            out.raw[v] = np.concatenate([r.raw[v] for r in order])[: cfg.keep_raw]
    return out


# --- derived estimates ---------------------------------------------------------


def estimate_origin_outside(result: SimResult) -> tuple[float, float]:
    """Fraction of contained circumspheres whose centre is farther from O' than their radius."""
    nc = result.family_counts["C"]
    if nc == 0:
        raise ValueError("no contained circumspheres: estimate undefined")
    p = result.n_origin_outside / nc
    return p, math.sqrt(p * (1 - p) / nc)


def conditional_histogram(result: SimResult, omega0: float, eps: float) -> Histogram:
    """Histogram of OC over contained events with omega in [omega0 - eps, omega0 + eps).

    The window must have been requested in the run's ``omega_slices``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    for lo, hi in result.config.omega_slices:
        if math.isclose(lo, omega0 - eps, abs_tol=1e-12) and math.isclose(hi, omega0 + eps, abs_tol=1e-12):
            return result.histograms[slice_key(lo, hi)]
    raise KeyError(
        f"slice [{omega0 - eps}, {omega0 + eps}) was not recorded; add it to SimConfig.omega_slices"
    )


# --- comparison with the analytic laws ---------------------------------------


@dataclass
class Comparison:
    """Histogram-versus-analytic agreement for one variable of family-C events."""

    var: str
    d: int
    n: int
    n_samples: int
    ks: float
    ks_critical: float
    ks_bin: int
    chi2: float
    chi2_dof: int
    chi2_pvalue: float
    max_abs_density: float
    max_abs_bin: int
    residuals: np.ndarray
    alpha: float
    config_match: bool

    @property
    def passed(self) -> bool:
        return self.ks < self.ks_critical

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "residuals"}
        out["residuals"] = [float(r) for r in self.residuals]
        out["verdict"] = "pass" if self.passed else "fail"
        return out


CHI2_MIN_EXPECTED = 5.0


def _pool_bins(obs: np.ndarray, expected: np.ndarray, floor: float):
    """Merge adjacent bins left to right until each expects at least ``floor`` counts."""
    cuts = []
    acc = 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= floor:
            cuts.append(i + 1)
            acc = 0.0
    if not cuts:
        return np.array([obs.sum()]), np.array([expected.sum()])
    cuts[-1] = expected.size
    starts = np.array([0] + cuts[:-1])
    return np.add.reduceat(obs, starts), np.add.reduceat(expected, starts)


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Two-sided one-sample KS critical distance at level alpha."""
    from scipy import stats

    return float(stats.kstwo.isf(alpha, n))


def compare_to_analytic(result: SimResult, var: str, ball=None, alpha: float = 0.01) -> Comparison:
    """KS distance at bin edges, chi-square and density residuals against the analytic pdf.

    ``ball`` selects the analytic target and defaults to the result's own
    (d, n). A different target is allowed (``config_match`` records it);
    the verdict then rests on the data alone.
    """
    from scipy import stats

    from .analytic import _cfg, bin_probabilities

    if result.config.family_filter != "C":
        raise ValueError("analytic laws describe family C; the result was filtered differently")
    if var not in result.histograms:
        raise KeyError(f"variable {var!r} was not tracked")
    hist = result.histograms[var]
    if hist.spacing != "linear" or hist.lo != 0.0 or hist.hi != 1.0:
        raise ValueError("comparison needs a linear histogram on [0, 1]")
    total = hist.total
    if total == 0:
        raise ValueError(f"histogram of {var!r} is empty")
    target = _cfg(ball) if ball is not None else result.config.ball
    probs = bin_probabilities(var, hist.edges, target)
    counts = np.asarray(hist.counts, dtype=float)
    emp_cdf = (hist.underflow + np.cumsum(counts)) / total
    ana_cdf = np.cumsum(probs)
    gap = np.abs(emp_cdf - ana_cdf)
    gap0 = hist.underflow / total
    ks_bin = int(np.argmax(gap))
    ks = max(float(gap[ks_bin]), gap0)
    obs, expected = _pool_bins(counts, total * probs, CHI2_MIN_EXPECTED)
    chi2 = float(np.sum((obs - expected) ** 2 / expected))
    dof = max(obs.size - 1, 1)
    width = np.diff(hist.edges)
    resid = counts / (total * width) - probs / width
    mbin = int(np.argmax(np.abs(resid)))
    return Comparison(
        var, target.d, target.n, int(total), ks, ks_critical(int(total), alpha), ks_bin,
        chi2, dof, float(stats.chi2.sf(chi2, dof)), float(abs(resid[mbin])), mbin,
        resid, alpha, (target.d, target.n) == (result.config.d, result.config.n),
    )

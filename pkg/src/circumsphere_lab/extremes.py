"""Block maxima and truncated Frechet fits for the heavy tail of the circumradius."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize, special, stats

MIN_MAXIMA = 100
A_BOUNDS = (0.05, 20.0)


class FitError(RuntimeError):
    """The Frechet fit could not be carried out or did not converge."""

    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class BlockMaxSample:
    k: int
    maxima: np.ndarray
    discarded: int = 0

    def __len__(self) -> int:
        return int(self.maxima.size)


def block_maxima(values, k: int) -> BlockMaxSample:
    """Maxima of consecutive blocks of k values; the incomplete tail block is dropped."""
    if k < 2:
        raise ValueError(f"block size must be >= 2, got {k}")
    x = np.asarray(values, dtype=float).ravel()
    if x.size < k:
        raise ValueError(f"need at least k={k} values, got {x.size}")
    full = x.size // k
    return BlockMaxSample(k, x[: full * k].reshape(full, k).max(axis=1), int(x.size - full * k))


@dataclass(frozen=True)
class FrechetParams:
    """Shape a, location m, scale s; normalised on (m, omega_M)."""

    a: float
    m: float
    s: float
    omega_M: float = math.inf

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.s > 0 and self.m >= 0 and self.omega_M > self.m):
            raise ValueError(f"invalid Frechet parameters {self}")

    @property
    def mode(self) -> float:
        """Mode of the untruncated law."""
        return self.m + self.s * (self.a / (1 + self.a)) ** (1 / self.a)

    def _tail(self) -> float:
        if math.isinf(self.omega_M):
            return 0.0
        return ((self.omega_M - self.m) / self.s) ** (-self.a)


def frechet_truncated_pdf(x, p: FrechetParams):
    """Frechet density renormalised to (m, omega_M); zero outside."""
    xa = np.asarray(x, dtype=float)
    ok = (xa > p.m) & (xa < p.omega_M)
    t = np.where(ok, (xa - p.m) / p.s, 1.0)
    val = (p.a / p.s) * t ** (-(1 + p.a)) * np.exp(-(t ** (-p.a)) + p._tail())
    out = np.where(ok, val, 0.0)
    return float(out) if out.ndim == 0 else out


def frechet_truncated_cdf(x, p: FrechetParams):
    xa = np.asarray(x, dtype=float)
    t = np.where(xa > p.m, (xa - p.m) / p.s, 1.0)
    val = np.exp(-(t ** (-p.a)) + p._tail())
    out = np.where(xa <= p.m, 0.0, np.where(xa >= p.omega_M, 1.0, val))
    return float(out) if out.ndim == 0 else out


def sample_frechet_truncated(p: FrechetParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-cdf draws from the truncated law."""
    u = 1.0 - rng.random(size)
    t = (p._tail() - np.log(u)) ** (-1.0 / p.a)
    return p.m + p.s * t


# --- fitting -------------------------------------------------------------------


@dataclass
class FrechetFit:
    params: FrechetParams
    nll: float
    wls: FrechetParams | None
    sse: float
    discrepancy: float
    n_used: int
    n_above: int
    restarts: int
    converged: bool = True
    message: str = ""


def _unpack(theta, lo_m: float):
    a = A_BOUNDS[0] + (A_BOUNDS[1] - A_BOUNDS[0]) * float(special.expit(theta[0]))
    m = lo_m * float(special.expit(theta[1]))
    s = math.exp(min(max(float(theta[2]), -700.0), 700.0))
    return a, m, s


def _pack(a: float, m: float, s: float, lo_m: float):
    fa = (a - A_BOUNDS[0]) / (A_BOUNDS[1] - A_BOUNDS[0])
    fm = min(max(m / lo_m, 1e-9), 1 - 1e-9)
    return np.array([math.log(fa / (1 - fa)), math.log(fm / (1 - fm)), math.log(s)])


def _nll(theta, x: np.ndarray, lo_m: float, top: float) -> float:
    """Mean negative log-likelihood; per-sample scaling keeps optimiser tolerances meaningful."""
    a, m, s = _unpack(theta, lo_m)
    t = (x - m) / s
    if np.any(t <= 0):
        return math.inf
    tail = 0.0 if math.isinf(top) else ((top - m) / s) ** (-a)
    lt = np.log(t)
    ll = x.size * (math.log(a / s) + tail) - (1 + a) * lt.sum() - np.exp(-a * lt).sum()
    return -float(ll) / x.size


def fit_frechet(
    sample,
    omega_M: float = 250.0,
    init: tuple[float, float, float] | None = None,
    restarts: int = 5,
    seed: int = 0,
    bins: int = 200,
) -> FrechetFit:
    """Truncated-Frechet maximum likelihood fit with a binned least-squares cross-check.

    Maxima at or above ``omega_M`` fall outside the normalisation range
    and are excluded (their count is reported). Optimisation runs in units
    of the sample median, so the fit is scale-equivariant.
    """
    x_all = np.asarray(sample.maxima if isinstance(sample, BlockMaxSample) else sample, dtype=float)
    x = x_all[x_all < omega_M]
    if x.size < MIN_MAXIMA:
        raise FitError(f"need >= {MIN_MAXIMA} maxima below omega_M, got {x.size}")
    if not np.ptp(x) > 0:
        raise FitError("degenerate sample: all maxima are equal")
    scale = float(np.median(x))
    xs = x / scale
    top = omega_M / scale
    lo_m = float(xs.min())
    if init is None:
        a0, m0 = 1.0, 0.1 * lo_m
        s0 = max(1.0 - m0, 1e-3) * math.log(2.0)
    else:
        a0, m0, s0 = init[0], min(init[1] / scale, 0.9 * lo_m), init[2] / scale
    base = _pack(min(max(a0, 0.06), 19.9), m0, s0, lo_m)
    rng = np.random.default_rng(seed)
    starts = [base] + [base + rng.normal(0.0, 0.5, 3) for _ in range(restarts)]
    best = None
    for th in starts:
        r = optimize.minimize(
            _nll, th, args=(xs, lo_m, top), method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": 4000, "maxfev": 8000},
        )
        if best is None or r.fun < best.fun:
            best = r
    a, m, s = _unpack(best.x, lo_m)
    if not (np.isfinite(best.fun) and best.success):
        last = FrechetParams(a, m * scale, s * scale, omega_M)
        raise FitError(f"likelihood optimisation failed: {best.message}", last)
    params = FrechetParams(a, m * scale, s * scale, omega_M)
    wls, sse = _wls_fit(x, params, bins)
    disc = max(abs(wls.a / params.a - 1), abs(wls.s / params.s - 1)) if wls else math.nan
    return FrechetFit(
        params, x.size * (best.fun + math.log(scale)), wls, sse, disc,
        int(x.size), int(x_all.size - x.size), restarts,
    )


def _wls_fit(x: np.ndarray, start: FrechetParams, bins: int):
    """Weighted least squares of the truncated pdf against a histogram of x."""
    hi = min(start.omega_M, float(np.quantile(x, 0.995)))
    edges = np.linspace(0.0, hi, bins + 1)
    counts, _ = np.histogram(x, edges)
    width = edges[1] - edges[0]
    emp = counts / (x.size * width)
    mid = 0.5 * (edges[:-1] + edges[1:])
    w = x.size * width / np.maximum(counts, 1)
    lo_m = float(x.min())

    def resid(th):
        a, m, s = _unpack(th, lo_m)
        p = FrechetParams(a, m, s, start.omega_M)
        return np.sqrt(w) * (emp - frechet_truncated_pdf(mid, p))

    th0 = _pack(start.a, start.m, start.s, lo_m)
    try:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            r = optimize.least_squares(resid, th0, method="lm", xtol=1e-12, ftol=1e-12)
        a, m, s = _unpack(r.x, lo_m)
        sse = float(np.sum(r.fun**2))
        if not (np.all(np.isfinite(r.x)) and math.isfinite(sse) and s < math.inf):
            return None, math.nan
        return FrechetParams(a, m, s, start.omega_M), sse
    except (ValueError, FloatingPointError, OverflowError):
        return None, math.nan


def empirical_mode(values, grid: int = 4096) -> float:
    """Mode of a positive sample from a binned Gaussian KDE of log(x), mapped back to x."""
    x = np.asarray(values, dtype=float)
    x = x[x > 0]
    if x.size < 2 or not np.ptp(x) > 0:
        raise ValueError("need at least two distinct positive values")
    y = np.log(x)
    bw = 1.06 * min(np.std(y), stats.iqr(y) / 1.34) * y.size ** (-0.2)
    lo, hi = y.min() - 4 * bw, y.max() + 4 * bw
    counts, edges = np.histogram(y, grid, (lo, hi))
    step = edges[1] - edges[0]
    half = int(math.ceil(4 * bw / step))
    ker = np.exp(-0.5 * (np.arange(-half, half + 1) * step / bw) ** 2)
    dens_y = np.convolve(counts, ker, mode="same")
    mids = 0.5 * (edges[:-1] + edges[1:])
    return float(np.exp(mids[np.argmax(dens_y * np.exp(-mids))]))


# --- scan over block sizes ------------------------------------------------------


@dataclass
class ScanRow:
    k: int
    a: float
    s: float
    m: float
    mode: float
    sse: float
    n_maxima: int
    fit_mode: float = math.nan
    wls_a: float = math.nan
    wls_s: float = math.nan
    ok: bool = True
    error: str = ""


@dataclass
class TailScan:
    rows: list[ScanRow]
    omega_M: float
    s_slope: float = math.nan
    s_intercept: float = math.nan
    s_r2: float = math.nan
    mode_slope: float = math.nan
    mode_intercept: float = math.nan
    rho: list[float] = field(default_factory=list)
    omega_max: float = math.nan
    complete: bool = False

    def to_dict(self) -> dict:
        def clean(v):
            return None if isinstance(v, float) and not math.isfinite(v) else v

        out = {k: clean(v) for k, v in asdict(self).items() if k != "rows"}
        out["rho"] = [clean(v) for v in self.rho]
        out["rows"] = [{k: clean(v) for k, v in asdict(r).items()} for r in self.rows]
        return out

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        pj = out / "scan.json"
        pj.write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")
        pc = out / "scan.csv"
        lines = ["k,a,s,m,mode,sse,n_maxima"]
        for r in self.rows:
            lines.append(f"{r.k},{r.a:.10g},{r.s:.10g},{r.m:.10g},{r.mode:.10g},{r.sse:.10g},{r.n_maxima}")
        pc.write_text("\n".join(lines) + "\n")
        return [pj, pc]


def tail_scan(
    samples: dict,
    omega_M: float = 250.0,
    power_sums=None,
    omega_max: float | None = None,
    seed: int = 0,
) -> TailScan:
    """Fit every block size, then regress the fitted scale and the empirical mode on k.

    ``power_sums`` (S_0..S_J of the unfiltered radius) and the running
    maximum give the ratio diagnostics rho_j = S_(j+1) / S_j.
    """
    rows = []
    for k in sorted(samples):
        smp = samples[k]
        x = np.asarray(smp.maxima if isinstance(smp, BlockMaxSample) else smp, dtype=float)
        try:
            fit = fit_frechet(x, omega_M, seed=seed)
            p = fit.params
            mode = empirical_mode(x[x < omega_M])
            rows.append(ScanRow(
                k, p.a, p.s, p.m, mode, fit.sse, int(x.size), p.mode,
                fit.wls.a if fit.wls else math.nan, fit.wls.s if fit.wls else math.nan,
            ))
        except (FitError, ValueError) as exc:
            nan = math.nan
            rows.append(ScanRow(k, nan, nan, nan, nan, nan, int(x.size), ok=False, error=str(exc)))
    scan = TailScan(rows, omega_M)
    good = [r for r in rows if r.ok]
    if len(good) >= 3:
        ks = np.array([r.k for r in good], dtype=float)
        reg = stats.linregress(ks, [r.s for r in good])
        scan.s_slope, scan.s_intercept, scan.s_r2 = reg.slope, reg.intercept, reg.rvalue**2
        mreg = stats.linregress(ks, [r.mode for r in good])
        scan.mode_slope, scan.mode_intercept = mreg.slope, mreg.intercept
        scan.complete = True
    if power_sums is not None:
        ps = [float(v) for v in power_sums]
        scan.rho = [ps[j + 1] / ps[j] for j in range(1, len(ps) - 1)]
    if omega_max is not None:
        scan.omega_max = float(omega_max)
    return scan

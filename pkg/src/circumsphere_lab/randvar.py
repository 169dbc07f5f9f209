"""Random streams and samplers: normal, uniform ball, gamma, beta, Dirichlet,
and the beta-product representations of the distance and the circumradius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun

NORMAL_METHODS = ("box-muller", "ziggurat")


@dataclass
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    Distinct stream ids under one seed give independent Philox keys, so
    per-worker blocks can be drawn in any order and merged afterwards.
    """

    seed: int
    stream_id: int = 0
    normal_method: str = "box-muller"
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.normal_method not in NORMAL_METHODS:
            raise ValueError(f"unknown normal method {self.normal_method!r}")
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self._gen = np.random.Generator(np.random.Philox(seq))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self, size=None):
        """Uniform draws on the half-open interval (0, 1]."""
        return 1.0 - self._gen.random(size)

    def normal(self, size=None):
        if self.normal_method == "ziggurat":
            return self._gen.standard_normal(size)
        count = 1 if size is None else int(np.prod(size))
        pairs = (count + 1) // 2
        u1 = self.uniform(pairs)
        u2 = self._gen.random(pairs)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * math.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        if size is None:
            return float(z[0])
        return z[:count].reshape(size)


def sample_std_normal(stream: RngStream, size=None):
    return stream.normal(size)


def sample_uniform_ball(d: int, stream: RngStream, size=None) -> np.ndarray:
    """Points uniform in the open unit d-ball: Gaussian direction, radius U**(1/d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    count = 1 if size is None else int(size)
    g = stream.normal((count, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = stream.generator.random(count) ** (1.0 / d)
    pts = g * radius[:, None]
    return pts[0] if size is None else pts


def sample_gamma(q: float, stream: RngStream, size=None):
    """gamma(q, 1) draws (Marsaglia-Tsang squeeze, via numpy)."""
    if not q > 0:
        raise ValueError(f"gamma shape must be positive, got {q}")
    return stream.generator.standard_gamma(q, size)


def sample_beta(q1: float, q2: float, stream: RngStream, size=None):
    """Be(q1, q2) as X1 / (X1 + X2) with independent gamma variates."""
    if not (q1 > 0 and q2 > 0):
        raise ValueError(f"beta shapes must be positive, got ({q1}, {q2})")
    x1 = sample_gamma(q1, stream, size)
    x2 = sample_gamma(q2, stream, size)
    return x1 / (x1 + x2)


def sample_dirichlet(q, stream: RngStream, size=None) -> np.ndarray:
    """Dir(q) from normalised independent gamma variates; last axis sums to 1."""
    q = [float(v) for v in q]
    if len(q) < 2 or any(not v > 0 for v in q):
        raise ValueError(f"Dirichlet needs >= 2 positive shapes, got {q}")
    count = 1 if size is None else int(size)
    g = np.column_stack([sample_gamma(v, stream, count) for v in q])
    out = g / g.sum(axis=1, keepdims=True)
    return out[0] if size is None else out


# --- products of independent beta variables ------------------------------


@dataclass(frozen=True)
class BetaPair:
    """Shapes of two independent beta factors whose product is the target."""

    first: tuple[float, float]
    second: tuple[float, float]

    def __post_init__(self) -> None:
        if min(self.first + self.second) <= 0:
            raise ValueError(f"beta shapes must be positive: {self}")

    def sample(self, stream: RngStream, size=None):
        return sample_beta(*self.first, stream, size) * sample_beta(*self.second, stream, size)


def beta_product_pdf(x, p1: tuple[float, float], p2: tuple[float, float]):
    """Density of X1 * X2 with X1 ~ Be(*p1), X2 ~ Be(*p2) independent."""
    (a1, b1), (a2, b2) = p1, p2
    if min(a1, b1, a2, b2) <= 0:
        raise ValueError("beta shapes must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa >= 1)):
        raise ValueError("beta_product_pdf is defined on the open interval (0, 1)")
    log_k = specfun.ln_beta(b1, b2) - specfun.ln_beta(a1, b1) - specfun.ln_beta(a2, b2)
    hyp = specfun.gauss_2f1(a1 + b1 - a2, b2, b1 + b2, 1.0 - xa)
    out = np.exp(log_k + (a1 - 1.0) * np.log(xa) + (b1 + b2 - 1.0) * np.log1p(-xa)) * hyp
    return float(out) if np.ndim(out) == 0 else out


def invert_beta_product(a: float, b: float, c: float, s: float) -> tuple[BetaPair, BetaPair]:
    """Both beta-product laws with density proportional to
    x**(s-1) (1-x)**(c-1) 2F1(a, b; c; 1-x).

    The two solutions differ by the exchange of a and b.
    """
    if not (a > 0 and b > 0 and c > 0 and s > 0):
        raise ValueError("a, b, c, s must all be positive")
    if not (c > a and c > b and c + s > a + b):
        raise ValueError(f"need c > a, c > b and c + s > a + b; got a={a}, b={b}, c={c}, s={s}")
    if a == b:
        raise ValueError("a == b gives a single degenerate representation")
    tail = c + s - a - b
    return BetaPair((s, c - b), (tail, b)), BetaPair((s, c - a), (tail, a))


def _check_dn(d: int, n: int) -> None:
    if not (1 <= n <= d):
        raise ValueError(f"need 1 <= n <= d, got d={d}, n={n}")


def delta_sq_params(d: int, n: int) -> tuple[float, float, float, float]:
    """(a, b, c, s) of the squared-distance density written in product form."""
    return n * d / 2, (n * d - n + d + 1) / 2, n * d + (d - n) / 2 + 1, n / 2


def omega_sq_params(d: int, n: int) -> tuple[float, float, float, float]:
    """(a, b, c, s) of the squared-circumradius density written in product form."""
    return n / 2, (d + 1) / 2, (d + n) / 2 + 1, n * d / 2


def delta_representations(d: int, n: int) -> dict[str, BetaPair]:
    _check_dn(d, n)
    r2, r1 = invert_beta_product(*delta_sq_params(d, n))
    return {"R1": r1, "R2": r2}


def omega_representations(d: int, n: int) -> dict[str, BetaPair]:
    _check_dn(d, n)
    s1, s2 = invert_beta_product(*omega_sq_params(d, n))
    return {"S1": s1, "S2": s2}


def sample_delta(d: int, n: int, stream: RngStream, size=None, representation: str = "R1"):
    """Distance O'C of a contained circumsphere, as sqrt(X1 X2)."""
    pair = delta_representations(d, n)[representation]
    return np.sqrt(pair.sample(stream, size))


def sample_omega(d: int, n: int, stream: RngStream, size=None, representation: str = "S1"):
    """Circumradius of a contained circumsphere, as sqrt(Y1 Y2)."""
    pair = omega_representations(d, n)[representation]
    return np.sqrt(pair.sample(stream, size))


def sample_chord_half_surface(d: int, stream: RngStream, size=None):
    """Half-chord between two uniform points on the unit sphere of R^(d+2)."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    q = (d + 1) / 2
    return np.sqrt(sample_beta(q, q, stream, size))


def sample_delta_c_squared(d: int, n: int, stream: RngStream, size=None):
    """OC**2 = Z + Dr**2 (1 - Z), Z ~ Be((d-n)/2, 1+n(d+1)/2), Dr ~ Be(n, nd+1)."""
    _check_dn(d, n)
    if n == d:
        raise ValueError("n == d: OC has the Be(d, d^2+1) law directly")
    z = sample_beta((d - n) / 2, 1 + n * (d + 1) / 2, stream, size)
    dr = sample_beta(n, n * d + 1, stream, size)
    return z + dr * dr * (1.0 - z)

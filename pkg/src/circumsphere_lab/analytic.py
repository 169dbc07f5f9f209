"""Closed-form densities, moments and probabilities for contained circumspheres.

Everything here is a pure function of (d, n); constants are assembled in
log space and cached per configuration.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import specfun
from .specfun import gauss_2f1, ln_beta

LN2 = math.log(2.0)
LN_SQRT_PI = 0.5 * math.log(math.pi)
VARIABLES = ("h", "r", "delta", "omega", "sigma", "delta_c")


@dataclass(frozen=True)
class BallConfig:
    """Ambient dimension d and flat dimension n, 1 <= n <= d."""

    d: int
    n: int

    def __post_init__(self) -> None:
        if int(self.d) != self.d or int(self.n) != self.n:
            raise ValueError(f"d and n must be integers, got d={self.d}, n={self.n}")
        if not (1 <= self.n <= self.d):
            raise ValueError(f"need 1 <= n <= d, got d={self.d}, n={self.n}")


def _cfg(cfg) -> BallConfig:
    if isinstance(cfg, BallConfig):
        return cfg
    d, n = cfg
    return BallConfig(int(d), int(n))


@dataclass(frozen=True)
class PdfConstants:
    """Natural logs of the normalisation constants of the joint and marginal pdfs."""

    log_k: float
    log_d: float
    log_w: float
    log_z: float
    log_e: float | None
    log_j: float

    @property
    def K(self) -> float:
        return math.exp(self.log_k)

    @property
    def D(self) -> float:
        return math.exp(self.log_d)

    @property
    def W(self) -> float:
        return math.exp(self.log_w)

    @property
    def Z(self) -> float:
        return math.exp(self.log_z)

    @property
    def E(self) -> float | None:
        return None if self.log_e is None else math.exp(self.log_e)

    @property
    def J(self) -> float:
        return math.exp(self.log_j)


@lru_cache(maxsize=None)
def constants(cfg) -> PdfConstants:
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    lg = math.lgamma
    g_top = lg((n * (d + 1) + 1) / 2) + lg((n + 1) * d / 2 + 1)
    log_k = (n + n * d) * LN2 - LN_SQRT_PI + g_top - lg(n) - lg(n * d) - lg((d - n + 2) / 2)
    log_d = g_top - lg(n) - lg(n * d + (d - n) / 2 + 1)
    log_w = g_top - lg(n * d) - lg((n + d) / 2 + 1)
    # Jacobian of (delta, omega) -> (sigma, y) is 1/2, so Z = K 2^(1 - n(d+1))
    log_z = LN2 - LN_SQRT_PI + g_top - lg(n) - lg(n * d) - lg((d - n) / 2 + 1)
    log_e = None
    if n < d:
        log_e = LN2 - ln_beta((d - n) / 2, n * (d + 1) / 2 + 1) - ln_beta(n, n * d + 1)
    log_j = math.log(n * (d + 1)) - (n * d + n - 1) * LN2 - ln_beta(n, n * d)
    return PdfConstants(log_k, log_d, log_w, log_z, log_e, log_j)


# --- helpers --------------------------------------------------------------


def _unit_arg(x, name: str) -> tuple[np.ndarray, bool]:
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any((xa < 0) | (xa > 1)):
        raise ValueError(f"{name} must lie in [0, 1]")
    return np.atleast_1d(xa), xa.ndim == 0


def _ret(out: np.ndarray, scalar: bool):
    return float(out[0]) if scalar else out


def _xpow(x: np.ndarray, p: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.power(x, p)


def _need_lower(cfg: BallConfig, what: str) -> None:
    if cfg.n == cfg.d:
        raise ValueError(f"{what} is undefined for n == d (the flat is the whole space)")


# --- joint densities ------------------------------------------------------


def joint_pdf_delta_omega(delta, omega, cfg):
    """Joint density of (distance O'C, circumradius) for contained circumspheres."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    de = np.asarray(delta, dtype=float)
    om = np.asarray(omega, dtype=float)
    s = de + om
    inside = (de > 0) & (om > 0) & (s < 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (
            constants(cfg).K
            * np.power(de, n - 1)
            * np.power(om, n * d - 1)
            * np.power(np.clip(1.0 - s * s, 0.0, None), (d - n) / 2)
        )
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def rescaled_joint_pdf(delta_r, omega_r, cfg):
    """Dir(n, nd, 1) density of the rescaled pair (delta/r, omega/r)."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    de = np.asarray(delta_r, dtype=float)
    om = np.asarray(omega_r, dtype=float)
    if np.any(de < 0) or np.any(om < 0) or np.any(de + om > 1):
        raise ValueError("rescaled pair must lie in the closed unit triangle")
    const = math.exp(math.log(n * (d + 1)) - ln_beta(n, n * d))
    with np.errstate(divide="ignore"):
        out = const * np.power(de, n - 1) * np.power(om, n * d - 1)
    return float(out) if out.ndim == 0 else out


def conditional_pdf_delta_r_given_omega_r(delta_r, omega_r: float, cfg):
    """Density of delta_r given omega_r: the centre is uniform in an n-ball of radius 1 - omega_r."""
    cfg = _cfg(cfg)
    if not 0 < omega_r < 1:
        raise ValueError("omega_r must lie in (0, 1)")
    de = np.asarray(delta_r, dtype=float)
    if np.any(de < 0) or np.any(de > 1 - omega_r):
        raise ValueError("delta_r must lie in [0, 1 - omega_r]")
    n = cfg.n
    out = n * np.power(de, n - 1) / (1.0 - omega_r) ** n
    return float(out) if out.ndim == 0 else out


def joint_pdf_sigma_y(sigma, y, cfg):
    """Joint density of (delta + omega, delta - omega)."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    s = np.asarray(sigma, dtype=float)
    yy = np.asarray(y, dtype=float)
    inside = (s > 0) & (s < 1) & (np.abs(yy) < s)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (
            constants(cfg).Z
            * np.power(s + yy, n - 1)
            * np.power(s - yy, n * d - 1)
            * np.power(np.clip(1.0 - s * s, 0.0, None), (d - n) / 2)
        )
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


# --- univariate densities -------------------------------------------------


def pdf_h(h, cfg):
    """Density of the distance from the centre of the ball to the flat."""
    cfg = _cfg(cfg)
    _need_lower(cfg, "pdf_h")
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(h, "h")
    c = 2.0 * math.exp(-ln_beta((d - n) / 2, 1 + n * (d + 1) / 2))
    out = c * _xpow(x, d - n - 1) * np.power(1.0 - x * x, n * (d + 1) / 2)
    return _ret(out, scalar)


def pdf_r(r, cfg):
    """Density of the radius of the section of the unit sphere by the flat."""
    cfg = _cfg(cfg)
    _need_lower(cfg, "pdf_r")
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(r, "r")
    c = 2.0 * math.exp(-ln_beta((d - n) / 2, 1 + n * (d + 1) / 2))
    out = c * np.power(x, n * (d + 1) + 1) * _xpow(1.0 - x * x, (d - n - 2) / 2)
    return _ret(out, scalar)


def pdf_delta(delta, cfg, form: str = "linear"):
    """Marginal density of the distance O'C.

    ``form="linear"`` uses the 2F1 at (1 - delta)/2 <= 1/2; ``"quadratic"``
    uses the alternative 2F1 at 1 - delta^2 (a cross-check).
    """
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(delta, "delta")
    nd_half = n * d + (d - n) / 2
    c = nd_half
    log_d = constants(cfg).log_d
    if form == "linear":
        pref = math.exp(((d + n) / 2 + n * d) * LN2 - LN_SQRT_PI + log_d)
        hyp = gauss_2f1((d - n) / 2 + 1, (n - d) / 2, nd_half + 1, (1.0 - x) / 2)
        out = pref * _xpow(x, n - 1) * np.power(1.0 - x, c) * hyp
    elif form == "quadratic":
        pref = math.exp(n * LN2 - LN_SQRT_PI + log_d)
        z = 1.0 - x * x
        out = np.zeros_like(x)
        ok = z > 0
        hyp = gauss_2f1(n * d / 2, (n * d - n + d + 1) / 2, nd_half + 1, z[ok])
        out[ok] = pref * _xpow(x[ok], n - 1) * np.power(z[ok], c) * hyp
    else:
        raise ValueError(f"unknown form {form!r}")
    return _ret(out, scalar)


def pdf_omega(omega, cfg, form: str = "linear"):
    """Marginal density of the circumradius; ``form`` as for :func:`pdf_delta`."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(omega, "omega")
    log_w = constants(cfg).log_w
    if form == "linear":
        pref = math.exp(((d + n) / 2 + n * d) * LN2 - LN_SQRT_PI + log_w)
        hyp = gauss_2f1((d - n) / 2 + 1, (n - d) / 2, (d + n) / 2 + 1, (1.0 - x) / 2)
        out = pref * _xpow(x, n * d - 1) * np.power(1.0 - x, (d + n) / 2) * hyp
    elif form == "quadratic":
        pref = math.exp(n * d * LN2 - LN_SQRT_PI + log_w)
        z = 1.0 - x * x
        out = np.zeros_like(x)
        ok = z > 0
        hyp = gauss_2f1(n / 2, (d + 1) / 2, (d + n) / 2 + 1, z[ok])
        out[ok] = pref * _xpow(x[ok], n * d - 1) * np.power(z[ok], (d + n) / 2) * hyp
    else:
        raise ValueError(f"unknown form {form!r}")
    return _ret(out, scalar)


def pdf_sigma(sigma, cfg):
    """Density of delta + omega; its square is Be(n(d+1)/2, 1 + (d-n)/2)."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(sigma, "sigma")
    c = 2.0 * math.exp(-ln_beta(n * (d + 1) / 2, 1 + (d - n) / 2))
    out = c * _xpow(x, n + n * d - 1) * np.power(1.0 - x * x, (d - n) / 2)
    return _ret(out, scalar)


def _delta_c_integral(dc: float, d: int, n: int) -> float:
    # x = dc sin t removes the endpoint singularity at x = dc
    if dc == 0.0:
        return 0.0
    p = d * (n - 1) / 2
    q = d * (n + 1) / 2

    def f(t):
        s = math.sin(t)
        x = dc * s
        return s ** (n - 1) * math.cos(t) ** (d - n - 1) * (1.0 - x) ** p / (1.0 + x) ** q

    val, _ = integrate.quad(f, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-12, limit=200)
    return dc ** (d - 2) * val


def pdf_delta_c(delta_c, cfg):
    """Density of the distance OC between the ball centre and the circumcentre."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    x, scalar = _unit_arg(delta_c, "delta_c")
    if n == d:
        out = np.power(x, d - 1) * np.power(1.0 - x, d * d) * math.exp(-ln_beta(d, d * d + 1))
        return _ret(out, scalar)
    e = constants(cfg).E
    vals = [
        e * v * (1.0 - v * v) ** (n * (d + 1) / 2) * _delta_c_integral(float(v), d, n) for v in x
    ]
    return _ret(np.asarray(vals), scalar)


@lru_cache(maxsize=None)
def _joint_dc_omega_norm(cfg: BallConfig) -> float:
    d, n = cfg.d, cfg.n

    def u(dc, w):
        return _joint_dc_omega_unnormalised(dc, w, d, n)

    lower, _ = integrate.dblquad(u, 0.0, 1.0, 0.0, lambda w: 1.0 - w, epsabs=0.0, epsrel=1e-11)
    upper, _ = integrate.dblquad(
        u, 0.0, 1.0, lambda w: 1.0 - w, lambda w: math.sqrt(1.0 - w * w), epsabs=0.0, epsrel=1e-11
    )
    return 1.0 / (lower + upper)


def _joint_dc_omega_unnormalised(dc: float, w: float, d: int, n: int) -> float:
    a, b = (d - n) / 2, n / 2
    if dc + w > 1.0:
        beta = (1.0 - (dc - w) ** 2) * ((dc + w) ** 2 - 1.0) / (4.0 * w * w * dc * dc)
        tail = 1.0 - specfun.reg_inc_beta(min(beta, 1.0), a, b)
    else:
        tail = 1.0
    return dc ** (d - 1) * w ** (n * d - 1) * math.exp(ln_beta(a, b)) * tail


def joint_pdf_delta_c_omega(delta_c: float, omega: float, cfg) -> float:
    """Joint density of (OC, circumradius), normalised by 2-D quadrature (cached per cfg)."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    if not (0 <= delta_c <= 1 and 0 <= omega <= 1) or delta_c**2 + omega**2 > 1 + 1e-15:
        raise ValueError("(delta_c, omega) must lie in the closed quarter disk")
    if n == d:
        return joint_pdf_delta_omega(delta_c, omega, cfg)
    return _joint_dc_omega_norm(cfg) * _joint_dc_omega_unnormalised(delta_c, omega, d, n)


# --- distribution functions for comparisons -------------------------------

_PDFS = {
    "h": pdf_h,
    "r": pdf_r,
    "delta": pdf_delta,
    "omega": pdf_omega,
    "sigma": pdf_sigma,
    "delta_c": pdf_delta_c,
}


def pdf(var: str, x, cfg):
    """Dispatch to the named univariate density."""
    if var not in _PDFS:
        raise ValueError(f"unknown variable {var!r}; expected one of {sorted(_PDFS)}")
    return _PDFS[var](x, cfg)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def bin_probabilities(var: str, edges, cfg) -> np.ndarray:
    """Analytic probability of each bin [edges[i], edges[i+1]) on (0, 1)."""
    cfg = _cfg(cfg)
    e = np.asarray(edges, dtype=float)
    if np.any(np.diff(e) <= 0) or e[0] < 0 or e[-1] > 1:
        raise ValueError("edges must be increasing inside [0, 1]")
    d, n = cfg.d, cfg.n
    if var == "sigma":
        return np.diff(specfun.reg_inc_beta(e * e, n * (d + 1) / 2, 1 + (d - n) / 2))
    if var == "h":
        _need_lower(cfg, "h")
        return np.diff(specfun.reg_inc_beta(e * e, (d - n) / 2, 1 + n * (d + 1) / 2))
    if var == "r":
        _need_lower(cfg, "r")
        return np.diff(specfun.reg_inc_beta(e * e, 1 + n * (d + 1) / 2, (d - n) / 2))
    if var == "delta_c" and n == d:
        return np.diff(specfun.reg_inc_beta(e, d, d * d + 1))
    lo, hi = e[:-1], e[1:]
    half = 0.5 * (hi - lo)
    nodes = (lo + half)[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.asarray(pdf(var, nodes.ravel(), cfg)).reshape(nodes.shape)
    return half * (vals @ _GL_W)


def cdf_at(var: str, edges, cfg) -> np.ndarray:
    """Analytic cdf at increasing points of [0, 1], starting from F(0) = 0."""
    e = np.asarray(edges, dtype=float)
    if e[0] != 0.0:
        e = np.concatenate([[0.0], e])
        return np.cumsum(bin_probabilities(var, e, cfg))
    return np.concatenate([[0.0], np.cumsum(bin_probabilities(var, e, cfg))])


# --- moments ----------------------------------------------------------------


def _check_k(k) -> None:
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")


def _common_log(cfg: BallConfig, k: float) -> float:
    d, n = cfg.d, cfg.n
    a = ((n + 1) * d + 2) / 2
    b = (n * (d + 1) + 1) / 2
    return -k * LN2 + math.lgamma(a) - math.lgamma(a + k / 2) + math.lgamma(b) - math.lgamma(b + k / 2)


def moment_delta(k: float, cfg) -> float:
    """E[delta^k] for real k >= 0."""
    cfg = _cfg(cfg)
    _check_k(k)
    n = cfg.n
    return math.exp(math.lgamma(n + k) - math.lgamma(n) + _common_log(cfg, k))


def moment_omega(k: float, cfg) -> float:
    """E[omega^k] for real k >= 0."""
    cfg = _cfg(cfg)
    _check_k(k)
    nd = cfg.n * cfg.d
    return math.exp(math.lgamma(nd + k) - math.lgamma(nd) + _common_log(cfg, k))


def moment_sigma(k: float, cfg) -> float:
    """E[(delta + omega)^k] for real k >= 0."""
    cfg = _cfg(cfg)
    _check_k(k)
    d, n = cfg.d, cfg.n
    a = ((n + 1) * d + 2) / 2
    b = n * (d + 1) / 2
    return math.exp(math.lgamma(a) - math.lgamma(a + k / 2) + math.lgamma(b + k / 2) - math.lgamma(b))


def _even_p(k: int) -> int:
    if k < 0 or k % 2:
        raise ValueError(f"expected a non-negative even order, got {k}")
    return k // 2


def moment_delta_even(k: int, cfg) -> float:
    """E[delta^k] for even k via rising factorials."""
    cfg = _cfg(cfg)
    p = _even_p(k)
    d, n = cfg.d, cfg.n
    poch = specfun.pochhammer
    num = poch(n / 2, p) * poch((n + 1) / 2, p)
    return num / (poch((n * (d + 1) + 1) / 2, p) * poch(((n + 1) * d + 2) / 2, p))


def moment_omega_even(k: int, cfg) -> float:
    """E[omega^k] for even k via rising factorials."""
    cfg = _cfg(cfg)
    p = _even_p(k)
    d, n = cfg.d, cfg.n
    poch = specfun.pochhammer
    num = poch(n * d / 2, p) * poch((n * d + 1) / 2, p)
    return num / (poch((n * (d + 1) + 1) / 2, p) * poch(((n + 1) * d + 2) / 2, p))


def _rising(a: Fraction, s: int) -> Fraction:
    out = Fraction(1)
    for i in range(s):
        out *= a + i
    return out


def _beta_int(p: int, q: int) -> Fraction:
    """B(p, q) for positive integers."""
    return Fraction(math.factorial(p - 1) * math.factorial(q - 1), math.factorial(p + q - 1))


def moment_delta_c_exact(k: int, cfg) -> Fraction:
    """E[OC^k] for even k as an exact rational.

    With u = 1 - x^2 the 2F1(-k/2, .) in the integrand is a polynomial, and
    each term integrates against x^(n-1)(1-x)^(nd) to a finite sum of
    integer beta functions.
    """
    cfg = _cfg(cfg)
    p = _even_p(k)
    d, n = cfg.d, cfg.n
    alpha = 1 + Fraction(n * (d + 1), 2)
    gamma = 1 + Fraction(d * (n + 1), 2)
    total = Fraction(0)
    for j in range(p + 1):
        coef = _rising(Fraction(-p), j) * _rising(alpha, j) / (_rising(gamma, j) * math.factorial(j))
        # int x^(n-1) (1-x)^(nd+j) (1+x)^j dx
        inner = sum(math.comb(j, i) * _beta_int(n + i, n * d + j + 1) for i in range(j + 1))
        total += coef * inner
    return total / _beta_int(n, n * d + 1)


def moment_delta_c(k: float, cfg) -> float:
    """E[OC^k]; exact for even k, quadrature (with a warning) otherwise."""
    cfg = _cfg(cfg)
    _check_k(k)
    if float(k).is_integer() and int(k) % 2 == 0:
        return float(moment_delta_c_exact(int(k), cfg))
    warnings.warn("odd/real moment of OC has no closed form; using quadrature", stacklevel=2)
    d, n = cfg.d, cfg.n
    a = n * (d + 1) / 2 + 1
    c = d * (n + 1) / 2 + 1
    log_b = ln_beta(n, n * d + 1)

    def f(x):
        if not 0.0 < x < 1.0:
            return 0.0
        w = math.exp((n - 1) * math.log(x) + n * d * math.log1p(-x) - log_b)
        return w * gauss_2f1(a, -k / 2, c, 1.0 - x * x)

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def moment_delta_c_even(k: int, cfg) -> float:
    """E[OC^k] for even k (exact); odd k is routed to quadrature with a warning."""
    if int(k) != k or k < 2:
        raise ValueError(f"expected an integer order >= 2, got {k}")
    return moment_delta_c(int(k), cfg)


def moment_one_minus_delta_c_sq(k: int, cfg) -> Fraction:
    """E[(1 - OC^2)^k] for integer k >= 0, exact rational."""
    cfg = _cfg(cfg)
    if k < 0 or int(k) != k:
        raise ValueError(f"expected a non-negative integer, got {k}")
    d, n = cfg.d, cfg.n
    lead = _rising(1 + Fraction(n * (d + 1), 2), k) / _rising(1 + Fraction(d * (n + 1), 2), k)
    mid = _rising(Fraction(n * d + 1), n) / _rising(Fraction(n * d + 1 + k), n)
    c = n * (d + 1) + k + 1
    hyp = sum(
        _rising(Fraction(-k), j) * _rising(Fraction(n), j) / (_rising(Fraction(c), j) * math.factorial(j)) * (-1) ** j
        for j in range(k + 1)
    )
    return lead * mid * hyp


# --- probabilities ------------------------------------------------------------


def prob_origin_outside(cfg) -> Fraction:
    """Probability that O' lies outside a contained circumsphere, exact rational."""
    cfg = _cfg(cfg)
    m = cfg.n * (cfg.d + 1) - 1
    return Fraction(sum(math.comb(m, k) for k in range(cfg.n)), 2**m)


def prob_origin_outside_quadrature(cfg) -> float:
    """Same probability from the (sigma_r, y_r) density integrated over y_r > 0."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    j = constants(cfg).J

    def f(s, y):
        return j * (s + y) ** (n - 1) * (s - y) ** (n * d - 1)

    val, _ = integrate.dblquad(f, 0.0, 1.0, lambda y: y, 1.0, epsabs=0.0, epsrel=1e-12)
    return val


@dataclass(frozen=True)
class ExactValue:
    """coef * pi**(pi_half_power / 2)."""

    coef: Fraction
    pi_half_power: int

    def __float__(self) -> float:
        return float(self.coef) * math.pi ** (self.pi_half_power / 2)

    def __str__(self) -> str:
        if self.pi_half_power == 0:
            return str(self.coef)
        if self.pi_half_power % 2 == 0:
            p = self.pi_half_power // 2
            pi = "pi" if p == 1 else f"pi^{p}"
        else:
            pi = f"pi^({self.pi_half_power}/2)"
        num, den = self.coef.numerator, self.coef.denominator
        head = pi if num == 1 else f"{num}*{pi}"
        return head if den == 1 else f"{head}/{den}"


def _half_gamma(m: int) -> tuple[Fraction, int]:
    """Gamma(m/2) = coef * pi^(e/2) for a positive integer m."""
    if m <= 0:
        raise ValueError("half-integer gamma needs m > 0")
    if m % 2 == 0:
        return Fraction(math.factorial(m // 2 - 1)), 0
    j = (m - 1) // 2
    return Fraction(math.factorial(2 * j), 4**j * math.factorial(j)), 1


def _half_beta(p: int, q: int) -> tuple[Fraction, int]:
    """B(p/2, q/2) as coef * pi^(e/2)."""
    a, ea = _half_gamma(p)
    b, eb = _half_gamma(q)
    c, ec = _half_gamma(p + q)
    return a * b / c, ea + eb - ec


def prob_contained_exact(cfg) -> ExactValue:
    """Probability that the circumsphere lies inside the ball, exact in pi."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    if n == 1:
        return ExactValue(Fraction(1), 0)
    coef = Fraction((d - 1) * d**n, 2 * (n + 1))
    e = n - 1
    for (p, q), sign in (
        ((n + 1, n * d), 1),
        ((d - 1, n * d + 1), 1),
        ((d - n + 1, n * d), -1),
    ):
        c, ec = _half_beta(p, q)
        coef = coef * c if sign > 0 else coef / c
        e += sign * ec
    g1, e1 = _half_gamma(d)
    g2, e2 = _half_gamma(d + 1)
    coef *= (g1 / g2) ** (n + 1)
    e += (n + 1) * (e1 - e2)
    return ExactValue(coef, e)


def prob_contained(cfg) -> float:
    """Probability that the circumsphere lies inside the ball (log-space evaluation)."""
    cfg = _cfg(cfg)
    d, n = cfg.d, cfg.n
    if n == 1:
        return 1.0
    lg = math.lgamma
    log_p = (
        math.log((d - 1) * d**n / (2 * (n + 1)))
        + (n - 1) / 2 * math.log(math.pi)
        + ln_beta((n + 1) / 2, n * d / 2)
        + ln_beta((d - 1) / 2, (n * d + 1) / 2)
        - ln_beta((d - n + 1) / 2, n * d / 2)
        + (n + 1) * (lg(d / 2) - lg((d + 1) / 2))
    )
    return math.exp(log_p)


def prob_contained_limit(n: int) -> float:
    """Large-d limit of :func:`prob_contained` at fixed n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    log_p = (
        n / 2 * math.log(4 / n)
        + (n - 1) / 2 * math.log(math.pi)
        + math.lgamma((n + 1) / 2)
        - (n + 1) / 2 * math.log(n + 1)
    )
    return math.exp(log_p)


def asymptotic_moment_limits(k: float, n: int) -> tuple[float, float, float]:
    """Large-d limits of E[delta^k], E[omega^k], E[sigma^k] at fixed n."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    lim = (n / (n + 1)) ** (k / 2)
    return 0.0, lim, lim

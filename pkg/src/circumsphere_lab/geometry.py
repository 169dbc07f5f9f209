"""Circumsphere of n+1 points in d-space and the derived scalars.

Edge vectors e_i = A_{i+1} - A_1 are orthonormalised by modified
Gram-Schmidt, e = L q. L is the Cholesky factor of the Gram system
a_ij = e_i . e_j, so the circumcentre satisfies L y = b with
b_i = |e_i|^2 / 2 and C = A_1 + y . q, i.e. y are the frame
coordinates of A_1C and omega = |y|.

The foot O' of the centre O on the flat is never formed: the frame
coordinates of O'C are q.A_1 + y, and OO' is the part of A_1 normal
to the frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12
FAMILIES = ("C", "D", "E")


class DegenerateFlat(ValueError):
    """The points do not span an n-flat (a Gram-Schmidt pivot vanished)."""


@dataclass(frozen=True)
class CircumRecord:
    omega: float
    delta: float
    h: float
    delta_c: float
    sigma: float
    r: float
    family: str
    center: np.ndarray | None = None


def gram_schmidt(vectors, tol: float = PIVOT_TOL) -> np.ndarray:
    """Orthonormal frame (rows) spanning the given vectors, modified Gram-Schmidt."""
    q, lo = _mgs(np.asarray(vectors, dtype=float)[None, :, :])
    piv = np.min(np.diagonal(lo, axis1=1, axis2=2))
    if not piv >= tol:
        raise DegenerateFlat(f"pivot norm {piv:.3g} below tolerance {tol:g}")
    return q[0]


def _mgs(e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched MGS: e (B, n, d) -> q (B, n, d), lower-triangular L (B, n, n)."""
    bsz, n, _ = e.shape
    q = np.array(e, dtype=float, copy=True)
    lo = np.zeros((bsz, n, n))
    for j in range(n):
        v = q[:, j, :]
        for k in range(j):
            coef = np.einsum("bi,bi->b", q[:, k, :], v)
            lo[:, j, k] = coef
            v -= coef[:, None] * q[:, k, :]
        norm = np.sqrt(np.einsum("bi,bi->b", v, v))
        lo[:, j, j] = norm
        with np.errstate(divide="ignore", invalid="ignore"):
            v /= norm[:, None]
    return q, lo


def classify(sigma, h, delta_c):
    """Family tag: C iff sigma < sqrt(1 - h^2); else D iff delta_c < 1; else E.

    Works elementwise on arrays (returns an int code 0/1/2) or on scalars
    (returns the letter).
    """
    if np.ndim(sigma) == 0 and np.ndim(h) == 0 and np.ndim(delta_c) == 0:
        return FAMILIES[int(_family_code(sigma, h, delta_c))]
    return _family_code(np.asarray(sigma), np.asarray(h), np.asarray(delta_c))


def _family_code(sigma, h, delta_c):
    r = np.sqrt(np.maximum(1.0 - np.square(h), 0.0))
    return np.where(sigma < r, 0, np.where(delta_c < 1.0, 1, 2))


@dataclass
class CircumBatch:
    """Vectorised per-event results; rows with ``degenerate`` set hold NaN."""

    omega: np.ndarray
    delta: np.ndarray
    h: np.ndarray
    delta_c: np.ndarray
    sigma: np.ndarray
    family: np.ndarray
    min_pivot: np.ndarray
    degenerate: np.ndarray
    center: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return np.sqrt(np.maximum(1.0 - self.h**2, 0.0))


def circumsphere_batch(points: np.ndarray, tol: float = PIVOT_TOL) -> CircumBatch:
    """Circumspheres of a batch of simplices, points shaped (B, n+1, d)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 3 or pts.shape[1] < 2:
        raise ValueError(f"expected shape (B, n+1, d) with n >= 1, got {pts.shape}")
    _, n1, d = pts.shape
    n = n1 - 1
    if n > d:
        raise ValueError(f"n = {n} points-1 exceeds dimension d = {d}")
    a1 = pts[:, 0, :]
    e = pts[:, 1:, :] - a1[:, None, :]
    q, lo = _mgs(e)
    piv = np.min(np.diagonal(lo, axis1=1, axis2=2), axis=1)
    degenerate = ~(piv >= tol)

    b = 0.5 * np.einsum("bij,bij->bi", e, e)
    y = np.empty_like(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(n):
            y[:, j] = (b[:, j] - np.einsum("bk,bk->b", lo[:, j, :j], y[:, :j])) / lo[:, j, j]
    omega = np.sqrt(np.einsum("bi,bi->b", y, y))
    center = a1 + np.einsum("bk,bkd->bd", y, q)

    a1_par = np.einsum("bkd,bd->bk", q, a1)
    x_par = a1_par + y
    delta = np.sqrt(np.einsum("bi,bi->b", x_par, x_par))
    if n == d:
        h = np.zeros_like(delta)
    else:
        perp = a1 - np.einsum("bk,bkd->bd", a1_par, q)
        h = np.sqrt(np.einsum("bi,bi->b", perp, perp))
    delta_c = np.sqrt(np.einsum("bi,bi->b", center, center))
    sigma = delta + omega
    family = _family_code(sigma, h, delta_c)

    if np.any(degenerate):
        for arr in (omega, delta, h, delta_c, sigma):
            arr[degenerate] = np.nan
        center[degenerate] = np.nan
        family = np.where(degenerate, -1, family)
    return CircumBatch(omega, delta, h, delta_c, sigma, family, piv, degenerate, center)


def circumsphere(points, tol: float = PIVOT_TOL) -> CircumRecord:
    """Circumsphere of one simplex given as (n+1, d) points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"expected (n+1, d) points, got shape {pts.shape}")
    res = circumsphere_batch(pts[None], tol)
    if res.degenerate[0]:
        raise DegenerateFlat(f"pivot norm {res.min_pivot[0]:.3g} below tolerance {tol:g}")
    h = float(res.h[0])
    return CircumRecord(
        omega=float(res.omega[0]),
        delta=float(res.delta[0]),
        h=h,
        delta_c=float(res.delta_c[0]),
        sigma=float(res.sigma[0]),
        r=math.sqrt(max(1.0 - h * h, 0.0)),
        family=FAMILIES[int(res.family[0])],
        center=res.center[0],
    )

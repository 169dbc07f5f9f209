import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circumsphere_lab import geometry as geo
from circumsphere_lab import randvar as rv


def regular_simplex(n, edge=math.sqrt(2.0)):
    """n+1 vertices in R^(n+1) of a regular simplex, scaled to the given edge."""
    return np.eye(n + 1) * edge / math.sqrt(2.0)


def ball_points(d, n, seed, size):
    s = rv.RngStream(seed, 0)
    return rv.sample_uniform_ball(d, s, size * (n + 1)).reshape(size, n + 1, d)


# --- Gram-Schmidt ----------------------------------------------------------------


def test_gram_schmidt_identity():
    e = np.eye(4)[:3]
    assert np.allclose(geo.gram_schmidt(e), e, atol=1e-15)


def test_gram_schmidt_2d_example():
    q = geo.gram_schmidt([[1.0, 0.0], [1.0, 1.0]])
    assert np.allclose(q, [[1, 0], [0, 1]], atol=1e-15)


@pytest.mark.parametrize("n,d", [(2, 3), (3, 3), (4, 7), (1, 5)])
def test_gram_schmidt_random(n, d):
    v = np.random.default_rng(n * 10 + d).normal(size=(n, d))
    q = geo.gram_schmidt(v)
    assert np.allclose(q @ q.T, np.eye(n), atol=1e-10)
    assert np.allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-12)
    recon = (v @ q.T) @ q
    assert np.max(np.abs(recon - v)) <= 1e-10


def test_gram_schmidt_degenerate():
    with pytest.raises(geo.DegenerateFlat):
        geo.gram_schmidt([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])


# --- single circumspheres -------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_regular_simplex_radius(n):
    for edge in (math.sqrt(2.0), 0.3):
        rec = geo.circumsphere(regular_simplex(n, edge) * 0.1 + 0.0)
        expect = (0.1 * edge / math.sqrt(2)) * math.sqrt(n / (n + 1))
        assert rec.omega == pytest.approx(expect, rel=1e-12)


def test_regular_triangle_value():
    rec = geo.circumsphere(regular_simplex(2))
    assert rec.omega == pytest.approx(0.816496580927726, rel=1e-14)


def test_right_triangle():
    rec = geo.circumsphere([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(rec.center, [0.5, 0.5], atol=1e-15)
    assert rec.omega == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    assert rec.h == 0.0
    assert rec.delta == pytest.approx(rec.delta_c, rel=1e-15)


def test_antipodal_pair():
    p = np.array([0.3, -0.2, 0.5])
    rec = geo.circumsphere(np.stack([p, -p]))
    assert np.allclose(rec.center, 0.0, atol=1e-16)
    assert rec.omega == pytest.approx(np.linalg.norm(p), rel=1e-15)
    assert rec.delta == pytest.approx(0.0, abs=1e-16)


def test_segment_midpoint():
    a, b = np.array([0.1, 0.2, -0.3]), np.array([-0.4, 0.5, 0.2])
    rec = geo.circumsphere(np.stack([a, b]))
    assert np.allclose(rec.center, (a + b) / 2, atol=1e-15)
    assert rec.omega == pytest.approx(np.linalg.norm(a - b) / 2, rel=1e-14)


def test_degenerate_points_raise():
    with pytest.raises(geo.DegenerateFlat):
        geo.circumsphere([[0.0, 0.0], [0.5, 0.5], [0.25, 0.25]])


def test_bad_shapes():
    with pytest.raises(ValueError):
        geo.circumsphere(np.zeros((3, 2, 1)))
    with pytest.raises(ValueError):
        geo.circumsphere_batch(np.zeros((1, 4, 2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_eq2_relation_at_points_of_the_flat(n):
    """(n+1) sum a_k^4 = (sum a_k^2)^2 with a_0 the edge, for any point of the simplex's flat."""
    edge = 0.7
    v = regular_simplex(n, edge)
    rng = np.random.default_rng(n)
    for _ in range(5):
        w = rng.normal(size=n + 1)
        p = (w / w.sum()) @ v  # affine combination stays in the flat
        a = np.concatenate([[edge], np.linalg.norm(v - p, axis=1)])
        assert (n + 1) * np.sum(a**4) == pytest.approx(np.sum(a**2) ** 2, rel=1e-9)
    rec = geo.circumsphere(v)
    a = np.concatenate([[edge], np.full(n + 1, rec.omega)])
    assert (n + 1) * np.sum(a**4) == pytest.approx(np.sum(a**2) ** 2, rel=1e-9)


# --- classification ---------------------------------------------------------------


def test_classify_examples():
    assert geo.classify(0.3, 0.0, 0.2) == "C"
    assert geo.classify(1.5, 0.0, 0.9) == "D"
    assert geo.classify(3.0, 0.0, 2.5) == "E"


def test_classify_uses_section_radius():
    # sigma below 1 but above sqrt(1 - h^2): not contained
    assert geo.classify(0.9, 0.6, 0.7) == "D"
    assert geo.classify(0.7, 0.6, 0.7) == "C"


def test_classify_arrays():
    out = geo.classify(np.array([0.3, 1.5, 3.0]), np.zeros(3), np.array([0.2, 0.9, 2.5]))
    assert list(out) == [0, 1, 2]


# --- batch invariants -------------------------------------------------------------


@pytest.mark.parametrize("d,n", [(2, 1), (3, 2), (3, 3), (5, 2), (6, 4), (4, 4)])
def test_batch_invariants(d, n):
    pts = ball_points(d, n, seed=d * 10 + n, size=20_000)
    b = geo.circumsphere_batch(pts)
    ok = ~b.degenerate
    assert ok.mean() > 0.999
    c = b.center[ok]
    dist = np.linalg.norm(pts[ok] - c[:, None, :], axis=2)
    om = b.omega[ok]
    assert np.all(np.abs(dist - om[:, None]) <= 1e-9 * np.maximum(1.0, om)[:, None])
    # Pythagoras on O, O', C
    lhs = b.delta_c[ok] ** 2
    rhs = b.delta[ok] ** 2 + b.h[ok] ** 2
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)
    assert np.all(b.sigma[ok] == b.delta[ok] + om)
    fam_c = ok & (b.family == 0)
    assert np.all(b.delta_c[fam_c] + b.omega[fam_c] <= math.sqrt(2) + 1e-9)
    assert np.all(b.sigma[fam_c] < b.r[fam_c])
    if n == d:
        assert np.all(b.h[ok] == 0.0)
        assert np.allclose(b.delta[ok], b.delta_c[ok], rtol=1e-12)
        assert np.array_equal(b.family[ok] == 0, b.sigma[ok] < 1)


@pytest.mark.parametrize("d,n", [(3, 1), (4, 2), (6, 3)])
def test_perpendicular_part_orthogonal_to_frame(d, n):
    pts = ball_points(d, n, seed=99, size=2000)
    for p in pts[:200]:
        q = geo.gram_schmidt(p[1:] - p[0])
        a1 = p[0]
        perp = a1 - (q @ a1) @ q
        assert np.all(np.abs(q @ perp) < 1e-9)
        rec = geo.circumsphere(p)
        assert rec.h == pytest.approx(np.linalg.norm(perp), rel=1e-9, abs=1e-15)


def test_batch_matches_single():
    pts = ball_points(4, 3, seed=5, size=50)
    b = geo.circumsphere_batch(pts)
    for i in range(50):
        rec = geo.circumsphere(pts[i])
        assert rec.omega == b.omega[i]
        assert rec.family == geo.FAMILIES[b.family[i]]


def test_batch_flags_degenerate_rows():
    pts = ball_points(2, 2, seed=6, size=4)
    pts[1] = [[0.0, 0.0], [0.1, 0.1], [0.2, 0.2]]
    b = geo.circumsphere_batch(pts)
    assert list(b.degenerate) == [False, True, False, False]
    assert b.family[1] == -1 and np.isnan(b.omega[1])
    assert b.min_pivot[1] < geo.PIVOT_TOL


@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_equidistance_property(n, extra, seed):
    d = n + extra
    pts = ball_points(d, n, seed, 1)[0]
    try:
        rec = geo.circumsphere(pts)
    except geo.DegenerateFlat:
        return
    dist = np.linalg.norm(pts - rec.center, axis=1)
    assert np.max(np.abs(dist - rec.omega)) <= 1e-9 * max(1.0, rec.omega)
    assert rec.r == pytest.approx(math.sqrt(1 - rec.h**2))

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from circumsphere_lab import analytic
from circumsphere_lab import randvar as rv
from circumsphere_lab.specfun import beta_fn, pochhammer

ALPHA = 0.01
BIG = 1_000_000


def stream(seed=0, sid=0, method="box-muller"):
    return rv.RngStream(seed, sid, method)


# --- streams and basic samplers --------------------------------------------------


def test_stream_replay_is_bit_identical():
    a = stream(7, 3).normal(1000)
    b = stream(7, 3).normal(1000)
    assert np.array_equal(a, b)
    assert rv.sample_std_normal(stream(7, 3)) == rv.sample_std_normal(stream(7, 3))


def test_distinct_streams_differ_and_are_uncorrelated():
    a = stream(7, 0).uniform(200_000)
    b = stream(7, 1).uniform(200_000)
    assert not np.array_equal(a[:10], b[:10])
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(a.size)


def test_stream_rejects_bad_arguments():
    with pytest.raises(ValueError):
        rv.RngStream(0, 0, "polar")
    with pytest.raises(ValueError):
        rv.RngStream(-1, 0)


def test_uniform_is_half_open_above():
    u = stream().uniform(100_000)
    assert np.all((u > 0) & (u <= 1))


@pytest.mark.parametrize("method", rv.NORMAL_METHODS)
def test_std_normal_moments(method):
    z = rv.sample_std_normal(stream(1, 0, method), BIG)
    assert abs(z.mean()) < 0.004
    assert abs(z.var() - 1) < 0.006
    assert stats.kstest(z, "norm").pvalue > ALPHA


def test_normal_odd_sizes_and_shapes():
    s = stream(2)
    assert s.normal((3, 5)).shape == (3, 5)
    assert s.normal(7).shape == (7,)
    assert isinstance(s.normal(), float)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_uniform_ball_radius_law(d):
    pts = rv.sample_uniform_ball(d, stream(3), BIG)
    r = np.linalg.norm(pts, axis=1)
    assert np.all((r > 0) & (r < 1))
    ks = stats.kstest(r, lambda w: w**d).statistic
    assert ks < 1.63 / math.sqrt(BIG)


def test_uniform_ball_d1():
    x = rv.sample_uniform_ball(1, stream(4), 400_000)[:, 0]
    assert np.all(np.abs(x) < 1)
    assert abs(x.mean()) < 4 * math.sqrt(1 / 3 / x.size)
    assert stats.kstest(x, stats.uniform(-1, 2).cdf).pvalue > ALPHA


def test_uniform_ball_direction_isotropic():
    pts = rv.sample_uniform_ball(3, stream(5), 300_000)
    assert np.all(np.abs(pts.mean(axis=0)) < 4 * math.sqrt(0.2 / pts.shape[0]))


def test_uniform_ball_single_point():
    assert rv.sample_uniform_ball(4, stream()).shape == (4,)
    with pytest.raises(ValueError):
        rv.sample_uniform_ball(0, stream())


@pytest.mark.parametrize("q", [1.0, 0.3, 4.5])
def test_gamma_mean(q):
    x = rv.sample_gamma(q, stream(6), BIG)
    assert abs(x.mean() - q) < 4 * math.sqrt(q / BIG)


def test_gamma_additivity():
    s = stream(7)
    tot = rv.sample_gamma(1.5, s, BIG) + rv.sample_gamma(2.25, s, BIG)
    assert stats.kstest(tot, stats.gamma(3.75).cdf).pvalue > ALPHA


@pytest.mark.parametrize("q", [0.0, -1.0])
def test_gamma_domain(q):
    with pytest.raises(ValueError):
        rv.sample_gamma(q, stream())


def test_beta_uniform_case():
    x = rv.sample_beta(1, 1, stream(8), BIG)
    assert abs(x.mean() - 0.5) < 0.002


@pytest.mark.parametrize("q1,q2", [(2, 3), (2, 5), (0.5, 0.7)])
def test_beta_moments(q1, q2):
    x = rv.sample_beta(q1, q2, stream(9), BIG)
    for k in (1, 2, 3):
        exact = pochhammer(q1, k) / pochhammer(q1 + q2, k)
        se = math.sqrt(pochhammer(q1, 2 * k) / pochhammer(q1 + q2, 2 * k) - exact**2) / math.sqrt(BIG)
        assert abs(np.mean(x**k) - exact) < 4 * se


def test_beta_first_moment_example():
    assert pochhammer(2, 1) / pochhammer(5, 1) == 0.4
    x = rv.sample_beta(2, 2 * 2 + 1, stream(10), BIG)
    assert abs(x.mean() - 2 / 7) < 4 * x.std() / math.sqrt(BIG)


def test_beta_domain():
    with pytest.raises(ValueError):
        rv.sample_beta(0, 1, stream())


def test_dirichlet_sums_and_uniform_marginals():
    x = rv.sample_dirichlet([1, 1, 1], stream(11), 200_000)
    assert np.allclose(x.sum(axis=1), 1.0, rtol=0, atol=1e-15)
    for i in range(3):
        assert stats.kstest(x[:, i], stats.beta(1, 2).cdf).pvalue > ALPHA


@pytest.mark.parametrize("d,n", [(3, 2), (4, 1)])
def test_dirichlet_amalgamation(d, n):
    x = rv.sample_dirichlet([n, n * d, 1], stream(112), BIG)
    assert stats.kstest(x[:, 0], stats.beta(n, n * d + 1).cdf).pvalue > ALPHA
    assert stats.kstest(x[:, 1], stats.beta(n * d, n + 1).cdf).pvalue > ALPHA
    assert stats.kstest(x[:, 0] + x[:, 1], stats.beta(n * (d + 1), 1).cdf).pvalue > ALPHA


def test_dirichlet_mixed_moment():
    q = (2, 3, 1.5)
    x = rv.sample_dirichlet(q, stream(13), BIG)
    k = (1, 2, 0)
    expect = math.exp(
        math.lgamma(sum(q)) - math.lgamma(sum(q) + sum(k))
        + sum(math.lgamma(a + b) - math.lgamma(a) for a, b in zip(q, k))
    )
    vals = x[:, 0] ** k[0] * x[:, 1] ** k[1]
    assert abs(vals.mean() - expect) < 4 * vals.std() / math.sqrt(BIG)


def test_dirichlet_domain():
    with pytest.raises(ValueError):
        rv.sample_dirichlet([1], stream())
    with pytest.raises(ValueError):
        rv.sample_dirichlet([1, 0], stream())


# --- beta products ------------------------------------------------------------------


@pytest.mark.parametrize("p1,p2", [((1, 1), (1, 1)), ((2.5, 1.5), (3, 2)), ((1, 3.5), (1.5, 4))])
def test_beta_product_pdf_normalised(p1, p2):
    val, _ = integrate.quad(lambda x: rv.beta_product_pdf(x, p1, p2), 0, 1, limit=200, epsabs=1e-11)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_beta_product_of_uniforms():
    x = np.linspace(0.01, 0.99, 50)
    assert np.allclose(rv.beta_product_pdf(x, (1, 1), (1, 1)), -np.log(x), rtol=1e-12)


@pytest.mark.parametrize("p1,p2", [((2.5, 1.5), (3, 2)), ((1, 3.5), (1.5, 4)), ((0.7, 2), (4, 0.5))])
def test_beta_product_pdf_symmetric(p1, p2):
    x = np.linspace(0.02, 0.98, 40)
    assert np.allclose(rv.beta_product_pdf(x, p1, p2), rv.beta_product_pdf(x, p2, p1), rtol=1e-10)


def test_beta_product_pdf_domain():
    with pytest.raises(ValueError):
        rv.beta_product_pdf(0.0, (1, 1), (1, 1))
    with pytest.raises(ValueError):
        rv.beta_product_pdf(0.5, (0, 1), (1, 1))


def test_beta_product_sampler_chi_square():
    p1, p2 = (2.5, 1.5), (3, 2)
    x = rv.BetaPair(p1, p2).sample(stream(14), 200_000)
    edges = np.linspace(0, 1, 41)
    obs, _ = np.histogram(x, edges)
    probs = [integrate.quad(lambda t: rv.beta_product_pdf(t, p1, p2), a, b)[0] for a, b in zip(edges[:-1], edges[1:])]
    exp = np.array(probs) * x.size
    keep = exp > 5
    chi2 = np.sum((obs[keep] - exp[keep]) ** 2 / exp[keep])
    assert stats.chi2.sf(chi2, keep.sum() - 1) > ALPHA


def test_invert_beta_product_hand_example():
    first, second = rv.invert_beta_product(3, 4, 9, 1)
    assert first == rv.BetaPair((1, 5), (3, 4))
    assert second == rv.BetaPair((1, 6), (3, 3))


def test_invert_beta_product_errors():
    with pytest.raises(ValueError):
        rv.invert_beta_product(2, 2, 5, 1)
    with pytest.raises(ValueError):
        rv.invert_beta_product(3, 4, 3.5, 1)
    with pytest.raises(ValueError):
        rv.invert_beta_product(3, 4, 5, 1)  # c + s = a + b - 1
    with pytest.raises(ValueError):
        rv.invert_beta_product(-1, 4, 9, 1)


def test_product_parameters_at_3_2():
    assert rv.delta_sq_params(3, 2) == (3, 4, 7.5, 1)
    assert rv.omega_sq_params(3, 2) == (1, 2, 3.5, 3)
    om = rv.omega_representations(3, 2)
    assert om["S1"] == rv.BetaPair((3, 1.5), (3.5, 2))
    assert om["S2"] == rv.BetaPair((3, 2.5), (3.5, 1))
    de = rv.delta_representations(3, 2)
    assert de["R1"] == rv.BetaPair((1, 4.5), (1.5, 3))
    assert de["R2"] == rv.BetaPair((1, 3.5), (1.5, 4))


@pytest.mark.parametrize("d,n", [(2, 1), (3, 2), (5, 3), (7, 7)])
def test_representation_shapes_general(d, n):
    de, om = rv.delta_representations(d, n), rv.omega_representations(d, n)
    assert de["R1"] == rv.BetaPair((n / 2, (n * d - n + d + 2) / 2), ((n + 1) / 2, n * d / 2))
    assert de["R2"] == rv.BetaPair((n / 2, (n * d + 1) / 2), ((n + 1) / 2, (n * d - n + d + 1) / 2))
    assert om["S1"] == rv.BetaPair((n * d / 2, (n + 1) / 2), ((n * d + 1) / 2, (d + 1) / 2))
    assert om["S2"] == rv.BetaPair((n * d / 2, (d + 2) / 2), ((n * d + 1) / 2, n / 2))


@pytest.mark.parametrize("d,n", [(3, 2), (5, 3), (4, 1), (3, 3)])
@pytest.mark.parametrize("which", ["delta", "omega"])
def test_representations_reproduce_analytic_density(d, n, which):
    """Density of sqrt(X1 X2) from the product pdf equals the analytic marginal."""
    reps = rv.delta_representations(d, n) if which == "delta" else rv.omega_representations(d, n)
    x = np.linspace(0.05, 0.95, 19)
    target = analytic.pdf(which, x, (d, n))
    for pair in reps.values():
        dens = 2 * x * rv.beta_product_pdf(x * x, pair.first, pair.second)
        assert np.allclose(dens, target, rtol=1e-9)


@pytest.mark.parametrize("d,n", [(3, 2), (5, 3)])
def test_r1_r2_and_s1_s2_agree(d, n):
    s = stream(15)
    assert stats.ks_2samp(rv.sample_delta(d, n, s, BIG, "R1"), rv.sample_delta(d, n, s, BIG, "R2")).pvalue > ALPHA
    assert stats.ks_2samp(rv.sample_omega(d, n, s, BIG, "S1"), rv.sample_omega(d, n, s, BIG, "S2")).pvalue > ALPHA


@pytest.mark.parametrize("d", [2, 3])
def test_omega_n_equals_d_is_beta(d):
    w = rv.sample_omega(d, d, stream(16), BIG)
    assert stats.kstest(w, stats.beta(d * d, d + 1).cdf).pvalue > ALPHA


@pytest.mark.parametrize("d,n", [(3, 2), (4, 1), (5, 3)])
def test_even_moments_of_samplers(d, n):
    s = stream(17)
    de = rv.sample_delta(d, n, s, BIG)
    om = rv.sample_omega(d, n, s, BIG)
    for k in (2, 4):
        for x, ref in ((de, analytic.moment_delta_even(k, (d, n))), (om, analytic.moment_omega_even(k, (d, n)))):
            v = x**k
            assert abs(v.mean() - ref) < 4 * v.std() / math.sqrt(BIG)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_n1_omega_composition(d):
    s = stream(18)
    direct = rv.sample_omega(d, 1, s, BIG)
    composed = s.uniform(BIG) ** (1 / d) * rv.sample_chord_half_surface(d, s, BIG)
    assert stats.ks_2samp(direct, composed).pvalue > ALPHA


@pytest.mark.parametrize("d", [2, 4])
def test_chord_half_surface(d):
    w2 = rv.sample_chord_half_surface(d, stream(19), BIG) ** 2
    q = (d + 1) / 2
    for k in (1, 2):
        exact = pochhammer(q, k) / pochhammer(2 * q, k)
        assert abs(np.mean(w2**k) - exact) < 4 * np.std(w2**k) / math.sqrt(BIG)
    assert abs(np.median(w2) - 0.5) < 0.003


def test_chord_density_d2_normalised():
    val, _ = integrate.quad(lambda w: 2 * w**2 * math.sqrt(1 - w**2) / beta_fn(1.5, 1.5), 0, 1)
    assert val == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        rv.sample_chord_half_surface(1, stream())


def test_delta_c_squared_mean_example():
    assert Fraction(3 * (6 - 4 + 2 + 1), (2 * 4 + 1) * (3 * 3 + 2)) == Fraction(15, 99)
    x = rv.sample_delta_c_squared(3, 2, stream(20), BIG)
    assert abs(x.mean() - 15 / 99) < 4 * x.std() / math.sqrt(BIG)


@pytest.mark.parametrize("d,n", [(3, 2), (5, 2), (4, 1)])
def test_delta_c_squared_complement_moments(d, n):
    x = rv.sample_delta_c_squared(d, n, stream(21), BIG)
    for k in (1, 2):
        v = (1 - x) ** k
        exact = float(analytic.moment_one_minus_delta_c_sq(k, (d, n)))
        assert abs(v.mean() - exact) < 4 * v.std() / math.sqrt(BIG)


def test_delta_c_squared_rejects_n_equals_d():
    with pytest.raises(ValueError):
        rv.sample_delta_c_squared(3, 3, stream())

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biphoton import measures, schmidt
from biphoton.errors import MeasurementError
from biphoton.field import Axis, Distribution1D, Domain, TwoPhotonAmplitude, normalize
from biphoton.measures import (
    conditional,
    epr_witness,
    fedorov_ratio,
    fit_gaussian,
    intensity_correlation,
    marginal,
    slit_average,
)
from biphoton.spdc import DoubleGaussianParams, build_double_gaussian, double_gaussian_axis

from helpers import K808, gaussian_state, random_state


def gaussian_profile(x, a, x0, s, b):
    return a * np.exp(-((x - x0) ** 2) / (2 * s**2)) + b


def brute_force_fit(x, y, points=13, refinements=2):
    """Least-squares lattice search over (A, x0, sigma, B), refined around the optimum."""
    w = y - y.min()
    mean = np.sum(x * w) / np.sum(w)
    rms = np.sqrt(np.sum((x - mean) ** 2 * w) / np.sum(w))
    peak = y.max()
    lo = np.array([0.5 * peak, mean - rms, 0.2 * rms, -0.2 * peak])
    hi = np.array([1.5 * peak, mean + rms, 2.0 * rms, 0.2 * peak])
    best = None
    for _ in range(refinements + 1):
        grids = [np.linspace(l, h, points) for l, h in zip(lo, hi)]
        x0s, ss, bs = np.meshgrid(grids[1], grids[2], grids[3], indexing="ij")
        shape = (x0s.size, 1)
        for a in grids[0]:
            model = gaussian_profile(x[None, :], a, x0s.reshape(shape), ss.reshape(shape), bs.reshape(shape))
            cost = np.sum((model - y[None, :]) ** 2, axis=1)
            j = int(np.argmin(cost))
            if best is None or cost[j] < best[0]:
                best = (cost[j], np.array([a, x0s.flat[j], ss.flat[j], bs.flat[j]]))
        step = (hi - lo) / (points - 1)
        lo, hi = best[1] - step, best[1] + step
    return best[1]


# -- marginals and conditionals -------------------------------------------------


def test_separable_marginal_is_single_photon_gaussian():
    w = 1e-3
    t = gaussian_state(n=256, w=w, half=8e-3)
    fit = fit_gaussian(marginal(t))
    # |exp(-x^2/w^2)|^2 has standard deviation w/2
    assert abs(fit.sigma - w / 2) / (w / 2) < 1e-3


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_marginal_integral_and_exchange_symmetry(seed):
    t = random_state(np.random.default_rng(seed), n=32)
    m_s, m_i = marginal(t, "signal"), marginal(t, "idler")
    assert abs(m_s.integral - 1) < 1e-10
    sym = normalize(t.with_values(0.5 * (t.values + t.values.T)))
    assert np.allclose(marginal(sym, "signal").weights, marginal(sym, "idler").weights, rtol=0, atol=1e-12)


def test_conditional_of_separable_equals_marginal():
    t = gaussian_state(center_shift=2e-4)
    m = marginal(t).normalized()
    for x in (-2e-3, 0.0, 7.5e-4, 3e-3):
        c = conditional(t, "signal", x)
        assert np.allclose(c.weights, m.weights, rtol=0, atol=1e-10 * m.weights.max())


def test_ridge_state_conditional_width():
    ridge, envelope = 1e-4, 5e-3
    ax = Axis.symmetric(512, 8e-3, Domain.POSITION)
    x = ax.coordinates
    xs, xi = x[:, None], x[None, :]
    v = np.exp(-((xs + xi) ** 2) / (4 * ridge**2) - (xs - xi) ** 2 / (4 * envelope**2))
    t = normalize(TwoPhotonAmplitude(v, ax, ax, K808, K808))
    for fixed in (-5e-4, 0.0, 3e-4):
        fit = fit_gaussian(conditional(t, "signal", fixed))
        assert abs(fit.sigma - ridge) / ridge < 1e-2
        assert fit.center == pytest.approx(-x[ax.index_of(fixed)], abs=ax.spacing / 10)


def test_slit_zero_equals_one_spacing(far_field):
    ax = far_field.axis_idler
    a = conditional(far_field, "signal", 0.0, 0.0)
    b = conditional(far_field, "signal", 0.0, ax.spacing)
    assert np.array_equal(a.weights, b.weights)


def test_conditional_rejects_out_of_range():
    t = gaussian_state()
    with pytest.raises(ValueError):
        conditional(t, "signal", 1.0)
    with pytest.raises(ValueError):
        conditional(t, "signal", 0.0, -1.0)
    with pytest.raises(ValueError):
        marginal(t, "pump")


def test_slit_average_keeps_integral():
    t = gaussian_state(n=256)
    m = marginal(t)
    avg = slit_average(m, 10 * m.axis.spacing)
    assert avg.integral == pytest.approx(m.integral, rel=1e-9)
    assert avg.weights.max() < m.weights.max()
    assert slit_average(m, 0.0) is m


# -- Gaussian fit ------------------------------------------------------------------


def test_fit_recovers_exact_gaussian():
    ax = Axis.symmetric(512, 4e-3, Domain.POSITION)
    y = gaussian_profile(ax.coordinates, 1.0, 2e-4, 5e-4, 0.0)
    fit = fit_gaussian(Distribution1D(ax, y))
    assert fit.converged
    assert fit.amplitude == pytest.approx(1.0, rel=1e-6)
    assert fit.center == pytest.approx(2e-4, rel=1e-6)
    assert fit.sigma == pytest.approx(5e-4, rel=1e-6)
    assert abs(fit.offset) < 1e-6


def test_fit_recovers_offset():
    ax = Axis.symmetric(256, 4e-3, Domain.POSITION)
    y = gaussian_profile(ax.coordinates, 2.0, -1e-4, 3e-4, 0.25)
    fit = fit_gaussian(Distribution1D(ax, y))
    assert fit.offset == pytest.approx(0.25, rel=1e-6)
    assert fit.sigma == pytest.approx(3e-4, rel=1e-6)


def test_fit_flags_constant_input():
    ax = Axis.symmetric(64, 1e-3, Domain.POSITION)
    fit = fit_gaussian(Distribution1D(ax, np.full(64, 3.0)))
    assert not fit.converged
    assert np.isnan(fit.sigma)


def test_fit_of_sinc_squared_matches_brute_force(far_field):
    # at the far field the marginal is the sinc^2 phase-matching profile and
    # the conditional is the narrow pump profile; check both shapes
    for dist in (marginal(far_field), conditional(far_field, "signal", 0.0)):
        fit = fit_gaussian(dist)
        assert fit.converged
        a, x0, s, b = brute_force_fit(dist.coordinates, dist.weights)
        assert abs(fit.sigma - s) / s < 2e-2


# -- Fedorov ratio -------------------------------------------------------------------


def test_separable_ratio_is_one():
    assert fedorov_ratio(gaussian_state(n=256)).ratio == pytest.approx(1.0, rel=1e-2)


@pytest.mark.parametrize("r", [1.0, 3.0, 25.0])
def test_double_gaussian_ratio_matches_widths(r):
    p = DoubleGaussianParams(4e3, 4e3 * r)
    t = build_double_gaussian(p, double_gaussian_axis(p), k=K808)
    # Var p = (s+^2 + s-^2)/4 and conditional variance s+^2 s-^2/(s+^2 + s-^2)
    analytic = (1 + r**2) / (2 * r)
    res = fedorov_ratio(t)
    assert abs(res.ratio - analytic) / analytic < 1e-2
    assert res.fit_conditional.converged and res.fit_unconditional.converged
    k = 1 / schmidt.purity(t)
    assert abs(res.ratio - k) / k < 1e-2


def test_ratio_invariant_under_magnification(far_field):
    ref = fedorov_ratio(far_field).ratio
    m = 1.7
    scaled = TwoPhotonAmplitude(
        far_field.values / m,
        far_field.axis_signal.scaled(m),
        far_field.axis_idler.scaled(m),
        far_field.k_signal,
        far_field.k_idler,
    )
    assert abs(fedorov_ratio(scaled).ratio - ref) / ref < 5e-3
    # rebuilding a double-Gaussian on a grid scaled with its widths
    p = DoubleGaussianParams(4e3, 4e4)
    q = DoubleGaussianParams(4e3 * m, 4e4 * m)
    r1 = fedorov_ratio(build_double_gaussian(p, double_gaussian_axis(p, 512))).ratio
    r2 = fedorov_ratio(build_double_gaussian(q, double_gaussian_axis(q, 1024))).ratio
    assert abs(r1 - r2) / r1 < 5e-3


def test_fixed_slit_position_robustness(scenario, far_field):
    slit = scenario.detection.slit_fedorov
    ref = fedorov_ratio(far_field, slit_width=slit)
    delta = fit_gaussian(marginal(far_field, "idler")).sigma
    for shift in (-0.5 * delta, -0.25 * delta, 0.25 * delta, 0.5 * delta):
        res = fedorov_ratio(far_field, slit_width=slit, fixed_value=ref.fixed_coordinate + shift)
        assert abs(res.ratio - ref.ratio) / ref.ratio < 5e-2


def test_fedorov_reports_failed_fit():
    ax = Axis.symmetric(64, 1e-3, Domain.POSITION)
    flat = normalize(TwoPhotonAmplitude(np.ones((64, 64), complex), ax, ax, K808, K808))
    with pytest.raises(MeasurementError, match="did not converge"):
        fedorov_ratio(flat)


# -- EPR witness and correlations ------------------------------------------------------


def test_separable_gaussian_sits_on_the_bound():
    w = epr_witness(gaussian_state(n=256, w=1e-3, half=1.6e-2))
    assert abs(w.product - 0.5) / 0.5 < 2e-2
    assert not w.violated


def test_source_state_violates_bound(source_position):
    w = epr_witness(source_position)
    assert w.violated
    assert w.product < 0.5


def test_double_gaussian_product_is_half_over_k(dg25):
    w = epr_witness(dg25)
    k = 1 / schmidt.purity(dg25)
    assert abs(w.product - 0.5 / k) / (0.5 / k) < 0.1


def test_intensity_correlation_signs(dg25):
    assert intensity_correlation(gaussian_state()) == pytest.approx(0.0, abs=1e-10)
    # the source is anticorrelated in momentum
    assert intensity_correlation(dg25) < -0.9

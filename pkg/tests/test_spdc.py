import numpy as np
import pytest

from biphoton import measures, schmidt
from biphoton.errors import ConfigurationError, DomainError
from biphoton.field import Axis, Domain, norm, reverse_index
from biphoton.spdc import (
    DoubleGaussianParams,
    SpdcParams,
    build_double_gaussian,
    build_spdc,
    default_momentum_axis,
    double_gaussian_axis,
)

from helpers import K808


def test_default_parameters_are_derived_consistently(default_params):
    assert default_params.lambda_signal == pytest.approx(808e-9)
    assert default_params.k_pump == pytest.approx(2 * np.pi / 404e-9)


def test_sinc_first_zero_matches_closed_form(default_params, source_momentum):
    # zero of sin(L u^2 / (4 k_p)) at L u^2 / (4 k_p) = pi, evaluated by hand
    k_p = 2 * np.pi / 404e-9
    u0 = np.sqrt(4 * np.pi * k_p / 2e-3)
    assert u0 == pytest.approx(3.13e5, rel=2e-3)
    assert np.sin(2e-3 * u0**2 / (4 * k_p)) == pytest.approx(0.0, abs=1e-12)
    assert default_params.sinc_zero == pytest.approx(u0, rel=1e-14)
    # on the grid: along q = -p the pump factor is 1 and the sinc argument is
    # L (2p)^2 / (4 k_p), so the first zero sits at p = u0 / 2
    ax = source_momentum.axis_signal
    p = ax.coordinates
    r = reverse_index(ax.n)
    anti = np.abs(source_momentum.values[np.arange(ax.n), r])
    window = (p > 0.25 * u0) & (p < 0.75 * u0)
    p_min = p[window][np.argmin(anti[window])]
    assert abs(p_min - u0 / 2) <= ax.spacing


def test_peak_at_origin(source_momentum):
    mag = np.abs(source_momentum.values)
    n = source_momentum.axis_signal.n
    assert mag[n // 2, n // 2] == mag.max()


def test_exchange_and_joint_parity_symmetry(source_momentum, dg25):
    for t in (source_momentum, dg25):
        v = t.values
        assert np.array_equal(v, v.T)
        r = reverse_index(v.shape[0])
        # the outermost row/column has no mirror partner on the grid
        assert np.array_equal(v[1:, 1:], v[np.ix_(r, r)][1:, 1:])


def test_outputs_normalized(source_momentum, dg25):
    assert abs(norm(source_momentum) - 1) < 1e-12
    assert abs(norm(dg25) - 1) < 1e-12
    assert source_momentum.z_label == 0.0


def test_equal_widths_give_separable_state():
    p = DoubleGaussianParams(5e3, 5e3)
    t = build_double_gaussian(p, double_gaussian_axis(p, 256), k=K808)
    k = schmidt.schmidt_number(schmidt.decompose(t))
    assert k == pytest.approx(1.0, abs=1e-10)
    assert measures.fedorov_ratio(t).ratio == pytest.approx(1.0, rel=1e-2)


def test_double_gaussian_k_equals_r(dg25):
    k = schmidt.schmidt_number(schmidt.decompose(dg25))
    assert abs(1 / k - schmidt.purity(dg25)) < 1e-10
    r = measures.fedorov_ratio(dg25).ratio
    assert abs(r - k) / k < 1e-2
    # closed form (r + 1/r) / 2 for the width ratio 25
    assert k == pytest.approx((25 + 1 / 25) / 2, rel=1e-6)


def test_swapping_widths_keeps_schmidt_spectrum():
    a = DoubleGaussianParams(4e3, 4e4)
    b = DoubleGaussianParams(4e4, 4e3)
    axis = double_gaussian_axis(a, 512)
    la = schmidt.decompose(build_double_gaussian(a, axis)).lambdas
    lb = schmidt.decompose(build_double_gaussian(b, axis)).lambdas
    m = 10
    assert np.allclose(la[:m], lb[:m], rtol=1e-8, atol=1e-14)


def test_double_gaussian_spectrum_is_geometric(dg25):
    fit = schmidt.fit_geometric(schmidt.decompose(dg25).lambdas, 10)
    assert fit.rms_residual < 1e-3
    assert fit.alpha == pytest.approx((24 / 26) ** 2, rel=1e-6)


def test_builders_validate_axis(default_params):
    coarse = Axis.symmetric(64, 4 * default_params.sinc_zero, Domain.MOMENTUM)
    with pytest.raises(ConfigurationError):
        build_spdc(default_params, coarse)
    narrow = Axis.symmetric(1024, 0.5 * default_params.sinc_zero, Domain.MOMENTUM)
    with pytest.raises(ConfigurationError):
        build_spdc(default_params, narrow)
    with pytest.raises(DomainError):
        build_spdc(default_params, Axis.symmetric(1024, 1e-3, Domain.POSITION))
    with pytest.raises(ConfigurationError):
        SpdcParams(pump_waist=0)
    with pytest.raises(ConfigurationError):
        DoubleGaussianParams(1.0, -1.0)


def test_default_axis_covers_both_factors(default_params):
    ax = default_momentum_axis(default_params)
    assert ax.n == 1024
    assert ax.extent == pytest.approx(4 * default_params.sinc_zero)
    assert ax.spacing < 1 / default_params.pump_waist

"""State builders shared by the test modules."""

import numpy as np

from biphoton.field import Axis, Domain, TwoPhotonAmplitude, normalize, reverse_index, to_position
from biphoton.spdc import (
    DoubleGaussianParams,
    SpdcParams,
    build_double_gaussian,
    build_spdc,
    default_momentum_axis,
    double_gaussian_axis,
)

K808 = 2 * np.pi / 808e-9


def gaussian_state(n=128, w=1e-3, half=8e-3, k=K808, center_shift=0.0):
    """Separable minimum-uncertainty product exp(-x_s^2/w^2) exp(-x_i^2/w^2)."""
    ax = Axis.symmetric(n, half, Domain.POSITION)
    x = ax.coordinates - center_shift
    g = np.exp(-(x**2) / w**2)
    return normalize(TwoPhotonAmplitude(np.outer(g, g), ax, ax, k, k))


def jointly_symmetric(values):
    """Project onto Phi(-x_s, -x_i) = Phi(x_s, x_i)."""
    r = reverse_index(values.shape[0])
    ri = reverse_index(values.shape[1])
    return 0.5 * (values + values[np.ix_(r, ri)])


def random_state(rng, n=32, symmetric=True, complex_=True, half=1e-3):
    ax = Axis.symmetric(n, half, Domain.POSITION)
    v = rng.normal(size=(n, n))
    if complex_:
        v = v + 1j * rng.normal(size=(n, n))
    if symmetric:
        v = jointly_symmetric(v)
    return normalize(TwoPhotonAmplitude(v, ax, ax, K808, K808))


def state_suite(count=24, seed=20240501):
    """Randomised and structured states used by the identity checks."""
    rng = np.random.default_rng(seed)
    states = [random_state(rng, n=int(rng.choice([16, 32, 64])), complex_=bool(j % 2)) for j in range(count - 6)]
    states.append(gaussian_state())
    for r in (1.0, 3.0, 10.0):
        p = DoubleGaussianParams(4e3, 4e3 * r)
        states.append(to_position(build_double_gaussian(p, double_gaussian_axis(p, 256))))
    sp = SpdcParams(crystal_length=0.5e-3, pump_waist=50e-6)
    # the outermost grid row has no mirror partner; restore exact joint parity
    small = to_position(build_spdc(sp, default_momentum_axis(sp, 256, 2.0)))
    states.append(normalize(small.with_values(jointly_symmetric(small.values))))
    odd = gaussian_state(n=64)
    x = odd.axis_signal.coordinates
    states.append(normalize(odd.with_values(odd.values * np.outer(x, x))))
    return states

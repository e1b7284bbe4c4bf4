"""Transverse entanglement of SPDC biphotons: propagation, Fedorov ratio and Schmidt number."""

from .field import Axis, Distribution1D, Domain, TwoPhotonAmplitude, normalize, norm, to_momentum, to_position
from .spdc import DoubleGaussianParams, SpdcParams, build_double_gaussian, build_spdc

__version__ = "0.1.0"

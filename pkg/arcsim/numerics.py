"""Small numerical helpers shared by the state, scattering and oracle modules."""

import math
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Below this |θ̄/2| the derivative of sinc² switches to its Taylor series.
_SERIES_THRESHOLD = 1e-3


def sinc(x: ArrayLike) -> ArrayLike:
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    value = np.sinc(np.asarray(x, dtype=float) / np.pi)
    if np.ndim(value) == 0:
        return float(value)
    return value


def _dsinc(u: float) -> float:
    """Derivative of sin(u)/u."""
    if abs(u) < _SERIES_THRESHOLD:
        u2 = u * u
        return -u / 3.0 + u * u2 / 30.0 - u * u2 * u2 / 840.0
    return (u * math.cos(u) - math.sin(u)) / (u * u)


def sinc2_derivative(theta: float) -> float:
    """d[sinc²(θ̄/2)]/dθ̄, analytic with a series fallback at the removable singularity."""
    u = 0.5 * float(theta)
    return sinc(u) * _dsinc(u)


def fsum_real(values: np.ndarray) -> float:
    """Correctly rounded sum of a real array; independent of summation order."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def fsum_complex(values: np.ndarray) -> complex:
    """Correctly rounded sum of a complex array, real and imaginary parts separately."""
    values = np.asarray(values, dtype=complex)
    return complex(fsum_real(values.real), fsum_real(values.imag))


def abs2(values: np.ndarray) -> np.ndarray:
    """Elementwise squared modulus."""
    return values.real * values.real + values.imag * values.imag


def freeze(array: np.ndarray) -> np.ndarray:
    """Mark an array read-only so state values can be shared safely."""
    array.setflags(write=False)
    return array

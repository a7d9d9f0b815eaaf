"""Classical-to-quantum data encoders."""
from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import ShapeError, ValidationError
from .statevector import StateVector, _check_qubit_count


def _as_input(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValidationError("input vector is empty")
    if not np.all(np.isfinite(x)):
        raise ValidationError("input vector has non-finite entries")
    return x


def qubit_encode(x) -> StateVector:
    """Product state with qubit ``j`` in ``cos(x_j)|0> + sin(x_j)|1>``."""
    x = _as_input(x)
    _check_qubit_count(x.size)
    factors = [np.array([np.cos(v), np.sin(v)]) for v in x]
    # kron(a, b) puts b on the low bit, so fold from the highest qubit down.
    amps = reduce(np.kron, factors[::-1])
    return StateVector(amps.astype(np.complex128), x.size)


def wavefunction_encode(x) -> StateVector:
    """Amplitude encoding ``x / ||x||_2``.

    Normalised by the 2-norm (not its square) so the result is a unit vector
    for every nonzero input.
    """
    x = _as_input(x)
    n = int(np.log2(x.size))
    if 2**n != x.size:
        raise ShapeError(f"input length {x.size} is not a power of two")
    if n == 0:
        raise ShapeError("wavefunction encoding needs at least 2 entries")
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValidationError("cannot encode the zero vector")
    _check_qubit_count(n)
    return StateVector((x / norm).astype(np.complex128), n)


def pi4_input(n: int) -> np.ndarray:
    """The all-``pi/4`` input pattern used for training."""
    return np.full(n, np.pi / 4)


def asymmetric_input(n: int) -> np.ndarray:
    """Alternating ``pi/4, pi/8`` pattern; makes the CNOT ladder visible at theta = 0."""
    return np.where(np.arange(n) % 2 == 0, np.pi / 4, np.pi / 8)

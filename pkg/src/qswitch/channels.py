"""Kraus channels: bit flip, phase flip, sequential composition, capacities."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .qmat import I2, X, Z, DimensionError, tensor, validate_density

COMPLETENESS_TOL = 1e-10


def _check_prob(x: float, name: str = "probability") -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name}={x} outside [0, 1]")
    return x


@dataclass(frozen=True)
class FlipParams:
    """Bit-flip probability ``p`` and phase-flip probability ``q``."""

    p: float
    q: float

    def __post_init__(self):
        _check_prob(self.p, "p")
        _check_prob(self.q, "q")

    @property
    def herald_prob(self) -> float:
        return self.p * self.q


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map ``rho -> sum_k K rho K^dagger``.

    Completeness ``sum K^dagger K = I`` is checked on construction.
    """

    name: str
    operators: List[np.ndarray] = field(repr=False)

    def __post_init__(self):
        ops = [np.asarray(k, dtype=complex) for k in self.operators]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        total = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(total - np.eye(d)))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"channel {self.name!r} is not trace preserving (err {err:.3g})")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel("identity", [np.eye(dim, dtype=complex)])


def bit_flip(p: float) -> KrausChannel:
    """Apply ``X`` with probability ``p``: Kraus set ``{sqrt(1-p) I, sqrt(p) X}``."""
    p = _check_prob(p, "p")
    return KrausChannel(f"bit_flip({p:g})", [np.sqrt(1 - p) * I2, np.sqrt(p) * X])


def phase_flip(q: float) -> KrausChannel:
    """Apply ``Z`` with probability ``q``: Kraus set ``{sqrt(1-q) I, sqrt(q) Z}``."""
    q = _check_prob(q, "q")
    return KrausChannel(f"phase_flip({q:g})", [np.sqrt(1 - q) * I2, np.sqrt(q) * Z])


def apply(chan: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (chan.dim, chan.dim):
        raise DimensionError(f"{chan.name} acts on dim {chan.dim}, state has shape {rho.shape}")
    out = sum(k @ rho @ k.conj().T for k in chan.operators)
    return validate_density(out)


def extend_to_carrier(chan: KrausChannel) -> KrausChannel:
    """Lift a one-qubit channel to act on qubit B of a pair, as ``I (x) K``."""
    if chan.dim != 2:
        raise DimensionError(f"expected a one-qubit channel, got dim {chan.dim}")
    return KrausChannel(f"I*{chan.name}", [tensor(I2, k) for k in chan.operators])


def compose_sequential(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Channel that applies ``first`` and then ``second``.

    The operator set is ``{E_j D_i}`` with ``D`` from ``first`` and ``E`` from
    ``second``, ordered with ``i`` as the slow index.
    """
    if first.dim != second.dim:
        raise DimensionError(f"cannot compose dim {first.dim} with dim {second.dim}")
    ops = [e @ d for d in first.operators for e in second.operators]
    return KrausChannel(f"{second.name}.{first.name}", ops)


def binary_entropy(x: float) -> float:
    """``-x log2 x - (1-x) log2 (1-x)``, with ``h(0) = h(1) = 0``."""
    x = _check_prob(x, "x")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def flip_capacity(x: float) -> float:
    """Quantum capacity of a bit-flip or phase-flip channel with error ``x``."""
    return 1.0 - binary_entropy(x)


def bottleneck_bound(params: FlipParams) -> float:
    """Upper bound on the capacity of the cascade of the two flip channels.

    This is the min of the individual capacities, not the capacity of the
    composition itself.
    """
    return 1.0 - max(binary_entropy(params.p), binary_entropy(params.q))

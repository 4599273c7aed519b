"""Teleportation of one qubit over a possibly noisy EPR pair.

The circuit runs on ``(message, A, B)``: CNOT from message to A, Hadamard on
the message, projective measurement of (message, A), Pauli correction on B.
Outcome ``(i, j)`` means message bit ``i`` and A bit ``j``; Bob applies
``X`` if ``j`` and ``Z`` if ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from .qmat import (
    CNOT,
    H,
    I2,
    X,
    Z,
    DimensionError,
    conjugate,
    partial_trace,
    tensor,
    tensor_all,
    validate_density,
)

EMPTY_OUTCOME_TOL = 1e-12

OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))

CORRECTIONS = {
    (0, 0): I2,
    (0, 1): X,
    (1, 0): Z,
    (1, 1): Z @ X,
}


class AliceOutcome(NamedTuple):
    message_bit: int
    a_bit: int

    @classmethod
    def of(cls, bits) -> "AliceOutcome":
        i, j = (int(b) for b in bits)
        if i not in (0, 1) or j not in (0, 1):
            raise ValueError(f"invalid outcome {bits!r}")
        return cls(i, j)


@dataclass(frozen=True)
class EprBlocks:
    """The four 2x2 quadrants of a pair density matrix, indexed by qubit A."""

    b11: np.ndarray
    b12: np.ndarray
    b21: np.ndarray
    b22: np.ndarray

    def __post_init__(self):
        if np.max(np.abs(self.b21 - self.b12.conj().T)) > 1e-12:
            raise ValueError("off-diagonal blocks are not adjoint to each other")

    def assemble(self) -> np.ndarray:
        return np.block([[self.b11, self.b12], [self.b21, self.b22]])


@dataclass(frozen=True)
class TeleportResult:
    outcome: AliceOutcome
    probability: float
    bob_state: Optional[np.ndarray]


def split_blocks(pair) -> EprBlocks:
    pair = validate_density(pair)
    if pair.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 pair state, got {pair.shape}")
    return EprBlocks(pair[:2, :2], pair[:2, 2:], pair[2:, :2], pair[2:, 2:])


def teleport_circuit(message, pair) -> List[TeleportResult]:
    """Run the full density-matrix circuit and return all four outcomes."""
    message, pair = validate_density(message), validate_density(pair)
    if message.shape != (2, 2) or pair.shape != (4, 4):
        raise DimensionError("message must be 2x2 and pair 4x4")
    rho = tensor(message, pair)
    rho = conjugate(tensor(CNOT, I2), rho)
    rho = conjugate(tensor_all(H, I2, I2), rho)

    results = []
    for i, j in OUTCOMES:
        ket = np.zeros(4)
        ket[2 * i + j] = 1.0
        proj = np.kron(np.outer(ket, ket), I2)
        collapsed = proj @ rho @ proj
        prob = float(np.trace(collapsed).real)
        if prob < EMPTY_OUTCOME_TOL:
            results.append(TeleportResult(AliceOutcome(i, j), max(prob, 0.0), None))
            continue
        bob = partial_trace(collapsed / prob, [2, 2, 2], keep=[2])
        bob = conjugate(CORRECTIONS[(i, j)], bob)
        results.append(TeleportResult(AliceOutcome(i, j), prob, validate_density(bob)))
    return results


def bob_state_closed_form(message, blocks: EprBlocks, outcome) -> np.ndarray:
    """Bob's corrected state as a linear combination of the pair's blocks.

    For outcome ``00`` this is ``2 (m11 B11 + m12 B12 + m21 B21 + m22 B22)``
    where ``m`` is the message density matrix; the other outcomes permute
    and sign the coefficients and then apply the Pauli correction.

    The factor 2 presumes each outcome has probability 1/4, which holds
    whenever qubit A of the pair is maximally mixed (every pair the flip
    channels produce from a Bell state). For other pairs the result equals
    ``4 * prob * rho_t``.

    ``message`` may carry leading batch dimensions, shape ``(..., 2, 2)``.
    """
    m = np.asarray(message, dtype=complex)
    i, j = AliceOutcome.of(outcome)
    m11, m12, m21, m22 = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    if j == 0:
        coeffs = (m11, m12, m21, m22)
    else:
        coeffs = (m22, m21, m12, m11)
    if i == 1:
        coeffs = (coeffs[0], -coeffs[1], -coeffs[2], coeffs[3])
    blocks_ = (blocks.b11, blocks.b12, blocks.b21, blocks.b22)
    inner = 2 * sum(c[..., None, None] * b for c, b in zip(coeffs, blocks_))
    u = CORRECTIONS[(i, j)]
    return u @ inner @ u.conj().T

"""Quantum switch acting on a single qubit or on qubit B of an EPR pair.

The switch places two channels ``D`` and ``E`` in a superposition of
orders, steered by a control qubit. With the control in ``|0>`` the carrier
sees ``D E`` (``E`` first), with ``|1>`` it sees ``E D``. Joint states are
ordered ``(carrier, control)``.

For the flip channels with the control in ``|+>``, measuring the control in
the Hadamard basis heralds two branches. The ``|->`` branch (probability
``pq``) carries the pair conjugated by ``I (x) XZ`` and is undone exactly by
the same unitary.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channels import (
    FlipParams,
    KrausChannel,
    bit_flip,
    compose_sequential,
    extend_to_carrier,
    apply,
    phase_flip,
)
from .qmat import (
    I2,
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    X,
    Z,
    DimensionError,
    conjugate,
    partial_trace,
    projector,
    tensor,
    validate_density,
)

EMPTY_BRANCH_TOL = 1e-12

P0 = projector(KET0)
P1 = projector(KET1)
PLUS = projector(KET_PLUS)
MINUS = projector(KET_MINUS)

# the heralded |-> correction on the pair
XZ_ON_B = tensor(I2, X @ Z)


class Outcome(enum.Enum):
    PLUS = "+"
    MINUS = "-"


class EmptyBranchError(ValueError):
    """Raised when a heralded branch has (numerically) zero probability."""


@dataclass(frozen=True)
class ControlQubit:
    state: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "state", validate_density(self.state))
        if self.state.shape != (2, 2):
            raise DimensionError("control qubit must be 2x2")

    @classmethod
    def zero(cls) -> "ControlQubit":
        return cls(P0)

    @classmethod
    def one(cls) -> "ControlQubit":
        return cls(P1)

    @classmethod
    def plus(cls) -> "ControlQubit":
        return cls(PLUS)


@dataclass(frozen=True)
class HeraldedBranch:
    """One Hadamard-basis outcome of the control measurement.

    ``pair_state`` is ``None`` when ``probability`` is below 1e-12.
    """

    outcome: Outcome
    probability: float
    pair_state: Optional[np.ndarray]

    @property
    def empty(self) -> bool:
        return self.pair_state is None


def switch_kraus(d: KrausChannel, e: KrausChannel, carrier_dim: int = 2) -> KrausChannel:
    """Kraus operators ``W_ij = D_i E_j (x) |0><0| + E_j D_i (x) |1><1|``.

    For ``carrier_dim=4`` both channels are first lifted to act on qubit B
    of a pair, so each ``W_ij`` is ``I (x) (...)`` on ``(A, B, control)``.
    """
    if d.dim != 2 or e.dim != 2:
        raise DimensionError("switch expects two one-qubit channels")
    if carrier_dim == 4:
        d, e = extend_to_carrier(d), extend_to_carrier(e)
    elif carrier_dim != 2:
        raise DimensionError(f"carrier_dim must be 2 or 4, got {carrier_dim}")
    ops = [
        tensor(di @ ej, P0) + tensor(ej @ di, P1)
        for di in d.operators
        for ej in e.operators
    ]
    return KrausChannel(f"switch({d.name}, {e.name})", ops)


def _switch_apply(d, e, ctrl: ControlQubit, rho, carrier_dim: int) -> np.ndarray:
    rho = validate_density(rho)
    if rho.shape != (carrier_dim, carrier_dim):
        raise DimensionError(f"expected a {carrier_dim}x{carrier_dim} carrier, got {rho.shape}")
    return apply(switch_kraus(d, e, carrier_dim), tensor(rho, ctrl.state))


def switch_apply_single(d: KrausChannel, e: KrausChannel, ctrl: ControlQubit, rho) -> np.ndarray:
    """Switch output on a one-qubit carrier, a 4x4 state on ``(carrier, control)``."""
    return _switch_apply(d, e, ctrl, rho, 2)


def switch_apply_pair(d: KrausChannel, e: KrausChannel, ctrl: ControlQubit, rho_e) -> np.ndarray:
    """Switch output when qubit B of a pair travels through it; 8x8 on ``(A, B, control)``."""
    return _switch_apply(d, e, ctrl, rho_e, 4)


def _ket(i: int, j: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[2 * i + j] = 1.0
    return v


def _ketbra(a, b) -> np.ndarray:
    return np.outer(_ket(*a), _ket(*b).conj())


def _sum_z_on_b() -> np.ndarray:
    return sum(_ketbra((i, 0), (i, 0)) - _ketbra(((i + 1) % 2, 1), ((i + 1) % 2, 1)) for i in (0, 1))


def _sum_x_on_b() -> np.ndarray:
    return sum(_ketbra((i, j), (i, (j + 1) % 2)) for i in (0, 1) for j in (0, 1))


def _sum_xz_on_b() -> np.ndarray:
    return sum(
        (-1) ** ((j + 1) % 2) * _ketbra((i, j), (i, (j + 1) % 2)) for i in (0, 1) for j in (0, 1)
    )


def _sandwich(op, rho):
    return op @ rho @ op.conj().T


def switch_output_closed_form(params: FlipParams, rho_e) -> np.ndarray:
    """Closed-form switch output for the bit/phase flip pair and control ``|+>``.

    Three terms weighted ``(1-p)(1-q)``, ``(1-p)q``, ``p(1-q)`` sit on
    ``|+><+|``; the ``pq`` term (pair conjugated by ``I (x) XZ``) sits on
    ``|-><-|``. The pair operators are written as explicit ket-bra sums,
    independently of the Kraus construction.
    """
    p, q = params.p, params.q
    rho_e = np.asarray(rho_e, dtype=complex)
    plus_part = (
        (1 - p) * (1 - q) * rho_e
        + (1 - p) * q * _sandwich(_sum_z_on_b(), rho_e)
        + p * (1 - q) * _sandwich(_sum_x_on_b(), rho_e)
    )
    minus_part = p * q * _sandwich(_sum_xz_on_b(), rho_e)
    return np.kron(plus_part, PLUS) + np.kron(minus_part, MINUS)


def plus_branch_closed_form(params: FlipParams, rho_e) -> np.ndarray:
    """Normalized pair state heralded by ``|+>``; undefined when ``pq = 1``."""
    p, q = params.p, params.q
    rho_e = np.asarray(rho_e, dtype=complex)
    num = (
        (1 - p) * (1 - q) * rho_e
        + p * (1 - q) * _sandwich(_sum_x_on_b(), rho_e)
        + (1 - p) * q * _sandwich(_sum_z_on_b(), rho_e)
    )
    return num / (1 - p * q)


def minus_branch_closed_form(rho_e) -> np.ndarray:
    """Pair state heralded by ``|->`` before correction."""
    return _sandwich(_sum_xz_on_b(), np.asarray(rho_e, dtype=complex))


def classical_closed_form(params: FlipParams, rho_e) -> np.ndarray:
    """Closed-form pair state after the flip channels in a definite order."""
    p, q = params.p, params.q
    rho_e = np.asarray(rho_e, dtype=complex)
    return (
        (1 - p) * (1 - q) * rho_e
        + p * (1 - q) * _sandwich(_sum_x_on_b(), rho_e)
        + (1 - p) * q * _sandwich(_sum_z_on_b(), rho_e)
        + p * q * _sandwich(_sum_xz_on_b(), rho_e)
    )


def _project(joint: np.ndarray, proj: np.ndarray, outcome: Outcome) -> HeraldedBranch:
    big = np.kron(np.eye(4), proj)
    projected = big @ joint @ big
    prob = float(np.trace(projected).real)
    if prob < EMPTY_BRANCH_TOL:
        return HeraldedBranch(outcome, max(prob, 0.0), None)
    pair = partial_trace(projected / prob, [4, 2], keep=[0])
    return HeraldedBranch(outcome, prob, validate_density(pair))


def herald(joint) -> Tuple[HeraldedBranch, HeraldedBranch]:
    """Measure the control qubit of a ``(pair, control)`` state in the Hadamard basis.

    Returns the ``(plus, minus)`` branches with exact probabilities.
    """
    joint = np.asarray(joint, dtype=complex)
    if joint.shape != (8, 8):
        raise DimensionError(f"expected an 8x8 (pair, control) state, got {joint.shape}")
    return _project(joint, PLUS, Outcome.PLUS), _project(joint, MINUS, Outcome.MINUS)


def correct_minus(branch: HeraldedBranch) -> np.ndarray:
    """Undo the ``|->`` branch error by conjugating with ``I (x) XZ``."""
    if branch.empty:
        raise EmptyBranchError(f"branch {branch.outcome.value} has probability {branch.probability}")
    return validate_density(conjugate(XZ_ON_B, branch.pair_state))


def distribute_qs(params: FlipParams, rho_e) -> Tuple[HeraldedBranch, HeraldedBranch]:
    """Send qubit B through the switch with control ``|+>``, herald, correct.

    Returns ``(plus, minus)``. The minus branch carries the corrected pair
    state, or ``None`` when ``pq`` is zero.
    """
    joint = switch_apply_pair(bit_flip(params.p), phase_flip(params.q), ControlQubit.plus(), rho_e)
    plus, minus = herald(joint)
    if not minus.empty:
        minus = HeraldedBranch(Outcome.MINUS, minus.probability, correct_minus(minus))
    return plus, minus


def distribute_ct(params: FlipParams, rho_e) -> np.ndarray:
    """Send qubit B through the bit flip and then the phase flip."""
    chan = compose_sequential(
        extend_to_carrier(bit_flip(params.p)), extend_to_carrier(phase_flip(params.q))
    )
    return apply(chan, validate_density(rho_e))

"""Teleportation fidelity, averaged over the Bloch sphere of input messages.

Closed forms for the switch and the definite-order baseline sit next to a
numerical integrator that averages ``<psi| rho_t |psi>`` over the sphere,
either by Gauss-Legendre quadrature in ``cos(theta)`` times an equispaced
rule in ``phi``, or by seeded Monte Carlo sampling.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channels import FlipParams
from .qmat import BlochAngles, bloch_density, bloch_to_state, fidelity_pure, state_to_density
from .teleport import bob_state_closed_form, split_blocks

CLASSICAL_THRESHOLD = 2.0 / 3.0
CLAMP_TOL = 1e-9


class QuadratureMode(enum.Enum):
    DETERMINISTIC = "det"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class QuadratureSpec:
    mode: QuadratureMode = QuadratureMode.DETERMINISTIC
    theta_nodes: int = 64
    phi_nodes: int = 64
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.mode is QuadratureMode.DETERMINISTIC:
            if self.theta_nodes < 8 or self.phi_nodes < 8:
                raise ValueError("deterministic quadrature needs at least 8 nodes per axis")
        elif self.samples < 1000:
            raise ValueError("Monte Carlo quadrature needs at least 1000 samples")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "QuadratureSpec":
        """Parse ``det:NxM`` or ``mc:SAMPLES``."""
        m = re.fullmatch(r"det:(\d+)x(\d+)", text.strip())
        if m:
            return cls(QuadratureMode.DETERMINISTIC, int(m.group(1)), int(m.group(2)), seed=seed)
        m = re.fullmatch(r"mc:(\d+)", text.strip())
        if m:
            return cls(QuadratureMode.MONTE_CARLO, samples=int(m.group(1)), seed=seed)
        raise ValueError(f"cannot parse quadrature spec {text!r}")

    def with_seed(self, seed: int) -> "QuadratureSpec":
        return QuadratureSpec(self.mode, self.theta_nodes, self.phi_nodes, self.samples, seed)

    def __str__(self) -> str:
        if self.mode is QuadratureMode.DETERMINISTIC:
            return f"det:{self.theta_nodes}x{self.phi_nodes}"
        return f"mc:{self.samples}"


class SwitchFidelity(NamedTuple):
    f_minus: float
    f_plus: Optional[float]
    f_combined: float


@dataclass(frozen=True)
class FidelitySweepPoint:
    p: float
    q: float
    f_qs: Optional[float]
    f_plus: Optional[float]
    f_minus: Optional[float]
    f_ct: Optional[float]
    ratio: Optional[float]
    herald_prob: Optional[float]


def _clamp(f: float) -> float:
    if f < -CLAMP_TOL or f > 1 + CLAMP_TOL:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def f_qs_closed(params: FlipParams) -> SwitchFidelity:
    """Average fidelity with switch distribution: per branch and combined.

    ``f_plus`` is ``None`` when ``pq = 1``, where that branch never occurs.
    """
    p, q = params.p, params.q
    pq = p * q
    f_plus = None if pq == 1.0 else (3 - 2 * p - 2 * q + pq) / (3 * (1 - pq))
    return SwitchFidelity(1.0, f_plus, (3 - 2 * p - 2 * q + 4 * pq) / 3)


def f_ct_closed(params: FlipParams) -> float:
    p, q = params.p, params.q
    return (3 - 2 * p - 2 * q + 2 * p * q) / 3


def gain_ratio(params: FlipParams) -> float:
    return f_qs_closed(params).f_combined / f_ct_closed(params)


def classical_threshold() -> float:
    """Best average fidelity reachable with classical resources only."""
    return CLASSICAL_THRESHOLD


def conditional_fidelity(pair, angles: BlochAngles, outcome=(0, 0)) -> float:
    psi = bloch_to_state(angles)
    rho_t = bob_state_closed_form(state_to_density(psi), split_blocks(pair), outcome)
    return fidelity_pure(psi, rho_t)


def _sphere_nodes(quad: QuadratureSpec):
    # returns (theta, phi, weights) with weights summing to 1
    if quad.mode is QuadratureMode.DETERMINISTIC:
        x, w = np.polynomial.legendre.leggauss(quad.theta_nodes)
        phi = 2 * np.pi * np.arange(quad.phi_nodes) / quad.phi_nodes
        theta = np.arccos(x)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        ww = np.outer(w / 2, np.full(quad.phi_nodes, 1.0 / quad.phi_nodes))
        return tt.ravel(), pp.ravel(), ww.ravel()
    rng = np.random.default_rng(quad.seed)
    u = rng.uniform(-1.0, 1.0, quad.samples)
    phi = rng.uniform(0.0, 2 * np.pi, quad.samples)
    return np.arccos(u), phi, np.full(quad.samples, 1.0 / quad.samples)


def avg_fidelity_numeric(pair, quad: QuadratureSpec = QuadratureSpec(), outcome=(0, 0)) -> float:
    """Bloch-sphere average of the teleportation fidelity for a given pair.

    Bob's state comes from the block closed form for the chosen Alice
    outcome (``00`` by default).
    """
    blocks = split_blocks(pair)
    theta, phi, w = _sphere_nodes(quad)
    msgs = bloch_density(theta, phi)
    rho_t = bob_state_closed_form(msgs, blocks, outcome)
    # <psi|rho_t|psi> = Tr(rho_psi rho_t) for a pure message
    fid = np.einsum("nij,nji->n", msgs, rho_t)
    if np.max(np.abs(fid.imag)) > 1e-12:
        raise ValueError("fidelity integrand is not real")
    return _clamp(float(np.dot(w, fid.real)))

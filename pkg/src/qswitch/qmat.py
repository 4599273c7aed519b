"""Dense complex linear algebra for one- to three-qubit states.

Everything here works on plain ``numpy`` arrays. Matrices are capped at
8x8, which covers a message qubit plus an EPR pair, or a pair plus the
switch control qubit.

Tensor-factor ordering is fixed throughout the package:
``(message, EPR qubit A, EPR qubit B)`` for teleportation and
``(pair, control)`` for the switch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_DIM = 8
DENSITY_TOL = 1e-10
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


class DimensionError(ValueError):
    """Operand shapes are inconsistent or exceed the supported size."""


class DensityError(ValueError):
    """A matrix fails one of the density-matrix invariants."""


class NotHermitianError(DensityError):
    pass


class TraceError(DensityError):
    pass


class NegativeEigenvalueError(DensityError):
    pass


@dataclass(frozen=True)
class BlochAngles:
    """Polar angle ``theta`` in [0, pi] and azimuth ``phi`` in [0, 2 pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if max(a.shape) > MAX_DIM or min(a.shape) < 1:
        raise DimensionError(f"matrix shape {a.shape} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``; ``a`` is the slow (outer) index."""
    a, b = _as_matrix(a), _as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"tensor product would be {rows}x{cols}")
    return np.kron(a, b)


def tensor_all(*mats) -> np.ndarray:
    out = _as_matrix(mats[0])
    for m in mats[1:]:
        out = tensor(out, m)
    return out


def dagger(a) -> np.ndarray:
    return _as_matrix(a).conj().T


def mat_mul(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def mat_add(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(c: complex, a) -> np.ndarray:
    return c * _as_matrix(a)


def conjugate(u, rho) -> np.ndarray:
    """Return ``u rho u^dagger``."""
    return mat_mul(mat_mul(u, rho), dagger(u))


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def partial_trace(rho, dims: Sequence[int], keep) -> np.ndarray:
    """Reduce ``rho`` to the tensor factors listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Square matrix on the space ``dims[0] (x) dims[1] (x) ...``.
    dims : sequence of int
        Dimension of each tensor factor, outermost first.
    keep : iterable of int
        Indices of the factors to retain. Their relative order is preserved.
    """
    rho = _as_matrix(rho)
    dims = [int(d) for d in dims]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if rho.shape[0] != rho.shape[1] or int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} inconsistent with shape {rho.shape}")
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep={keep} is not a nonempty subset of 0..{n - 1}")

    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = [row[k] if k not in keep else letters[n + k] for k in range(n)]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    reduced = np.einsum(spec, rho.reshape(dims + dims))
    d = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d, d)


def _eigvalsh_2x2(a: np.ndarray) -> np.ndarray:
    a11, a22 = a[0, 0].real, a[1, 1].real
    mean = 0.5 * (a11 + a22)
    radius = np.hypot(0.5 * (a11 - a22), abs(a[0, 1]))
    return np.array([mean - radius, mean + radius])


def _jacobi_hermitian(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    # cyclic complex Jacobi; returns the sorted diagonal after convergence
    a = a.astype(complex, copy=True)
    n = a.shape[0]
    ref = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.abs(np.triu(a, 1)) ** 2))
        if off <= tol * ref:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r == 0.0:
                    continue
                # phase q so that a[p, q] becomes real and positive
                ph = a[p, q] / r
                a[:, q] *= ph.conjugate()
                a[q, :] *= ph
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                sn = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * cp - sn * cq, sn * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * rp - sn * rq, sn * rp + c * rq
    return np.sort(np.diag(a).real)


def eigvalsh(a) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix of size 2, 4 or 8.

    2x2 uses the closed form; larger sizes use cyclic Jacobi rotations,
    stopping once the off-diagonal Frobenius norm drops below 1e-14
    relative to the matrix norm.
    """
    a = _as_matrix(a)
    a = 0.5 * (a + a.conj().T)
    if a.shape == (2, 2):
        return _eigvalsh_2x2(a)
    return _jacobi_hermitian(a)


def validate_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex.

    Raises
    ------
    NotHermitianError, TraceError, NegativeEigenvalueError
        One per violated invariant, checked in that order.
    """
    rho = _as_matrix(rho)
    if rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4, 8):
        raise DimensionError(f"density matrix must be 2, 4 or 8 square, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise NotHermitianError(f"max |rho - rho^dagger| = {herm:.3g}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise TraceError(f"trace = {tr:.12g}")
    lo = eigvalsh(rho)[0]
    if lo < -PSD_TOL:
        raise NegativeEigenvalueError(f"smallest eigenvalue {lo:.3g}")
    return rho


def is_density(rho, tol: float = DENSITY_TOL) -> bool:
    try:
        validate_density(rho, tol)
    except (DensityError, DimensionError):
        return False
    return True


def fidelity_pure(psi, rho) -> float:
    """Overlap ``<psi|rho|psi>`` of a pure target with a state ``rho``."""
    psi = np.asarray(psi, dtype=complex)
    rho = _as_matrix(rho)
    if psi.shape != (rho.shape[0],):
        raise DimensionError(f"state of length {psi.shape} vs matrix {rho.shape}")
    f = psi.conj() @ rho @ psi
    if abs(f.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {f.imag:.3g}")
    f = f.real
    if f < -1e-12 or f > 1 + 1e-12:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    return float(min(max(f, 0.0), 1.0))


def bloch_to_state(angles: BlochAngles) -> np.ndarray:
    """Amplitudes ``(cos(theta/2), e^{i phi} sin(theta/2))``."""
    return np.array(
        [np.cos(angles.theta / 2), np.exp(1j * angles.phi) * np.sin(angles.theta / 2)]
    )


def state_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state has squared norm {norm!r}")
    return projector(psi)


def bloch_density(theta, phi) -> np.ndarray:
    """Message density matrices for arrays of Bloch angles, shape ``(..., 2, 2)``.

    Vectorized form of ``state_to_density(bloch_to_state(...))`` used by the
    quadrature routines.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c * c
    out[..., 0, 1] = c * s * np.exp(-1j * phi)
    out[..., 1, 0] = c * s * np.exp(1j * phi)
    out[..., 1, 1] = s * s
    return out


def bell_state() -> np.ndarray:
    """``|Phi+><Phi+|``, the ideal EPR pair."""
    return projector(PHI_PLUS)


def trace_distance(a, b) -> float:
    diff = _as_matrix(a) - _as_matrix(b)
    return 0.5 * float(np.sum(np.abs(eigvalsh(diff))))

"""Dense complex-matrix kernel for few-qubit Hilbert spaces.

Matrices are plain ``numpy`` complex arrays. Qubit 0 is the leftmost
(most significant) tensor factor, and basis bit 0 of a qubit means |H>.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, NumericError

HERM_TOL = 1e-8
PSD_CLAMP = 1e-9


@dataclass(frozen=True)
class QubitPartition:
    """Bipartition of ``n`` qubits into two non-empty groups."""

    group_a: tuple[int, ...]
    group_b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(self.group_a)), tuple(sorted(self.group_b))
        object.__setattr__(self, "group_a", a)
        object.__setattr__(self, "group_b", b)
        if not a or not b:
            raise ArgumentError("both partition groups must be non-empty")
        if set(a) & set(b):
            raise ArgumentError(f"partition groups overlap: {a} / {b}")
        if set(a) | set(b) != set(range(self.n_qubits)):
            raise ArgumentError(f"partition {a} / {b} does not cover 0..n-1")

    @property
    def n_qubits(self) -> int:
        return len(self.group_a) + len(self.group_b)

    def label(self, names: Sequence[str] = ("A", "B", "A'", "B'")) -> str:
        return "".join(names[i] for i in self.group_a) + ":" + "".join(names[i] for i in self.group_b)


def n_qubits_of(m: np.ndarray) -> int:
    """Number of qubits of a ``2**n`` square matrix (or vector)."""
    dim = m.shape[0]
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim or any(s != dim for s in m.shape):
        raise ArgumentError(f"shape {m.shape} is not a qubit operator")
    return n


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of the factors, leftmost factor most significant."""
    if not factors:
        raise ArgumentError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def is_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> bool:
    """True if ``rho`` is Hermitian, unit-trace and PSD (eigenvalues >= -1e-9)."""
    try:
        check_density_matrix(rho, atol=atol)
    except (ArgumentError, NumericError):
        return False
    return True


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2:
        raise ArgumentError("density matrix must be 2-D")
    n_qubits_of(rho)
    if not np.all(np.isfinite(rho)):
        raise ArgumentError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ArgumentError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ArgumentError(f"density matrix trace is {np.trace(rho).real:.3g}, not 1")
    if np.linalg.eigvalsh(rho)[0] < -PSD_CLAMP:
        raise NumericError("density matrix has a negative eigenvalue")
    return rho


def _check_indices(indices: Iterable[int], n: int, *, allow_empty: bool) -> list[int]:
    idx = list(indices)
    if not allow_empty and not idx:
        raise ArgumentError("index list must be non-empty")
    if any(not 0 <= i < n for i in idx):
        raise ArgumentError(f"qubit indices {idx} out of range for {n} qubits")
    if len(set(idx)) != len(idx):
        raise ArgumentError(f"duplicate qubit indices in {idx}")
    return idx


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on the qubits in ``keep``.

    Args:
        rho: operator on ``n`` qubits.
        keep: strictly increasing qubit indices to retain.

    Returns:
        The ``2**len(keep)`` square reduced operator.
    """
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho)
    keep = _check_indices(keep, n, allow_empty=False)
    if keep != sorted(keep):
        raise ArgumentError("keep indices must be strictly increasing")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    # trace out from the highest index down so remaining axis numbers stay valid
    for k, q in enumerate(sorted(drop, reverse=True)):
        m = n - k
        t = np.trace(t, axis1=q, axis2=q + m)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def partial_transpose(rho: np.ndarray, subset: Sequence[int]) -> np.ndarray:
    """Transpose the qubits in ``subset``; an empty subset returns a copy."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho)
    subset = _check_indices(subset, n, allow_empty=True)
    t = rho.reshape([2] * (2 * n))
    axes = list(range(2 * n))
    for q in subset:
        axes[q], axes[q + n] = axes[q + n], axes[q]
    return t.transpose(axes).reshape(rho.shape).copy()


def herm_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    The input is symmetrized as ``(M + M^dagger)/2`` before solving.

    Returns:
        ``(w, v)`` with real eigenvalues ``w`` ascending and eigenvectors in
        the columns of ``v``.

    Raises:
        ArgumentError: non-square input, or anti-Hermitian part above 1e-8.
        NumericError: the LAPACK solver did not converge.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"herm_eig needs a square matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ArgumentError("matrix has non-finite entries")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERM_TOL:
        raise ArgumentError("matrix is not Hermitian")
    try:
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NumericError(str(exc)) from exc
    return w, v


def psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-9, 0) are clamped to 0."""
    w, v = herm_eig(rho)
    if w.size and w[0] < -PSD_CLAMP:
        raise NumericError(f"matrix is not PSD (min eigenvalue {w[0]:.3g})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T

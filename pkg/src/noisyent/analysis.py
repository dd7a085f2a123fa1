"""Entanglement, privacy and nonlocality functionals of reconstructed states."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError
from .qmat import QubitPartition, herm_eig, kron, n_qubits_of, partial_trace, partial_transpose, psd_sqrt
from .states import key_basis_state, pauli, pauli_string

# The three pair-pair cuts of four qubits (A, B, A', B') = (0, 1, 2, 3).
PAIR_PARTITIONS = (
    QubitPartition((0, 1), (2, 3)),  # AB:A'B'
    QubitPartition((0, 3), (1, 2)),  # AB':A'B
    QubitPartition((0, 2), (1, 3)),  # AA':BB'
)


def _same_dims(rho, sigma):
    rho, sigma = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ArgumentError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    return rho, sigma


def _require_qubits(rho, n: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if n_qubits_of(rho) != n:
        raise ArgumentError(f"expected a {n}-qubit state, got shape {rho.shape}")
    return rho


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), without squaring.

    Eigenvalues of the inner product in [-1e-9, 0) are treated as zero and the
    result is clamped to [0, 1].
    """
    rho, sigma = _same_dims(rho, sigma)
    s = psd_sqrt(rho)
    w, _ = herm_eig(s @ sigma @ s)
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(max(f, 0.0), 1.0)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho, sigma = _same_dims(rho, sigma)
    return 0.5 * float(np.sum(np.abs(herm_eig(rho - sigma)[0])))


def witness_operator(sign: int = +1) -> np.ndarray:
    """I + sign * (XXXX + YYYY + ZZZZ).

    ``sign=+1`` is the operator exactly as printed for the Smolin witness;
    ``sign=-1`` is the flipped convention, which is the one that can take
    negative values on states close to the Smolin state.
    """
    if sign not in (1, -1):
        raise ArgumentError("sign must be +1 or -1")
    return pauli_string("IIII") + sign * (pauli_string("XXXX") + pauli_string("YYYY") + pauli_string("ZZZZ"))


def witness_expectation(rho: np.ndarray, sign: int = +1) -> float:
    rho = _require_qubits(rho, 4)
    return float(np.real(np.trace(witness_operator(sign) @ rho)))


@dataclass(frozen=True)
class PptReport:
    partition: QubitPartition
    eigenvalues: np.ndarray
    negativity: float

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.label(),
            "group_a": list(self.partition.group_a),
            "group_b": list(self.partition.group_b),
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "negativity": self.negativity,
        }


def ppt_spectrum(rho: np.ndarray, partition: QubitPartition) -> PptReport:
    """Ascending spectrum of the partial transpose over ``partition.group_b``."""
    rho = np.asarray(rho, dtype=complex)
    if partition.n_qubits != n_qubits_of(rho):
        raise ArgumentError("partition does not match the state's qubit count")
    w, _ = herm_eig(partial_transpose(rho, partition.group_b))
    return PptReport(partition, w, float(-np.sum(w[w < 0])))


def negativity(rho: np.ndarray, subset: Sequence[int]) -> float:
    w, _ = herm_eig(partial_transpose(rho, subset))
    return float(-np.sum(w[w < 0]))


# -- CHSH --------------------------------------------------------------------

def _unit(v, name="Bloch vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ArgumentError(f"{name} must be a unit 3-vector, got {v}")
    return v


@dataclass(frozen=True)
class ChshSetting:
    """Measurement directions ``a, a'`` (first qubit) and ``b, b'`` (second)."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))

    def to_dict(self) -> dict:
        return {k: [float(x) for x in getattr(self, k)] for k in ("a", "a_prime", "b", "b_prime")}

    @classmethod
    def from_dict(cls, d: dict) -> "ChshSetting":
        return cls(d["a"], d["a_prime"], d["b"], d["b_prime"])


# Directions used on the key qubits of the private state.
KEY_CHSH_SETTING = ChshSetting(
    a=[0.0, 1.0, 0.0],
    a_prime=[0.0, 0.0, 1.0],
    b=[0.0, 2 / np.sqrt(5), -1 / np.sqrt(5)],
    b_prime=[0.0, 2 / np.sqrt(5), 1 / np.sqrt(5)],
)


def _dot_sigma(v: np.ndarray) -> np.ndarray:
    return v[0] * pauli("X") + v[1] * pauli("Y") + v[2] * pauli("Z")


def correlation(rho2: np.ndarray, a, b) -> float:
    """<(a . sigma) x (b . sigma)> on a two-qubit state."""
    rho2 = _require_qubits(rho2, 2)
    op = kron(_dot_sigma(_unit(a)), _dot_sigma(_unit(b)))
    return float(np.real(np.trace(rho2 @ op)))


def correlation_matrix(rho2: np.ndarray) -> np.ndarray:
    """T[i, j] = Tr(rho sigma_i x sigma_j) for i, j in x, y, z."""
    rho2 = _require_qubits(rho2, 2)
    return np.array([[np.real(np.trace(rho2 @ kron(pauli(p), pauli(q)))) for q in "XYZ"] for p in "XYZ"])


def chsh_value(rho2: np.ndarray, s: ChshSetting) -> float:
    """C(a;b) + C(a';b) + C(a;b') - C(a';b')."""
    return (correlation(rho2, s.a, s.b) + correlation(rho2, s.a_prime, s.b)
            + correlation(rho2, s.a, s.b_prime) - correlation(rho2, s.a_prime, s.b_prime))


def chsh_optimal(rho2: np.ndarray) -> tuple[float, ChshSetting]:
    """Maximal CHSH value 2 sqrt(u1 + u2) and a setting attaining it.

    ``u1 >= u2`` are the two largest eigenvalues of T^T T. With the SVD
    T = U S W^T, the returned directions are a = u1, a' = u2 and
    b, b' = cos(t) w1 +- sin(t) w2 where tan(t) = s2 / s1.
    """
    t = correlation_matrix(rho2)
    u, s, wt = np.linalg.svd(t)
    value = 2 * float(np.hypot(s[0], s[1]))
    theta = np.arctan2(s[1], s[0])
    w1, w2 = wt[0], wt[1]
    setting = ChshSetting(
        a=u[:, 0],
        a_prime=u[:, 1],
        b=np.cos(theta) * w1 + np.sin(theta) * w2,
        b_prime=np.cos(theta) * w1 - np.sin(theta) * w2,
    )
    return value, setting


# -- key correlations ----------------------------------------------------------

@dataclass(frozen=True)
class KeyCorrelations:
    p00: float
    p11: float
    p01: float
    p10: float
    off_diag_magnitude: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.p00, self.p11, self.p01, self.p10, self.off_diag_magnitude)

    def to_dict(self) -> dict:
        return dict(zip(("p00", "p11", "p01", "p10", "off_diag_magnitude"), self.as_tuple()))


def key_correlation_report(rho4: np.ndarray) -> KeyCorrelations:
    """sigma_y x sigma_y outcome statistics of the key qubits A, B.

    ``off_diag_magnitude`` is |<0b 0b| rho_AB |1b 1b>| in the key basis.
    """
    rho_ab = partial_trace(_require_qubits(rho4, 4), [0, 1])
    ket = {(i, j): kron(key_basis_state(i), key_basis_state(j)) for i in (0, 1) for j in (0, 1)}
    p = {k: float(np.real(v.conj() @ rho_ab @ v)) for k, v in ket.items()}
    off = abs(ket[0, 0].conj() @ rho_ab @ ket[1, 1])
    return KeyCorrelations(p[0, 0], p[1, 1], p[0, 1], p[1, 0], float(off))


# -- report --------------------------------------------------------------------

def analysis_report(rho: np.ndarray, target: np.ndarray,
                    bootstrap: Optional[Sequence[np.ndarray]] = None) -> dict:
    """Scalar and spectral summary of a four-qubit state against ``target``.

    When ``bootstrap`` states are given, ``bootstrap_std`` holds the sample
    standard deviation of each scalar across them.
    """
    rho = _require_qubits(rho, 4)
    rho_ab = partial_trace(rho, [0, 1])
    opt_value, opt_setting = chsh_optimal(rho_ab)
    report = {
        "fidelity_to_target": fidelity(rho, target),
        "witness": witness_expectation(rho, +1),
        "witness_flipped": witness_expectation(rho, -1),
        "ppt": [ppt_spectrum(rho, p).to_dict() for p in PAIR_PARTITIONS],
        "chsh": {
            "setting": opt_setting.to_dict(),
            "value": opt_value,
            "key_setting": KEY_CHSH_SETTING.to_dict(),
            "key_setting_value": chsh_value(rho_ab, KEY_CHSH_SETTING),
        },
        "key_correlations": key_correlation_report(rho).to_dict(),
    }
    if bootstrap:
        scalars = {
            "fidelity_to_target": [fidelity(r, target) for r in bootstrap],
            "witness": [witness_expectation(r, +1) for r in bootstrap],
            "witness_flipped": [witness_expectation(r, -1) for r in bootstrap],
            "chsh_value": [chsh_optimal(partial_trace(r, [0, 1]))[0] for r in bootstrap],
            "chsh_key_setting_value": [chsh_value(partial_trace(r, [0, 1]), KEY_CHSH_SETTING) for r in bootstrap],
        }
        report["bootstrap_std"] = {k: float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
                                   for k, v in scalars.items()}
        report["bootstrap_n"] = len(bootstrap)
    return report

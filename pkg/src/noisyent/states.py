"""Polarization states, wave-plate Jones matrices and correlated-noise schedules.

Four-qubit operators use the qubit order (A, B, A', B') = (0, 1, 2, 3).
Noise is applied locally to B and B'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError
from .qmat import check_density_matrix, ket_to_dm, kron, n_qubits_of

I2 = np.eye(2, dtype=complex)
_PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = ("I", "X", "Y", "Z")

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)


def pauli(label: str) -> np.ndarray:
    """2x2 Pauli matrix for ``label`` in {I, X, Y, Z} in the (H, V) basis."""
    try:
        return _PAULI[label.upper()].copy()
    except (KeyError, AttributeError):
        raise ArgumentError(f"unknown Pauli label {label!r}") from None


def pauli_string(labels: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"XXYZ"``."""
    return kron(*(pauli(c) for c in labels))


class BellKind(str, Enum):
    phi_plus = "phi_plus"
    phi_minus = "phi_minus"
    psi_plus = "psi_plus"
    psi_minus = "psi_minus"


def bell_state(kind: BellKind | str) -> np.ndarray:
    """Normalized two-qubit Bell vector, e.g. phi_plus = (|HH> + |VV>)/sqrt(2)."""
    kind = BellKind(kind)
    s = 1 / np.sqrt(2)
    hh, hv, vh, vv = (kron(a, b) for a, b in [(H, H), (H, V), (V, H), (V, V)])
    return {
        BellKind.phi_plus: s * (hh + vv),
        BellKind.phi_minus: s * (hh - vv),
        BellKind.psi_plus: s * (hv + vh),
        BellKind.psi_minus: s * (hv - vh),
    }[kind]


def bell_projector(kind: BellKind | str) -> np.ndarray:
    return ket_to_dm(bell_state(kind))


def key_basis_state(v: int) -> np.ndarray:
    """Eigenvector of sigma_y: (|H> + i(-1)^v |V>)/sqrt(2)."""
    if v not in (0, 1):
        raise ArgumentError(f"key bit must be 0 or 1, got {v!r}")
    return (H + 1j * (-1) ** v * V) / np.sqrt(2)


def _pair_mixture(pairs: Sequence[tuple[str, str]]) -> np.ndarray:
    rho = sum(kron(bell_projector(ab), bell_projector(abp)) for ab, abp in pairs)
    return rho / len(pairs)


def smolin_state() -> np.ndarray:
    """Equal mixture of |B><B|_AB x |B><B|_A'B' over the four Bell states B."""
    return _pair_mixture([(k, k) for k in BellKind])


def smolin_pauli_form() -> np.ndarray:
    """(1/16)(I + XXXX + YYYY + ZZZZ)."""
    return (pauli_string("IIII") + pauli_string("XXXX") + pauli_string("YYYY")
            + pauli_string("ZZZZ")) / 16


def private_state() -> np.ndarray:
    """Four-qubit private state with key qubits A, B and shield qubits A', B'."""
    return _pair_mixture([
        ("phi_minus", "psi_minus"),
        ("psi_plus", "phi_plus"),
        ("psi_plus", "psi_plus"),
        ("psi_plus", "phi_minus"),
    ])


def phi_plus_pairs() -> np.ndarray:
    """|phi+>_AB x |phi+>_A'B', the noiseless source output."""
    return ket_to_dm(kron(bell_state("phi_plus"), bell_state("phi_plus")))


# -- wave plates -------------------------------------------------------------

class Retardance(str, Enum):
    half = "half"
    quarter = "quarter"


@dataclass(frozen=True)
class WavePlate:
    """Retarder with fast axis at ``angle`` radians from horizontal, kept in [0, pi)."""

    retardance: Retardance
    angle: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.angle):
            raise ArgumentError("wave-plate angle must be finite")
        object.__setattr__(self, "retardance", Retardance(self.retardance))
        object.__setattr__(self, "angle", float(np.mod(self.angle, np.pi)))

    def rotated(self, delta: float) -> "WavePlate":
        return WavePlate(self.retardance, self.angle + delta)


def HWP(angle: float) -> WavePlate:
    return WavePlate(Retardance.half, angle)


def QWP(angle: float) -> WavePlate:
    return WavePlate(Retardance.quarter, angle)


def _rot(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]], dtype=complex)


def waveplate_unitary(p: WavePlate) -> np.ndarray:
    """Jones matrix of a wave plate.

    HWP(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]] and
    QWP(t) = R(t) diag(1, i) R(-t).
    """
    t = p.angle
    if p.retardance is Retardance.half:
        c, s = np.cos(2 * t), np.sin(2 * t)
        return np.array([[c, s], [s, -c]], dtype=complex)
    return _rot(t) @ np.diag([1, 1j]) @ _rot(-t)


def compose_plates(plates: Sequence[WavePlate]) -> np.ndarray:
    """Jones matrix of a plate stack; the first plate in the list acts first."""
    if not plates:
        raise ArgumentError("plate list must be non-empty")
    u = I2
    for p in plates:
        u = waveplate_unitary(p) @ u
    return u


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    """True if ``u == exp(i a) v`` for some real ``a`` (max-norm ``atol``)."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ArgumentError(f"shape mismatch {u.shape} vs {v.shape}")
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return bool(np.max(np.abs(u - phase * v)) <= atol)


# Three-plate (QWP, QWP, HWP) stacks realizing each Pauli up to global phase.
PAULI_PLATES: dict[str, tuple[WavePlate, ...]] = {
    "I": (QWP(0.0), QWP(0.0), HWP(0.0)),
    "X": (QWP(0.0), QWP(np.pi / 2), HWP(np.pi / 4)),
    "Y": (QWP(np.pi / 4), QWP(np.pi / 4), HWP(0.0)),
    "Z": (QWP(0.0), QWP(np.pi / 2), HWP(0.0)),
}
# Single half-wave plate used on photon B for the private state.
PAULI_SINGLE_HWP: dict[str, tuple[WavePlate, ...]] = {
    "X": (HWP(np.pi / 4),),
    "Z": (HWP(0.0),),
}


# -- noise schedules ---------------------------------------------------------

def _is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    return u.shape == (2, 2) and np.max(np.abs(u.conj().T @ u - I2)) <= atol


@dataclass(frozen=True)
class NoiseTerm:
    """One correlated setting: ``op_b`` on B and ``op_bprime`` on B' with ``weight``.

    ``plates_b`` / ``plates_bprime`` give the wave-plate realization used when
    misalignment noise is simulated; without them the op is applied exactly.
    """

    weight: float
    op_b: np.ndarray
    op_bprime: np.ndarray
    plates_b: Optional[tuple[WavePlate, ...]] = None
    plates_bprime: Optional[tuple[WavePlate, ...]] = None
    label: str = ""

    def __post_init__(self):
        if not self.weight > 0:
            raise ArgumentError("schedule weights must be positive")
        for op in (self.op_b, self.op_bprime):
            if not _is_unitary(np.asarray(op, dtype=complex)):
                raise ArgumentError("schedule operators must be 2x2 unitaries")


@dataclass(frozen=True)
class NoiseSchedule:
    terms: tuple[NoiseTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ArgumentError("schedule must have at least one term")
        total = sum(t.weight for t in self.terms)
        if abs(total - 1) > 1e-12:
            raise ArgumentError(f"schedule weights sum to {total!r}, not 1")

    @property
    def weights(self) -> list[float]:
        return [t.weight for t in self.terms]

    def __len__(self) -> int:
        return len(self.terms)


def pauli_term(weight: float, pauli_b: str, pauli_bprime: str, *,
               single_plate_b: bool = False) -> NoiseTerm:
    """Schedule term from Pauli labels, carrying the matching wave-plate stacks."""
    plates_b = (PAULI_SINGLE_HWP if single_plate_b else PAULI_PLATES)[pauli_b]
    return NoiseTerm(weight, pauli(pauli_b), pauli(pauli_bprime),
                     plates_b=plates_b, plates_bprime=PAULI_PLATES[pauli_bprime],
                     label=pauli_b + pauli_bprime)


def smolin_schedule() -> NoiseSchedule:
    """Equiprobable I x I, X x X, Y x Y, Z x Z on photons B and B'."""
    return NoiseSchedule(tuple(pauli_term(0.25, p, p) for p in PAULI_LABELS))


def private_schedule() -> NoiseSchedule:
    """Equiprobable Z x Y, X x I, X x X, X x Z; photon B sees a single HWP."""
    pairs = [("Z", "Y"), ("X", "I"), ("X", "X"), ("X", "Z")]
    return NoiseSchedule(tuple(pauli_term(0.25, b, bp, single_plate_b=True) for b, bp in pairs))


def _realize(op: np.ndarray, plates, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0 or plates is None:
        return np.asarray(op, dtype=complex)
    jitter = rng.normal(0.0, sigma, size=len(plates))
    return compose_plates([p.rotated(d) for p, d in zip(plates, jitter)])


def apply_schedule(rho: np.ndarray, schedule: NoiseSchedule, misalign_sigma: float = 0.0,
                   rng_seed: int | None = 0) -> np.ndarray:
    """Average of (I x U_k x I x V_k) rho (.)^dagger over the schedule terms.

    With ``misalign_sigma > 0`` every plate angle of every term is offset by
    an independent Gaussian draw (one draw per plate per term).
    """
    rho = np.asarray(rho, dtype=complex)
    if n_qubits_of(rho) != 4:
        raise ArgumentError("noise schedules act on four-qubit states")
    if misalign_sigma < 0:
        raise ArgumentError("misalign_sigma must be >= 0")
    rng = np.random.default_rng(rng_seed)
    out = np.zeros_like(rho)
    for term in schedule.terms:
        u = _realize(term.op_b, term.plates_b, misalign_sigma, rng)
        v = _realize(term.op_bprime, term.plates_bprime, misalign_sigma, rng)
        k = kron(I2, u, I2, v)
        out += term.weight * (k @ rho @ k.conj().T)
    return out


def noisy_smolin(misalign_sigma: float = 0.0, rng_seed: int | None = 0) -> np.ndarray:
    return apply_schedule(phi_plus_pairs(), smolin_schedule(), misalign_sigma, rng_seed)


def noisy_private(misalign_sigma: float = 0.0, rng_seed: int | None = 0) -> np.ndarray:
    return apply_schedule(phi_plus_pairs(), private_schedule(), misalign_sigma, rng_seed)


def random_density_matrix(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state (full rank unless ``rank`` is given)."""
    d = 2**n_qubits
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return check_density_matrix(rho / np.trace(rho).real)


def all_pauli_strings(n: int) -> list[str]:
    return ["".join(p) for p in product(PAULI_LABELS, repeat=n)]

"""Simulated Pauli-basis polarization tomography and maximum-likelihood reconstruction.

A measurement setting is a string such as ``"XYZY"``: one basis letter per
qubit, leftmost = qubit 0 (photon A). Outcome indices follow the matrix
convention: qubit 0 is the most significant bit, and bit value 0 is the +1
eigenvector of that qubit's Pauli operator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError, DataError, NumericError
from .qmat import check_density_matrix, kron, n_qubits_of
from .states import HWP, QWP, all_pauli_strings, compose_plates, key_basis_state, pauli_string

log = logging.getLogger(__name__)

P_FLOOR = 1e-12
NOISE_DWELL_S = 30.0
MOTOR_DEAD_S = 10.0

_BASIS = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Y": np.column_stack([key_basis_state(0), key_basis_state(1)]),
    "Z": np.eye(2, dtype=complex),
}


# Analyzer (QWP then HWP, then a polarizing splitter) angles for each basis.
ANALYZER_PLATES = {
    "X": (QWP(np.pi / 4), HWP(np.pi / 8)),
    "Y": (QWP(0.0), HWP(3 * np.pi / 8)),
    "Z": (QWP(0.0), HWP(0.0)),
}


def analyzer_basis(setting: str, jitter: np.ndarray | None = None) -> np.ndarray:
    """Basis actually projected on by the wave-plate analyzers.

    ``jitter`` has shape ``(n, 2)``: angle offsets of each qubit's QWP and HWP.
    Without jitter this equals :func:`setting_basis` up to column phases.
    """
    cols = []
    for k, c in enumerate(_check_setting(setting)):
        plates = ANALYZER_PLATES[c]
        if jitter is not None:
            plates = [p.rotated(d) for p, d in zip(plates, jitter[k])]
        cols.append(compose_plates(plates).conj().T)
    return kron(*cols)


def all_settings(n_qubits: int) -> list[str]:
    """All ``3**n`` settings in lexicographic X < Y < Z order."""
    return ["".join(s) for s in product("XYZ", repeat=n_qubits)]


def _check_setting(setting: str, n: Optional[int] = None) -> str:
    if not isinstance(setting, str) or not setting or set(setting) - set("XYZ"):
        raise ArgumentError(f"setting must be a non-empty string over X/Y/Z, got {setting!r}")
    if n is not None and len(setting) != n:
        raise ArgumentError(f"setting {setting!r} does not have {n} qubits")
    return setting


def setting_basis(setting: str) -> np.ndarray:
    """Unitary whose column ``j`` is the eigenvector for outcome index ``j``."""
    return kron(*(_BASIS[c] for c in _check_setting(setting)))


def setting_projectors(setting: str) -> list[np.ndarray]:
    """The ``2**n`` rank-1 outcome projectors of ``setting``."""
    u = setting_basis(setting)
    return [np.outer(u[:, j], u[:, j].conj()) for j in range(u.shape[1])]


def outcome_probs(rho: np.ndarray, setting: str) -> np.ndarray:
    """Born-rule outcome probabilities, clamped to [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    _check_setting(setting, n_qubits_of(rho))
    u = setting_basis(setting)
    p = np.real(np.einsum("ij,ik,kj->j", u.conj(), rho, u))
    return np.clip(p, 0.0, 1.0)


# -- data model ------------------------------------------------------------------

class CollectionMode(str, Enum):
    pulsed = "pulsed"
    fast = "fast"


@dataclass(frozen=True)
class ExperimentConfig:
    """Counting parameters of a simulated tomography run.

    ``fast`` mode counts at half the two-fold pair rate instead of the genuine
    four-fold rate. With ``dead_time`` enabled, each setting's effective
    duration is scaled by 30/(30+10) for the motor pauses between noise
    settings.
    """

    fourfold_rate_hz: float = 2.0
    duration_per_setting_s: float = 3600.0
    collection_mode: CollectionMode = CollectionMode.pulsed
    misalign_sigma: float = 0.0
    rng_seed: int = 0
    pair_rate_hz: float = 1e4
    dead_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "collection_mode", CollectionMode(self.collection_mode))
        if not (self.fourfold_rate_hz > 0 and self.duration_per_setting_s > 0 and self.pair_rate_hz > 0):
            raise ArgumentError("rates and durations must be positive")
        if self.misalign_sigma < 0:
            raise ArgumentError("misalign_sigma must be >= 0")

    @property
    def effective_rate_hz(self) -> float:
        if self.collection_mode is CollectionMode.fast:
            return 0.5 * self.pair_rate_hz
        return self.fourfold_rate_hz

    @property
    def effective_duration_s(self) -> float:
        if self.dead_time:
            return self.duration_per_setting_s * NOISE_DWELL_S / (NOISE_DWELL_S + MOTOR_DEAD_S)
        return self.duration_per_setting_s

    @property
    def expected_counts_per_setting(self) -> float:
        return self.effective_rate_hz * self.effective_duration_s

    def to_dict(self) -> dict:
        return {
            "fourfold_rate_hz": self.fourfold_rate_hz,
            "duration_per_setting_s": self.duration_per_setting_s,
            "collection_mode": self.collection_mode.value,
            "misalign_sigma": self.misalign_sigma,
            "rng_seed": self.rng_seed,
            "pair_rate_hz": self.pair_rate_hz,
            "dead_time": self.dead_time,
        }


@dataclass(frozen=True)
class CountRecord:
    setting: str
    counts: np.ndarray
    duration_s: float

    def __post_init__(self):
        _check_setting(self.setting)
        counts = np.asarray(self.counts)
        if counts.shape != (2 ** len(self.setting),):
            raise ArgumentError(f"setting {self.setting} needs {2 ** len(self.setting)} counts")
        if np.any(counts < 0) or not np.all(np.isfinite(counts)):
            raise ArgumentError("counts must be finite and non-negative")
        if not self.duration_s > 0:
            raise ArgumentError("duration_s must be positive")
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class TomographyDataset:
    n_qubits: int
    records: tuple[CountRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for r in self.records:
            _check_setting(r.setting, self.n_qubits)
            if r.setting in seen:
                raise ArgumentError(f"duplicate record for setting {r.setting}")
            seen.add(r.setting)

    @property
    def is_complete(self) -> bool:
        return len(self.records) == 3**self.n_qubits

    def require_complete(self) -> None:
        if not self.is_complete:
            raise DataError(f"dataset has {len(self.records)} of {3 ** self.n_qubits} settings")

    def by_setting(self) -> dict[str, CountRecord]:
        return {r.setting: r for r in self.records}

    @property
    def total_counts(self) -> float:
        return float(sum(r.counts.sum() for r in self.records))

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "records": [
                {"setting": r.setting, "duration_s": r.duration_s,
                 "counts": [int(c) if float(c).is_integer() else float(c) for c in r.counts]}
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TomographyDataset":
        try:
            n = int(d["n_qubits"])
            recs = [CountRecord(r["setting"], np.asarray(r["counts"]), float(r["duration_s"]))
                    for r in d["records"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"malformed dataset: {exc}") from exc
        return cls(n, recs)


def _stack(dataset: TomographyDataset) -> tuple[np.ndarray, np.ndarray]:
    """Outcome vectors (rows) and counts, flattened over all records."""
    vecs = np.concatenate([setting_basis(r.setting).T for r in dataset.records])
    counts = np.concatenate([np.asarray(r.counts, dtype=float) for r in dataset.records])
    return vecs, counts


# -- simulation ----------------------------------------------------------------------

def simulate_counts(rho: np.ndarray, cfg: ExperimentConfig) -> TomographyDataset:
    """Poisson counts for every setting, deterministic in ``cfg.rng_seed``.

    Each outcome count has mean ``rate * duration * p_i``. With
    ``cfg.misalign_sigma > 0`` the analyzer plates of every qubit are offset
    by fresh Gaussian angles for each setting, so the recorded outcomes come
    from slightly rotated projectors while the labels stay ideal.
    """
    rho = check_density_matrix(rho)
    n = n_qubits_of(rho)
    count_seq, jitter_seq = np.random.SeedSequence(cfg.rng_seed).spawn(2)
    rng = np.random.default_rng(count_seq)
    jrng = np.random.default_rng(jitter_seq)
    mean_total = cfg.expected_counts_per_setting
    records = []
    for s in all_settings(n):
        if cfg.misalign_sigma > 0:
            u = analyzer_basis(s, jrng.normal(0.0, cfg.misalign_sigma, size=(n, 2)))
            p = np.clip(np.real(np.einsum("ij,ik,kj->j", u.conj(), rho, u)), 0.0, None)
        else:
            p = outcome_probs(rho, s)
        records.append(CountRecord(s, rng.poisson(mean_total * p), cfg.duration_per_setting_s))
    return TomographyDataset(n, records)


def expected_dataset(rho: np.ndarray, counts_per_setting: float = 1.0,
                     duration_s: float = 1.0) -> TomographyDataset:
    """Noise-free dataset with counts equal to their expectation values."""
    rho = check_density_matrix(rho)
    n = n_qubits_of(rho)
    return TomographyDataset(n, [CountRecord(s, counts_per_setting * outcome_probs(rho, s), duration_s)
                                 for s in all_settings(n)])


# -- reconstruction --------------------------------------------------------------------

def _outcome_signs(n: int) -> np.ndarray:
    """signs[k, j] = (-1)**(bit of qubit k in outcome j)."""
    j = np.arange(2**n)
    return np.array([1 - 2 * ((j >> (n - 1 - k)) & 1) for k in range(n)])


def pauli_expectations(dataset: TomographyDataset) -> dict[str, float]:
    """Empirical <sigma^mu1 x ... x sigma^mun> for every Pauli string.

    Each correlator is averaged over all settings that measure it (those
    agreeing on the non-identity positions). Zero-count settings are skipped.
    """
    dataset.require_complete()
    n = dataset.n_qubits
    signs = _outcome_signs(n)
    freqs = {}
    for r in dataset.records:
        tot = float(np.sum(r.counts))
        if tot > 0:
            freqs[r.setting] = np.asarray(r.counts, dtype=float) / tot
    if not freqs:
        raise DataError("dataset has no counts")
    out = {}
    for mu in all_pauli_strings(n):
        active = [k for k, c in enumerate(mu) if c != "I"]
        parity = np.prod(signs[active], axis=0) if active else np.ones(2**n)
        vals = [float(parity @ f) for s, f in freqs.items()
                if all(s[k] == mu[k] for k in active)]
        if not vals:
            raise DataError(f"no counts in any setting measuring {mu}")
        out[mu] = float(np.mean(vals))
    return out


def linear_inversion(dataset: TomographyDataset) -> np.ndarray:
    """Hermitian, unit-trace estimate (1/2**n) sum_mu <sigma^mu> sigma^mu; may be non-PSD."""
    expect = pauli_expectations(dataset)
    n = dataset.n_qubits
    rho = sum(v * pauli_string(mu) for mu, v in expect.items()) / 2**n
    return (rho + rho.conj().T) / 2


@dataclass
class MleDiagnostics:
    iterations: int
    loglik_trace: list[float]
    converged: bool
    dilution: float

    def to_dict(self) -> dict:
        return {"iterations": self.iterations, "loglik_trace": list(self.loglik_trace),
                "converged": self.converged, "dilution": self.dilution}


@dataclass(frozen=True)
class MleOptions:
    """Reconstruction controls.

    The diluted R-rho-R iteration runs first (``dilution`` is its starting
    eps). ``tol`` applies to the log-likelihood gain per count, so the stopping
    rule does not depend on how many counts were collected. With
    ``polish=True`` the result is then refined by L-BFGS on a Cholesky-type
    factor rho = T T^dagger / Tr(T T^dagger); R-rho-R alone converges only
    linearly when the optimum has small eigenvalues.
    """

    dilution: float = 0.5
    tol: float = 1e-10
    max_iter: int = 5000
    min_dilution: float = 1e-6
    polish: bool = True
    polish_max_iter: int = 5000
    raise_on_nonconvergence: bool = False


def log_likelihood(rho: np.ndarray, dataset: TomographyDataset) -> float:
    vecs, counts = _stack(dataset)
    return _loglik(_probs(vecs, rho), counts)


def _probs(vecs: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("ik,ik->i", vecs.conj(), vecs @ rho.T))


def _loglik(p: np.ndarray, counts: np.ndarray) -> float:
    mask = counts > 0
    return float(np.sum(counts[mask] * np.log(np.maximum(p[mask], P_FLOOR))))


def _r_operator(vecs, counts, p, total):
    weights = counts / np.maximum(p, P_FLOOR) / total
    return (vecs.T * weights) @ vecs.conj()


def _rrr(vecs, counts, rho, opts: MleOptions):
    """Diluted R-rho-R ascent. Returns (rho, loglik trace, iterations, converged, eps)."""
    total = counts.sum()
    eye = np.eye(rho.shape[0], dtype=complex)
    p = _probs(vecs, rho)
    ll = _loglik(p, counts)
    trace = [ll]
    eps = opts.dilution
    it = 0
    while it < opts.max_iter:
        it += 1
        r = _r_operator(vecs, counts, p, total)
        while True:
            a = (1 - eps) * eye + eps * r
            new = a @ rho @ a.conj().T
            new = (new + new.conj().T) / 2
            new /= np.real(np.trace(new))
            p_new = _probs(vecs, new)
            ll_new = _loglik(p_new, counts)
            if ll_new >= ll or eps <= opts.min_dilution:
                break
            eps /= 2
        if ll_new < ll:
            # no ascent direction left at any dilution: stationary to rounding
            return rho, trace, it, True, eps
        gain = (ll_new - ll) / total
        rho, p, ll = new, p_new, ll_new
        trace.append(ll)
        if gain < opts.tol:
            return rho, trace, it, True, eps
    return rho, trace, it, False, eps


def _polish(vecs, counts, rho, max_iter):
    """L-BFGS refinement over T with rho = T T^dagger / Tr. Returns (rho, accepted logliks)."""
    from scipy.optimize import minimize

    d = rho.shape[0]
    total = counts.sum()
    mask = counts > 0
    eye = np.eye(d)

    def unpack(x):
        t = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
        m = t @ t.conj().T
        return t, m / np.real(np.trace(m)), np.real(np.trace(m))

    def fun(x):
        t, r, tr = unpack(x)
        p = np.maximum(_probs(vecs, r), P_FLOOR)
        f = np.sum(counts[mask] * np.log(p[mask])) / total
        g = (_r_operator(vecs, counts, p, total) - eye * (counts.sum() / total)) / tr
        gt = 2 * g @ t
        return -f, -np.concatenate([gt.real.ravel(), gt.imag.ravel()])

    w, v = np.linalg.eigh(rho)
    t0 = v * np.sqrt(np.clip(w, 0.0, None))
    accepted = []
    res = minimize(fun, np.concatenate([t0.real.ravel(), t0.imag.ravel()]), jac=True,
                   method="L-BFGS-B",
                   callback=lambda xk: accepted.append(_loglik(_probs(vecs, unpack(xk)[1]), counts)),
                   options={"maxiter": max_iter, "maxcor": 30, "gtol": 1e-14, "ftol": 1e-16})
    out = unpack(res.x)[1]
    return (out + out.conj().T) / 2, accepted


def mle_reconstruct(dataset: TomographyDataset, opts: MleOptions | None = None,
                    rho0: np.ndarray | None = None) -> tuple[np.ndarray, MleDiagnostics]:
    """Maximum-likelihood density matrix.

    Each R-rho-R step is rho <- N[A rho A] with A = (1 - eps) I + eps R(rho)
    and R(rho) = sum_i (n_i / p_i) Pi_i / sum_i n_i. A step that lowers the
    likelihood is retried with ``eps`` halved, so the trace is monotone. The
    optional L-BFGS polish only records iterates that do not lower it either.

    Raises:
        DataError: incomplete dataset or no counts at all.
        NumericError: no convergence and ``opts.raise_on_nonconvergence`` set.
    """
    opts = opts or MleOptions()
    dataset.require_complete()
    vecs, counts = _stack(dataset)
    if not counts.sum() > 0:
        raise DataError("all counts are zero")
    d = 2**dataset.n_qubits
    rho = np.eye(d, dtype=complex) / d if rho0 is None else check_density_matrix(rho0).copy()
    rho, trace, it, converged, eps = _rrr(vecs, counts, rho, opts)
    if opts.polish:
        polished, lls = _polish(vecs, counts, rho, opts.polish_max_iter)
        final = _loglik(_probs(vecs, polished), counts)
        if final >= trace[-1]:
            rho = polished
            for ll in lls:
                if ll >= trace[-1]:
                    trace.append(ll)
            if final > trace[-1]:
                trace.append(final)
            it += len(lls)
            converged = True
    diag = MleDiagnostics(it, trace, converged, eps)
    if not converged:
        log.warning("MLE stopped after %d iterations without converging", it)
        if opts.raise_on_nonconvergence:
            raise NumericError(f"MLE did not converge in {opts.max_iter} iterations")
    return check_density_matrix(rho, atol=1e-9), diag


def derive_seeds(master_seed: int, n: int) -> list[int]:
    """Independent per-replicate seeds spawned from ``master_seed``."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master_seed).spawn(n)]


def bootstrap_ensemble(rho_hat: np.ndarray, cfg: ExperimentConfig, n_rep: int,
                       opts: MleOptions | None = None, n_jobs: int = 1) -> list[np.ndarray]:
    """Parametric bootstrap: resimulate from ``rho_hat`` and reconstruct ``n_rep`` times."""
    if n_rep < 1:
        raise ArgumentError("n_rep must be >= 1")
    cfgs = [replace(cfg, rng_seed=s) for s in derive_seeds(cfg.rng_seed, n_rep)]

    def one(c: ExperimentConfig) -> np.ndarray:
        return mle_reconstruct(simulate_counts(rho_hat, c), opts)[0]

    if n_jobs == 1:
        return [one(c) for c in cfgs]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(one, cfgs))

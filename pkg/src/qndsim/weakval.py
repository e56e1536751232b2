"""Post-selected weak and strong values for a qubit QND observable.

The measured observable is the logical population n = diag(0, 1). A
variable-strength QND readout (strength gamma as in ``cnot_qnd``)
followed by post-selection on a final measurement yields conditional
means that can leave the eigenvalue range [0, 1] entirely, e.g. -9/7 for
psi = 0.8|0> - 0.6|1>, gamma = 0.8, post-selected on |+>. Closed forms,
the POVM of the readout, the negativity bound on gamma, and a seeded
shot-level Monte-Carlo estimator are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cnot_qnd, hilbert as hs
from .hilbert import PureState

N_HAT = np.diag([0.0, 1.0]).astype(complex)


class WeakValueError(ValueError):
    """Undefined or singular post-selected quantity."""


class EmptyPostSelectionError(WeakValueError):
    """No shots survived post-selection."""


@dataclass(frozen=True)
class PovmPair:
    """Effect operators {E_0, E_1} of the strength-gamma logical readout."""

    e0: np.ndarray
    e1: np.ndarray

    def __post_init__(self):
        for name in ("e0", "e1"):
            m = np.array(getattr(self, name), dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, name, m)
            if not np.allclose(m, m.conj().T, atol=1e-12):
                raise WeakValueError(f"{name} is not Hermitian")
            if np.linalg.eigvalsh(m).min() < -1e-10:
                raise WeakValueError(f"{name} is not positive semidefinite")
        if not np.allclose(self.e0 + self.e1, np.eye(2), atol=1e-12):
            raise WeakValueError("effects do not sum to the identity")

    def probability(self, k: int, psi: PureState) -> float:
        e = self.e0 if k == 0 else self.e1
        return float((psi.amps.conj() @ e @ psi.amps).real)


@dataclass(frozen=True)
class WeakValueResult:
    """A post-selected conditional mean with its provenance."""

    value: float
    post_state_label: str
    gamma: float
    mode: str  # "analytic" or "sampled"
    stderr: float = 0.0
    shots: int = 0
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "post_state": self.post_state_label,
            "gamma": self.gamma,
            "mode": self.mode,
            "stderr": self.stderr,
            "shots": self.shots,
            "seed": self.seed,
        }


def weak_value(x: np.ndarray, psi: PureState, phi: PureState) -> float:
    """Re <phi|X|psi> / <phi|psi>; may lie outside the spectrum of X."""
    x = np.asarray(x, dtype=complex)
    denom = complex(np.vdot(phi.amps, psi.amps))
    if abs(denom) <= 1e-12:
        raise WeakValueError("undefined weak value: orthogonal pre/post selection")
    num = complex(phi.amps.conj() @ x @ psi.amps)
    return float((num / denom).real)


def strong_value_postselected(x: np.ndarray, psi: PureState, phi: PureState) -> float:
    """Eigenvalue-weighted conditional mean of a projective intermediate
    measurement of X, post-selected on the final result phi. Always lies
    within the eigenvalue range of X."""
    x = np.asarray(x, dtype=complex)
    evals, evecs = np.linalg.eigh(x)
    w = (np.abs(evecs.conj().T @ phi.amps) ** 2) * (np.abs(evecs.conj().T @ psi.amps) ** 2)
    total = float(w.sum())
    if total <= 1e-12:
        raise WeakValueError("zero post-selection probability")
    return float(np.dot(w, evals.real) / total)


def povm(gamma: float) -> PovmPair:
    """Effects of the strength-gamma readout: 2 E_k = 1 - (-1)^k (2g^2-1)(2n-1)."""
    prep = cnot_qnd.MeterPrep(gamma)  # validates the range
    k_factor = 2.0 * prep.gamma**2 - 1.0
    body = k_factor * (2.0 * N_HAT - np.eye(2))
    e0 = (np.eye(2) - body) / 2.0
    e1 = (np.eye(2) + body) / 2.0
    return PovmPair(e0, e1)


def postselected_mean_n(
    alpha: complex, beta: complex, gamma: float
) -> tuple[float, float, float]:
    """Conditional mean photon number after a strength-gamma QND readout,
    post-selected on finding the signal in |+> (and in |->), plus P(+).

    Implements the closed form exactly as printed, with Re[alpha beta*]
    in the numerators and Re[alpha beta] in the denominators; the two
    coincide for real amplitudes. Satisfies
    P(+) <+><n> + P(-) <-><n> = |beta|^2.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise WeakValueError("input amplitudes must be normalized")
    prep = cnot_qnd.MeterPrep(gamma)
    gg = prep.gamma * prep.gamma_bar
    denom_core = 2.0 * gamma**2 - 1.0
    if abs(denom_core) < 1e-12:
        raise WeakValueError("estimator singular: gamma = 1/sqrt(2) exactly")
    re_ab_conj = (alpha * np.conj(beta)).real
    re_ab = (alpha * beta).real
    p_plus = (1.0 + 4.0 * gg * re_ab) / 2.0
    p_minus = (1.0 - 4.0 * gg * re_ab) / 2.0
    if p_plus < 1e-12 or p_minus < 1e-12:
        raise WeakValueError("vanishing post-selection probability")
    b2 = abs(beta) ** 2
    plus_value = (b2 + 2.0 * gg * re_ab_conj) / (2.0 * p_plus)
    minus_value = (b2 - 2.0 * gg * re_ab_conj) / (2.0 * p_minus)
    return plus_value, minus_value, p_plus


def negativity_gamma_bound(alpha: float) -> float:
    """Largest gamma for which the |+>-post-selected mean stays negative.

    Applies to real inputs with beta = -sqrt(1 - alpha^2) and
    1/sqrt(2) < alpha < 1: gamma_max = sqrt((1 + sqrt(2 alpha^2 - 1)/alpha)/2).
    """
    if not (1.0 / math.sqrt(2.0) < alpha < 1.0):
        raise WeakValueError(f"alpha must lie in (1/sqrt(2), 1), got {alpha}")
    return math.sqrt((1.0 + math.sqrt(2.0 * alpha**2 - 1.0) / alpha) / 2.0)


def estimate_sampled(
    alpha: complex, beta: complex, gamma: float, shots: int, seed: int
) -> WeakValueResult:
    """Monte-Carlo estimate of the |+>-post-selected mean photon number.

    Each shot runs the strength-gamma QND gate, samples the meter outcome,
    then samples a final +/- measurement on the exact conditional signal
    state; shots with final result '-' are discarded. The retained
    (+/-1)-valued meter record m gives the estimate via
    <n> = (1 + mean(m)/(2 gamma^2 - 1))/2. The stream is a counter-based
    Philox generator keyed by ``seed``, so results are reproducible.
    """
    if shots < 1:
        raise WeakValueError("shots must be >= 1")
    prep = cnot_qnd.MeterPrep(gamma)
    scale = 2.0 * prep.gamma**2 - 1.0
    if scale < 1e-12:
        raise WeakValueError("estimator singular: gamma = 1/sqrt(2) exactly")
    psi = PureState.from_amplitudes([alpha, beta], dims=(2,))
    out = cnot_qnd.run(psi, prep)
    p1 = out.p_m[1]
    # probability of the final '+' result on each conditional signal state
    plus = hs.PLUS.amps
    p_plus_given_k = np.empty(2)
    for k in range(2):
        _, post, _ = out.conditional[k]
        if post is None:
            p_plus_given_k[k] = 0.0
        else:
            p_plus_given_k[k] = abs(np.vdot(plus, post.amps)) ** 2

    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.random((shots, 2))
    ks = (draws[:, 0] < p1).astype(int)
    retained = draws[:, 1] < p_plus_given_k[ks]
    record = 2.0 * ks[retained] - 1.0
    n = record.size
    if n == 0:
        raise EmptyPostSelectionError("empty post-selected ensemble")
    mean = float(record.mean())
    value = (1.0 + mean / scale) / 2.0
    if n >= 2:
        stderr = float(record.std(ddof=1)) / (2.0 * scale * math.sqrt(n))
    else:
        stderr = 0.0
    return WeakValueResult(
        value=value,
        post_state_label="+",
        gamma=gamma,
        mode="sampled",
        stderr=stderr,
        shots=shots,
        seed=seed,
    )

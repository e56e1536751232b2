"""Figures of merit for QND measurement devices.

Classical fidelity between outcome distributions, the three derived
quality measures (measurement, QND and QSP fidelity), distinguishability
of the measured and conjugate observables with the Englert trade-off,
a generic two-observable correlation function, and the closed-form
bridges to continuous-variable transfer coefficients.

The CV conditional variance V_{s|m} and the uncertainty product
V_{s|m} * V_conj >= 1 require Gaussian-state simulation and are out of
scope here; only the closed-form fidelity bridges are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import ProbDist

SATURATION_ATOL = 1e-9


class MetricsError(ValueError):
    """Invalid input to a figure-of-merit computation."""


def _as_dist(p) -> np.ndarray:
    if isinstance(p, ProbDist):
        return p.p
    return ProbDist.from_weights(p).p


def classical_fidelity(p, q) -> float:
    """F(p, q) = (sum_i sqrt(p_i q_i))^2.

    Accepts ProbDist objects or raw nonnegative weights/counts, which are
    normalized internally; zero-weight outcomes contribute nothing.
    Equals 1 iff the distributions coincide, 1/d for an eigenstate
    against the uniform distribution, and 0 when the supports are
    disjoint.
    """
    pa, qa = _as_dist(p), _as_dist(q)
    if pa.size != qa.size:
        raise MetricsError(f"distribution length mismatch: {pa.size} vs {qa.size}")
    return float(np.sum(np.sqrt(pa * qa)) ** 2)


def measurement_fidelity(p_in, p_m) -> float:
    """Correlation of input populations with the meter record: F(p_in, p_m)."""
    return classical_fidelity(p_in, p_m)


def qnd_fidelity(p_in, p_out) -> float:
    """Preservation of the measured populations: F(p_in, p_out)."""
    return classical_fidelity(p_in, p_out)


def qsp_fidelity(p_m, conditional) -> float:
    """Outcome-averaged probability that the output matches the readout.

    ``conditional[i]`` is the probability of finding the output in
    eigenstate i given meter result i. For qubits this is the likelihood L.
    """
    pm = _as_dist(p_m)
    cond = np.asarray(conditional, dtype=float).ravel()
    if cond.size != pm.size:
        raise MetricsError("one conditional probability required per outcome")
    if cond.min() < -1e-12 or cond.max() > 1 + 1e-12:
        raise MetricsError("conditional probabilities must lie in [0, 1]")
    return float(np.dot(pm, np.clip(cond, 0.0, 1.0)))


@dataclass(frozen=True)
class FidelityReport:
    """Aggregated quality measures for one device configuration.

    Headline f_m and f_qnd are the minimum over the probe ensemble
    (worst case); the ensemble means are kept alongside.
    """

    f_m: float
    f_qnd: float
    f_qsp: float
    per_input: tuple = ()
    f_m_mean: float | None = None
    f_qnd_mean: float | None = None

    def __post_init__(self):
        for name in ("f_m", "f_qnd", "f_qsp"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1 + 1e-12):
                raise MetricsError(f"{name} = {v} outside [0, 1]")

    def to_json(self) -> dict:
        out = {
            "f_m": self.f_m,
            "f_qnd": self.f_qnd,
            "f_qsp": self.f_qsp,
            "per_input": [
                {"input": label, "f_m": fm, "f_qnd": fq}
                for (label, fm, fq) in self.per_input
            ],
        }
        if self.f_m_mean is not None:
            out["f_m_mean"] = self.f_m_mean
        if self.f_qnd_mean is not None:
            out["f_qnd_mean"] = self.f_qnd_mean
        return out


@dataclass(frozen=True)
class DistinguishabilityPair:
    """Distinguishability of the QND observable (k) and its conjugate (k_bar)."""

    k: float
    k_bar: float

    def __post_init__(self):
        if not (-1 - 1e-12 <= self.k <= 1 + 1e-12):
            raise MetricsError(f"k = {self.k} outside [-1, 1]")
        if not (-1 - 1e-12 <= self.k_bar <= 1 + 1e-12):
            raise MetricsError(f"k_bar = {self.k_bar} outside [-1, 1]")

    @property
    def englert_lhs(self) -> float:
        return self.k**2 + self.k_bar**2

    @property
    def saturated(self) -> bool:
        """True iff the complementarity bound k^2 + k_bar^2 <= 1 is tight."""
        return abs(self.englert_lhs - 1.0) < SATURATION_ATOL

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "k_bar": self.k_bar,
            "englert_lhs": self.englert_lhs,
            "saturated": self.saturated,
        }


def distinguishability(likelihood: float, p_c: float) -> DistinguishabilityPair:
    """Build (K, K_bar) from the likelihood L and the conjugate hit rate P_c.

    K = 2L - 1 measures how well the meter identifies eigenstates of the
    QND observable; K_bar = 2*P_c - 1 how well the signal output preserves
    eigenstates of the conjugate observable. A coherent generalized
    measurement saturates K^2 + K_bar^2 = 1.
    """
    if not (0 - 1e-12 <= likelihood <= 1 + 1e-12):
        raise MetricsError(f"likelihood {likelihood} outside [0, 1]")
    if not (0 - 1e-12 <= p_c <= 1 + 1e-12):
        raise MetricsError(f"p_c {p_c} outside [0, 1]")
    return DistinguishabilityPair(k=2 * likelihood - 1, k_bar=2 * p_c - 1)


@dataclass(frozen=True)
class JointDist:
    """Joint outcome distribution of two observables with their eigenvalues."""

    q: np.ndarray
    eigvals_a: np.ndarray
    eigvals_b: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        ea = np.asarray(self.eigvals_a, dtype=float).ravel()
        eb = np.asarray(self.eigvals_b, dtype=float).ravel()
        if q.ndim != 2 or q.shape != (ea.size, eb.size):
            raise MetricsError("joint matrix shape must match eigenvalue lists")
        if q.min() < -1e-12:
            raise MetricsError(f"negative joint probability {q.min()}")
        q = np.clip(q, 0.0, None)
        if abs(q.sum() - 1.0) > 1e-10:
            raise MetricsError(f"joint probabilities sum to {q.sum()}")
        for arr in (q, ea, eb):
            arr.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "eigvals_a", ea)
        object.__setattr__(self, "eigvals_b", eb)


def correlation_c2(joint: JointDist, subtract_mean: bool = False) -> float:
    """Symmetrized squared correlation |<O_A O_B>|^2 / (<O_A^2><O_B^2>).

    With ``subtract_mean`` the observables are first centered
    (O -> O - <O>), the convention used for CV quadrature fluctuations;
    the default uses the raw observables, matching the qubit Z form.
    """
    a = joint.eigvals_a.copy()
    b = joint.eigvals_b.copy()
    pa = joint.q.sum(axis=1)
    pb = joint.q.sum(axis=0)
    if subtract_mean:
        a = a - np.dot(pa, a)
        b = b - np.dot(pb, b)
    corr = float(a @ joint.q @ b)
    denom = float(np.dot(pa, a**2) * np.dot(pb, b**2))
    if denom < 1e-24:
        raise MetricsError("degenerate observable: zero second moment")
    return corr**2 / denom


def c2_from_fqsp(f_qsp: float) -> float:
    """Qubit shortcut C^2 = 2 F_QSP - 1 (meaningful for F_QSP >= 1/2).

    No clamping: values below 1/2 yield a negative number, which the
    caller may interpret as anti-correlation.
    """
    return 2.0 * f_qsp - 1.0


def fm_from_tm(t_m: float) -> float:
    """Measurement fidelity from the meter signal-transfer coefficient.

    F_M = sqrt(2 T_M / (1 + T_M)), monotone increasing in T_M. The value
    is a fidelity (<= 1) for T_M <= 1; quantum-enhanced transfer T > 1
    pushes the expression above 1 and is reported as-is.
    """
    if t_m < 0:
        raise MetricsError(f"transfer coefficient must be >= 0, got {t_m}")
    return math.sqrt(2.0 * t_m / (1.0 + t_m))


def fqnd_from_ts(t_s: float) -> float:
    """QND fidelity from the signal transfer coefficient: sqrt(2 T_S/(1+T_S))."""
    if t_s < 0:
        raise MetricsError(f"transfer coefficient must be >= 0, got {t_s}")
    return math.sqrt(2.0 * t_s / (1.0 + t_s))


@dataclass(frozen=True)
class CVBridge:
    """Transfer coefficients with their fidelity equivalents and C^2."""

    t_m: float
    t_s: float
    c2: float = field(default=float("nan"))

    def __post_init__(self):
        if self.t_m < 0 or self.t_s < 0:
            raise MetricsError("transfer coefficients must be >= 0")

    @property
    def f_m(self) -> float:
        return fm_from_tm(self.t_m)

    @property
    def f_qnd(self) -> float:
        return fqnd_from_ts(self.t_s)

    def to_json(self) -> dict:
        return {
            "t_m": self.t_m,
            "t_s": self.t_s,
            "f_m": self.f_m,
            "f_qnd": self.f_qnd,
            "c2": self.c2,
        }

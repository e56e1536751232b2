"""Variable-strength QND measurement of a qubit via a CNOT gate.

The signal qubit controls a CNOT whose target (the meter) is prepared in
gamma|0> + gamma_bar|1>, gamma in [1/sqrt(2), 1]. gamma = 1 gives a
projective QND measurement of the chosen observable; gamma = 1/sqrt(2)
turns the measurement off. Measurement in an arbitrary basis is obtained
by conjugating the CNOT with the rotation taking that basis to the
computational one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hilbert as hs
from . import metrics
from .hilbert import BasisSpec, DensityMatrix, ProbDist, PureState

GAMMA_MIN = 1.0 / math.sqrt(2.0)
GAMMA_ATOL = 1e-12

CNOT = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ],
    dtype=complex,
)


class StrengthError(ValueError):
    """Meter amplitude outside the admissible range [1/sqrt(2), 1]."""


@dataclass(frozen=True)
class MeterPrep:
    """Measurement strength: meter prepared in gamma|0> + gamma_bar|1>."""

    gamma: float

    def __post_init__(self):
        if not (GAMMA_MIN - GAMMA_ATOL <= self.gamma <= 1.0 + GAMMA_ATOL):
            raise StrengthError(
                f"gamma out of range [{GAMMA_MIN:.4f}, 1]: {self.gamma}"
            )

    @property
    def gamma_bar(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.gamma**2))


def meter_state(prep: MeterPrep) -> PureState:
    """The meter input state gamma|0> + gamma_bar|1>."""
    return PureState((2,), np.array([prep.gamma, prep.gamma_bar], dtype=complex))


@dataclass(frozen=True)
class QNDOutcome:
    """Full record of one gate run: joint state, reductions and statistics.

    ``conditional[i]`` holds, for meter outcome i: its probability, the
    post-measurement signal state, and the probability p_{|i>|i} that the
    signal output is then found in basis eigenstate i.
    """

    joint: PureState
    rho_s: DensityMatrix
    rho_m: DensityMatrix
    p_in: ProbDist
    p_out: ProbDist
    p_m: ProbDist
    conditional: tuple


def run(signal: PureState, prep: MeterPrep, basis: BasisSpec = hs.Z_BASIS) -> QNDOutcome:
    """Run the QND gate on a 1-qubit signal and collect all statistics.

    The joint output is R^dag (CNOT) (R x I) |signal>|meter> with R the
    rotation taking ``basis`` to the computational basis; the meter is
    always read out in the computational basis.
    """
    if signal.dim != 2:
        raise hs.HilbertError("signal must be a single qubit")
    if basis.dim != 2:
        raise hs.HilbertError("observable basis must be a qubit basis")
    rot = basis.vectors.conj().T  # takes |b_i> -> |i>
    joint = hs.tensor_product(signal, meter_state(prep))
    joint = hs.apply_unitary(rot, joint, subsystems=[0])
    joint = hs.apply_unitary(CNOT, joint, subsystems=[0, 1])
    joint = hs.apply_unitary(rot.conj().T, joint, subsystems=[0])

    rho = joint.density_matrix()
    rho_s = hs.partial_trace(rho, [0])
    rho_m = hs.partial_trace(rho, [1])

    p_in = hs.born_distribution(signal, basis, 0)
    p_out = hs.born_distribution(rho_s, basis, 0)
    p_m = hs.born_distribution(joint, hs.Z_BASIS, 1)

    conditional = []
    for k in range(2):
        try:
            prob, post = hs.conditional_collapse(joint, hs.Z_BASIS, 1, k)
        except hs.ZeroProbabilityError:
            conditional.append((0.0, None, 0.0))
            continue
        post_signal_rho = hs.partial_trace(post.density_matrix(), [0])
        p_match = hs.born_distribution(post_signal_rho, basis, 0)[k]
        # post-measurement signal state: the global state factorizes after
        # the meter collapse, so project out the signal branch directly
        amps = post.amps.reshape(2, 2)[:, k]
        post_signal = PureState.from_amplitudes(amps, dims=(2,))
        conditional.append((prob, post_signal, p_match))
    return QNDOutcome(joint, rho_s, rho_m, p_in, p_out, p_m, tuple(conditional))


def conjugate_states(basis: BasisSpec) -> tuple[PureState, PureState]:
    """Eigenstates (|b0> +/- |b1>)/sqrt(2) of the observable conjugate to ``basis``."""
    b0, b1 = basis.vectors[:, 0], basis.vectors[:, 1]
    return (
        PureState.from_amplitudes((b0 + b1) / math.sqrt(2), dims=(2,)),
        PureState.from_amplitudes((b0 - b1) / math.sqrt(2), dims=(2,)),
    )


def pauli_ensemble() -> list[tuple[str, PureState]]:
    """The six Pauli eigenstates; default probe set spanning the qubit space."""
    s = 1 / math.sqrt(2)
    return [
        ("|0>", hs.qubit(1, 0)),
        ("|1>", hs.qubit(0, 1)),
        ("|+>", hs.qubit(s, s)),
        ("|->", hs.qubit(s, -s)),
        ("|+i>", hs.qubit(s, 1j * s)),
        ("|-i>", hs.qubit(s, -1j * s)),
    ]


def _mixed_input_joint(prep: MeterPrep, basis: BasisSpec) -> metrics.JointDist:
    """Joint (signal outcome, meter outcome) statistics for the maximally
    mixed input, realized as the uniform classical average over the basis
    eigenstates."""
    q = np.zeros((2, 2))
    for i in range(2):
        out = run(basis.state(i), prep, basis)
        for k in range(2):
            prob, post, p_match = out.conditional[k]
            if post is None:
                continue
            p_sig = hs.born_distribution(post, basis, 0)
            for j in range(2):
                q[j, k] += 0.5 * prob * p_sig[j]
    return metrics.JointDist(q, eigvals_a=[1.0, -1.0], eigvals_b=[1.0, -1.0])


def characterize(
    prep: MeterPrep,
    basis: BasisSpec = hs.Z_BASIS,
    ensemble=None,
) -> tuple[metrics.FidelityReport, metrics.DistinguishabilityPair, dict]:
    """Evaluate the device against all quality measures.

    F_M and F_QND are computed per ensemble input; the headline values
    are worst case over the ensemble. F_QSP (= likelihood L) uses the
    maximally mixed input. K_bar comes from injecting the conjugate
    eigenstates and reading the signal output in the conjugate basis.
    Both C^2 conventions are returned: ``c2_raw`` evaluates the
    correlation function on the joint outcome statistics, ``c2_shortcut``
    is the qubit identity 2 F_QSP - 1; they differ for intermediate
    strengths (the raw form equals the square of the shortcut here).
    """
    if ensemble is None:
        ensemble = pauli_ensemble()
    if len(ensemble) == 0:
        raise ValueError("ensemble must be nonempty")
    per_input = []
    for label, state in ensemble:
        out = run(state, prep, basis)
        fm = metrics.measurement_fidelity(out.p_in, out.p_m)
        fqnd = metrics.qnd_fidelity(out.p_in, out.p_out)
        per_input.append((label, fm, fqnd))

    joint = _mixed_input_joint(prep, basis)
    f_qsp = float(np.trace(joint.q))

    # conjugate-eigenstate protocol for K_bar
    conj = conjugate_states(basis)
    conj_basis = BasisSpec.from_states(conj)
    p_c = 0.0
    for idx, state in enumerate(conj):
        out = run(state, prep, basis)
        p_c += 0.5 * hs.born_distribution(out.rho_s, conj_basis, 0)[idx]
    pair = metrics.distinguishability(f_qsp, p_c)

    fms = [fm for (_, fm, _) in per_input]
    fqnds = [fq for (_, _, fq) in per_input]
    report = metrics.FidelityReport(
        f_m=min(fms),
        f_qnd=min(fqnds),
        f_qsp=f_qsp,
        per_input=tuple(per_input),
        f_m_mean=float(np.mean(fms)),
        f_qnd_mean=float(np.mean(fqnds)),
    )
    c2 = {
        "c2_raw": metrics.correlation_c2(joint),
        "c2_shortcut": metrics.c2_from_fqsp(f_qsp),
    }
    return report, pair, c2


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    f_m: float
    f_qnd: float
    f_qsp: float
    k: float
    k_bar: float
    englert: float
    c2_raw: float
    c2_shortcut: float

    def to_json(self) -> dict:
        return {f: getattr(self, f) for f in SWEEP_FIELDS}


SWEEP_FIELDS = (
    "gamma",
    "f_m",
    "f_qnd",
    "f_qsp",
    "k",
    "k_bar",
    "englert",
    "c2_raw",
    "c2_shortcut",
)

CSV_HEADER = ",".join(SWEEP_FIELDS)


def strength_sweep(gammas, basis: BasisSpec = hs.Z_BASIS, ensemble=None) -> list[SweepRow]:
    """Characterize the device on a grid of strengths, in the given order."""
    rows = []
    for g in gammas:
        report, pair, c2 = characterize(MeterPrep(float(g)), basis, ensemble)
        rows.append(
            SweepRow(
                gamma=float(g),
                f_m=report.f_m,
                f_qnd=report.f_qnd,
                f_qsp=report.f_qsp,
                k=pair.k,
                k_bar=pair.k_bar,
                englert=pair.englert_lhs,
                c2_raw=c2["c2_raw"],
                c2_shortcut=c2["c2_shortcut"],
            )
        )
    return rows


def sweep_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(f"{getattr(r, f):.12g}" for f in SWEEP_FIELDS))
    return "\n".join(lines) + "\n"


def sweep_to_json(rows) -> list[dict]:
    return [r.to_json() for r in rows]

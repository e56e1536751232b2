"""Two-photon Fock-space simulation of the non-deterministic optical QND gate.

A signal photon and a meter photon, each a polarization qubit, are split
into spatial rails (s_H, s_V, m_H, m_V); the horizontal rails interfere
non-classically on a beamsplitter of reflectivity eta. Detecting exactly
one photon at the meter output (and none at any dump port) heralds a QND
measurement of the signal polarization. Loss is modeled unitarily by a
beamsplitter into an explicit dump mode, so the full mode transformation
stays unitary and "no photon in the dump" is a literal pattern constraint.

Sign conventions: the eta-beamsplitter follows the Heisenberg relations
s_Ho = sqrt(eta) s_H + sqrt(1-eta) m_H, m_Ho = sqrt(1-eta) s_H -
sqrt(eta) m_H; the output half-wave plate at 22.5 degrees acts on the
meter polarization as the Hadamard rotation, which with these relations
maps the heralded meter onto the same polarization as the signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import PureState

A_MAX = math.sqrt(3.0) / 2.0

# polarization qubit convention: index 0 = H, 1 = V
POL_LABELS = ("H", "V")


class PhotonicsError(ValueError):
    """Invalid circuit parameter or photon configuration."""


@dataclass(frozen=True)
class ModeLayout:
    """Named optical modes with contiguous indices."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise PhotonicsError("mode names must be unique")

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def n_modes(self) -> int:
        return len(self.names)

    @property
    def signal_modes(self) -> tuple[int, int]:
        return (self.index("s_H"), self.index("s_V"))

    @property
    def meter_modes(self) -> tuple[int, int]:
        return (self.index("m_H"), self.index("m_V"))

    @property
    def dump_modes(self) -> tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.names) if n.startswith("dump"))


@dataclass(frozen=True)
class LinearCircuit:
    """Unitary mode transformation with a record of its optical elements."""

    layout: ModeLayout
    u: np.ndarray
    elements: tuple = ()

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        m = self.layout.n_modes
        if u.shape != (m, m):
            raise PhotonicsError(f"mode matrix shape {u.shape}, expected ({m},{m})")
        if not np.allclose(u.conj().T @ u, np.eye(m), atol=1e-12):
            raise PhotonicsError("mode matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def to_json(self) -> dict:
        return {
            "modes": list(self.layout.names),
            "elements": [dict(e) for e in self.elements],
            "u_re": self.u.real.tolist(),
            "u_im": self.u.imag.tolist(),
        }


class FockState:
    """Two-photon state: map from mode occupation pattern to amplitude."""

    def __init__(self, n_modes: int, amps: dict):
        self.n_modes = n_modes
        clean = {}
        for pattern, amp in amps.items():
            pattern = tuple(int(x) for x in pattern)
            if len(pattern) != n_modes:
                raise PhotonicsError(f"pattern {pattern} has wrong mode count")
            if sum(pattern) != 2 or min(pattern) < 0:
                raise PhotonicsError(f"pattern {pattern} is not a two-photon pattern")
            if amp != 0:
                clean[pattern] = complex(amp)
        norm = math.sqrt(sum(abs(a) ** 2 for a in clean.values()))
        if abs(norm - 1.0) > 1e-10:
            raise PhotonicsError(f"two-photon state not normalized: |amp|^2 = {norm**2}")
        self.amps = clean

    def amplitude(self, pattern) -> complex:
        return self.amps.get(tuple(pattern), 0.0j)

    def probability(self, pattern) -> float:
        return abs(self.amplitude(pattern)) ** 2

    def items(self):
        return self.amps.items()


def bs_matrix(eta: float) -> np.ndarray:
    """Beamsplitter of reflectivity eta with the pi phase on one reflection."""
    if not (0.0 <= eta <= 1.0):
        raise PhotonicsError(f"eta must lie in [0, 1], got {eta}")
    r, t = math.sqrt(eta), math.sqrt(1.0 - eta)
    return np.array([[r, t], [t, -r]])


def hom_reduction(eta: float) -> float:
    """Two-photon coincidence suppression factor (1-2eta)^2 / ((1-eta)^2 + eta^2).

    The single-photon-per-port probability after the beamsplitter equals
    this factor times the classical value (1-eta)^2 + eta^2; it vanishes
    at the balanced point eta = 1/2.
    """
    if not (0.0 <= eta <= 1.0):
        raise PhotonicsError(f"eta must lie in [0, 1], got {eta}")
    return (1.0 - 2.0 * eta) ** 2 / ((1.0 - eta) ** 2 + eta**2)


def meter_prep(eta: float) -> PureState:
    """Meter input |D(eta)> = sqrt(1/(1+eta))|H> + sqrt(eta/(1+eta))|V>.

    Pre-compensates the beamsplitter loss on the meter H component so the
    heralded meter outputs for the two signal eigenstates are orthogonal.
    """
    if not (0.0 < eta <= 1.0):
        raise PhotonicsError(f"eta must lie in (0, 1], got {eta}")
    return PureState(
        (2,),
        np.array([math.sqrt(1.0 / (1.0 + eta)), math.sqrt(eta / (1.0 + eta))]),
    )


def meter_prep_strength(a: float) -> PureState:
    """Variable-strength meter a|H> + sqrt(1-a^2)|V>, a in [0, sqrt(3)/2].

    a = 0 leaves the signal unmeasured; a = sqrt(3)/2 reproduces |D(1/3)>,
    the projective limit of the eta = 1/3 gate.
    """
    if not (0.0 <= a <= A_MAX + 1e-12):
        raise PhotonicsError(f"strength a must lie in [0, {A_MAX:.6f}], got {a}")
    a = min(a, A_MAX)
    return PureState((2,), np.array([a, math.sqrt(1.0 - a * a)]))


# HWP at 22.5 degrees on the meter polarization pair (H, V)
HWP = np.array([[1, 1], [1, -1]]) / math.sqrt(2.0)


def _embed(m: int, block: np.ndarray, idx: tuple[int, int]) -> np.ndarray:
    out = np.eye(m, dtype=complex)
    i, j = idx
    out[i, i], out[i, j] = block[0, 0], block[0, 1]
    out[j, i], out[j, j] = block[1, 0], block[1, 1]
    return out


def build_qnd_circuit(
    eta: float, include_signal_loss: bool = False
) -> tuple[ModeLayout, LinearCircuit]:
    """Assemble the gate: eta-BS on the horizontal rails, optional 1/3-
    transmittance balancing loss on s_V, and the output HWP on the meter."""
    if not (0.0 < eta < 1.0):
        raise PhotonicsError(f"eta must lie in (0, 1), got {eta}")
    names = ["s_H", "s_V", "m_H", "m_V"]
    elements = [
        {"kind": "beamsplitter", "modes": ["s_H", "m_H"], "eta": eta},
    ]
    if include_signal_loss:
        names.append("dump_s")
        elements.append(
            {"kind": "loss_beamsplitter", "modes": ["s_V", "dump_s"], "transmittance": 1.0 / 3.0}
        )
    elements.append({"kind": "half_wave_plate", "modes": ["m_H", "m_V"], "angle_deg": 22.5})
    layout = ModeLayout(tuple(names))
    m = layout.n_modes
    u = _embed(m, bs_matrix(eta), (layout.index("s_H"), layout.index("m_H")))
    if include_signal_loss:
        u = _embed(m, bs_matrix(1.0 / 3.0), (layout.index("s_V"), layout.index("dump_s"))) @ u
    u = _embed(m, HWP, (layout.index("m_H"), layout.index("m_V"))) @ u
    return layout, LinearCircuit(layout, u, tuple((tuple(e.items()) for e in elements)))


def lift_two_photon(circuit: LinearCircuit, state: FockState) -> FockState:
    """Propagate a two-photon state through the mode unitary.

    Input creation operators transform as a_j^dag -> sum_i U_ij a_i^dag;
    the two-photon polynomial is expanded directly, with the sqrt(n!)
    bosonic normalization handled per pattern.
    """
    m = circuit.layout.n_modes
    if state.n_modes != m:
        raise PhotonicsError("state and circuit mode counts differ")
    u = circuit.u
    out: dict = {}
    for pattern, amp in state.items():
        occupied = [i for i, n in enumerate(pattern) for _ in range(n)]
        j1, j2 = occupied
        pre = amp / (math.sqrt(2.0) if j1 == j2 else 1.0)
        c1, c2 = u[:, j1], u[:, j2]
        for i in range(m):
            # diagonal monomial (a_i^dag)^2 |0> = sqrt(2) |2_i>
            coeff = pre * c1[i] * c2[i] * math.sqrt(2.0)
            if coeff != 0:
                key = tuple(2 if k == i else 0 for k in range(m))
                out[key] = out.get(key, 0.0j) + coeff
            for k in range(i + 1, m):
                coeff = pre * (c1[i] * c2[k] + c1[k] * c2[i])
                if coeff != 0:
                    key = tuple(1 if x in (i, k) else 0 for x in range(m))
                    out[key] = out.get(key, 0.0j) + coeff
    return FockState(m, out)


def two_photon_input(signal_pol: PureState, meter_pol: PureState, layout: ModeLayout) -> FockState:
    """One photon in the signal rails and one in the meter rails."""
    if signal_pol.dim != 2 or meter_pol.dim != 2:
        raise PhotonicsError("signal and meter must be single-photon polarization qubits")
    m = layout.n_modes
    s_idx, m_idx = layout.signal_modes, layout.meter_modes
    amps = {}
    for i in range(2):
        for j in range(2):
            amp = signal_pol.amps[i] * meter_pol.amps[j]
            if amp != 0:
                pattern = [0] * m
                pattern[s_idx[i]] += 1
                pattern[m_idx[j]] += 1
                amps[tuple(pattern)] = amp
    return FockState(m, amps)


@dataclass(frozen=True)
class CoincidenceResult:
    """Post-selected outcome of one gate run.

    ``conditional_joint`` is the heralded (signal polarization, meter
    polarization) two-qubit state, renormalized on success; the failure
    probability is broken down by pattern class.
    """

    success_prob: float
    conditional_joint: PureState | None
    failure_breakdown: dict

    def to_json(self) -> dict:
        return {
            "success_prob": self.success_prob,
            "conditional_joint": None
            if self.conditional_joint is None
            else self.conditional_joint.to_json(),
            "failure_breakdown": dict(self.failure_breakdown),
        }


def run_gate(
    signal_pol: PureState,
    meter_pol: PureState,
    eta: float = 1.0 / 3.0,
    include_signal_loss: bool = False,
) -> CoincidenceResult:
    """Simulate the full gate and apply coincidence post-selection.

    Success: exactly one photon among the signal outputs, exactly one
    among the meter outputs, and none in any dump mode.
    """
    layout, circuit = build_qnd_circuit(eta, include_signal_loss)
    out = lift_two_photon(circuit, two_photon_input(signal_pol, meter_pol, layout))
    s_idx, m_idx = layout.signal_modes, layout.meter_modes
    dumps = layout.dump_modes

    joint = np.zeros((2, 2), dtype=complex)
    failures = {"both_in_signal": 0.0, "both_in_meter": 0.0, "dump": 0.0}
    success = 0.0
    for pattern, amp in out.items():
        n_s = sum(pattern[i] for i in s_idx)
        n_m = sum(pattern[i] for i in m_idx)
        n_d = sum(pattern[i] for i in dumps)
        p = abs(amp) ** 2
        if n_d > 0:
            failures["dump"] += p
        elif n_s == 2:
            failures["both_in_signal"] += p
        elif n_m == 2:
            failures["both_in_meter"] += p
        else:
            success += p
            i = 0 if pattern[s_idx[0]] else 1
            j = 0 if pattern[m_idx[0]] else 1
            joint[i, j] = amp
    conditional = None
    if success > 1e-14:
        conditional = PureState((2, 2), joint.ravel() / math.sqrt(success))
    return CoincidenceResult(success, conditional, failures)


def analytic_success(alpha: complex, beta: complex, include_signal_loss: bool = False) -> float:
    """Closed-form success probability at eta = 1/3 with meter |D(1/3)>.

    (|alpha|^2 + 3 |beta|^2)/6 without the balancing loss; 1/6 for every
    input once the 2/3 loss on s_V is included.
    """
    n = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(n - 1.0) > 1e-10:
        raise PhotonicsError("input amplitudes must be normalized")
    if include_signal_loss:
        return 1.0 / 6.0
    return (abs(alpha) ** 2 + 3.0 * abs(beta) ** 2) / 6.0


def strength_distinguishability(a: float, eta: float = 1.0 / 3.0):
    """(K, K_bar) of the post-selected variable-strength gate.

    K comes from the heralded likelihood that the meter readout matches
    an eigenstate signal; K_bar from injecting diagonal/antidiagonal
    signals and reading the heralded signal output in that basis. The
    balancing loss is always included in this regime. Also returns the
    empirically extracted equivalent CNOT strength gamma_eff = sqrt(L).
    """
    from . import metrics

    meter = meter_prep_strength(a)
    s = 1 / math.sqrt(2)

    # likelihood: eigenstate signals, meter read in H/V after the HWP
    likelihood = 0.0
    for i, pol in enumerate((PureState((2,), [1, 0]), PureState((2,), [0, 1]))):
        res = run_gate(pol, meter, eta, include_signal_loss=True)
        jm = res.conditional_joint.amps.reshape(2, 2)
        p_meter = (np.abs(jm) ** 2).sum(axis=0)
        likelihood += 0.5 * float(p_meter[i])

    # conjugate protocol: diagonal eigenstate signals, signal output in D/A
    conj = (PureState((2,), [s, s]), PureState((2,), [s, -s]))
    p_c = 0.0
    for idx, pol in enumerate(conj):
        res = run_gate(pol, meter, eta, include_signal_loss=True)
        jm = res.conditional_joint.amps.reshape(2, 2)
        rho_s = jm @ jm.conj().T
        vec = conj[idx].amps
        p_c += 0.5 * float((vec.conj() @ rho_s @ vec).real)

    pair = metrics.distinguishability(likelihood, p_c)
    gamma_eff = math.sqrt(likelihood)
    return pair, gamma_eff

"""Builtin post-selected devices and their reference matrices.

Two-qubit devices use dual-rail polarization encoding with the V mode of
each qubit placed before its H mode (qubit ``k`` occupies modes ``2k`` and
``2k + 1``), so the canonical basis order of the qubit subspace is
VV, VH, HV, HH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .circuit import Ancilla, Circuit
from .elements import BeamSplitter, PhaseShifter
from .fock import CapacityError, FockBasis, Occupation, StateVector, enumerate_basis
from .lift import lift
from .postselect import EffectiveOperator, success_probability

DEFAULT_CUTOFF = 4
DEFAULT_TOL = 1e-10

_S = 1 / math.sqrt(2)
SINGLE_QUBIT_STATES: dict[str, tuple[complex, complex]] = {
    # (H amplitude, V amplitude)
    "H": (1, 0),
    "V": (0, 1),
    "R": (_S, 1j * _S),
    "L": (_S, -1j * _S),
    "+": (_S, _S),
    "-": (_S, -_S),
}


@dataclass(frozen=True)
class PolarizationEncoding:
    """Dual-rail qubits: ``mode_map[k]`` is the (H-mode, V-mode) pair of qubit k."""

    qubits: int
    mode_map: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [m for pair in self.mode_map for m in pair]
        if len(self.mode_map) != self.qubits or len(set(flat)) != 2 * self.qubits:
            raise ValueError("each qubit needs two distinct modes of its own")

    @classmethod
    def v_first(cls, qubits: int) -> "PolarizationEncoding":
        return cls(qubits, tuple((2 * k + 1, 2 * k) for k in range(qubits)))

    @property
    def modes(self) -> int:
        return 2 * self.qubits

    def is_valid(self, occ: Sequence[int]) -> bool:
        return all(occ[h] + occ[v] == 1 for h, v in self.mode_map)

    def basis(self) -> FockBasis:
        full = enumerate_basis(self.modes, self.qubits)
        return full.subspace(self.is_valid)

    def label(self, occ: Sequence[int]) -> str:
        return "".join("H" if occ[h] else "V" for h, _ in self.mode_map)

    def occupation(self, letters: str) -> Occupation:
        occ = [0] * self.modes
        for (h, v), ch in zip(self.mode_map, letters, strict=True):
            occ[h if ch == "H" else v] = 1
        return tuple(occ)

    def product_state(self, letters: Sequence[str], basis: FockBasis | None = None) -> StateVector:
        """Product of single-qubit polarization states (H, V, R, L, +, -).

        The state is expressed on `basis` (default: the qubit subspace).
        """
        if len(letters) != self.qubits:
            raise ValueError(f"expected {self.qubits} qubit states, got {len(letters)}")
        amps: dict[Occupation, complex] = {(0,) * self.modes: 1.0}
        for (h, v), ch in zip(self.mode_map, letters):
            try:
                ah, av = SINGLE_QUBIT_STATES[ch]
            except KeyError:
                raise ValueError(f"unknown polarization {ch!r}") from None
            nxt = {}
            for occ, a in amps.items():
                for mode, b in ((h, ah), (v, av)):
                    if b:
                        o = list(occ)
                        o[mode] = 1
                        nxt[tuple(o)] = a * b
            amps = nxt
        return StateVector.from_dict(self.basis() if basis is None else basis, amps)


# ---------------------------------------------------------------- constructions

TWO_QUBITS = PolarizationEncoding.v_first(2)


def s00_circuit(R: float = 0.5) -> Circuit:
    return Circuit(2, (BeamSplitter(0, 1, R),), (Ancilla(1, 0, 0),))


def s11_circuit(R: float = 0.25) -> Circuit:
    return Circuit(2, (BeamSplitter(0, 1, R),), (Ancilla(1, 1, 1),))


def core_filter_circuit(R: float = 0.5, closing: str = "adjoint") -> Circuit:
    """Mach-Zehnder bunching around a single-photon sign element on each arm.

    Modes 0 and 1 carry the signal; modes 2 and 3 are the heralding
    ancillas. ``closing="plain"`` closes the interferometer with the same
    splitter instead of its adjoint, which flips the sign on ``|1;1>``.
    """
    if closing not in ("adjoint", "plain"):
        raise ValueError(f"closing must be 'adjoint' or 'plain', got {closing!r}")
    return Circuit(
        4,
        (
            BeamSplitter(0, 1, 0.5),
            BeamSplitter(0, 2, R),
            BeamSplitter(1, 3, R),
            BeamSplitter(0, 1, 0.5, adjoint=closing == "adjoint"),
        ),
        (Ancilla(2, 1, 1), Ancilla(3, 1, 1)),
    )


def polarization_filter_circuit(R: float = 0.5) -> Circuit:
    # modes: 0 V_a, 1 H_a, 2 V_b, 3 H_b; 4, 5 sign-element ancillas; 6 attenuator
    (ha, va), (hb, _) = TWO_QUBITS.mode_map
    return Circuit(
        7,
        (
            BeamSplitter(ha, hb, 0.5),
            BeamSplitter(ha, 4, R),
            BeamSplitter(hb, 5, R),
            BeamSplitter(ha, hb, 0.5, adjoint=True),
            PhaseShifter(ha, math.pi),
            # kept amplitude sqrt(1/4) = 1/2 per photon
            BeamSplitter(va, 6, 0.25),
        ),
        (Ancilla(4, 1, 1), Ancilla(5, 1, 1), Ancilla(6, 0, 0)),
    )


def phase_gate_circuit(R: float = 1 / 3) -> Circuit:
    # modes: 0 V_a, 1 H_a, 2 V_b, 3 H_b; 4, 5 vacuum "loss" ancillas on the V rails
    (ha, va), (hb, vb) = TWO_QUBITS.mode_map
    return Circuit(
        6,
        (BeamSplitter(ha, hb, R), BeamSplitter(va, 4, R), BeamSplitter(vb, 5, R)),
        (Ancilla(4, 0, 0), Ancilla(5, 0, 0)),
    )


def central_element_circuit(R: float = 1 / 3) -> Circuit:
    return Circuit(2, (BeamSplitter(0, 1, R),))


@dataclass(frozen=True)
class Builtin:
    name: str
    make: Callable[[float], Circuit]
    default_R: float
    signal_photons: int
    encoding: PolarizationEncoding | None = None
    restrict: Callable[[Occupation], bool] | None = None

    def circuit(self, R: float | None = None) -> Circuit:
        return self.make(self.default_R if R is None else R)

    def required_cutoff(self) -> int:
        c = self.circuit()
        return sum(a.n_in for a in c.ancillas) + self.signal_photons


def _single_rail(occ: Occupation) -> bool:
    return max(occ) <= 1


BUILTINS: dict[str, Builtin] = {
    b.name: b
    for b in (
        Builtin("s00", s00_circuit, 0.5, 2),
        Builtin("s11", s11_circuit, 0.25, 2),
        Builtin("core-filter", core_filter_circuit, 0.5, 2, restrict=_single_rail),
        Builtin("pol-filter", polarization_filter_circuit, 0.5, 2, encoding=TWO_QUBITS),
        Builtin("phase-gate", phase_gate_circuit, 1 / 3, 2, encoding=TWO_QUBITS),
    )
}


def get_builtin(name: str) -> Builtin:
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None


@lru_cache(maxsize=64)
def _effective(circuit: Circuit, cutoff: int) -> EffectiveOperator:
    return circuit.effective(cutoff)


def builtin_operator(name: str, R: float | None = None, cutoff: int = DEFAULT_CUTOFF) -> EffectiveOperator:
    """Effective operator of a builtin device.

    Qubit devices are restricted to the one-photon-per-qubit subspace and
    the core filter to occupations of at most one per mode; the sign
    elements keep the whole signal basis allowed by `cutoff`.
    """
    b = get_builtin(name)
    c = b.circuit(R)
    c.check_capacity(cutoff, b.signal_photons)
    S = _effective(c, cutoff)
    if b.encoding is not None:
        return S.restrict(S.signal_basis.subspace(b.encoding.is_valid))
    if b.restrict is not None:
        return S.restrict(S.signal_basis.subspace(b.restrict))
    return S


def core_filter(R: float = 0.5, closing: str = "adjoint", cutoff: int = DEFAULT_CUTOFF) -> EffectiveOperator:
    c = core_filter_circuit(R, closing)
    c.check_capacity(cutoff, 2)
    S = _effective(c, cutoff)
    return S.restrict(S.signal_basis.subspace(_single_rail))


def polarization_filter(cutoff: int = DEFAULT_CUTOFF) -> EffectiveOperator:
    return builtin_operator("pol-filter", cutoff=cutoff)


def phase_gate(R: float = 1 / 3, cutoff: int = DEFAULT_CUTOFF) -> EffectiveOperator:
    return builtin_operator("phase-gate", R, cutoff)


def basis_labels(name: str, basis: FockBasis) -> list[str]:
    b = get_builtin(name) if name in BUILTINS else None
    if b is not None and b.encoding is not None:
        return [b.encoding.label(s) for s in basis.states]
    return ["|" + ",".join(map(str, s)) + ">" for s in basis.states]


# ------------------------------------------------------------------- references
# Every published value is written once here as an exact expression.


def attenuation_reference(R: float, n: int) -> float:
    return math.sqrt(R) ** n


def sign_element_reference(R: float, n: int) -> float:
    # (sqrt R)^(n-1) (R - (1-R) n), written so that R = 0 stays finite
    if n == 0:
        return math.sqrt(R)
    return math.sqrt(R) ** (n - 1) * (R - (1 - R) * n)


def coincidence_reference(R: float) -> np.ndarray:
    # basis (0,0), (1,0), (0,1), (1,1)
    return np.array([1, math.sqrt(R), math.sqrt(R), 2 * R - 1], dtype=complex)


REFERENCES: dict[str, np.ndarray] = {
    "nonlinear-sign": np.array([Fraction(1, 2), Fraction(-1, 2), Fraction(-5, 8)], dtype=float),
    "half-splitter-sign": np.array([1 / math.sqrt(2), 0.0, -1 / (2 * math.sqrt(2))]),
    # basis (0,0), (1,0), (0,1), (1,1)
    "core-filter": np.diag([Fraction(1, 2), 0, 0, Fraction(-1, 4)]).astype(float),
    # basis VV, VH, HV, HH
    "polarization-filter": np.diag([Fraction(1, 4), 0, 0, Fraction(1, 4)]).astype(float),
    "circular-entangling": np.array([Fraction(1, 8), 0, 0, Fraction(1, 8)], dtype=float),
    "coincidence-third": np.array([1, math.sqrt(1 / 3), math.sqrt(1 / 3), -1 / 3]),
    "phase-gate": np.diag([Fraction(1, 3), Fraction(1, 3), Fraction(1, 3), Fraction(-1, 3)]).astype(float),
}
CIRCULAR_SUCCESS = 1 / 32
PHASE_GATE_SUCCESS = 1 / 9


# ------------------------------------------------------------------ verification


@dataclass
class GateReport:
    name: str
    builtin: str
    computed: np.ndarray
    reference: np.ndarray
    max_abs_error: float
    tol: float = DEFAULT_TOL
    success_probabilities: dict[str, float] = field(default_factory=dict)
    operator: EffectiveOperator | None = None

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_error < self.tol)


def _report(name, builtin, computed, reference, tol, **kw) -> GateReport:
    computed = np.asarray(computed, dtype=complex)
    reference = np.asarray(reference, dtype=complex)
    err = float(np.max(np.abs(computed - reference))) if computed.size else 0.0
    return GateReport(name, builtin, computed, reference, err, tol, **kw)


def _basis_probabilities(S: EffectiveOperator, labels: Sequence[str]) -> dict[str, float]:
    out = {}
    for k, label in enumerate(labels):
        psi = StateVector.basis_state(S.signal_basis, S.signal_basis.states[k])
        out[label] = success_probability(S, psi)
    return out


R_GRID = tuple(k / 10 for k in range(11))


def _check_attenuation(R, cutoff, tol):
    grid = R_GRID if R is None else (R,)
    computed, reference = [], []
    for r in grid:
        S = builtin_operator("s00", r, cutoff)
        for n in range(S.signal_basis.cutoff + 1):
            computed.append(S.element((n,), (n,)))
            reference.append(attenuation_reference(r, n))
        # off-diagonal entries must vanish
        computed.extend(S.matrix[~np.eye(len(S.signal_basis), dtype=bool)])
        reference.extend([0] * (len(S.signal_basis) ** 2 - len(S.signal_basis)))
    return [_report("vacuum-attenuation", "s00", computed, reference, tol)]


def _check_sign_element(R, cutoff, tol):
    reports = []
    grid = (0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9) if R is None else (R,)
    computed, reference = [], []
    for r in grid:
        S = builtin_operator("s11", r, cutoff)
        for n in range(S.signal_basis.cutoff + 1):
            computed.append(S.element((n,), (n,)))
            reference.append(sign_element_reference(r, n))
    S = builtin_operator("s11", 0.25 if R is None else R, cutoff)
    ref = REFERENCES["nonlinear-sign"]
    computed.extend(S.diagonal()[: len(ref)])
    reference.extend(ref)
    reports.append(_report("nonlinear-sign", "s11", computed, reference, tol, operator=S))

    S = builtin_operator("s11", 0.5 if R is None else R, cutoff)
    ref = REFERENCES["half-splitter-sign"]
    reports.append(_report("half-splitter-sign", "s11", S.diagonal()[: len(ref)], ref, tol, operator=S))
    return reports


def _check_core_filter(R, cutoff, tol):
    S = builtin_operator("core-filter", R, cutoff)
    labels = basis_labels("core-filter", S.signal_basis)
    return [
        _report(
            "core-filter", "core-filter", S.matrix, REFERENCES["core-filter"], tol,
            operator=S, success_probabilities=_basis_probabilities(S, labels),
        )
    ]


def _check_polarization_filter(R, cutoff, tol):
    S = builtin_operator("pol-filter", R, cutoff)
    labels = basis_labels("pol-filter", S.signal_basis)
    reports = [
        _report(
            "polarization-filter", "pol-filter", S.matrix, REFERENCES["polarization-filter"], tol,
            operator=S, success_probabilities=_basis_probabilities(S, labels),
        )
    ]
    rl = TWO_QUBITS.product_state("RL", S.signal_basis)
    out = S.apply(rl)
    p = success_probability(S, rl)
    bell = StateVector.from_dict(S.signal_basis, {TWO_QUBITS.occupation("HH"): _S, TWO_QUBITS.occupation("VV"): _S})
    fidelity = abs(np.vdot(bell.amplitudes, out.amplitudes)) ** 2 / p if p > 0 else 0.0
    # the same output written in the circular basis: (|R;L> + |L;R>) / 8
    circular = (rl.amplitudes + TWO_QUBITS.product_state("LR", S.signal_basis).amplitudes) / 8
    computed = np.concatenate([out.amplitudes, [p, fidelity], out.amplitudes])
    reference = np.concatenate([REFERENCES["circular-entangling"], [CIRCULAR_SUCCESS, 1.0], circular])
    reports.append(
        _report("circular-entangling", "pol-filter", computed, reference, tol,
                operator=S, success_probabilities={"RL": p})
    )
    return reports


def _check_phase_gate(R, cutoff, tol):
    reports = []
    grid = (0.0, 1 / 3, 0.5, 1.0) if R is None else (R,)
    computed, reference = [], []
    for r in grid:
        c = central_element_circuit(r)
        U = lift(c.transfer_matrix(), enumerate_basis(2, 2))
        occs = [(0, 0), (1, 0), (0, 1), (1, 1)]
        computed.extend(U.element(o, o) for o in occs)
        reference.extend(coincidence_reference(r))
    reports.append(_report("coincidence-family", "phase-gate", computed, reference, tol))

    r = 1 / 3 if R is None else R
    U = lift(central_element_circuit(r).transfer_matrix(), enumerate_basis(2, 2))
    computed = [U.element(o, o) for o in [(0, 0), (1, 0), (0, 1), (1, 1)]]
    reports.append(_report("coincidence-third", "phase-gate", computed, REFERENCES["coincidence-third"], tol))

    S = builtin_operator("phase-gate", R, cutoff)
    labels = basis_labels("phase-gate", S.signal_basis)
    probs = _basis_probabilities(S, labels)
    computed = np.concatenate([S.matrix.ravel(), list(probs.values())])
    reference = np.concatenate([REFERENCES["phase-gate"].ravel(), [PHASE_GATE_SUCCESS] * len(probs)])
    reports.append(
        _report("phase-gate", "phase-gate", computed, reference, tol, operator=S, success_probabilities=probs)
    )
    return reports


CHECKS: dict[str, Callable] = {
    "s00": _check_attenuation,
    "s11": _check_sign_element,
    "core-filter": _check_core_filter,
    "pol-filter": _check_polarization_filter,
    "phase-gate": _check_phase_gate,
}


def verify_all(
    cutoff: int = DEFAULT_CUTOFF,
    tol: float = DEFAULT_TOL,
    builtin: str | None = None,
    R: float | None = None,
) -> list[GateReport]:
    """Run the reference checks, optionally for one builtin at a chosen reflectivity.

    Table checks compare the device built at `R` against the fixed
    published values, so a perturbed reflectivity shows up as a failure.
    Capacity problems raise :class:`~fockgate.fock.CapacityError`.
    """
    names = list(CHECKS) if builtin is None else [get_builtin(builtin).name]
    for name in names:
        need = BUILTINS[name].required_cutoff()
        if cutoff < need:
            raise CapacityError(f"builtin {name!r} needs a cutoff of at least {need}, got {cutoff}")
    reports = []
    for name in names:
        reports.extend(CHECKS[name](R, cutoff, tol))
    return reports

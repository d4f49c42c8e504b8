"""Effective operators from ancilla preparation and photon-counting post-selection.

Ancilla modes are prepared in a definite occupation, the network acts, and
only runs where the ancilla detectors report a chosen occupation are kept.
The kept branch is a (generally non-unitary) operator on the signal modes.
Amplitudes are never renormalized here; success probabilities are a
separate query.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import CapacityError, FockBasis, Occupation, StateVector, enumerate_basis
from .lift import FockOperator

NORM_TOL = 1e-10


class PostSelectError(ValueError):
    pass


@dataclass(frozen=True)
class PostSelectSpec:
    """Which modes are ancillas, how they are prepared and what is detected.

    ``detect_out`` may be ``None`` when only the preparation matters, as for
    :func:`outcome_distribution`.
    """

    signal_modes: tuple[int, ...]
    ancilla_modes: tuple[int, ...] = ()
    ancilla_in: Occupation = ()
    detect_out: Occupation | None = ()

    def __post_init__(self):
        for name in ("signal_modes", "ancilla_modes", "ancilla_in"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        if self.detect_out is not None:
            object.__setattr__(self, "detect_out", tuple(int(x) for x in self.detect_out))
        k = len(self.ancilla_modes)
        if len(self.ancilla_in) != k or (self.detect_out is not None and len(self.detect_out) != k):
            raise PostSelectError("ancilla occupations must have one entry per ancilla mode")
        if any(c < 0 for c in self.ancilla_in) or any(c < 0 for c in self.detect_out or ()):
            raise PostSelectError("ancilla occupations must be non-negative")
        if set(self.signal_modes) & set(self.ancilla_modes):
            raise PostSelectError("signal and ancilla modes overlap")
        if len(set(self.signal_modes)) != len(self.signal_modes) or len(set(self.ancilla_modes)) != k:
            raise PostSelectError("repeated mode in post-selection spec")

    @property
    def modes(self) -> int:
        return len(self.signal_modes) + len(self.ancilla_modes)

    def check_partition(self, M: int) -> None:
        if sorted(self.signal_modes + self.ancilla_modes) != list(range(M)):
            raise PostSelectError(f"signal and ancilla modes do not partition {M} modes")

    def signal_cutoff(self, cutoff: int) -> int:
        """Largest signal photon number whose input and output both fit under `cutoff`."""
        needed = max(sum(self.ancilla_in), sum(self.detect_out or ()))
        if needed > cutoff:
            raise CapacityError(f"ancillas need {needed} photons but the cutoff is {cutoff}")
        return cutoff - needed

    def embed(self, signal: Sequence[int], ancilla: Sequence[int]) -> Occupation:
        occ = [0] * self.modes
        for m, c in zip(self.signal_modes, signal):
            occ[m] = c
        for m, c in zip(self.ancilla_modes, ancilla):
            occ[m] = c
        return tuple(occ)


@dataclass(frozen=True, eq=False)
class EffectiveOperator:
    """Post-selected operator on the signal modes, in canonical basis order."""

    signal_basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.signal_basis)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis size {n}")

    def element(self, out: Sequence[int], inp: Sequence[int]) -> complex:
        b = self.signal_basis
        return complex(self.matrix[b.position(out), b.position(inp)])

    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    def apply(self, psi: StateVector) -> StateVector:
        if psi.basis != self.signal_basis:
            raise ValueError("state does not live on the operator's signal basis")
        return StateVector(self.signal_basis, self.matrix @ psi.amplitudes)

    def restrict(self, basis: FockBasis) -> "EffectiveOperator":
        """Compression onto a sub-basis (rows and columns both restricted)."""
        pos = [self.signal_basis.position(s) for s in basis.states]
        return EffectiveOperator(basis, self.matrix[np.ix_(pos, pos)])

    def singular_values(self) -> np.ndarray:
        if self.matrix.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.matrix, compute_uv=False)


def effective_operator(U: FockOperator, spec: PostSelectSpec) -> EffectiveOperator:
    """<m_sig, detect_out| U |n_sig, ancilla_in> over the signal basis.

    The signal basis holds every signal occupation whose photon count plus
    the larger of the prepared and detected ancilla totals fits under the
    cutoff of ``U.basis``. When more photons are prepared than detected the
    result is the compression of the kept branch onto that basis.
    """
    if spec.detect_out is None:
        raise PostSelectError("effective_operator needs a detection outcome")
    spec.check_partition(U.basis.modes)
    sig_basis = enumerate_basis(len(spec.signal_modes), spec.signal_cutoff(U.basis.cutoff))
    cols = [U.basis.position(spec.embed(n, spec.ancilla_in)) for n in sig_basis.states]
    rows = [U.basis.position(spec.embed(m, spec.detect_out)) for m in sig_basis.states]
    return EffectiveOperator(sig_basis, U.matrix[np.ix_(rows, cols)])


def _check_normalized(psi: StateVector, tol: float) -> None:
    if abs(psi.norm() - 1.0) > tol:
        raise ValueError(f"input state is not normalized (norm {psi.norm():.12g})")


def success_probability(S: EffectiveOperator, psi: StateVector, tol: float = NORM_TOL) -> float:
    """Probability that the post-selection succeeds for normalized input `psi`."""
    _check_normalized(psi, tol)
    return float(np.linalg.norm(S.apply(psi).amplitudes) ** 2)


def outcome_distribution(
    U: FockOperator, spec: PostSelectSpec, psi: StateVector, tol: float = NORM_TOL
) -> list[tuple[Occupation, float]]:
    """Probability of every ancilla detection outcome for signal input `psi`.

    `psi` lives on a signal basis (any cutoff that fits after the ancilla
    preparation); ``spec.detect_out`` is ignored. Outcomes are listed in
    canonical ancilla-basis order, including zero-probability ones.
    """
    spec.check_partition(U.basis.modes)
    _check_normalized(psi, tol)
    if psi.basis.modes != len(spec.signal_modes):
        raise PostSelectError("input state does not match the number of signal modes")
    n_anc_in = sum(spec.ancilla_in)
    full = np.zeros(len(U.basis), dtype=complex)
    for occ, a in psi.to_dict().items():
        if sum(occ) + n_anc_in > U.basis.cutoff:
            raise CapacityError(f"input {occ} with ancillas exceeds cutoff {U.basis.cutoff}")
        full[U.basis.position(spec.embed(occ, spec.ancilla_in))] = a
    out = U.matrix @ full

    probs: dict[Occupation, float] = {}
    for occ, a in zip(U.basis.states, out):
        key = tuple(occ[m] for m in spec.ancilla_modes)
        probs[key] = probs.get(key, 0.0) + abs(a) ** 2
    if not spec.ancilla_modes:
        return [((), probs.get((), 0.0))]
    outcomes = enumerate_basis(len(spec.ancilla_modes), U.basis.cutoff).states
    return [(o, probs.get(o, 0.0)) for o in outcomes]

"""Linear-optical elements and their mode-level transfer matrices.

A transfer matrix ``T`` maps creation operators as
``a_j^dagger -> sum_i T[i, j] a_i^dagger``: column ``j`` holds the output
amplitudes of a photon entering mode ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.stats import unitary_group

UNITARITY_TOL = 1e-12


class ElementError(ValueError):
    """Invalid element parameters or mode indices."""


@dataclass(frozen=True)
class BeamSplitter:
    """Two-mode splitter: reflection amplitude sqrt(R), transmission i*sqrt(1-R)."""

    mode_a: int
    mode_b: int
    R: float
    adjoint: bool = False

    def modes(self) -> tuple[int, ...]:
        return (self.mode_a, self.mode_b)

    def block(self) -> np.ndarray:
        r = math.sqrt(self.R)
        t = 1j * math.sqrt(1.0 - self.R)
        blk = np.array([[r, t], [t, r]], dtype=complex)
        return blk.conj().T if self.adjoint else blk


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float

    def modes(self) -> tuple[int, ...]:
        return (self.mode,)


@dataclass(frozen=True)
class PolarizingBeamSplitter:
    """Exchanges the V modes of two rails; H modes pass straight through.

    Each rail is an ``(H-mode, V-mode)`` pair. No phase is picked up on
    reflection.
    """

    rail_a: tuple[int, int]
    rail_b: tuple[int, int]

    def modes(self) -> tuple[int, ...]:
        return tuple(self.rail_a) + tuple(self.rail_b)


@dataclass(frozen=True)
class ModePermutation:
    """A photon entering mode ``j`` leaves in mode ``perm[j]``."""

    perm: tuple[int, ...]

    @classmethod
    def swap(cls, a: int, b: int, modes: int) -> "ModePermutation":
        perm = list(range(modes))
        perm[a], perm[b] = b, a
        return cls(tuple(perm))

    def modes(self) -> tuple[int, ...]:
        return tuple(range(len(self.perm)))


Element = Union[BeamSplitter, PhaseShifter, PolarizingBeamSplitter, ModePermutation]


def validate(e: Element, M: int) -> None:
    """Raise :class:`ElementError` if `e` cannot act on `M` modes."""
    if isinstance(e, ModePermutation):
        if len(e.perm) != M or sorted(e.perm) != list(range(M)):
            raise ElementError(f"{e.perm} is not a permutation of {M} modes")
        return
    idx = e.modes()
    for m in idx:
        if not (0 <= m < M):
            raise ElementError(f"mode {m} out of range for {M} modes")
    if len(set(idx)) != len(idx):
        raise ElementError(f"mode indices must be distinct, got {idx}")
    if isinstance(e, BeamSplitter) and not (0.0 <= e.R <= 1.0):
        raise ElementError(f"reflectivity must lie in [0, 1], got {e.R}")
    if isinstance(e, PhaseShifter) and not math.isfinite(e.phi):
        raise ElementError(f"phase must be finite, got {e.phi}")


def transfer_matrix(e: Element, M: int) -> np.ndarray:
    validate(e, M)
    T = np.eye(M, dtype=complex)
    if isinstance(e, BeamSplitter):
        idx = [e.mode_a, e.mode_b]
        T[np.ix_(idx, idx)] = e.block()
    elif isinstance(e, PhaseShifter):
        T[e.mode, e.mode] = np.exp(1j * e.phi)
    elif isinstance(e, PolarizingBeamSplitter):
        va, vb = e.rail_a[1], e.rail_b[1]
        T[[va, vb], [va, vb]] = 0
        T[vb, va] = 1
        T[va, vb] = 1
    elif isinstance(e, ModePermutation):
        T = np.zeros((M, M), dtype=complex)
        T[list(e.perm), list(range(M))] = 1
    else:
        raise TypeError(f"unknown element {e!r}")
    return T


def compose(elements: Sequence[Element], M: int) -> np.ndarray:
    """Transfer matrix of `elements` applied in order (first element first)."""
    T = np.eye(M, dtype=complex)
    for e in elements:
        T = transfer_matrix(e, M) @ T
    return T


def unitarity_error(T: np.ndarray) -> float:
    T = np.asarray(T)
    return float(np.max(np.abs(T.conj().T @ T - np.eye(T.shape[0])))) if T.size else 0.0


def is_unitary(T: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    return unitarity_error(T) < tol


def random_unitary(M: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random M x M unitary drawn from `rng`."""
    if M == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(M, random_state=rng)

"""Multi-mode Fock bases and state vectors.

States are ordered by total photon number, then by the sorted list of
occupied mode indices (so ``(1, 0)`` precedes ``(0, 1)``), which keeps
printed matrices reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np

Occupation = tuple[int, ...]

DEFAULT_SIZE_LIMIT = 10**6


class CapacityError(ValueError):
    """Raised when a basis or photon number exceeds a configured limit."""


class BasisMismatchError(ValueError):
    pass


def _canonical_key(occ: Occupation) -> tuple[int, Occupation]:
    return (sum(occ), tuple(-c for c in occ))


def _sector(modes: int, total: int) -> list[Occupation]:
    # all compositions of `total` into `modes` parts, in canonical order
    if modes == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        for rest in _sector(modes - 1, total - first):
            out.append((first,) + rest)
    return out


def truncated_size(modes: int, cutoff: int) -> int:
    """Number of occupation vectors over `modes` modes with total <= `cutoff`."""
    return comb(cutoff + modes, modes)


def sector_size(modes: int, total: int) -> int:
    return comb(total + modes - 1, modes - 1)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """An ordered set of occupation vectors over a fixed number of modes.

    `cutoff` is the largest total photon number any state may carry. Most
    bases hold every state up to the cutoff; subspace bases (see
    :meth:`subspace`) hold a canonical-ordered subset.
    """

    modes: int
    cutoff: int
    states: tuple[Occupation, ...]
    index: dict[Occupation, int] = field(repr=False, compare=False)

    def __init__(self, modes: int, cutoff: int, states: Iterable[Sequence[int]]):
        if modes < 1:
            raise ValueError(f"basis needs at least one mode, got {modes}")
        if cutoff < 0:
            raise ValueError(f"cutoff must be non-negative, got {cutoff}")
        ordered = sorted({tuple(int(c) for c in s) for s in states}, key=_canonical_key)
        for s in ordered:
            if len(s) != modes:
                raise ValueError(f"occupation {s} does not have {modes} modes")
            if min(s) < 0:
                raise ValueError(f"negative occupation in {s}")
            if sum(s) > cutoff:
                raise CapacityError(f"occupation {s} exceeds cutoff {cutoff}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "states", tuple(ordered))
        object.__setattr__(self, "index", {s: k for k, s in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, occ) -> bool:
        return tuple(occ) in self.index

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockBasis):
            return NotImplemented
        return (self.modes, self.cutoff, self.states) == (other.modes, other.cutoff, other.states)

    def __hash__(self) -> int:
        return hash((self.modes, self.cutoff, self.states))

    def position(self, occ: Sequence[int]) -> int:
        try:
            return self.index[tuple(occ)]
        except KeyError:
            raise KeyError(f"occupation {tuple(occ)} is not in this basis") from None

    def totals(self) -> np.ndarray:
        return np.array([sum(s) for s in self.states], dtype=int)

    def subspace(self, keep: Callable[[Occupation], bool]) -> "FockBasis":
        """Basis of the states for which `keep` is true, in canonical order."""
        return FockBasis(self.modes, self.cutoff, [s for s in self.states if keep(s)])


def enumerate_basis(modes: int, cutoff: int, size_limit: int = DEFAULT_SIZE_LIMIT) -> FockBasis:
    """All occupation vectors over `modes` modes with at most `cutoff` photons.

    >>> enumerate_basis(2, 2).states
    ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    """
    if modes < 1:
        raise ValueError(f"basis needs at least one mode, got {modes}")
    if cutoff < 0:
        raise ValueError(f"cutoff must be non-negative, got {cutoff}")
    size = truncated_size(modes, cutoff)
    if size > size_limit:
        raise CapacityError(f"basis with {modes} modes and cutoff {cutoff} has {size} states (limit {size_limit})")
    states = [s for total in range(cutoff + 1) for s in _sector(modes, total)]
    return FockBasis(modes, cutoff, states)


def sector_basis(modes: int, total: int, size_limit: int = DEFAULT_SIZE_LIMIT) -> FockBasis:
    """All occupation vectors with exactly `total` photons."""
    if modes < 1:
        raise ValueError(f"basis needs at least one mode, got {modes}")
    if total < 0:
        raise ValueError(f"photon number must be non-negative, got {total}")
    size = sector_size(modes, total)
    if size > size_limit:
        raise CapacityError(f"sector with {modes} modes and {total} photons has {size} states (limit {size_limit})")
    return FockBasis(modes, total, _sector(modes, total))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a :class:`FockBasis`."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != len(self.basis):
            raise ValueError(f"expected {len(self.basis)} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_dict(cls, basis: FockBasis, amplitudes: dict) -> "StateVector":
        amps = np.zeros(len(basis), dtype=complex)
        for occ, a in amplitudes.items():
            amps[basis.position(occ)] += a
        return cls(basis, amps)

    @classmethod
    def basis_state(cls, basis: FockBasis, occ: Sequence[int]) -> "StateVector":
        return cls.from_dict(basis, {tuple(occ): 1.0})

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / n)

    def amplitude(self, occ: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.position(occ)])

    def to_dict(self, atol: float = 0.0) -> dict[Occupation, complex]:
        return {s: complex(a) for s, a in zip(self.basis.states, self.amplitudes) if abs(a) > atol}

    def restrict(self, basis: FockBasis, atol: float = 1e-12) -> "StateVector":
        """Re-express on `basis`, which must carry all the non-negligible amplitude."""
        if basis.modes != self.basis.modes:
            raise BasisMismatchError("restriction requires the same mode count")
        out = {}
        for occ, a in self.to_dict().items():
            if occ in basis:
                out[occ] = a
            elif abs(a) > atol:
                raise BasisMismatchError(f"amplitude {a} on {occ} lies outside the target basis")
        return StateVector.from_dict(basis, out)


def tensor(a: StateVector, b: StateVector, cutoff: int | None = None) -> StateVector:
    """Product state on the concatenated modes of `a` then `b`.

    The result lives on the full truncated basis with `cutoff` photons,
    by default the sum of the two input cutoffs.
    """
    if cutoff is None:
        cutoff = a.basis.cutoff + b.basis.cutoff
    basis = enumerate_basis(a.basis.modes + b.basis.modes, cutoff)
    amps = np.zeros(len(basis), dtype=complex)
    for sa, xa in zip(a.basis.states, a.amplitudes):
        if xa == 0:
            continue
        for sb, xb in zip(b.basis.states, b.amplitudes):
            if xb == 0:
                continue
            occ = sa + sb
            if sum(occ) > cutoff:
                raise CapacityError(f"product component {occ} exceeds cutoff {cutoff}")
            amps[basis.index[occ]] += xa * xb
    return StateVector(basis, amps)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in `a`."""
    if a.basis != b.basis:
        raise BasisMismatchError("inner product needs both states on the same basis")
    return complex(np.vdot(a.amplitudes, b.amplitudes))

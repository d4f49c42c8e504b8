"""Circuits: an element list on M modes plus ancilla preparation and detection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elements import Element, compose, validate
from .fock import CapacityError, Occupation, enumerate_basis
from .lift import FockOperator, lift, lift_permanent
from .postselect import EffectiveOperator, PostSelectSpec, effective_operator


@dataclass(frozen=True)
class Ancilla:
    mode: int
    n_in: int
    n_out: int


@dataclass(frozen=True)
class Circuit:
    modes: int
    elements: tuple[Element, ...] = ()
    ancillas: tuple[Ancilla, ...] = ()
    inputs: tuple[Occupation, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "ancillas", tuple(self.ancillas))
        object.__setattr__(self, "inputs", tuple(tuple(o) for o in self.inputs))
        for e in self.elements:
            validate(e, self.modes)
        seen = set()
        for a in self.ancillas:
            if not (0 <= a.mode < self.modes):
                raise ValueError(f"ancilla mode {a.mode} out of range for {self.modes} modes")
            if a.mode in seen:
                raise ValueError(f"mode {a.mode} declared as ancilla twice")
            if a.n_in < 0 or a.n_out < 0:
                raise ValueError("ancilla occupations must be non-negative")
            seen.add(a.mode)
        n_sig = len(self.signal_modes)
        for occ in self.inputs:
            if len(occ) != n_sig or min(occ, default=0) < 0:
                raise ValueError(f"input {occ} must give {n_sig} non-negative signal occupations")

    @property
    def signal_modes(self) -> tuple[int, ...]:
        anc = {a.mode for a in self.ancillas}
        return tuple(m for m in range(self.modes) if m not in anc)

    @property
    def postselect(self) -> PostSelectSpec:
        return PostSelectSpec(
            signal_modes=self.signal_modes,
            ancilla_modes=tuple(a.mode for a in self.ancillas),
            ancilla_in=tuple(a.n_in for a in self.ancillas),
            detect_out=tuple(a.n_out for a in self.ancillas),
        )

    def prepared_photons(self) -> int:
        """Ancilla photons plus the largest declared signal input."""
        return sum(a.n_in for a in self.ancillas) + max((sum(o) for o in self.inputs), default=0)

    def check_capacity(self, cutoff: int, signal_photons: int = 0) -> None:
        need = max(self.prepared_photons(), sum(a.n_in for a in self.ancillas) + signal_photons)
        need = max(need, sum(a.n_out for a in self.ancillas))
        if need > cutoff:
            raise CapacityError(f"circuit needs a cutoff of at least {need}, got {cutoff}")

    def transfer_matrix(self) -> np.ndarray:
        return compose(self.elements, self.modes)

    def fock_operator(self, cutoff: int, oracle: bool = False) -> FockOperator:
        basis = enumerate_basis(self.modes, cutoff)
        T = self.transfer_matrix()
        return lift_permanent(T, basis) if oracle else lift(T, basis)

    def effective(self, cutoff: int) -> EffectiveOperator:
        self.check_capacity(cutoff)
        return effective_operator(self.fock_operator(cutoff), self.postselect)

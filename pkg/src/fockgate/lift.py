"""Lifting mode transfer matrices to operators on the Fock basis.

Two independent routes are provided. :func:`lift` expands each input
monomial of creation operators multinomially; :func:`lift_permanent`
evaluates every matrix element as a permanent by summing over
permutations. They should agree to rounding error and are used to check
each other.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import factorial, prod, sqrt

import numpy as np

from .fock import CapacityError, FockBasis, Occupation, StateVector, _sector

PERMANENT_PHOTON_LIMIT = 6
_ROW_CHUNK = 32


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FockOperator:
    """A square matrix over a :class:`FockBasis`."""

    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        n = len(self.basis)
        if self.matrix.shape != (n, n):
            raise DimensionError(f"matrix shape {self.matrix.shape} does not match basis size {n}")

    def element(self, out: Occupation, inp: Occupation) -> complex:
        return complex(self.matrix[self.basis.position(out), self.basis.position(inp)])

    def apply(self, psi: StateVector) -> StateVector:
        if psi.basis != self.basis:
            raise DimensionError("state and operator live on different bases")
        return StateVector(self.basis, self.matrix @ psi.amplitudes)

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.basis, self.matrix.conj().T)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if other.basis != self.basis:
            raise DimensionError("operators live on different bases")
        return FockOperator(self.basis, self.matrix @ other.matrix)


def _check_dims(T: np.ndarray, basis: FockBasis) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    if T.shape != (basis.modes, basis.modes):
        raise DimensionError(f"transfer matrix shape {T.shape} does not match {basis.modes} modes")
    return T


@lru_cache(maxsize=None)
def _compositions(n: int, M: int) -> tuple[tuple[Occupation, int], ...]:
    # (k, n!/prod(k_i!)) for every way of spreading n photons over M modes
    nf = factorial(n)
    return tuple((k, nf // prod(factorial(c) for c in k)) for k in _sector(M, n))


def _expand_column(T: np.ndarray, n: Occupation) -> dict[Occupation, complex]:
    # prod_j (sum_i T[i, j] a_i^dagger)^{n_j}, as {output exponents: coefficient}
    M = len(n)
    terms: dict[Occupation, complex] = {(0,) * M: 1.0}
    for j, nj in enumerate(n):
        if nj == 0:
            continue
        factor = []
        for k, multinom in _compositions(nj, M):
            amp = multinom * prod(T[i, j] ** c for i, c in enumerate(k) if c)
            if amp != 0:
                factor.append((k, amp))
        nxt: dict[Occupation, complex] = defaultdict(complex)
        for occ, a in terms.items():
            for k, b in factor:
                nxt[tuple(x + y for x, y in zip(occ, k))] += a * b
        terms = nxt
    return terms


def lift(T: np.ndarray, basis: FockBasis) -> FockOperator:
    """Fock-space operator induced by the transfer matrix `T`.

    Column ``n`` is obtained by writing ``|n>`` as a normalized monomial of
    creation operators on the vacuum, substituting each operator with its
    image under `T` and collecting the coefficients of each output
    monomial. Entries between different photon-number sectors are exactly
    zero.
    """
    T = _check_dims(T, basis)
    U = np.zeros((len(basis), len(basis)), dtype=complex)
    fact = [factorial(k) for k in range(basis.cutoff + 1)]
    for col, n in enumerate(basis.states):
        norm_in = prod(fact[c] for c in n)
        for m, coeff in _expand_column(T, n).items():
            row = basis.index.get(m)
            if row is None:
                continue
            # a^dagger^m |0> = sqrt(m!) |m>
            U[row, col] = coeff * sqrt(prod(fact[c] for c in m) / norm_in)
    return FockOperator(basis, U)


def permanent(A: np.ndarray) -> complex:
    """Permanent of a square matrix by direct sum over permutations."""
    A = np.asarray(A)
    n = A.shape[0]
    if n == 0:
        return 1.0 + 0j
    rows = np.arange(n)
    return complex(sum(np.prod(A[rows, list(p)]) for p in permutations(range(n))))


def _repeat_indices(occ: Occupation) -> list[int]:
    return [i for i, c in enumerate(occ) for _ in range(c)]


def lift_permanent(T: np.ndarray, basis: FockBasis, photon_limit: int = PERMANENT_PHOTON_LIMIT) -> FockOperator:
    """Fock-space operator from permanents of repeated-row/column submatrices.

    ``<m|U|n> = Per(T[m-rows, n-cols]) / sqrt(prod m_i! prod n_j!)`` where
    row ``i`` of `T` is repeated ``m_i`` times and column ``j`` ``n_j``
    times. The permutation sums of each sector are vectorized over all
    entries at once.
    """
    T = _check_dims(T, basis)
    totals = basis.totals()
    if len(basis) and totals.max() > photon_limit:
        raise CapacityError(f"photon sector {totals.max()} exceeds permanent limit {photon_limit}")
    U = np.zeros((len(basis), len(basis)), dtype=complex)
    for k in np.unique(totals):
        pos = np.flatnonzero(totals == k)
        if k == 0:
            U[np.ix_(pos, pos)] = 1.0
            continue
        states = [basis.states[p] for p in pos]
        idx = np.array([_repeat_indices(s) for s in states])  # (s, k)
        norms = np.sqrt([float(prod(factorial(c) for c in s)) for s in states])
        perms = np.array(list(permutations(range(k))))  # (k!, k)
        rows_k = np.arange(k)[None, :]
        per = np.empty((len(states), len(states)), dtype=complex)
        for lo in range(0, len(states), _ROW_CHUNK):
            out_idx = idx[lo : lo + _ROW_CHUNK]
            # sub[a, b, r, c] = T[out_idx[a, r], idx[b, c]]
            sub = T[out_idx[:, None, :, None], idx[None, :, None, :]]
            # sum over sigma of prod_r sub[a, b, r, sigma(r)]
            per[lo : lo + _ROW_CHUNK] = np.prod(sub[:, :, rows_k, perms], axis=-1).sum(axis=-1)
        U[np.ix_(pos, pos)] = per / np.outer(norms, norms)
    return FockOperator(basis, U)

"""Single-particle chains governing the motion of an n-boson cluster.

In the strong-interaction limit at resonance, the cluster propagates
through a single transition channel per bond, so its dynamics reduces to a
tight-binding chain whose hopping strengths repeat with period n:

    t_lam = sqrt((n - lam + 1) * lam)   for lam = 1 .. n-1   (within a cell)
    t_n   = sqrt(n)                                          (between cells)

The chain site l corresponds to the cluster configuration with n+1-lam
bosons on lattice site j and lam-1 on site j+1, where l = (j-1)*n + lam.
A unit cell may start at any of the n inequivalent origins mu; opening the
chain removes one inter-cell link chosen so that complete mu-type cells
remain.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import InvalidMu
from .fock import OPEN, RING


def slinky_amplitudes(n: int) -> list[float]:
    """The n hopping strengths of one period: n-1 intra-cell, then inter-cell.

    n=3 gives [sqrt(3), 2, sqrt(3)]; n=4 gives [2, sqrt(6), sqrt(6), 2];
    n=1 degenerates to the bare single-boson hop [1].
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return [sqrt((n - lam + 1) * lam) for lam in range(1, n)] + [sqrt(n)]


def rotated_period(n: int, mu: int) -> list[float]:
    """Amplitude period starting at bond mu: [t_mu, t_{mu+1}, ..., t_{mu-1}].

    The first n-1 entries are the intra-cell couplings of the mu-type unit
    cell, the last entry is its inter-cell coupling.
    """
    if not 1 <= mu <= n:
        raise InvalidMu(f"unit-cell origin mu={mu} outside [1, {n}]")
    a = slinky_amplitudes(n)
    return a[mu - 1 :] + a[: mu - 1]


@dataclass(frozen=True)
class EffectiveChain:
    """Tight-binding chain for one n-boson cluster.

    amplitudes[i] is the strength of the bond between chain sites i+1 and
    i+2 (1-based); for a ring the last entry closes the loop back to site 1,
    for an open chain there are n*N_cells - 1 entries.  onsite_shift is the
    uniform cluster interaction energy U*n*(n-1)/2, stored but excluded
    from band-centred plots by default.
    """

    n: int
    N_cells: int
    boundary: str
    mu: int
    amplitudes: tuple[float, ...]
    onsite_shift: float = 0.0

    @property
    def sites(self) -> int:
        return self.n * self.N_cells

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "N_cells": self.N_cells,
            "boundary": self.boundary,
            "mu": self.mu,
            "amplitudes": list(self.amplitudes),
            "onsite_shift": self.onsite_shift,
        }


def build_effective_chain(
    n: int, N_cells: int, boundary: str = RING, mu: int = 1, onsite_shift: float = 0.0
) -> EffectiveChain:
    """Construct the cluster chain with N_cells unit cells of type mu.

    Ring: the period [t_1..t_n] is tiled N_cells times (mu only relabels
    sites).  Open: the period is rotated to start at t_mu, tiled, and the
    final inter-cell bond is dropped, leaving N_cells complete mu-type
    cells; this is the termination whose edge content matches the Bloch
    family of the same (n, mu).
    """
    if N_cells < 2:
        raise ValueError(f"need at least 2 unit cells, got {N_cells}")
    if boundary not in (RING, OPEN):
        raise ValueError(f"boundary must be 'ring' or 'open', got {boundary!r}")
    if not 1 <= mu <= n:
        raise InvalidMu(f"unit-cell origin mu={mu} outside [1, {n}]")
    if boundary == RING:
        bonds = slinky_amplitudes(n) * N_cells
    else:
        bonds = (rotated_period(n, mu) * N_cells)[:-1]
    return EffectiveChain(n, N_cells, boundary, mu, tuple(bonds), onsite_shift)


def dense_matrix(chain: EffectiveChain, kappa: float = 1.0) -> np.ndarray:
    """Real symmetric matrix of the chain: -kappa*t on the bonds, shift on the diagonal."""
    L = chain.sites
    h = np.zeros((L, L))
    for i, t in enumerate(chain.amplitudes):
        j = (i + 1) % L
        h[i, j] += -kappa * t
        h[j, i] += -kappa * t
    h[np.diag_indices(L)] += chain.onsite_shift
    return h

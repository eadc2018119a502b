"""Bloch matrices, band structures, and Wilson-loop Zak phases.

For unit-cell origin mu the k-space matrix has the rotated amplitude
period on its first off-diagonal and the inter-cell coupling wrapped onto
the (1, n) entry with phase e^{-ik}.  Zak phases are computed per band as
the discretized Wilson loop

    gamma = -Im ln prod_i <u_i | u_{i+1}>      (u_M identified with u_0),

which is independent of the phase choice of every stored eigenvector.
Bands that become degenerate with a neighbour somewhere on the grid have
no individual Zak phase; they are flagged and excluded rather than fed
into the loop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .effective import EffectiveChain, dense_matrix, rotated_period
from .errors import BandTouching, InvalidMu

TOUCH_TOL = 1e-8
QUANTIZED_TOL = 1e-2


def bloch_matrix(n: int, mu: int, k: float) -> np.ndarray:
    """n x n Hermitian Bloch matrix of the cluster chain at momentum k.

    Couplings are assembled additively, so the n=2 case (where the intra-
    and wrapped inter-cell couplings share an entry) and the n=1 case
    (where the wrap lands on the diagonal, giving 2 cos k) come out right.
    """
    period = rotated_period(n, mu)  # raises InvalidMu
    h = np.zeros((n, n), dtype=complex)
    for nu in range(n - 1):
        h[nu, nu + 1] += period[nu]
        h[nu + 1, nu] += period[nu]
    phase = np.exp(-1j * k)
    h[0, n - 1] += period[n - 1] * phase
    h[n - 1, 0] += period[n - 1] * np.conj(phase)
    return h


@dataclass(frozen=True)
class BlochFamily:
    """A k-parametrized family of Hermitian matrices with n bands."""

    n: int
    mu: int
    evaluator: Callable[[float], np.ndarray]

    def __call__(self, k: float) -> np.ndarray:
        return self.evaluator(k)


def slinky_bloch_family(n: int, mu: int) -> BlochFamily:
    if not 1 <= mu <= n:
        raise InvalidMu(f"unit-cell origin mu={mu} outside [1, {n}]")
    return BlochFamily(n, mu, lambda k: bloch_matrix(n, mu, k))


@dataclass(frozen=True)
class BandStructure:
    """Diagonalized family over a uniform k-grid.

    energies carry the physical sign (-kappa times the Bloch matrix),
    ascending per k.  zak[b] is NaN when band b touches a neighbour on the
    grid; isolated[b] records that flag.  gaps[g] is the indirect gap
    min(band g+1) - max(band g), negative when the bands overlap.
    """

    k_grid: np.ndarray
    energies: np.ndarray       # (M, n)
    eigenvectors: np.ndarray   # (M, n, n), column b of [i] belongs to band b
    zak: np.ndarray            # (n,), NaN for non-isolated bands
    isolated: np.ndarray       # (n,) bool
    gaps: np.ndarray           # (n-1,)

    @property
    def band_count(self) -> int:
        return self.energies.shape[1]

    def quantized(self, band: int, tol: float = QUANTIZED_TOL) -> bool:
        """True if the band's phase lies within tol of 0 or pi."""
        g = zak_phase(self, band)
        return min(abs(g), abs(abs(g) - np.pi)) < tol

    def zak_json(self) -> list[dict]:
        out = []
        for b in range(self.band_count):
            if self.isolated[b]:
                out.append(
                    {"band": b, "phase": float(self.zak[b]), "quantized": self.quantized(b)}
                )
            else:
                out.append({"band": b, "phase": None, "quantized": None})
        return out


def _principal_phase(g: float) -> float:
    """Map an angle into (-pi, pi], sending -pi to +pi."""
    g = (g + np.pi) % (2 * np.pi) - np.pi
    if g <= -np.pi + 1e-12:
        g += 2 * np.pi
    return float(g)


def _wilson_phase(vectors: np.ndarray, band: int) -> float:
    """Loop product of neighbour overlaps for one band; gauge invariant."""
    M = vectors.shape[0]
    prodval = 1.0 + 0j
    for i in range(M):
        u0 = vectors[i][:, band]
        u1 = vectors[(i + 1) % M][:, band]
        prodval *= np.vdot(u0, u1)
    if prodval == 0:
        raise BandTouching(f"vanishing Wilson-loop overlap on band {band}")
    return _principal_phase(-np.angle(prodval))


def band_structure(
    family: BlochFamily,
    grid_size: int = 400,
    kappa: float = 1.0,
    touch_tol: float = TOUCH_TOL,
    compute_zak: bool = True,
) -> BandStructure:
    """Diagonalize -kappa * h(k) on a uniform grid and take Wilson loops.

    Bands separated from both neighbours everywhere on the grid get a Zak
    phase; bands involved in a grid-point degeneracy are flagged and keep
    NaN.  BandTouching is raised only when no band at all survives (e.g.
    the uniform n=2 chain, gapless at the zone folding point).  With
    compute_zak=False the loop step and that check are skipped, which is
    enough for gap bookkeeping.
    """
    if grid_size < 8:
        raise ValueError(f"grid too coarse: {grid_size} < 8")
    ks = 2 * np.pi * np.arange(grid_size) / grid_size
    nb = family.n
    energies = np.empty((grid_size, nb))
    vectors = np.empty((grid_size, nb, nb), dtype=complex)
    for i, k in enumerate(ks):
        h = np.asarray(family(k), dtype=complex)
        evals, evecs = np.linalg.eigh(-kappa * h)
        energies[i] = evals
        vectors[i] = evecs
    if nb > 1:
        direct = np.min(np.diff(energies, axis=1), axis=0)  # (n-1,)
    else:
        direct = np.empty(0)
    isolated = np.ones(nb, dtype=bool)
    for b in range(nb):
        if b > 0 and direct[b - 1] < touch_tol:
            isolated[b] = False
        if b < nb - 1 and direct[b] < touch_tol:
            isolated[b] = False
    zak = np.full(nb, np.nan)
    if compute_zak:
        if not isolated.any():
            raise BandTouching(
                f"all {nb} bands touch a neighbour on the grid (min direct gap "
                f"{direct.min():.2e})"
            )
        for b in range(nb):
            if isolated[b]:
                zak[b] = _wilson_phase(vectors, b)
    gaps = energies.min(axis=0)[1:] - energies.max(axis=0)[:-1]
    return BandStructure(ks, energies, vectors, zak, isolated, gaps)


def zak_phase(band: BandStructure, band_index: int) -> float:
    """Zak phase of one band in (-pi, pi]; BandTouching if undefined."""
    if not band.isolated[band_index]:
        raise BandTouching(f"band {band_index} touches a neighbour; no individual phase")
    return float(band.zak[band_index])


def gap_edges(band: BandStructure, gap_index: int) -> tuple[float, float]:
    """(top of band g, bottom of band g+1); open iff first < second."""
    lower = float(band.energies[:, gap_index].max())
    upper = float(band.energies[:, gap_index + 1].min())
    return lower, upper


def ring_spectrum_matches_bloch(chain: EffectiveChain, kappa: float = 1.0) -> float:
    """Max deviation between ring-chain eigenvalues and folded Bloch bands.

    The ring with N_cells cells samples the Brillouin zone at the N_cells
    discrete momenta; the two spectra must agree as multisets.
    """
    ring = np.sort(np.linalg.eigvalsh(dense_matrix(chain, kappa)))
    fam = slinky_bloch_family(chain.n, chain.mu)
    folded = []
    for m in range(chain.N_cells):
        k = 2 * np.pi * m / chain.N_cells
        folded.extend(np.linalg.eigvalsh(-kappa * fam(k)) + chain.onsite_shift)
    return float(np.abs(ring - np.sort(folded)).max())


def band_csv_rows(band: BandStructure) -> list[list[float]]:
    """Rows [k, E_1, ..., E_n] ready for delimited output."""
    return [[float(k)] + [float(e) for e in row] for k, row in zip(band.k_grid, band.energies)]


def zak_json_text(band: BandStructure) -> str:
    return json.dumps(band.zak_json(), indent=2)

"""Open-chain spectra, edge localization, and the edge boson number N_edge.

Two complementary views of the same edge physics: the single-particle
cluster chain (fast, exact) and the interacting lattice model terminated
by boundary impurities (the observable object).  The impurity pattern that
realizes a mu-type termination is tabulated from the chain construction:
a cutoff c at a boundary site expels configurations with more than c
bosons there, which removes exactly the cluster labels protruding past a
complete mu-type unit cell.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .bloch import band_structure, gap_edges, slinky_bloch_family
from .effective import EffectiveChain, dense_matrix
from .errors import NoEdgeStates, SolverFailure
from .fock import OPEN, Basis, ModelParams, SparseHermitianOperator

DENSE_EIGENSOLVE_CUTOFF = 4000


class EdgeStatesNotProtected(UserWarning):
    """Impurity strength too weak to cleanly expel boundary clusters."""


def chain_cutoffs(n: int, mu: int) -> tuple[int | None, int | None]:
    """Impurity degrees (left, right) realizing the mu-type open chain.

    mu = 1 and mu = 2 need a single impurity (the opposite end terminates
    on a complete cell by itself); interior origins need both.  None means
    no impurity on that side.
    """
    if not 1 <= mu <= n:
        raise ValueError(f"mu={mu} outside [1, {n}]")
    if mu == 1:
        return None, n - 1
    if mu == 2:
        return n - 1, None
    return n - mu + 1, mu - 2


def effective_cell_count(N: int, mu: int) -> int:
    """Unit cells of the surviving cluster chain on an N-site lattice."""
    return N - 1 if mu in (1, 2) else N - 2


def check_impurity_strength(params: ModelParams):
    """Warn when W is not safely above the cluster interaction scale."""
    needed = 2.0 * params.cluster_energy()
    if params.W <= needed:
        warnings.warn(
            f"W={params.W} is not above 2*U*n*(n-1)/2={needed}; boundary "
            "clusters may not be fully expelled",
            EdgeStatesNotProtected,
            stacklevel=2,
        )


def gap_windows_for(n: int, mu: int, kappa: float = 1.0, shift: float = 0.0,
                    grid_size: int = 400) -> list[tuple[float, float]]:
    """Energy windows of the open band gaps, shifted by `shift`.

    Closed or inverted gaps (overlapping bands) are reported as empty
    windows with hi <= lo so callers can skip them uniformly.
    """
    bs = band_structure(slinky_bloch_family(n, mu), grid_size, kappa, compute_zak=False)
    out = []
    for g in range(n - 1):
        lo, hi = gap_edges(bs, g)
        out.append((lo + shift, hi + shift))
    return out


@dataclass(frozen=True)
class SpectrumReport:
    """Full diagonalization of an open cluster chain with edge diagnostics.

    edge_weight[i] is the probability weight of eigenstate i on the first
    and last unit cell (n sites each).  in_gap[i] is the 0-based gap index
    the energy falls into, or -1 for in-band states.
    """

    energies: np.ndarray
    edge_weight: np.ndarray
    in_gap: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    gap_windows: tuple[tuple[float, float], ...] = ()

    def __len__(self) -> int:
        return len(self.energies)


def open_chain_spectrum(chain: EffectiveChain, kappa: float = 1.0,
                        grid_size: int = 400) -> SpectrumReport:
    """Diagonalize an open chain and flag in-gap, edge-weighted states."""
    if chain.boundary != OPEN:
        raise ValueError("open_chain_spectrum needs an open chain")
    energies, vectors = np.linalg.eigh(dense_matrix(chain, kappa))
    weights = np.abs(vectors) ** 2
    n = chain.n
    edge_weight = weights[:n].sum(axis=0) + weights[-n:].sum(axis=0)
    windows = gap_windows_for(chain.n, chain.mu, kappa, chain.onsite_shift, grid_size)
    in_gap = np.full(len(energies), -1, dtype=int)
    for g, (lo, hi) in enumerate(windows):
        if hi <= lo:
            continue
        inside = (energies > lo + 1e-9) & (energies < hi - 1e-9)
        in_gap[inside] = g
    return SpectrumReport(energies, edge_weight, in_gap, vectors, tuple(windows))


@dataclass(frozen=True)
class EdgeNumberCurve:
    """Edge boson number N_edge(E) = sum over edge sites of <n_j>, per eigenstate."""

    energies: np.ndarray
    n_edge: np.ndarray
    edge_width: int
    site_occupations: np.ndarray = field(repr=False)  # (count, N) per-site <n_j>
    eigenvectors: np.ndarray = field(repr=False)
    gap_windows: tuple[tuple[float, float], ...] = ()

    def __len__(self) -> int:
        return len(self.energies)

    def with_gap_windows(self, windows) -> "EdgeNumberCurve":
        return EdgeNumberCurve(
            self.energies, self.n_edge, self.edge_width,
            self.site_occupations, self.eigenvectors, tuple(windows),
        )


def edge_boson_number(
    hamiltonian: SparseHermitianOperator,
    basis: Basis,
    edge_width: int,
    sigma: float | None = None,
    eig_count: int | None = None,
) -> EdgeNumberCurve:
    """N_edge(E) over computed eigenpairs, sorted by energy.

    Dense full diagonalization up to DENSE_EIGENSOLVE_CUTOFF; beyond that
    a shift-invert solve targets `sigma` (normally the cluster interaction
    energy, where the slinky band lives) with `eig_count` pairs.
    """
    N = len(basis.states[0])
    if not 0 < edge_width < N / 2:
        raise ValueError(f"edge width must lie in (0, N/2), got {edge_width}")
    dim = hamiltonian.dimension
    if dim <= DENSE_EIGENSOLVE_CUTOFF:
        energies, vectors = np.linalg.eigh(hamiltonian.dense())
    else:
        if sigma is None:
            raise ValueError("shift-invert eigensolve needs a target energy sigma")
        k = eig_count if eig_count is not None else min(dim - 2, 6 * N)
        try:
            energies, vectors = spla.eigsh(hamiltonian.matrix.tocsc(), k=k, sigma=sigma)
        except (spla.ArpackNoConvergence, RuntimeError) as exc:
            raise SolverFailure(f"shift-invert eigensolve failed: {exc}") from exc
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
    occ = basis.occupation_matrix()
    site_occ = (np.abs(vectors) ** 2).T @ occ
    n_edge = site_occ[:, :edge_width].sum(axis=1) + site_occ[:, -edge_width:].sum(axis=1)
    return EdgeNumberCurve(energies, n_edge, edge_width, site_occ, vectors)


@dataclass(frozen=True)
class EdgePair:
    """A hybridized left/right edge doublet inside one gap.

    left_sign s means (v_lower + s * v_upper)/sqrt(2) is the combination
    localized at the left end; the opposite sign gives the right one.
    None when the report carries no usable spatial profile for the pair.
    """

    lower: int
    upper: int
    gap_index: int
    splitting: float
    left_sign: int | None = None


@dataclass(frozen=True)
class EdgeStateSelection:
    indices: list[int]
    pairs: list[EdgePair]

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def _chain_left_sign(vectors: np.ndarray, a: int, b: int) -> int:
    L = vectors.shape[0]
    half = L // 2
    plus = np.abs((vectors[:, a] + vectors[:, b]) / np.sqrt(2))[:half]
    minus = np.abs((vectors[:, a] - vectors[:, b]) / np.sqrt(2))[:half]
    return 1 if (plus ** 2).sum() >= (minus ** 2).sum() else -1


def select_edge_states(report, threshold: float) -> EdgeStateSelection:
    """In-gap states whose localization measure exceeds `threshold`.

    Accepts a SpectrumReport (measure: edge_weight) or an EdgeNumberCurve
    with gap windows attached (measure: n_edge).  Selected states sharing
    a gap are paired in ascending energy order; on chain reports the
    left/right recombination sign of each doublet is recorded.  Raises
    NoEdgeStates when nothing qualifies.
    """
    if isinstance(report, SpectrumReport):
        measure = report.edge_weight
        in_gap = report.in_gap
    elif isinstance(report, EdgeNumberCurve):
        if not report.gap_windows:
            raise ValueError("curve has no gap windows attached")
        measure = report.n_edge
        in_gap = np.full(len(report), -1, dtype=int)
        for g, (lo, hi) in enumerate(report.gap_windows):
            if hi <= lo:
                continue
            inside = (report.energies > lo) & (report.energies < hi)
            in_gap[inside] = g
    else:
        raise TypeError(f"cannot select edge states from {type(report)!r}")

    selected = [i for i in range(len(measure)) if in_gap[i] >= 0 and measure[i] > threshold]
    if not selected:
        raise NoEdgeStates(f"no in-gap state has localization above {threshold}")
    pairs = []
    for g in sorted({int(in_gap[i]) for i in selected}):
        members = sorted((i for i in selected if in_gap[i] == g),
                         key=lambda i: report.energies[i])
        for a, b in zip(members[::2], members[1::2]):
            splitting = float(report.energies[b] - report.energies[a])
            sign = None
            if isinstance(report, SpectrumReport):
                sign = _chain_left_sign(report.eigenvectors, a, b)
            pairs.append(EdgePair(a, b, g, splitting, sign))
    return EdgeStateSelection(selected, pairs)

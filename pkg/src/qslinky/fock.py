"""Occupation-number bases and the extended Bose-Hubbard Hamiltonian.

Bosons hop on a 1D lattice of N sites with amplitude kappa, repel on-site
with strength U and between nearest neighbours with strength V.  At the
resonance U = V an n-boson cluster confined to one bond behaves as a single
composite particle; the configurations it visits (all n bosons on one site,
or split across one nearest-neighbour bond) are called slinky states here.

Sites and bonds are 1-based throughout the public API, matching the usual
lattice-labelling convention; occupation tuples are plain Python tuples of
length N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, prod, sqrt

import numpy as np
import scipy.sparse as sp

from .errors import DimensionOverflow, NotNormalized

DEFAULT_NONZERO_CAP = 20_000_000

RING = "ring"
OPEN = "open"


@dataclass(frozen=True)
class ModelParams:
    """Parameter set of the extended Bose-Hubbard chain.

    kappa : hopping strength (sets the energy unit, must be > 0)
    U, V  : on-site and nearest-neighbour interaction strengths
    W     : impurity strength for the boundary terms
    N     : number of lattice sites (>= 2)
    n     : total boson number (>= 1)
    boundary     : "ring" or "open"
    left_cutoff  : impurity degree n0 at site 1, or None for no impurity
    right_cutoff : impurity degree n0 at site N, or None
    """

    N: int
    n: int
    kappa: float = 1.0
    U: float = 0.0
    V: float = 0.0
    W: float = 0.0
    boundary: str = RING
    left_cutoff: int | None = None
    right_cutoff: int | None = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need at least 2 sites, got N={self.N}")
        if self.n < 1:
            raise ValueError(f"need at least 1 boson, got n={self.n}")
        if self.kappa <= 0:
            raise ValueError(f"hopping strength must be positive, got {self.kappa}")
        if self.boundary not in (RING, OPEN):
            raise ValueError(f"boundary must be 'ring' or 'open', got {self.boundary!r}")
        for name, cut in (("left_cutoff", self.left_cutoff), ("right_cutoff", self.right_cutoff)):
            if cut is not None and cut < 0:
                raise ValueError(f"{name} must be nonnegative, got {cut}")
        if self.boundary == RING and (self.left_cutoff is not None or self.right_cutoff is not None):
            raise ValueError("impurity cutoffs require open boundary")

    @property
    def resonant(self) -> bool:
        """True iff U == V exactly (the cluster-forming condition)."""
        return self.U == self.V

    @property
    def bonds(self) -> range:
        """0-based left-site indices of the active bonds."""
        return range(self.N) if self.boundary == RING else range(self.N - 1)

    def cluster_energy(self) -> float:
        """Interaction energy U*n*(n-1)/2 of a resonant n-boson cluster."""
        return self.U * self.n * (self.n - 1) / 2


@dataclass(frozen=True)
class Basis:
    """Ordered set of occupation configurations with O(1) reverse lookup."""

    states: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int] = field(repr=False, default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {s: i for i, s in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def lookup(self, occ) -> int:
        return self.index[tuple(occ)]

    def occupation_matrix(self) -> np.ndarray:
        """(dim, N) float array of occupations; row i is states[i]."""
        return np.asarray(self.states, dtype=float)

    def to_json(self) -> dict:
        return {"dimension": len(self.states), "states": [list(s) for s in self.states]}


@dataclass(frozen=True)
class SparseHermitianOperator:
    """Hermitian operator in compressed sparse row form over a Basis."""

    matrix: sp.csr_matrix

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_deviation(self) -> float:
        d = self.matrix - self.matrix.conjugate().T
        return 0.0 if d.nnz == 0 else abs(d).max()

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_json(self) -> dict:
        coo = self.matrix.tocoo()
        entries = [[int(i), int(j), float(v)] for i, j, v in zip(coo.row, coo.col, coo.data)]
        return {"dimension": self.dimension, "entries": entries}


def sector_dimension(N: int, n: int) -> int:
    """Number of ways to place n bosons on N sites (stars and bars)."""
    return comb(n + N - 1, n)


def _check_cap(dim: int, N: int, cap: int):
    # every row holds at most 2 hops per bond plus the diagonal
    estimated = dim * (2 * N + 1)
    if estimated > cap:
        raise DimensionOverflow(
            f"basis of {dim} states needs ~{estimated} stored entries, cap is {cap}"
        )


def enumerate_full_basis(params: ModelParams, max_nonzeros: int = DEFAULT_NONZERO_CAP) -> Basis:
    """All configurations of n bosons on N sites, lexicographically ordered."""
    dim = sector_dimension(params.N, params.n)
    _check_cap(dim, params.N, max_nonzeros)
    states = []

    def fill(prefix, remaining):
        if len(prefix) == params.N - 1:
            states.append(tuple(prefix) + (remaining,))
            return
        for k in range(remaining + 1):
            fill(prefix + [k], remaining - k)

    fill([], params.n)
    states.sort()
    return Basis(tuple(states))


def slinky_occupations(params: ModelParams) -> list[tuple[int, ...]]:
    """Cluster configurations in chain-label order.

    Label l = (j-1)*n + lam puts n+1-lam bosons on site j and lam-1 on
    site j+1.  On a ring, j runs over all N sites (site N+1 wraps to 1);
    on an open chain the labels stop at l = (N-1)*n + 1, the state with
    all n bosons on the last site.  Duplicate configurations (possible
    only for N = 2) are dropped, keeping first occurrence.
    """
    N, n = params.N, params.n
    out, seen = [], set()
    for j in range(1, N + 1):
        for lam in range(1, n + 1):
            on_next = lam - 1
            if on_next > 0:
                if params.boundary == OPEN and j == N:
                    continue
                occ = [0] * N
                occ[j - 1] = n + 1 - lam
                occ[j % N] = on_next
            else:
                occ = [0] * N
                occ[j - 1] = n
            t = tuple(occ)
            if t not in seen:
                seen.add(t)
                out.append(t)
    return out


def single_hop_images(occ: tuple[int, ...], bonds) -> list[tuple[int, ...]]:
    """Configurations reachable from occ by moving one boson along a bond."""
    N = len(occ)
    out = []
    for b in bonds:
        j, j1 = b, (b + 1) % N
        if occ[j] > 0:
            t = list(occ)
            t[j] -= 1
            t[j1] += 1
            out.append(tuple(t))
        if occ[j1] > 0:
            t = list(occ)
            t[j1] -= 1
            t[j] += 1
            out.append(tuple(t))
    return out


def enumerate_truncated_basis(
    params: ModelParams, depth: int = 2, max_nonzeros: int = DEFAULT_NONZERO_CAP
) -> Basis:
    """Slinky manifold plus its hop-distance-`depth` neighbourhood.

    Breadth-first closure: start from every slinky configuration and add
    everything reachable by at most `depth` single-boson hops along the
    active bonds.  Ordering is lexicographic, so the result is a stable
    sub-basis of the full enumeration.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    seeds = slinky_occupations(params)
    seen = set(seeds)
    frontier = seeds
    for _ in range(depth):
        fresh = []
        for occ in frontier:
            for img in single_hop_images(occ, params.bonds):
                if img not in seen:
                    seen.add(img)
                    fresh.append(img)
        frontier = fresh
    states = sorted(seen)
    _check_cap(len(states), params.N, max_nonzeros)
    return Basis(tuple(states))


def impurity_energy(occupation: int, cutoff: int | None, W: float) -> float:
    """Diagonal boundary term W * prod_{lam=0..cutoff} (m - lam) for m bosons.

    The integer product vanishes for m <= cutoff and grows factorially
    beyond, energetically expelling over-occupied boundary configurations.
    """
    if cutoff is None:
        return 0.0
    return W * prod(occupation - lam for lam in range(cutoff + 1))


def build_hamiltonian(params: ModelParams, basis: Basis) -> SparseHermitianOperator:
    """Assemble H = hopping + interactions (+ boundary impurities) over `basis`.

    Hopping carries the bosonic factor sqrt(m_from) * sqrt(m_to + 1); matrix
    elements leading outside the basis are dropped, which projects H onto
    truncated bases.  The result is real symmetric.
    """
    if len(basis) == 0:
        raise ValueError("empty basis")
    N = params.N
    bonds = params.bonds
    dim = len(basis)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for i, occ in enumerate(basis.states):
        e = 0.0
        for m in occ:
            e += 0.5 * params.U * m * (m - 1)
        for b in bonds:
            e += params.V * occ[b] * occ[(b + 1) % N]
        if params.boundary == OPEN:
            e += impurity_energy(occ[0], params.left_cutoff, params.W)
            e += impurity_energy(occ[N - 1], params.right_cutoff, params.W)
        diag[i] = e
        for b in bonds:
            j, j1 = b, (b + 1) % N
            for src, dst in ((j, j1), (j1, j)):
                if occ[src] == 0:
                    continue
                t = list(occ)
                t[src] -= 1
                t[dst] += 1
                target = basis.index.get(tuple(t))
                if target is None:
                    continue
                rows.append(target)
                cols.append(i)
                vals.append(-params.kappa * sqrt(occ[src]) * sqrt(occ[dst] + 1))
    H = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    H = H + sp.diags(diag)
    return SparseHermitianOperator(H.tocsr())


def _check_norm(state: np.ndarray, tol: float = 1e-6):
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state norm {norm} deviates from 1 beyond {tol}")


def number_expectation(state: np.ndarray, basis: Basis, site: int) -> float:
    """<n_site> in `state`; site is 1-based."""
    _check_norm(state)
    weights = np.abs(np.asarray(state)) ** 2
    occs = np.fromiter((occ[site - 1] for occ in basis.states), dtype=float, count=len(basis))
    return float(weights @ occs)


def occupation_profile(state: np.ndarray, basis: Basis) -> np.ndarray:
    """Per-site expectations <n_j>, j = 1..N, as one array."""
    _check_norm(state)
    weights = np.abs(np.asarray(state)) ** 2
    return weights @ basis.occupation_matrix()


def dimer_number_expectation(state: np.ndarray, basis: Basis, bond: int) -> float:
    """<n_j + n_{j+1}> on the 1-based bond j (bond N wraps to site 1)."""
    N = len(basis.states[0])
    right = bond % N + 1
    return number_expectation(state, basis, bond) + number_expectation(state, basis, right)

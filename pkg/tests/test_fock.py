"""Basis enumeration, Hamiltonian assembly, and number observables."""

import numpy as np
import pytest

from qslinky.errors import DimensionOverflow, NotNormalized
from qslinky.fock import (
    Basis,
    ModelParams,
    build_hamiltonian,
    dimer_number_expectation,
    enumerate_full_basis,
    enumerate_truncated_basis,
    number_expectation,
    occupation_profile,
    sector_dimension,
    slinky_occupations,
)


def ring(N, n, **kw):
    return ModelParams(N=N, n=n, **kw)


# ---------------------------------------------------------------- bases

def test_full_basis_counts():
    assert len(enumerate_full_basis(ring(4, 3))) == 20  # C(6,3)
    assert sector_dimension(4, 3) == 20


def test_full_basis_two_sites_one_boson():
    basis = enumerate_full_basis(ring(2, 1))
    assert set(basis.states) == {(1, 0), (0, 1)}
    assert len(basis) == 2


def test_full_basis_all_splittings():
    basis = enumerate_full_basis(ring(2, 4))
    assert basis.states == ((0, 4), (1, 3), (2, 2), (3, 1), (4, 0))


def test_full_basis_ordering_deterministic():
    basis = enumerate_full_basis(ring(5, 2))
    assert list(basis.states) == sorted(basis.states)
    for i, s in enumerate(basis.states):
        assert basis.lookup(s) == i


def test_dimension_overflow():
    with pytest.raises(DimensionOverflow):
        enumerate_full_basis(ring(30, 10), max_nonzeros=1000)


def test_slinky_manifold_count_ring():
    # nN distinct cluster configurations on a ring with N >= 3
    assert len(slinky_occupations(ring(4, 3))) == 12
    assert len(enumerate_truncated_basis(ring(4, 3), depth=0)) == 12


def test_slinky_manifold_single_boson():
    basis = enumerate_truncated_basis(ring(4, 1), depth=0)
    assert len(basis) == 4


def test_slinky_manifold_open_chain():
    params = ModelParams(N=5, n=3, boundary="open")
    # (N-1)*n + 1 labels: one per bond configuration plus the last site
    assert len(slinky_occupations(params)) == (5 - 1) * 3 + 1


def _bfs_depth_counts(params, depth):
    """Independent oracle: breadth-first search on the full hop graph."""
    full = enumerate_full_basis(params)
    from qslinky.fock import single_hop_images

    dist = {s: None for s in full.states}
    frontier = []
    for s in slinky_occupations(params):
        dist[s] = 0
        frontier.append(s)
    d = 0
    while frontier and d < depth:
        nxt = []
        for s in frontier:
            for img in single_hop_images(s, params.bonds):
                if dist[img] is None:
                    dist[img] = d + 1
                    nxt.append(img)
        frontier = nxt
        d += 1
    return sum(1 for v in dist.values() if v is not None)


@pytest.mark.parametrize("depth", [0, 1, 2])
def test_truncated_matches_bfs_oracle(depth):
    params = ring(6, 3)
    expected = _bfs_depth_counts(params, depth)
    assert len(enumerate_truncated_basis(params, depth)) == expected


def test_truncated_is_subset_of_full():
    params = ring(6, 3)
    full = set(enumerate_full_basis(params).states)
    trunc = enumerate_truncated_basis(params, depth=2)
    assert set(trunc.states) <= full


# ------------------------------------------------------- Hamiltonian

def test_cluster_diagonal_two_sites():
    # resonant two-site lattice: (2,1) carries U*1 + V*2 = 3U = U*n(n-1)/2
    params = ring(2, 3, U=4.0, V=4.0)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    i = basis.lookup((2, 1))
    assert H[i, i] == pytest.approx(3 * 4.0, abs=1e-12)


def test_hopping_matrix_element():
    params = ring(2, 3, kappa=1.0)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    i, j = basis.lookup((0, 3)), basis.lookup((1, 2))
    # two-site ring: both bonds connect the same pair of sites
    bond_factor = 2.0 if params.boundary == "ring" else 1.0
    assert H[i, j] == pytest.approx(-np.sqrt(3) * bond_factor, abs=1e-12)


def test_hopping_matrix_element_open():
    params = ModelParams(N=3, n=3, kappa=1.0, boundary="open")
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    i, j = basis.lookup((0, 3, 0)), basis.lookup((1, 2, 0))
    assert H[i, j] == pytest.approx(-np.sqrt(3), abs=1e-12)


def test_impurity_diagonal():
    params = ModelParams(N=4, n=3, boundary="open", W=30.0, left_cutoff=1)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    diag = np.diag(H)
    # W * m * (m-1): 60 for two bosons on site 1, zero for m in {0, 1}
    assert diag[basis.lookup((2, 1, 0, 0))] == pytest.approx(60.0)
    assert diag[basis.lookup((1, 2, 0, 0))] == pytest.approx(0.0)
    assert diag[basis.lookup((0, 3, 0, 0))] == pytest.approx(0.0)
    assert diag[basis.lookup((3, 0, 0, 0))] == pytest.approx(30.0 * 3 * 2)


def test_ring_rejects_cutoffs():
    with pytest.raises(ValueError):
        ModelParams(N=4, n=2, boundary="ring", left_cutoff=1)


def test_hermiticity_random_params():
    rng = np.random.default_rng(7)
    for _ in range(5):
        N = int(rng.integers(3, 7))
        n = int(rng.integers(1, 4))
        boundary = rng.choice(["ring", "open"])
        cuts = (1, 1) if boundary == "open" else (None, None)
        params = ModelParams(N=N, n=n, kappa=float(rng.uniform(0.5, 2)),
                             U=float(rng.uniform(0, 10)), V=float(rng.uniform(0, 10)),
                             W=float(rng.uniform(0, 40)), boundary=boundary,
                             left_cutoff=cuts[0], right_cutoff=cuts[1])
        H = build_hamiltonian(params, enumerate_full_basis(params))
        assert H.hermiticity_deviation() < 1e-12


def test_number_sector_is_preserved():
    params = ring(5, 3)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).matrix.tocoo()
    totals = np.array([sum(s) for s in basis.states])
    assert np.all(totals == 3)
    assert np.all(totals[H.row] == totals[H.col])


def test_ring_translational_symmetry():
    params = ring(5, 3, U=2.0, V=2.0)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    perm = np.array([basis.lookup(s[-1:] + s[:-1]) for s in basis.states])
    assert np.abs(H[np.ix_(perm, perm)] - H).max() < 1e-12


@pytest.mark.parametrize("N,n", [(4, 2), (5, 3), (6, 4), (6, 3)])
def test_resonant_degeneracy_structure(N, n):
    # with kappa -> interactions only: cluster states sit at U*n(n-1)/2,
    # the next distinct level at least U lower
    U = 3.7
    params = ring(N, n, U=U, V=U)
    basis = enumerate_full_basis(params)
    diag = np.array([
        0.5 * U * sum(m * (m - 1) for m in s)
        + U * sum(s[b] * s[(b + 1) % N] for b in range(N))
        for s in basis.states
    ])
    top = U * n * (n - 1) / 2
    assert diag.max() == pytest.approx(top, abs=1e-12)
    cluster = {basis.lookup(s) for s in slinky_occupations(params)}
    at_top = {i for i, e in enumerate(diag) if abs(e - top) < 1e-9}
    assert at_top == cluster
    below = diag[diag < top - 1e-9]
    assert below.max() <= top - U + 1e-9


def test_truncated_equals_restricted_full():
    for boundary, cuts in (("ring", (None, None)), ("open", (1, 1))):
        params = ModelParams(N=6, n=3, U=5.0, V=5.0, W=17.0, boundary=boundary,
                             left_cutoff=cuts[0], right_cutoff=cuts[1])
        full_basis = enumerate_full_basis(params)
        full = build_hamiltonian(params, full_basis).dense()
        trunc_basis = enumerate_truncated_basis(params, depth=2)
        trunc = build_hamiltonian(params, trunc_basis).dense()
        rows = [full_basis.lookup(s) for s in trunc_basis.states]
        assert np.abs(trunc - full[np.ix_(rows, rows)]).max() < 1e-12


# ------------------------------------------------------- observables

def test_number_expectation_fock_state():
    params = ring(4, 3)
    basis = enumerate_full_basis(params)
    state = np.zeros(len(basis))
    state[basis.lookup((0, 3, 0, 0))] = 1.0
    assert number_expectation(state, basis, 2) == pytest.approx(3.0)
    assert number_expectation(state, basis, 1) == pytest.approx(0.0)


def test_number_expectation_superposition():
    params = ring(2, 3)
    basis = enumerate_full_basis(params)
    state = np.zeros(len(basis))
    state[basis.lookup((3, 0))] = 1 / np.sqrt(2)
    state[basis.lookup((0, 3))] = 1 / np.sqrt(2)
    assert number_expectation(state, basis, 1) == pytest.approx(1.5)


def test_number_expectation_eigenstates_sum_to_n():
    params = ring(4, 3, U=2.5, V=2.5)
    basis = enumerate_full_basis(params)
    H = build_hamiltonian(params, basis).dense()
    _, vectors = np.linalg.eigh(H)
    for i in range(vectors.shape[1]):
        profile = occupation_profile(vectors[:, i], basis)
        assert profile.sum() == pytest.approx(3.0, abs=1e-10)


def test_number_expectation_rejects_unnormalized():
    params = ring(2, 1)
    basis = enumerate_full_basis(params)
    with pytest.raises(NotNormalized):
        number_expectation(np.array([1.0, 1.0]), basis, 1)


def test_dimer_expectation_cluster_state():
    params = ring(4, 3)
    basis = enumerate_full_basis(params)
    state = np.zeros(len(basis))
    state[basis.lookup((2, 1, 0, 0))] = 1.0
    assert dimer_number_expectation(state, basis, 1) == pytest.approx(3.0)
    assert dimer_number_expectation(state, basis, 2) == pytest.approx(1.0)


def test_dimer_expectation_ring_sum_counts_twice():
    params = ring(4, 3, U=1.5, V=1.5)
    basis = enumerate_full_basis(params)
    rng = np.random.default_rng(3)
    state = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    state /= np.linalg.norm(state)
    total = sum(dimer_number_expectation(state, basis, b) for b in range(1, 5))
    assert total == pytest.approx(2 * 3, abs=1e-8)


def test_basis_and_operator_json_roundtrip():
    params = ring(3, 2)
    basis = enumerate_full_basis(params)
    dump = basis.to_json()
    assert dump["dimension"] == len(basis)
    assert all(sum(s) == 2 for s in dump["states"])
    H = build_hamiltonian(params, basis)
    op = H.to_json()
    assert op["dimension"] == len(basis)
    dense = np.zeros((len(basis), len(basis)))
    for i, j, v in op["entries"]:
        dense[i, j] = v
    assert np.abs(dense - H.dense()).max() < 1e-12

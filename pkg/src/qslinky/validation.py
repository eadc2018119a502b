"""Cross-module invariant suite behind the `validate` CLI command.

Every check returns a record {name, passed, detail}; the command turns the
list into a machine-readable report.  The Bloch reference table pins the
twelve small-cluster unit-cell matrices entry by entry, independently of
the construction code being checked.
"""

from __future__ import annotations

from math import sqrt

import numpy as np

from . import bloch, effective, fock
from .diagnostics import chain_cutoffs

# (n, mu) -> (intra-cell couplings nu -> nu+1, wrapped inter-cell coupling)
S3, S5, S6, R8 = sqrt(3.0), sqrt(5.0), sqrt(6.0), 2.0 * sqrt(2.0)
BLOCH_REFERENCE = {
    (3, 1): ([S3, 2.0], S3),
    (3, 2): ([2.0, S3], S3),
    (3, 3): ([S3, S3], 2.0),
    (4, 1): ([2.0, S6, S6], 2.0),
    (4, 2): ([S6, S6, 2.0], 2.0),
    (4, 3): ([S6, 2.0, 2.0], S6),
    (4, 4): ([2.0, 2.0, S6], S6),
    (5, 1): ([S5, R8, 3.0, R8], S5),
    (5, 2): ([R8, 3.0, R8, S5], S5),
    (5, 3): ([3.0, R8, S5, S5], R8),
    (5, 4): ([R8, S5, S5, R8], 3.0),
    (5, 5): ([S5, S5, R8, 3.0], R8),
}

AMPLITUDE_REFERENCE = {
    2: [sqrt(2.0), sqrt(2.0)],
    3: [S3, 2.0, S3],
    4: [2.0, S6, S6, 2.0],
    5: [S5, R8, 3.0, R8, S5],
}

CHECK_MOMENTA = (0.0, np.pi / 3.0, np.pi)


def reference_matrix(n: int, mu: int, k: float) -> np.ndarray:
    intra, wrap = BLOCH_REFERENCE[(n, mu)]
    h = np.zeros((n, n), dtype=complex)
    for nu, t in enumerate(intra):
        h[nu, nu + 1] = t
        h[nu + 1, nu] = t
    h[0, n - 1] += wrap * np.exp(-1j * k)
    h[n - 1, 0] += wrap * np.exp(1j * k)
    return h


def check_bloch_reference(tol: float = 1e-12) -> dict:
    worst = 0.0
    for (n, mu), _ in BLOCH_REFERENCE.items():
        for k in CHECK_MOMENTA:
            dev = np.abs(bloch.bloch_matrix(n, mu, k) - reference_matrix(n, mu, k)).max()
            worst = max(worst, float(dev))
    return {"name": "bloch_reference_matrices", "passed": worst < tol,
            "detail": f"max entry deviation {worst:.3e} over 12 matrices x 3 momenta"}


def check_amplitude_law() -> dict:
    ok = True
    for n, ref in AMPLITUDE_REFERENCE.items():
        got = effective.slinky_amplitudes(n)
        ok = ok and len(got) == len(ref) and all(g == r for g, r in zip(got, ref))
    return {"name": "amplitude_law", "passed": ok,
            "detail": "period sequences for n=2..5 match exactly" if ok
            else "period sequence mismatch"}


def check_full_vs_effective(tol_scale: float = 5.0) -> dict:
    """Ring at N=6, n=3, U=V=100: cluster band against the effective ring."""
    params = fock.ModelParams(N=6, n=3, kappa=1.0, U=100.0, V=100.0)
    basis = fock.enumerate_full_basis(params)
    H = fock.build_hamiltonian(params, basis)
    eigvals = np.linalg.eigvalsh(H.dense())
    shift = params.cluster_energy()
    band = np.sort(eigvals[np.argsort(np.abs(eigvals - shift))[:18]])
    chain = effective.build_effective_chain(3, 6, boundary="ring", mu=1,
                                            onsite_shift=shift)
    ref = np.sort(np.linalg.eigvalsh(effective.dense_matrix(chain, params.kappa)))
    dev = float(np.abs(band - ref).max())
    tol = tol_scale * params.kappa ** 2 / params.U
    return {"name": "full_vs_effective_ring", "passed": dev < tol,
            "detail": f"max eigenvalue deviation {dev:.3e} (tol {tol})"}


def check_isospectrality(seed: int, tol: float = 1e-10) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (3, 4, 5):
        for k in rng.uniform(0.0, 2.0 * np.pi, size=3):
            spectra = [np.sort(np.linalg.eigvalsh(bloch.bloch_matrix(n, mu, k)))
                       for mu in range(1, n + 1)]
            for s in spectra[1:]:
                worst = max(worst, float(np.abs(s - spectra[0]).max()))
    return {"name": "isospectrality_across_mu", "passed": worst < tol,
            "detail": f"max eigenvalue spread {worst:.3e} over random momenta"}


def check_zak_gauge_invariance(seed: int, tol: float = 1e-10) -> dict:
    rng = np.random.default_rng(seed)
    bs = bloch.band_structure(bloch.slinky_bloch_family(3, 3), 200)
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=bs.eigenvectors.shape[:1] + (1, 3)))
    redecorated = bloch.BandStructure(
        bs.k_grid, bs.energies, bs.eigenvectors * phases, bs.zak, bs.isolated, bs.gaps
    )
    worst = 0.0
    for b in range(3):
        g0 = bloch.zak_phase(bs, b)
        g1 = bloch._wilson_phase(redecorated.eigenvectors, b)
        worst = max(worst, abs(g1 - g0))
    return {"name": "zak_gauge_invariance", "passed": worst < tol,
            "detail": f"max phase change under random redecoration {worst:.3e}"}


def check_truncated_restriction(tol: float = 1e-12) -> dict:
    """Truncated-basis matrix == full matrix restricted to the same states."""
    worst = 0.0
    for boundary, cuts in (("ring", (None, None)), ("open", (1, 1))):
        params = fock.ModelParams(N=6, n=3, kappa=1.0, U=7.0, V=7.0, W=19.0,
                                  boundary=boundary,
                                  left_cutoff=cuts[0], right_cutoff=cuts[1])
        full_basis = fock.enumerate_full_basis(params)
        full = fock.build_hamiltonian(params, full_basis).dense()
        trunc_basis = fock.enumerate_truncated_basis(params, depth=1)
        trunc = fock.build_hamiltonian(params, trunc_basis).dense()
        rows = [full_basis.lookup(s) for s in trunc_basis.states]
        restricted = full[np.ix_(rows, rows)]
        worst = max(worst, float(np.abs(trunc - restricted).max()))
    return {"name": "truncated_restriction", "passed": worst < tol,
            "detail": f"max entry deviation {worst:.3e} between projection routes"}


def check_hermiticity(tol: float = 1e-12) -> dict:
    params = fock.ModelParams(N=7, n=3, kappa=1.3, U=9.0, V=9.0, W=25.0,
                              boundary="open", left_cutoff=1, right_cutoff=1)
    dev = fock.build_hamiltonian(params, fock.enumerate_truncated_basis(params, 2)
                                 ).hermiticity_deviation()
    return {"name": "hermiticity", "passed": dev < tol,
            "detail": f"max |H - H^dagger| = {dev:.3e}"}


def check_ring_vs_bloch(tol: float = 1e-10) -> dict:
    worst = 0.0
    for n, cells in ((2, 8), (3, 7), (4, 5)):
        chain = effective.build_effective_chain(n, cells, boundary="ring", mu=1)
        worst = max(worst, bloch.ring_spectrum_matches_bloch(chain))
    return {"name": "ring_spectrum_vs_folded_bloch", "passed": worst < tol,
            "detail": f"max deviation {worst:.3e} between ring and folded spectra"}


def check_cutoff_table() -> dict:
    expected = {(3, 3): (1, 1), (4, 3): (2, 1), (5, 4): (2, 2),
                (3, 1): (None, 2), (3, 2): (2, None)}
    ok = all(chain_cutoffs(n, mu) == cuts for (n, mu), cuts in expected.items())
    return {"name": "impurity_cutoff_table", "passed": ok,
            "detail": "boundary patterns reproduce the tabulated chains" if ok
            else "cutoff table mismatch"}


def run_all(seed: int = 0) -> list[dict]:
    return [
        check_bloch_reference(),
        check_amplitude_law(),
        check_full_vs_effective(),
        check_isospectrality(seed),
        check_zak_gauge_invariance(seed),
        check_truncated_restriction(),
        check_hermiticity(),
        check_ring_vs_bloch(),
        check_cutoff_table(),
    ]

"""Command-line driver: bands, edges, nedge, quench, validate.

Every run writes a manifest echoing the fully resolved configuration, the
delimited data, a JSON summary where applicable, and (unless --no-plot) a
rendered figure.  Exit codes: 0 success, 2 configuration/validation
failure, 3 solver obstruction.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bloch, diagnostics, dynamics, effective, fock, plotting, validation
from .errors import QslinkyError, SolverError, ValidationError

FLOAT_FMT = "%.17g"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT % value
    return str(value)


def write_csv(path: Path, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path: Path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_mu(n: int) -> int:
    """Unit-cell origin whose open chain hosts the edge-state physics."""
    return (n + 1) // 2 + 1 if n >= 3 else 1


def resolve_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            merged.update(json.load(fh))
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged.get("mu") is None and "n" in merged:
        merged["mu"] = default_mu(merged["n"])
    return merged


def prepare_outdir(cfg: dict, command: str) -> Path:
    out = Path(cfg["out"] or f"out/{command}")
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "manifest.json", {"command": command, **cfg})
    return out


def cmd_bands(args) -> int:
    defaults = {"n": 3, "mu": None, "grid": 400, "kappa": 1.0, "U": 0.0,
                "include_shift": False, "out": None, "plot": True}
    cfg = resolve_config(args, defaults)
    out = prepare_outdir(cfg, "bands")
    fam = bloch.slinky_bloch_family(cfg["n"], cfg["mu"])
    band = bloch.band_structure(fam, cfg["grid"], cfg["kappa"])
    shift = cfg["U"] * cfg["n"] * (cfg["n"] - 1) / 2 if cfg["include_shift"] else 0.0
    header = ["k"] + [f"E_{b + 1}" for b in range(band.band_count)]
    rows = [[k] + [e + shift for e in row]
            for k, row in zip(band.k_grid, band.energies)]
    write_csv(out / "bands.csv", header, rows)
    write_json(out / "zak.json", band.zak_json())
    if cfg["plot"]:
        plotting.plot_band_structure(band, out / "bands.png",
                                     title=f"n={cfg['n']}, mu={cfg['mu']}")
    defined = [z for z in band.zak_json() if z["phase"] is not None]
    print(f"bands: {band.band_count} bands on {cfg['grid']} momenta; "
          f"{len(defined)} Zak phases defined -> {out}")
    return 0


def cmd_edges(args) -> int:
    defaults = {"n": 3, "mu": None, "cells": 40, "kappa": 1.0, "threshold": 0.15,
                "out": None, "plot": True}
    cfg = resolve_config(args, defaults)
    out = prepare_outdir(cfg, "edges")
    chain = effective.build_effective_chain(cfg["n"], cfg["cells"], boundary="open",
                                            mu=cfg["mu"])
    report = diagnostics.open_chain_spectrum(chain, cfg["kappa"])
    rows = [[i, report.energies[i], report.edge_weight[i],
             int(report.in_gap[i] >= 0), int(report.in_gap[i])]
            for i in range(len(report))]
    write_csv(out / "edge_spectrum.csv",
              ["index", "E", "edgeWeight", "inGap", "gapIndex"], rows)
    try:
        selection = diagnostics.select_edge_states(report, cfg["threshold"])
        summary = {
            "edge_states": [int(i) for i in selection.indices],
            "pairs": [{"lower": p.lower, "upper": p.upper, "gap": p.gap_index,
                       "splitting": p.splitting, "left_sign": p.left_sign}
                      for p in selection.pairs],
        }
        count = len(selection)
    except QslinkyError:
        summary = {"edge_states": [], "pairs": []}
        count = 0
    write_json(out / "edge_states.json", summary)
    if cfg["plot"]:
        plotting.plot_open_spectrum(report, out / "edges.png",
                                    title=f"n={cfg['n']}, mu={cfg['mu']}, "
                                          f"{cfg['cells']} cells")
    print(f"edges: {count} edge states above threshold {cfg['threshold']} -> {out}")
    return 0


def _chain_params(cfg) -> fock.ModelParams:
    left, right = diagnostics.chain_cutoffs(cfg["n"], cfg["mu"])
    return fock.ModelParams(
        N=cfg["N"], n=cfg["n"], kappa=cfg["kappa"], U=cfg["U"], V=cfg["U"],
        W=cfg["W"], boundary="open", left_cutoff=left, right_cutoff=right,
    )


def cmd_nedge(args) -> int:
    defaults = {"n": 3, "mu": None, "N": 40, "U": 13.5, "W": 30.0, "kappa": 1.0,
                "depth": 2, "edge_width": None, "out": None, "plot": True}
    cfg = resolve_config(args, defaults)
    out = prepare_outdir(cfg, "nedge")
    params = _chain_params(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", diagnostics.EdgeStatesNotProtected)
        diagnostics.check_impurity_strength(params)
    for w in caught:
        print(f"warning: EdgeStatesNotProtected: {w.message}", file=sys.stderr)
    basis = fock.enumerate_truncated_basis(params, cfg["depth"])
    H = fock.build_hamiltonian(params, basis)
    width = cfg["edge_width"] or min(4 * cfg["n"], (cfg["N"] - 1) // 2)
    curve = diagnostics.edge_boson_number(H, basis, width,
                                          sigma=params.cluster_energy())
    windows = diagnostics.gap_windows_for(cfg["n"], cfg["mu"], cfg["kappa"],
                                          shift=params.cluster_energy())
    curve = curve.with_gap_windows(windows)
    write_csv(out / "nedge.csv", ["E", "N_edge"],
              zip(curve.energies, curve.n_edge))
    if cfg["plot"]:
        plotting.plot_edge_number_curve(curve, out / "nedge.png",
                                        title=f"n={cfg['n']}, U={cfg['U']}, "
                                              f"N={cfg['N']}")
    peak = float(curve.n_edge.max())
    print(f"nedge: {len(curve)} eigenstates, max N_edge {peak:.3f} "
          f"(edge width {width}) -> {out}")
    return 0


def cmd_quench(args) -> int:
    defaults = {"n": 3, "mu": None, "Nquench": 30, "Nsource": 40, "U": 13.5,
                "W": 30.0, "kappa": 1.0, "depth": 2, "gap": None, "site": None,
                "samples": 2000, "periods": 4.0, "max_loss": 1e-2,
                "out": None, "plot": True}
    cfg = resolve_config(args, defaults)
    out = prepare_outdir(cfg, "quench")
    source = _chain_params({**cfg, "N": cfg["Nsource"]})
    quench = _chain_params({**cfg, "N": cfg["Nquench"]})
    selector = dynamics.EdgeStateSelector(gap=cfg["gap"])
    quench_basis = fock.enumerate_truncated_basis(quench, cfg["depth"])
    prepared = dynamics.prepare_initial_state(
        source, quench, selector, depth=cfg["depth"], max_loss=cfg["max_loss"],
        quench_basis=quench_basis,
    )
    H = fock.build_hamiltonian(quench, quench_basis)
    located = dynamics.locate_interacting_edge_pair(quench, quench_basis, H,
                                                    selector.gap)
    splitting = located.splitting
    if splitting > 1e-12:
        t_max = cfg["periods"] * 2 * np.pi / splitting
    else:
        t_max = 200.0 / cfg["kappa"]
    dt = t_max / cfg["samples"]
    trace = dynamics.evolve(H, quench_basis, prepared.vector, t_max, dt)
    site = cfg["site"] or int(np.argmax(trace.distribution[0]) + 1)
    freq = dynamics.oscillation_frequency(trace, site)
    header = ["t"] + [f"p_{j + 1}" for j in range(trace.site_count)]
    write_csv(out / "quench.csv", header,
              ([t] + list(row) for t, row in zip(trace.times, trace.distribution)))
    summary = {
        "U": cfg["U"],
        "frequency": freq,
        "splitting": splitting,
        "relative_error": abs(freq - splitting) / splitting if splitting else None,
        "site": site,
        "restriction_loss": prepared.weight_loss,
        "source_splitting": prepared.source_splitting,
        "t_max": t_max,
    }
    write_json(out / "summary.json", summary)
    if cfg["plot"]:
        plotting.plot_quench_trace(trace, out / "quench.png",
                                   title=f"n={cfg['n']}, U={cfg['U']}, "
                                         f"N={cfg['Nquench']}")
    print(f"quench: beat frequency {freq:.6g} vs splitting {splitting:.6g} "
          f"at site {site} -> {out}")
    return 0


def cmd_validate(args) -> int:
    defaults = {"seed": 0, "out": None, "plot": True}
    cfg = resolve_config(args, defaults)
    out = prepare_outdir(cfg, "validate")
    results = validation.run_all(cfg["seed"])
    write_json(out / "report.json", results)
    failed = 0
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['name']}: {r['detail']}")
        failed += 0 if r["passed"] else 1
    print(f"validate: {len(results) - failed}/{len(results)} checks passed -> {out}")
    return 0 if failed == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslinky",
        description="Boson-cluster chains in the resonant extended "
                    "Bose-Hubbard model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default out/<command>)")
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--kappa", type=float, help="hopping strength")
        p.add_argument("--seed", type=int, help="seed for randomized checks")
        p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                       default=None, help="render figures (default on)")

    p = sub.add_parser("bands", help="Bloch bands and Zak phases")
    common(p)
    p.add_argument("--n", type=int, help="bosons per cluster")
    p.add_argument("--mu", type=int, help="unit-cell origin in [1, n]")
    p.add_argument("--grid", type=int, help="momentum grid size")
    p.add_argument("--U", type=float, help="interaction (sets the band offset)")
    p.add_argument("--include-shift", dest="include_shift",
                   action=argparse.BooleanOptionalAction, default=None,
                   help="offset bands by the cluster energy U*n*(n-1)/2")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("edges", help="open-chain spectrum and edge states")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--cells", type=int, help="number of unit cells")
    p.add_argument("--threshold", type=float, help="edge-weight selection threshold")
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("nedge", help="edge boson number of the impurity chain")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--N", type=int, help="lattice sites")
    p.add_argument("--U", type=float)
    p.add_argument("--W", type=float, help="impurity strength")
    p.add_argument("--depth", type=int, help="hop-closure depth of the basis")
    p.add_argument("--edge-width", dest="edge_width", type=int,
                   help="edge-region width in sites (default min(4n, (N-1)/2))")
    p.set_defaults(func=cmd_nedge)

    p = sub.add_parser("quench", help="edge-state quench dynamics")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--Nquench", type=int, help="quench lattice sites")
    p.add_argument("--Nsource", type=int, help="source lattice sites")
    p.add_argument("--U", type=float)
    p.add_argument("--W", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--gap", type=int, help="gap index of the doublet (default topmost)")
    p.add_argument("--site", type=int, help="site for frequency extraction")
    p.add_argument("--samples", type=int, help="time samples")
    p.add_argument("--periods", type=float, help="beat periods to cover")
    p.add_argument("--max-loss", dest="max_loss", type=float,
                   help="restriction weight-loss budget")
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser("validate", help="run the cross-module invariant suite")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    except SolverError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

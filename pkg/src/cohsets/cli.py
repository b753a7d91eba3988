"""End-to-end pipelines: generate benchmark data, run CCA/CMD, cluster,
and emit plot-ready CSV artifacts.

Exit codes: 0 success, 2 input error, 3 numerical error.
"""

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, io
from .cca import TrajectoryPairs, evaluate_eigenfunctions, kernel_cca
from .clustering import Embedding, kmeans
from .dynamics import (
    BickleyConfig,
    FiveWellConfig,
    bickley_pairs,
    five_well_pairs,
)
from .errors import InputError, NumericalError, PipelineUsageError
from .kernels import center_gram, gram_matrix, parse_kernel
from .linalg import RegParam
from .modes import SnapshotMatrices, cmd as run_cmd
from .operators import eigenfunctions_to_csv, kernel_pca


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InputError, PipelineUsageError) as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"numerical error: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _write_metadata(outdir, command, params):
    record = {"command": command, "version": __version__, "parameters": params}
    (outdir / "metadata.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def _outdir(path):
    outdir = Path(path)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def _save_labels(outdir, pairs, labels):
    dx = pairs.X.shape[1]
    dy = pairs.Y.shape[1]
    header = ",".join(
        [f"x{i+1}" for i in range(dx)] + [f"y{i+1}" for i in range(dy)] + ["label"]
    )
    np.savetxt(
        outdir / "labels.csv",
        np.hstack([pairs.X, pairs.Y, labels[:, None].astype(float)]),
        delimiter=",",
        header=header,
        comments="",
    )


@click.group()
@click.version_option(__version__)
def main():
    """Coherent set detection via kernel CCA and coherent mode decomposition."""


@main.command()
@click.option("--n", default=10000, show_default=True, help="Number of sample trajectories.")
@click.option("--desk", is_flag=True, help="Desk-scale run (n=2000) unless --n is set explicitly.")
@click.option("--tau", default=40.0, show_default=True, help="Lag time in days.")
@click.option("--kernel", "kernel_spec", default="gaussian:sigma=1.0", show_default=True)
@click.option("--epsilon", default=1e-7, show_default=True)
@click.option("--k", default=10, show_default=True, help="Number of eigenpairs.")
@click.option("--clusters", default=9, show_default=True)
@click.option("--m-funcs", default=8, show_default=True, help="Eigenfunctions fed to k-means.")
@click.option("--seed", default=0, show_default=True)
@click.option("--grid", nargs=2, default=(200, 60), show_default=True,
              help="Evaluation grid resolution (nx ny).")
@click.option("--out", default="bickley_out", show_default=True)
@_handle_errors
def bickley(n, desk, tau, kernel_spec, epsilon, k, clusters, m_funcs, seed, grid, out):
    """Bickley jet pipeline: advect particles, run kernel CCA, cluster."""
    if desk and n == 10000:
        n = 2000
    cfg = BickleyConfig(tau=tau)
    kern = parse_kernel(kernel_spec)
    pairs = bickley_pairs(n, seed, cfg)
    result = kernel_cca(pairs, kern, kern, RegParam(epsilon), k)
    part = kmeans(Embedding(result.f_on_X[:, : min(m_funcs, k)]), clusters, seed=seed)

    outdir = _outdir(out)
    result.save(outdir)
    io.write_pairs_csv(outdir / "pairs.csv", pairs)
    _save_labels(outdir, pairs, part.labels)
    np.savetxt(outdir / "centers.csv", part.centers, delimiter=",")

    nx, ny = grid
    gx = np.linspace(cfg.domain[0][0], cfg.domain[0][1], nx)
    gy = np.linspace(cfg.domain[1][0], cfg.domain[1][1], ny)
    GX, GY = np.meshgrid(gx, gy, indexing="ij")
    grid_points = np.stack([GX.ravel(), GY.ravel()], axis=1)
    values = evaluate_eigenfunctions(result, "f", grid_points)
    header = ",".join(["x1", "x2"] + [f"f{j+1}" for j in range(values.shape[1])])
    np.savetxt(
        outdir / "eigengrid.csv",
        np.hstack([grid_points, values]),
        delimiter=",",
        header=header,
        comments="",
    )
    _write_metadata(outdir, "bickley", {
        "n": n, "tau": tau, "kernel": kern.spec_string(), "epsilon": epsilon,
        "k": k, "clusters": clusters, "m_funcs": m_funcs, "seed": seed,
        "grid": list(grid), "integrator_step": cfg.step,
    })
    click.echo(f"rho: {np.array2string(result.rho, precision=4)}")
    click.echo(f"artifacts written to {outdir}")


@main.command()
@click.option("--n", default=1000, show_default=True)
@click.option("--beta", default=3.0, show_default=True, help="Inverse temperature.")
@click.option("--kernel", "kernel_spec", default="gaussian:sigma=1.0", show_default=True)
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--k", default=10, show_default=True)
@click.option("--clusters", default=5, show_default=True)
@click.option("--m-funcs", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default="wells_out", show_default=True)
@_handle_errors
def wells(n, beta, kernel_spec, epsilon, k, clusters, m_funcs, seed, out):
    """Five-well SDE pipeline: simulate, run kernel CCA, cluster coherent wells."""
    cfg = FiveWellConfig(beta=beta, seed=seed)
    kern = parse_kernel(kernel_spec)
    pairs = five_well_pairs(n, cfg)
    result = kernel_cca(pairs, kern, kern, RegParam(epsilon), k)
    part = kmeans(Embedding(result.f_on_X[:, : min(m_funcs, k)]), clusters, seed=seed)

    outdir = _outdir(out)
    result.save(outdir)
    io.write_pairs_csv(outdir / "pairs.csv", pairs)
    _save_labels(outdir, pairs, part.labels)
    np.savetxt(outdir / "centers.csv", part.centers, delimiter=",")
    _write_metadata(outdir, "wells", {
        "n": n, "beta": beta, "kernel": kern.spec_string(), "epsilon": epsilon,
        "k": k, "clusters": clusters, "m_funcs": m_funcs, "seed": seed,
        "h": cfg.h, "t_span": list(cfg.t_span), "s": cfg.s,
    })
    click.echo(f"rho: {np.array2string(result.rho, precision=4)}")
    click.echo(f"artifacts written to {outdir}")


@main.command("cca-csv")
@click.argument("input_csv", type=click.Path(exists=True))
@click.option("--kernel", "kernel_spec", default="gaussian:sigma=1.0", show_default=True,
              help="Kernel for both views (e.g. haversine:sigma=30,radius=6371).")
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--k", default=10, show_default=True)
@click.option("--centered/--no-centered", default=True, show_default=True)
@click.option("--clusters", default=0, show_default=True,
              help="If > 0, also k-means cluster the dominant eigenfunctions.")
@click.option("--m-funcs", default=6, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default="cca_out", show_default=True)
@_handle_errors
def cca_csv(input_csv, kernel_spec, epsilon, k, centered, clusters, m_funcs, seed, out):
    """Kernel CCA on externally supplied trajectory pairs (CSV)."""
    kern = parse_kernel(kernel_spec)
    pairs = io.read_pairs_csv(input_csv)
    result = kernel_cca(pairs, kern, kern, RegParam(epsilon), k, centered=centered)
    outdir = _outdir(out)
    result.save(outdir)
    if clusters > 0:
        part = kmeans(Embedding(result.f_on_X[:, : min(m_funcs, k)]), clusters, seed=seed)
        _save_labels(outdir, pairs, part.labels)
        np.savetxt(outdir / "centers.csv", part.centers, delimiter=",")
    _write_metadata(outdir, "cca-csv", {
        "input": str(input_csv), "kernel": kern.spec_string(), "epsilon": epsilon,
        "k": k, "centered": centered, "clusters": clusters, "m_funcs": m_funcs,
        "seed": seed,
    })
    click.echo(f"rho: {np.array2string(result.rho, precision=4)}")
    click.echo(f"artifacts written to {outdir}")


@main.command("cmd-file")
@click.argument("input_file", type=click.Path(exists=True))
@click.option("--epsilon", default=0.1, show_default=True)
@click.option("--k", default=6, show_default=True)
@click.option("--centered/--no-centered", default=False, show_default=True)
@click.option("--skip-transient", default=0, show_default=True,
              help="Leading snapshots to drop before sequential pairing.")
@click.option("--out", default="cmd_out", show_default=True)
@_handle_errors
def cmd_file(input_file, epsilon, k, centered, skip_transient, out):
    """Coherent mode decomposition of a snapshot matrix (binary CMDX or CSV)."""
    path = Path(input_file)
    Z = io.read_matrix_csv(path) if path.suffix.lower() == ".csv" else io.read_snapshots(path)
    snap = SnapshotMatrices.from_sequence(Z, skip=skip_transient)
    result = run_cmd(snap, RegParam(epsilon), min(k, snap.n), centered=centered)
    outdir = _outdir(out)
    np.savetxt(outdir / "rho.csv", result.rho[None, :], delimiter=",")
    io.write_snapshots(outdir / "xi_modes.bin", result.xi_modes)
    io.write_snapshots(outdir / "eta_modes.bin", result.eta_modes)
    np.savetxt(outdir / "v.csv", result.v, delimiter=",")
    np.savetxt(outdir / "w.csv", result.w, delimiter=",")
    _write_metadata(outdir, "cmd-file", {
        "input": str(input_file), "epsilon": epsilon, "k": int(min(k, snap.n)),
        "centered": centered, "skip_transient": skip_transient,
        "d": snap.d, "n": snap.n,
    })
    click.echo(f"rho: {np.array2string(result.rho, precision=4)}")
    click.echo(f"artifacts written to {outdir}")


@main.command("kpca-csv")
@click.argument("input_csv", type=click.Path(exists=True))
@click.option("--kernel", "kernel_spec", default="gaussian:sigma=1.0", show_default=True)
@click.option("--k", default=5, show_default=True)
@click.option("--out", default="kpca_out", show_default=True)
@_handle_errors
def kpca_csv(input_csv, kernel_spec, k, out):
    """Kernel PCA of a plain numeric CSV (rows are samples)."""
    kern = parse_kernel(kernel_spec)
    data = io.read_matrix_csv(input_csv)
    funcs = kernel_pca(data, kern, k)
    outdir = _outdir(out)
    eigenfunctions_to_csv(funcs, outdir / "eigenfunctions.csv")
    np.savetxt(
        outdir / "components.csv",
        np.stack([f.train_values for f in funcs], axis=1),
        delimiter=",",
    )
    _write_metadata(outdir, "kpca-csv", {
        "input": str(input_csv), "kernel": kern.spec_string(), "k": k,
    })
    click.echo(f"eigenvalues: {[round(f.eigenvalue, 6) for f in funcs]}")
    click.echo(f"artifacts written to {outdir}")


@main.command()
@click.argument("input_csv", type=click.Path(exists=True))
@click.option("--kernel", "kernel_spec", default="gaussian:sigma=1.0", show_default=True)
@click.option("--centered/--no-centered", default=False, show_default=True)
@click.option("--out", default="gram_out", show_default=True)
@_handle_errors
def gram(input_csv, kernel_spec, centered, out):
    """Debug: write the (optionally centered) Gram matrix of a point CSV."""
    kern = parse_kernel(kernel_spec)
    data = io.read_matrix_csv(input_csv)
    G = gram_matrix(kern, data)
    if centered:
        G = center_gram(G)
    outdir = _outdir(out)
    np.savetxt(outdir / "gram.csv", G.entries, delimiter=",")
    _write_metadata(outdir, "gram", {
        "input": str(input_csv), "kernel": kern.spec_string(), "centered": centered,
    })
    click.echo(
        f"n={G.n} min={G.entries.min():.6g} max={G.entries.max():.6g} "
        f"sym_err={np.max(np.abs(G.entries - G.entries.T)):.3g}"
    )


if __name__ == "__main__":
    main()

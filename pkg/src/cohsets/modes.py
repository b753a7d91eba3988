"""Coherent mode decomposition for high-dimensional snapshot data (d >> n).

Works entirely through the n x n linear-kernel Gram matrices X^T X and
Y^T Y, so cost is governed by the number of snapshots, never the state
dimension (beyond the two d x n mode reconstructions). Gram matrices are not
centered by default; pass centered=True to opt in.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .cca import _gram_cca_core, _RHO_TOL
from .kernels import center_gram


@dataclass
class SnapshotMatrices:
    """Paired snapshot matrices X, Y of shape (d, n)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        if self.X.shape != self.Y.shape:
            raise InputError(
                f"snapshot matrices must have equal shape: {self.X.shape} vs {self.Y.shape}",
                "modes",
            )
        if self.X.shape[1] < 2:
            raise InputError("need at least 2 snapshot pairs", "modes")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise InputError("non-finite snapshot entries", "modes")

    @classmethod
    def from_sequence(cls, Z, skip=0):
        """Sequential pairing X = [z_skip .. z_{m-1}], Y = [z_{skip+1} .. z_m]."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if skip < 0 or Z.shape[1] - skip < 3:
            raise InputError("not enough snapshots after transient skip", "modes")
        return cls(Z[:, skip:-1], Z[:, skip + 1:])

    @property
    def d(self):
        return self.X.shape[0]

    @property
    def n(self):
        return self.X.shape[1]


@dataclass
class CMDResult:
    """Coherent mode pairs (xi, eta) in data space with their correlations."""

    rho: np.ndarray
    xi_modes: np.ndarray
    eta_modes: np.ndarray
    v: np.ndarray
    w: np.ndarray
    eta_defined: np.ndarray = field(default=None)

    @property
    def k(self):
        return self.rho.shape[0]


def solve_cmd_grams(Gxx, Gyy, eff, k, centered=False, eps=1.0):
    """Eigensolve stage of CMD on precomputed Gram matrices (n-sized cost only)."""
    rho, V = _gram_cca_core(Gxx, Gyy, eff, k, variant="i", centered=centered, eps=eps)
    n = Gxx.shape[0]
    w = np.linalg.solve(Gyy + eff * np.eye(n), Gxx @ V)
    defined = rho > _RHO_TOL
    safe = np.where(defined, rho, np.inf)
    w = w / safe
    return rho, V, w, defined


def cmd(snap, reg, k, centered=False):
    """Coherent mode decomposition of paired snapshots.

    Solves (G_XX + n eps I)^-1 (G_YY + n eps I)^-1 G_YY G_XX v = rho^2 v with
    linear-kernel Grams, then lifts to data space: xi = X v, eta = Y w.
    """
    if reg.eps <= 0:
        raise InputError("CMD requires eps > 0", "modes", "cmd")
    if k > snap.n:
        raise InputError(f"requested {k} modes from {snap.n} snapshots", "modes", "cmd")
    Gxx = snap.X.T @ snap.X
    Gyy = snap.Y.T @ snap.Y
    if centered:
        Gxx = center_gram(Gxx).entries
        Gyy = center_gram(Gyy).entries
    eff = reg.effective(snap.n)
    rho, V, w, defined = solve_cmd_grams(Gxx, Gyy, eff, k, centered, reg.eps)
    if not np.all(defined):
        warnings.warn(
            f"{int(np.sum(~defined))} requested modes have numerically zero "
            "correlation; their eta modes are undefined",
            RuntimeWarning,
        )
    xi = snap.X @ V
    eta = snap.Y @ w
    eta[:, ~defined] = np.nan
    return CMDResult(rho=rho, xi_modes=xi, eta_modes=eta, v=V, w=w, eta_defined=defined)


def evaluate_mode(result, which, index, state):
    """Linear evaluation functional of mode `index`: xi^T state or eta^T state."""
    if which not in ("f", "g"):
        raise InputError("which must be 'f' or 'g'", "modes", "evaluate_mode")
    if not 0 <= index < result.k:
        raise InputError(f"mode index {index} out of range", "modes", "evaluate_mode")
    modes = result.xi_modes if which == "f" else result.eta_modes
    state = np.asarray(state, dtype=float).ravel()
    if state.shape[0] != modes.shape[0]:
        raise InputError(
            f"state dimension {state.shape[0]} does not match modes ({modes.shape[0]})",
            "modes",
            "evaluate_mode",
        )
    return float(modes[:, index] @ state)

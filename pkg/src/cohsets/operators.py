"""Finite-rank empirical operators between RKHSs and their eigendecompositions.

An operator is stored as a coefficient matrix B together with the anchor
points that implicitly define the input features (phi over X_data) and output
features (psi over Y_data). Eigenfunctions of the operator are obtained from
auxiliary n x n matrix eigenproblems; two equivalent routes are provided and
cross-checked in the tests.
"""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .kernels import Kernel, center_gram, gram_matrix
from .linalg import RegParam, eig_nonsymmetric, reg_solve, eigh_psd

_EIG_TOL = 1e-12


@dataclass
class EmpiricalOperator:
    """Operator sum_ij B[i,j] psi(y_i) (x) phi(x_j) acting between RKHSs."""

    B: np.ndarray
    X_data: np.ndarray
    Y_data: np.ndarray
    kernel_x: Kernel
    kernel_y: Kernel

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        self.X_data = np.atleast_2d(np.asarray(self.X_data, dtype=float))
        self.Y_data = np.atleast_2d(np.asarray(self.Y_data, dtype=float))
        n = self.B.shape[0]
        if self.B.shape != (n, n):
            raise InputError("coefficient matrix B must be square", "operators")
        if self.X_data.shape[0] != n or self.Y_data.shape[0] != n:
            raise InputError("anchor data must match the size of B", "operators")

    def cross_gram(self):
        """G[i, j] = k(x_i, y_j), the mixed Gram matrix of the two anchor sets."""
        return gram_matrix(self.kernel_x, self.X_data, self.Y_data).entries


@dataclass
class Eigenfunction:
    """A function sum_i coefficients[i] * k(anchors[i], .) with its eigenvalue."""

    eigenvalue: float
    coefficients: np.ndarray
    anchors: np.ndarray
    kernel: Kernel
    train_values: np.ndarray = field(default=None, repr=False)
    # (column means, grand mean) of the raw training Gram when the function
    # lives in the centered feature space (kernel PCA), else None
    center_stats: tuple | None = field(default=None, repr=False)

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        G = gram_matrix(self.kernel, points, self.anchors).entries
        if self.center_stats is not None:
            colmean, grand = self.center_stats
            G = G - G.mean(axis=1, keepdims=True) - colmean[None, :] + grand
        return G @ self.coefficients


def eigenfunctions_to_csv(funcs, path):
    """Write eigenfunctions as rows: index, eigenvalue, coefficient_1..n."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        n = funcs[0].coefficients.shape[0] if funcs else 0
        writer.writerow(["index", "eigenvalue"] + [f"coefficient_{i+1}" for i in range(n)])
        for idx, f in enumerate(funcs):
            writer.writerow(
                [idx, repr(float(f.eigenvalue))] + [repr(float(c)) for c in f.coefficients]
            )


def _top_nonzero(res, k):
    vals = res.eigenvalues
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    keep = np.abs(vals) > max(scale, 1.0) * _EIG_TOL
    idx = np.where(keep)[0][:k]
    if idx.size < k:
        warnings.warn(
            f"only {idx.size} nonzero eigenvalues available (requested {k})",
            RuntimeWarning,
        )
    return vals[idx], res.eigenvectors[:, idx]


def op_eig_variant_i(op, k):
    """Eigenfunctions psi-side: lambda, v with v an eigenvector of B @ G_XY."""
    vals, vecs = _top_nonzero(eig_nonsymmetric(op.B @ op.cross_gram()), k)
    Gyy = gram_matrix(op.kernel_y, op.Y_data).entries
    return [
        Eigenfunction(
            eigenvalue=float(vals[j]),
            coefficients=vecs[:, j],
            anchors=op.Y_data,
            kernel=op.kernel_y,
            train_values=Gyy @ vecs[:, j],
        )
        for j in range(vals.shape[0])
    ]


def op_eig_variant_ii(op, k, reg):
    """Eigenfunctions phi-side: v eigenvector of G_XY @ B, function Phi Gxx^-1 v."""
    vals, vecs = _top_nonzero(eig_nonsymmetric(op.cross_gram() @ op.B), k)
    Gxx = gram_matrix(op.kernel_x, op.X_data).entries
    coeffs = reg_solve(Gxx, reg, vecs)
    return [
        Eigenfunction(
            eigenvalue=float(vals[j]),
            coefficients=coeffs[:, j],
            anchors=op.X_data,
            kernel=op.kernel_x,
            train_values=Gxx @ coeffs[:, j],
        )
        for j in range(vals.shape[0])
    ]


def koopman_estimate(pairs, kern, reg):
    """Kernel Koopman operator estimate Phi (G_XX + n eps I)^-1 Psi^T.

    The output features are anchored on X and the input features on Y, i.e.
    the phi/psi roles are swapped relative to the Perron-Frobenius estimate.
    """
    Gxx = gram_matrix(kern, pairs.X).entries
    n = Gxx.shape[0]
    B = reg_solve(Gxx, reg, np.eye(n))
    return EmpiricalOperator(B=B, X_data=pairs.Y, Y_data=pairs.X, kernel_x=kern, kernel_y=kern)


def perron_frobenius_estimate(pairs, kern, reg, cond_limit=1e12):
    """Kernel Perron-Frobenius estimate Psi (G_XY^-1 (G_XX + n eps I)^-1 G_XY) Phi^T."""
    Gxx = gram_matrix(kern, pairs.X).entries
    Gxy = gram_matrix(kern, pairs.X, pairs.Y).entries
    cond = np.linalg.cond(Gxy)
    if not np.isfinite(cond) or cond > cond_limit:
        raise NumericalError(
            f"G_XY condition number {cond:.2e} exceeds {cond_limit:.0e}; "
            "use the variant-ii eigenproblem route instead of inverting G_XY",
            "operators",
            "perron_frobenius_estimate",
        )
    n = Gxx.shape[0]
    inner = reg_solve(Gxx, reg, Gxy)
    B = np.linalg.solve(Gxy, inner)
    return EmpiricalOperator(B=B, X_data=pairs.X, Y_data=pairs.Y, kernel_x=kern, kernel_y=kern)


def kernel_pca(data, kern, k):
    """Top-k principal components of (1/n) x centered Gram matrix.

    Coefficients follow the 1/sqrt(n lambda) convention so the corresponding
    RKHS functions have unit norm.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n = data.shape[0]
    if n < 2:
        raise InputError("kernel PCA needs at least 2 samples", "operators", "kernel_pca")
    if k > n:
        raise InputError(f"requested {k} components from {n} samples", "operators")
    raw = gram_matrix(kern, data)
    stats = (raw.entries.mean(axis=0), float(raw.entries.mean()))
    G = center_gram(raw).entries
    vals, vecs = eigh_psd(G / n)
    vals, vecs = vals[::-1][:k], vecs[:, ::-1][:, :k]
    funcs = []
    for j in range(k):
        lam = float(vals[j])
        scale = 1.0 / np.sqrt(n * lam) if lam > _EIG_TOL else 0.0
        coeffs = vecs[:, j] * scale
        funcs.append(
            Eigenfunction(
                eigenvalue=lam,
                coefficients=coeffs,
                anchors=data,
                kernel=kern,
                train_values=G @ coeffs,
                center_stats=stats,
            )
        )
    return funcs

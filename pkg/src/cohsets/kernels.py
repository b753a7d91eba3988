"""Positive-definite kernels, Gram matrices, and empirical centering."""

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import InputError, PipelineUsageError

_VARIANTS = ("gaussian", "linear", "poly", "haversine")


@dataclass(frozen=True)
class Kernel:
    """A kernel specification.

    variant: one of 'gaussian', 'linear', 'poly', 'haversine'.
    sigma: bandwidth for gaussian/haversine (haversine: kilometers).
    offset/degree: polynomial kernel (c + <x,y>)^p parameters.
    radius: sphere radius in kilometers for the haversine variant.
    """

    variant: str
    sigma: float = 1.0
    offset: float = 1.0
    degree: int = 2
    radius: float = 6371.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise InputError(f"unknown kernel variant {self.variant!r}", "kernels")
        if self.variant in ("gaussian", "haversine") and not self.sigma > 0:
            raise InputError("bandwidth sigma must be > 0", "kernels")
        if self.variant == "poly":
            if self.offset < 0:
                raise InputError("polynomial offset c must be >= 0", "kernels")
            if int(self.degree) != self.degree or self.degree < 1:
                raise InputError("polynomial degree p must be an integer >= 1", "kernels")
        if self.variant == "haversine" and not self.radius > 0:
            raise InputError("sphere radius must be > 0", "kernels")

    @classmethod
    def gaussian(cls, sigma):
        return cls("gaussian", sigma=sigma)

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def polynomial(cls, offset, degree):
        return cls("poly", offset=offset, degree=degree)

    @classmethod
    def haversine_gaussian(cls, sigma, radius=6371.0):
        return cls("haversine", sigma=sigma, radius=radius)

    def spec_string(self):
        if self.variant == "gaussian":
            return f"gaussian:sigma={self.sigma}"
        if self.variant == "linear":
            return "linear"
        if self.variant == "poly":
            return f"poly:c={self.offset},p={self.degree}"
        return f"haversine:sigma={self.sigma},radius={self.radius}"


def parse_kernel(spec):
    """Parse a CLI/config kernel string, e.g. 'gaussian:sigma=1.0' or 'linear'."""
    name, _, rest = spec.strip().partition(":")
    name = name.strip().lower()
    params = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise InputError(f"malformed kernel parameter {item!r}", "kernels")
            params[key.strip()] = float(value)
    try:
        if name == "gaussian":
            return Kernel.gaussian(params.pop("sigma", 1.0))
        if name == "linear":
            return Kernel.linear()
        if name == "poly":
            return Kernel.polynomial(params.pop("c", 1.0), int(params.pop("p", 2)))
        if name == "haversine":
            return Kernel.haversine_gaussian(
                params.pop("sigma", 30.0), params.pop("radius", 6371.0)
            )
    finally:
        if params:
            raise InputError(
                f"unknown kernel parameters {sorted(params)} for {name!r}", "kernels"
            )
    raise InputError(f"unknown kernel {name!r}", "kernels")


@dataclass
class GramMatrix:
    """An n x n (or rectangular) matrix of pairwise kernel evaluations."""

    entries: np.ndarray
    centered: bool = False
    kernel: Kernel | None = field(default=None, repr=False)

    @property
    def n(self):
        return self.entries.shape[0]


def _as_points(A, name):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        raise InputError(f"empty point set {name}", "kernels", "gram_matrix")
    if not np.all(np.isfinite(A)):
        raise InputError(f"non-finite coordinates in {name}", "kernels")
    return A


def _check_lonlat(A):
    lon, lat = A[:, 0], A[:, 1]
    if np.any(np.abs(lon) > 180.0) or np.any(np.abs(lat) > 90.0):
        raise InputError(
            "haversine points must be (lon, lat) degrees in [-180,180]x[-90,90]",
            "kernels",
        )


def eval_kernel(k, x, y):
    """Evaluate k(x, y) for a single pair of points."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError(
            f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}", "kernels", "eval_kernel"
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InputError("non-finite coordinates", "kernels", "eval_kernel")
    return float(_gram_block(k, x[None, :], y[None, :])[0, 0])


def _gram_block(k, A, B):
    if k.variant == "gaussian":
        return _accel.gaussian_gram(A, B, k.sigma)
    if k.variant == "linear":
        return A @ B.T
    if k.variant == "poly":
        return (k.offset + A @ B.T) ** k.degree
    _check_lonlat(A)
    _check_lonlat(B)
    return _accel.haversine_gram(A, B, k.sigma, k.radius)


def gram_matrix(k, A, B=None):
    """Gram matrix G[i, j] = k(A[i], B[j]); B defaults to A."""
    A = _as_points(A, "A")
    B = A if B is None else _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InputError(
            f"point dimension mismatch: {A.shape[1]} vs {B.shape[1]}",
            "kernels",
            "gram_matrix",
        )
    return GramMatrix(_gram_block(k, A, B), centered=False, kernel=k)


def center_gram(G):
    """Empirically center a Gram matrix: G~ = N0 G N0 with N0 = I - (1/n) 11^T.

    Rejects already-centered input; double centering is idempotent but almost
    always indicates a pipeline bug.
    """
    if isinstance(G, GramMatrix):
        if G.centered:
            raise PipelineUsageError("Gram matrix is already centered", "kernels", "center_gram")
        M, kern = G.entries, G.kernel
    else:
        M, kern = np.asarray(G, dtype=float), None
    if M.shape[0] != M.shape[1]:
        raise InputError("centering requires a square Gram matrix", "kernels", "center_gram")
    row = M.mean(axis=1, keepdims=True)
    col = M.mean(axis=0, keepdims=True)
    centered = M - row - col + M.mean()
    return GramMatrix(centered, centered=True, kernel=kern)

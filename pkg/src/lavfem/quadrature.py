"""Gauss rules on the reference interval [0, 1] and the reference triangle.

The reference triangle is {(xi, eta): xi, eta >= 0, xi + eta <= 1}. Degrees 1
and 2 use the classical symmetric centroid and three-point rules; higher
degrees use the collapsed (Duffy) Gauss-Jacobi x Gauss-Legendre product,
which has strictly positive weights and interior points for every degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

MAX_TRIANGLE_DEGREE = 40

# exactness used for energy assembly unless the caller overrides it, keyed by
# (spatial dim, element degree); 1-D P2 needs 18 for the Mania integrand
DEFAULT_DEGREE = {(1, 1): 12, (1, 2): 20, (2, 1): 10, (2, 2): 14}


class UnsupportedDegreeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    dim: int
    points: np.ndarray  # (nq, dim)
    weights: np.ndarray  # (nq,)
    exact_degree: int

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.weights)

    def integrate(self, func) -> float:
        """Apply the rule on the reference element to a vectorised ``func(points)``."""
        return float(np.dot(self.weights, func(self.points)))


@lru_cache(maxsize=None)
def gauss_interval(exact_degree: int) -> QuadratureRule:
    if exact_degree < 0:
        raise ValueError("exact_degree must be nonnegative")
    npts = max(1, -(-(exact_degree + 1) // 2))
    x, w = leggauss(npts)
    return QuadratureRule(1, (0.5 * (x + 1.0))[:, None], 0.5 * w, exact_degree)


@lru_cache(maxsize=None)
def gauss_triangle(exact_degree: int) -> QuadratureRule:
    if exact_degree < 0:
        raise ValueError("exact_degree must be nonnegative")
    if exact_degree > MAX_TRIANGLE_DEGREE:
        raise UnsupportedDegreeError(
            f"triangle rules available up to degree {MAX_TRIANGLE_DEGREE}, got {exact_degree}"
        )
    if exact_degree <= 1:
        pts = np.array([[1 / 3, 1 / 3]])
        w = np.array([0.5])
    elif exact_degree == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        w = np.full(3, 1 / 6)
    else:
        pts, w = _collapsed_rule(exact_degree)
    return QuadratureRule(2, pts, w, exact_degree)


def _collapsed_rule(degree: int):
    m = (degree + 2) // 2  # 2m - 1 >= degree
    # xi in [0, 1] with weight (1 - xi) from the collapse Jacobian
    r, wr = roots_jacobi(m, 1.0, 0.0)
    xi = 0.5 * (r + 1.0)
    wxi = wr / 4.0
    s, ws = leggauss(m)
    t = 0.5 * (s + 1.0)
    wt = 0.5 * ws
    XI, T = np.meshgrid(xi, t, indexing="ij")
    pts = np.stack([XI.ravel(), (T * (1.0 - XI)).ravel()], axis=1)
    w = np.outer(wxi, wt).ravel()
    return pts, w


def reference_rule(dim: int, exact_degree: int | None = None, fe_degree: int = 1) -> QuadratureRule:
    if exact_degree is None:
        exact_degree = DEFAULT_DEGREE[dim, fe_degree]
    if dim == 1:
        return gauss_interval(exact_degree)
    if dim == 2:
        return gauss_triangle(exact_degree)
    raise ValueError(f"unsupported dimension {dim}")

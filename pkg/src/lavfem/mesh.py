"""Structured meshes: uniform intervals in 1-D and right-triangle splits of rectangles in 2-D."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """Simplicial mesh.

    Attributes:
        dim: spatial dimension, 1 or 2.
        vertices: (nv, dim) coordinates.
        elements: (ne, dim + 1) vertex indices; triangles are counter-clockwise.
        boundary: side label -> sorted array of vertex indices on that side.
            Corner vertices appear under both adjacent labels.
        h: maximum element diameter.
        domain: ((a, b),) in 1-D or ((x0, x1), (y0, y1)) in 2-D.
    """

    dim: int
    vertices: np.ndarray
    elements: np.ndarray
    boundary: dict[str, np.ndarray]
    h: float
    domain: tuple = field(default=())

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_elements(self) -> int:
        return len(self.elements)

    def element_measures(self) -> np.ndarray:
        """Signed element lengths (1-D) or areas (2-D)."""
        v = self.vertices[self.elements]
        if self.dim == 1:
            return v[:, 1, 0] - v[:, 0, 0]
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def element_diameters(self) -> np.ndarray:
        v = self.vertices[self.elements]
        k = self.dim + 1
        diam = np.zeros(self.num_elements)
        for i in range(k):
            for j in range(i + 1, k):
                diam = np.maximum(diam, np.linalg.norm(v[:, i] - v[:, j], axis=1))
        return diam

    def domain_measure(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.domain]))

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique triangle edges and the per-element edge index table.

        Returns ``(edges, element_edges)`` where ``edges`` is (n_edges, 2) with
        sorted vertex pairs and ``element_edges[e, k]`` is the edge opposite to
        local vertex ``k`` of element ``e``.
        """
        if self.dim != 2:
            raise ValueError("edges() is only defined for triangle meshes")
        el = self.elements
        # local edge k is opposite local vertex k
        local = np.stack([el[:, [1, 2]], el[:, [2, 0]], el[:, [0, 1]]], axis=1)
        flat = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(flat, axis=0, return_inverse=True)
        return edges, inverse.reshape(-1, 3)

    def write_text(self, path) -> None:
        """Dump as ``dim nv ne`` header, vertex lines, element lines (0-based)."""
        path = Path(path)
        lines = [f"{self.dim} {self.num_vertices} {self.num_elements}"]
        lines += [" ".join(repr(float(c)) for c in row) for row in self.vertices]
        lines += [" ".join(str(int(i)) for i in row) for row in self.elements]
        path.write_text("\n".join(lines) + "\n")


def build_interval_mesh(a: float, b: float, n: int) -> Mesh:
    """Uniform partition of [a, b] into ``n`` elements."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"number of elements must be a positive integer, got {n!r}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    x = np.linspace(a, b, n + 1)
    elements = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    boundary = {"left": np.array([0]), "right": np.array([n])}
    return Mesh(
        dim=1,
        vertices=x[:, None],
        elements=elements,
        boundary=boundary,
        h=(b - a) / n,
        domain=((float(a), float(b)),),
    )


def build_rect_tri_mesh(x_range, y_range, nx: int, ny: int) -> Mesh:
    """Tensor grid on a rectangle, each cell cut along its bottom-left to top-right diagonal."""
    (x0, x1), (y0, y1) = x_range, y_range
    for n in (nx, ny):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"cell counts must be positive integers, got {n!r}")
    if not (x0 < x1 and y0 < y1):
        raise ValueError(f"degenerate rectangle {x_range} x {y_range}")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    # vertex (i, j) -> j * (nx + 1) + i, x varies fastest
    X, Y = np.meshgrid(xs, ys)
    vertices = np.stack([X.ravel(), Y.ravel()], axis=1)

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    bl = j * (nx + 1) + i
    br = bl + 1
    tl = bl + nx + 1
    tr = tl + 1
    lower = np.stack([bl, br, tr], axis=1)
    upper = np.stack([bl, tr, tl], axis=1)
    elements = np.stack([lower, upper], axis=1).reshape(-1, 3)

    grid = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    boundary = {
        "left": grid[:, 0].copy(),
        "right": grid[:, -1].copy(),
        "bottom": grid[0, :].copy(),
        "top": grid[-1, :].copy(),
    }
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    return Mesh(
        dim=2,
        vertices=vertices,
        elements=elements,
        boundary=boundary,
        h=float(np.hypot(dx, dy)),
        domain=((float(x0), float(x1)), (float(y0), float(y1))),
    )

"""Continuous Lagrange P1/P2 spaces on simplicial meshes.

Local DOF ordering:
    interval P1: (v0, v1); P2: (v0, v1, midpoint)
    triangle P1: (v0, v1, v2); P2: (v0, v1, v2, m0, m1, m2) with m_k the
    midpoint of the edge opposite v_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .mesh import Mesh
from .quadrature import QuadratureRule, reference_rule

DEFAULT_SAMPLES = {1: 50, 2: 10}


def reference_basis(dim: int, degree: int, pts: np.ndarray):
    """Values (nq, nb) and reference gradients (nq, nb, dim) of the local basis."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if dim == 1:
        t = pts[:, 0]
        one = np.ones_like(t)
        if degree == 1:
            vals = np.stack([1 - t, t], axis=1)
            grads = np.stack([-one, one], axis=1)[..., None]
        elif degree == 2:
            vals = np.stack([2 * (t - 0.5) * (t - 1), 2 * t * (t - 0.5), 4 * t * (1 - t)], axis=1)
            grads = np.stack([4 * t - 3, 4 * t - 1, 4 - 8 * t], axis=1)[..., None]
        else:
            raise ValueError(f"unsupported degree {degree}")
        return vals, grads

    if dim != 2:
        raise ValueError(f"unsupported dimension {dim}")
    xi, eta = pts[:, 0], pts[:, 1]
    lam = np.stack([1 - xi - eta, xi, eta], axis=1)
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    if degree == 1:
        return lam, np.broadcast_to(dlam, (len(pts), 3, 2)).copy()
    if degree != 2:
        raise ValueError(f"unsupported degree {degree}")
    vals = np.empty((len(pts), 6))
    grads = np.empty((len(pts), 6, 2))
    for k in range(3):
        vals[:, k] = lam[:, k] * (2 * lam[:, k] - 1)
        grads[:, k] = (4 * lam[:, k] - 1)[:, None] * dlam[k]
        i, j = (k + 1) % 3, (k + 2) % 3
        vals[:, 3 + k] = 4 * lam[:, i] * lam[:, j]
        grads[:, 3 + k] = 4 * (lam[:, i, None] * dlam[j] + lam[:, j, None] * dlam[i])
    return vals, grads


@dataclass(frozen=True, eq=False)
class Tabulation:
    """Basis data at the mapped quadrature points of every element."""

    rule: QuadratureRule
    points: np.ndarray  # (ne, nq, dim) physical points
    weights: np.ndarray  # (ne, nq) rule weight * |det J|
    values: np.ndarray  # (nq, nb)
    grads: np.ndarray  # (ne, nq, nb, dim) physical basis gradients


@dataclass(frozen=True, eq=False)
class FeSpace:
    mesh: Mesh
    degree: int
    dof_coords: np.ndarray
    element_dofs: np.ndarray
    constrained_dofs: np.ndarray
    constrained_values: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def num_dofs(self) -> int:
        return len(self.dof_coords)

    @property
    def free_dofs(self) -> np.ndarray:
        if "free" not in self._cache:
            mask = np.ones(self.num_dofs, dtype=bool)
            mask[self.constrained_dofs] = False
            self._cache["free"] = np.flatnonzero(mask)
        return self._cache["free"]

    def geometry(self):
        """Per-element affine map x = origin + jac @ xi; returns (origin, jac, inv_jac, det)."""
        if "geometry" not in self._cache:
            v = self.mesh.vertices[self.mesh.elements]
            origin = v[:, 0]
            jac = np.stack([v[:, k] - origin for k in range(1, self.dim + 1)], axis=2)
            det = np.linalg.det(jac)
            self._cache["geometry"] = (origin, jac, np.linalg.inv(jac), det)
        return self._cache["geometry"]

    def map_points(self, ref_pts: np.ndarray) -> np.ndarray:
        origin, jac, _, _ = self.geometry()
        return origin[:, None, :] + np.einsum("eij,qj->eqi", jac, ref_pts)

    def tabulate(self, rule: QuadratureRule | None = None) -> Tabulation:
        if rule is None:
            rule = reference_rule(self.dim, fe_degree=self.degree)
        if rule.dim != self.dim:
            raise ValueError(f"rule dimension {rule.dim} does not match mesh dimension {self.dim}")
        key = ("tab", id(rule))
        cached = self._cache.get(key)
        if cached is not None and cached.rule is rule:
            return cached
        _, _, inv_jac, det = self.geometry()
        vals, ref_grads = reference_basis(self.dim, self.degree, rule.points)
        # grad_x = J^{-T} grad_xi
        grads = np.einsum("eji,qbj->eqbi", inv_jac, ref_grads)
        tab = Tabulation(
            rule=rule,
            points=self.map_points(rule.points),
            weights=np.abs(det)[:, None] * rule.weights[None, :],
            values=vals,
            grads=grads,
        )
        self._cache[key] = tab
        return tab

    def function(self, coeffs=None) -> "FeFunction":
        if coeffs is None:
            coeffs = np.zeros(self.num_dofs)
            coeffs[self.constrained_dofs] = self.constrained_values
        return FeFunction(self, np.array(coeffs, dtype=float))


@dataclass(eq=False)
class FeFunction:
    space: FeSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.num_dofs,):
            raise ValueError(
                f"expected {self.space.num_dofs} coefficients, got shape {self.coeffs.shape}"
            )

    def copy(self) -> "FeFunction":
        return FeFunction(self.space, self.coeffs.copy())

    def with_free(self, free_values: np.ndarray) -> "FeFunction":
        c = self.coeffs.copy()
        c[self.space.free_dofs] = free_values
        return FeFunction(self.space, c)

    def is_admissible(self, atol: float = 0.0) -> bool:
        sp = self.space
        return bool(np.all(np.abs(self.coeffs[sp.constrained_dofs] - sp.constrained_values) <= atol))

    def at_quadrature(self, tab: Tabulation):
        """Values (ne, nq) and gradients (ne, nq, dim) at the tabulated points."""
        c = self.coeffs[self.space.element_dofs]
        vals = c @ tab.values.T
        grads = np.einsum("eb,eqbd->eqd", c, tab.grads)
        return vals, grads

    def sample(self, ref_pts: np.ndarray):
        """Values (ne, ns) and physical points (ne, ns, dim) at reference points of each element."""
        vals, _ = reference_basis(self.space.dim, self.space.degree, ref_pts)
        c = self.coeffs[self.space.element_dofs]
        return c @ vals.T, self.space.map_points(np.atleast_2d(ref_pts))

    def write_text(self, path) -> None:
        """One line per DOF: ``x [y] value``."""
        data = np.column_stack([self.space.dof_coords, self.coeffs])
        Path(path).write_text(
            "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in data)
        )


BoundarySpec = Mapping[str, Callable] | Sequence[tuple[str, Callable]]


def build_space(mesh: Mesh, degree: int, bc: BoundarySpec = ()) -> FeSpace:
    """Lagrange space of the given degree with Dirichlet data on labelled sides.

    ``bc`` maps side labels to callables ``g(coords)`` taking an (m, dim)
    array and returning m values. Scalars are accepted as constant data.
    """
    if degree not in (1, 2):
        raise ValueError(f"degree must be 1 or 2, got {degree}")
    items = list(bc.items()) if isinstance(bc, Mapping) else list(bc)
    for label, _ in items:
        if label not in mesh.boundary:
            raise ValueError(f"unknown boundary label {label!r}; mesh has {sorted(mesh.boundary)}")

    nv = mesh.num_vertices
    if degree == 1:
        coords = mesh.vertices.copy()
        element_dofs = mesh.elements.copy()
        side_dofs = {label: mesh.boundary[label] for label, _ in items}
    elif mesh.dim == 1:
        ne = mesh.num_elements
        mids = mesh.vertices[mesh.elements].mean(axis=1)
        coords = np.vstack([mesh.vertices, mids])
        element_dofs = np.column_stack([mesh.elements, nv + np.arange(ne)])
        side_dofs = {label: mesh.boundary[label] for label, _ in items}
    else:
        edges, element_edges = mesh.edges()
        mids = mesh.vertices[edges].mean(axis=1)
        coords = np.vstack([mesh.vertices, mids])
        element_dofs = np.column_stack([mesh.elements, nv + element_edges])
        side_dofs = {}
        for label, _ in items:
            on_side = np.zeros(nv, dtype=bool)
            on_side[mesh.boundary[label]] = True
            edge_ids = np.flatnonzero(on_side[edges[:, 0]] & on_side[edges[:, 1]])
            side_dofs[label] = np.concatenate([mesh.boundary[label], nv + edge_ids])

    prescribed: dict[int, float] = {}
    for label, g in items:
        dofs = side_dofs[label]
        if callable(g):
            vals = np.broadcast_to(np.asarray(g(coords[dofs]), dtype=float), dofs.shape)
        else:
            vals = np.full(dofs.shape, float(g))
        prescribed.update(zip(dofs.tolist(), vals.tolist()))
    cdofs = np.array(sorted(prescribed), dtype=int)
    cvals = np.array([prescribed[i] for i in cdofs.tolist()], dtype=float)
    return FeSpace(mesh, degree, coords, element_dofs, cdofs, cvals)


def interpolate(space: FeSpace, v: Callable) -> FeFunction:
    """Nodal interpolant; ``v`` takes an (m, dim) coordinate array."""
    return FeFunction(space, np.asarray(v(space.dof_coords), dtype=float).reshape(space.num_dofs))


def eval_on_element(f: FeFunction, element: int, rule: QuadratureRule):
    """List of ``(value, gradient, point, weight)`` at the mapped points of one element."""
    ne = f.space.mesh.num_elements
    if not 0 <= element < ne:
        raise IndexError(f"element index {element} out of range [0, {ne})")
    tab = f.space.tabulate(rule)
    vals, grads = f.at_quadrature(tab)
    return [
        (float(vals[element, q]), grads[element, q].copy(), tab.points[element, q].copy(),
         float(tab.weights[element, q]))
        for q in range(len(rule))
    ]


def sample_points(dim: int, k: int) -> np.ndarray:
    """Equispaced reference points: k on [0, 1], or a k-per-side barycentric grid on the triangle."""
    if k < 2:
        raise ValueError("need at least 2 samples per element")
    t = np.linspace(0.0, 1.0, k)
    if dim == 1:
        return t[:, None]
    i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    keep = i + j <= k - 1
    return np.stack([t[i[keep]], t[j[keep]]], axis=1)


def linf_error(f: FeFunction, exact: Callable, samples_per_element: int | None = None) -> float:
    """Max of |f - exact| over equispaced points inside every element.

    The point set is the union of the equispaced grids with 2..k points per
    side, so the estimate never decreases when k grows.
    """
    if samples_per_element is None:
        samples_per_element = DEFAULT_SAMPLES[f.space.dim]
    dim = f.space.dim
    grids = [sample_points(dim, m) for m in range(2, samples_per_element + 1)]
    ref = np.unique(np.round(np.vstack(grids), 14), axis=0)
    vals, pts = f.sample(ref)
    ex = np.asarray(exact(pts.reshape(-1, f.space.dim)), dtype=float).reshape(vals.shape)
    return float(np.max(np.abs(vals - ex)))

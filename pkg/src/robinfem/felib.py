"""Reference-element machinery.

P1/P2 Lagrange bases with gradients on the unit reference triangle,
symmetric triangle quadrature and Gauss edge quadrature, degree-of-freedom
maps for continuous and discontinuous (element-local) spaces, and the
jump/average operators used on mesh edges.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ArityMismatch, InvalidParameter, UnsupportedOrder

__all__ = [
    "QuadratureRule",
    "ReferenceBasis",
    "DofMap",
    "JumpAverage",
    "triangle_rule",
    "edge_rule",
    "reference_basis",
    "build_dofmap",
    "dof_points",
    "interpolate",
    "continuous_embedding",
    "jump_average",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature points and weights.

    Triangle rules carry reference coordinates of shape (n, 2) and weights
    summing to the reference area 1/2.  Edge rules carry parameters of
    shape (n,) on [0, 1] and weights summing to 1.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int  # all polynomials up to this degree integrate exactly


def _tri_rule_from_barycentric(groups, degree):
    pts, wts = [], []
    for bary_groups, w in groups:
        for lam in bary_groups:
            pts.append([lam[1], lam[2]])  # reference coords (xi, eta)
            wts.append(w / 2.0)  # tabulated weights sum to 1; area is 1/2
    return QuadratureRule(np.array(pts), np.array(wts), degree)


def _perm3(a):
    """All distinct permutations of the barycentric triple (1-2a, a, a)."""
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


def _perm6(a, b):
    c = 1.0 - a - b
    return [(c, a, b), (c, b, a), (a, c, b), (a, b, c), (b, c, a), (b, a, c)]


def triangle_rule(order):
    """Symmetric quadrature rule on the unit reference triangle.

    Supported exactness orders: 2 (3 points), 4 (6 points), 6 (12 points).
    """
    if order == 2:
        return _tri_rule_from_barycentric([(_perm3(1.0 / 6.0), 1.0 / 3.0)], 2)
    if order == 4:
        return _tri_rule_from_barycentric(
            [
                (_perm3(0.445948490915965), 0.223381589678011),
                (_perm3(0.091576213509771), 0.109951743655322),
            ],
            4,
        )
    if order == 6:
        return _tri_rule_from_barycentric(
            [
                (_perm3(0.249286745170910), 0.116786275726379),
                (_perm3(0.063089014491502), 0.050844906370207),
                (_perm6(0.310352451033785, 0.053145049844816), 0.082851075618374),
            ],
            6,
        )
    raise UnsupportedOrder(f"no triangle rule of order {order}")


def edge_rule(order):
    """Gauss-Legendre rule on [0, 1]; order in {2, 4, 6, 8} maps to 2..5 points."""
    if order not in (2, 4, 6, 8):
        raise UnsupportedOrder(f"no edge rule of order {order}")
    n = order // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule((x + 1.0) / 2.0, w / 2.0, 2 * n - 1)


@dataclass(frozen=True)
class ReferenceBasis:
    """Lagrange basis of degree 1 or 2 on the reference triangle.

    Node ordering: the three vertices (0,0), (1,0), (0,1); for degree 2
    additionally the edge midpoints (1/2,0), (1/2,1/2), (0,1/2).
    """

    degree: int
    nodes: np.ndarray

    @property
    def n_nodes(self):
        return len(self.nodes)

    def eval(self, points):
        """Basis values at reference points, shape (npoints, n_nodes)."""
        points = np.atleast_2d(points)
        lam = _barycentric(points)
        if self.degree == 1:
            return lam
        l0, l1, l2 = lam[:, 0], lam[:, 1], lam[:, 2]
        return np.column_stack(
            [
                l0 * (2.0 * l0 - 1.0),
                l1 * (2.0 * l1 - 1.0),
                l2 * (2.0 * l2 - 1.0),
                4.0 * l0 * l1,
                4.0 * l1 * l2,
                4.0 * l2 * l0,
            ]
        )

    def eval_grad(self, points):
        """Reference gradients at reference points, shape (npoints, n_nodes, 2)."""
        points = np.atleast_2d(points)
        m = len(points)
        if self.degree == 1:
            return np.broadcast_to(_GRAD_LAMBDA, (m, 3, 2)).copy()
        lam = _barycentric(points)
        grads = np.empty((m, 6, 2))
        for i in range(3):
            grads[:, i, :] = (4.0 * lam[:, i, None] - 1.0) * _GRAD_LAMBDA[i]
        for k, (i, j) in enumerate(((0, 1), (1, 2), (2, 0))):
            grads[:, 3 + k, :] = 4.0 * (
                lam[:, j, None] * _GRAD_LAMBDA[i] + lam[:, i, None] * _GRAD_LAMBDA[j]
            )
        return grads


_GRAD_LAMBDA = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])


def _barycentric(points):
    xi, eta = points[:, 0], points[:, 1]
    return np.column_stack([1.0 - xi - eta, xi, eta])


def reference_basis(degree):
    if degree == 1:
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    elif degree == 2:
        nodes = np.array(
            [
                [0.0, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.5, 0.0],
                [0.5, 0.5],
                [0.0, 0.5],
            ]
        )
    else:
        raise InvalidParameter(f"unsupported polynomial degree {degree}")
    return ReferenceBasis(degree, nodes)


@dataclass(frozen=True)
class DofMap:
    """Global degree-of-freedom numbering.

    Continuous maps share vertex (and, for degree 2, edge-midpoint) dofs
    between neighbouring elements; discontinuous maps give every element
    its own block of 3 or 6 dofs.
    """

    continuous: bool
    degree: int
    n_dofs: int
    cell_dofs: np.ndarray  # (n_triangles, nodes_per_cell)


def _edge_ranks(triangles):
    """Deterministic rank for every undirected cell edge, sorted lexicographically."""
    pairs = set()
    for tri in triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            pairs.add((min(a, b), max(a, b)))
    return {pair: rank for rank, pair in enumerate(sorted(pairs))}


def build_dofmap(mesh, degree, continuous):
    """Build the dof map for P1/P2, continuous or element-local, on a mesh."""
    triangles = np.asarray(mesh.triangles)
    n_tri = len(triangles)
    n_vert = len(mesh.vertices)
    per_cell = 3 if degree == 1 else 6
    if not continuous:
        cell_dofs = np.arange(n_tri * per_cell, dtype=np.int64).reshape(n_tri, per_cell)
        return DofMap(False, degree, n_tri * per_cell, cell_dofs)
    if degree == 1:
        return DofMap(True, 1, n_vert, triangles.astype(np.int64))
    ranks = _edge_ranks(triangles)
    cell_dofs = np.empty((n_tri, 6), dtype=np.int64)
    cell_dofs[:, :3] = triangles
    for t, tri in enumerate(triangles):
        for k, (a, b) in enumerate(((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))):
            cell_dofs[t, 3 + k] = n_vert + ranks[(min(a, b), max(a, b))]
    return DofMap(True, 2, n_vert + len(ranks), cell_dofs)


def dof_points(mesh, dofmap):
    """Physical coordinates of every global dof, shape (n_dofs, 2)."""
    verts = np.asarray(mesh.vertices)
    tris = np.asarray(mesh.triangles)
    basis = reference_basis(dofmap.degree)
    pts = np.empty((dofmap.n_dofs, 2))
    # local node positions under the affine map of each triangle
    va = verts[tris[:, 0]]
    edge1 = verts[tris[:, 1]] - va
    edge2 = verts[tris[:, 2]] - va
    for k, node in enumerate(basis.nodes):
        phys = va + node[0] * edge1 + node[1] * edge2
        pts[dofmap.cell_dofs[:, k]] = phys
    return pts


def interpolate(mesh, dofmap, func):
    """Nodal interpolation of ``func(x, y)`` into the FE space."""
    pts = dof_points(mesh, dofmap)
    return np.asarray(func(pts[:, 0], pts[:, 1]), dtype=float)


def continuous_embedding(dofmap_dg, dofmap_cont):
    """Sparse matrix mapping continuous coefficients into the DG space.

    Row i of the result places the continuous nodal value at the matching
    element-local dof, so E @ x represents the same function in V_DG.
    """
    if dofmap_dg.continuous or not dofmap_cont.continuous:
        raise InvalidParameter("expected a discontinuous and a continuous dof map")
    if dofmap_dg.degree != dofmap_cont.degree:
        raise InvalidParameter("dof maps must share the polynomial degree")
    rows = dofmap_dg.cell_dofs.ravel()
    cols = dofmap_cont.cell_dofs.ravel()
    data = np.ones(len(rows))
    return sp.coo_matrix(
        (data, (rows, cols)), shape=(dofmap_dg.n_dofs, dofmap_cont.n_dofs)
    ).tocsr()


@dataclass(frozen=True)
class JumpAverage:
    """Edge trace operators evaluated at a set of edge points.

    jump    : v1*n1 + v2*n2, shape (m, 2)
    mean    : (v1 + v2)/2, shape (m,)
    grad_jump : grad(v1).n1 + grad(v2).n2, shape (m,)
    grad_mean : (grad(v1) + grad(v2))/2, shape (m, 2)

    On boundary edges the single trace is used: jump = v*nu_h, mean = v,
    grad_mean = grad(v), grad_jump = grad(v).nu_h.
    """

    jump: np.ndarray
    mean: np.ndarray
    grad_jump: np.ndarray
    grad_mean: np.ndarray


def jump_average(edge, values, gradients):
    """Apply the jump/average definitions on an edge.

    ``values`` holds one trace (boundary edge) or two traces (interior
    edge, first the one from edge.element_ids[0]); each trace is an array
    of point values.  ``gradients`` holds the matching (m, 2) gradients.
    """
    values = [np.atleast_1d(np.asarray(v, dtype=float)) for v in values]
    gradients = [np.atleast_2d(np.asarray(g, dtype=float)) for g in gradients]
    arity = len(edge.element_ids)
    if len(values) != arity or len(gradients) != arity:
        raise ArityMismatch(
            f"edge touches {arity} element(s) but got {len(values)} value "
            f"trace(s) and {len(gradients)} gradient trace(s)"
        )
    n1 = edge.normal
    if arity == 1:
        v, g = values[0], gradients[0]
        return JumpAverage(
            jump=v[:, None] * n1,
            mean=v.copy(),
            grad_jump=g @ n1,
            grad_mean=g.copy(),
        )
    v1, v2 = values
    g1, g2 = gradients
    return JumpAverage(
        jump=(v1 - v2)[:, None] * n1,  # n2 = -n1 on a straight edge
        mean=0.5 * (v1 + v2),
        grad_jump=(g1 - g2) @ n1,
        grad_mean=0.5 * (g1 + g2),
    )

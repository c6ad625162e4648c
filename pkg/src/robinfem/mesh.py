"""Triangulations of the computational domain.

The disk is meshed with concentric rings (ring j carries 6j equally spaced
vertices at radius j/N), which keeps the family shape-regular and places
every boundary vertex exactly on the unit circle.  The square is meshed
with a structured grid split into triangles.  Edge topology is built
explicitly: interior edges know their two elements (orientation fixed by
ascending element index), boundary edges their single element and outward
normal.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidParameter, NonManifoldMesh
from .geometry import DomainKind

__all__ = [
    "Edge",
    "Mesh",
    "build_edge_topology",
    "generate_disk_mesh",
    "generate_square_mesh",
    "refinement_sequence",
    "write_mesh",
    "read_mesh",
]


@dataclass(frozen=True)
class Edge:
    """Undirected mesh edge with its incident elements and unit normal.

    For boundary edges the normal points out of the mesh; for interior
    edges it points from element_ids[0] into element_ids[1].
    """

    vertex_ids: tuple
    element_ids: tuple
    h_e: float
    normal: np.ndarray


class Mesh:
    """Immutable triangle mesh with full edge topology."""

    def __init__(self, vertices, triangles, level=0):
        self.vertices = np.array(vertices, dtype=float)
        self.triangles = np.array(triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise InvalidParameter("vertices must have shape (n, 2)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise InvalidParameter("triangles must have shape (n, 3)")
        areas = self.triangle_areas()
        if np.any(areas <= 0.0):
            bad = int(np.argmin(areas))
            raise InvalidParameter(
                f"triangle {bad} has non-positive signed area {areas[bad]:.3e}"
            )
        self.interior_edges, self.boundary_edges = build_edge_topology(
            self.vertices, self.triangles
        )
        all_h = [e.h_e for e in self.interior_edges] + [e.h_e for e in self.boundary_edges]
        self.h_max = max(all_h)  # triangle diameter equals its longest edge
        self.level = level
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        p0 = self.vertices[self.triangles[:, 0]]
        e1 = self.vertices[self.triangles[:, 1]] - p0
        e2 = self.vertices[self.triangles[:, 2]] - p0
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def min_angle_degrees(self):
        """Smallest interior angle over all triangles."""
        v = self.vertices[self.triangles]  # (T, 3, 2)
        angles = np.empty((len(v), 3))
        for k in range(3):
            a = v[:, (k + 1) % 3] - v[:, k]
            b = v[:, (k + 2) % 3] - v[:, k]
            cosang = np.sum(a * b, axis=1) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
            )
            angles[:, k] = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        return float(angles.min())


def build_edge_topology(vertices, triangles):
    """Classify every undirected edge as interior (two elements) or boundary.

    Edges come back sorted by vertex pair, so the result is deterministic
    for a fixed triangle list.  Raises NonManifoldMesh if any vertex pair
    is shared by more than two triangles.
    """
    verts = np.asarray(vertices, dtype=float)
    tris = np.asarray(triangles)
    incident = {}
    for t, tri in enumerate(tris):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(min(a, b)), int(max(a, b)))
            owners = incident.setdefault(key, [])
            owners.append(t)
            if len(owners) > 2:
                raise NonManifoldMesh(
                    f"edge {key} is shared by more than two triangles"
                )
    centroids = verts[tris].mean(axis=1)
    interior, boundary = [], []
    for key in sorted(incident):
        owners = incident[key]
        va, vb = verts[key[0]], verts[key[1]]
        tang = vb - va
        h_e = float(np.hypot(tang[0], tang[1]))
        nrm = np.array([tang[1], -tang[0]]) / h_e
        if len(owners) == 2:
            t0, t1 = sorted(owners)
            if np.dot(nrm, centroids[t1] - centroids[t0]) < 0.0:
                nrm = -nrm
            nrm.setflags(write=False)
            interior.append(Edge(key, (t0, t1), h_e, nrm))
        else:
            t0 = owners[0]
            midpoint = 0.5 * (va + vb)
            if np.dot(nrm, midpoint - centroids[t0]) < 0.0:
                nrm = -nrm
            nrm.setflags(write=False)
            boundary.append(Edge(key, (t0,), h_e, nrm))
    return interior, boundary


def generate_disk_mesh(rings, level=0):
    """Concentric-ring triangulation of the unit disk.

    Ring j in 1..rings holds 6j vertices at radius j/rings; the outermost
    ring lies exactly on the unit circle.  Yields 6*rings**2 triangles.
    """
    if rings < 2:
        raise InvalidParameter(f"need at least 2 rings, got {rings}")
    verts = [(0.0, 0.0)]
    ring_start = [0] * (rings + 1)
    for j in range(1, rings + 1):
        ring_start[j] = len(verts)
        count = 6 * j
        radius = j / rings
        theta = 2.0 * np.pi * np.arange(count) / count
        verts.extend(zip(radius * np.cos(theta), radius * np.sin(theta)))
    tris = []
    first = ring_start[1]
    for m in range(6):
        tris.append((0, first + m, first + (m + 1) % 6))
    for j in range(2, rings + 1):
        si, so = ring_start[j - 1], ring_start[j]
        ni, no = 6 * (j - 1), 6 * j
        for sector in range(6):
            outer = lambda m: so + (sector * j + m) % no
            inner = lambda m: si + (sector * (j - 1) + m) % ni
            for m in range(j):
                tris.append((outer(m), outer(m + 1), inner(m)))
            for m in range(j - 1):
                tris.append((inner(m), outer(m + 1), inner(m + 1)))
    return Mesh(np.array(verts), np.array(tris), level=level)


def generate_square_mesh(n, level=0):
    """n-by-n grid on the unit square, each cell split along its diagonal."""
    if n < 1:
        raise InvalidParameter(f"need at least a 1x1 grid, got {n}")
    coords = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(coords, coords)
    verts = np.column_stack([xx.ravel(), yy.ravel()])
    tris = []
    for cy in range(n):
        for cx in range(n):
            v00 = cy * (n + 1) + cx
            v10, v01 = v00 + 1, v00 + n + 1
            v11 = v01 + 1
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return Mesh(verts, np.array(tris), level=level)


def refinement_sequence(domain, levels):
    """Standard refinement ladder: resolution 4 * 2**level per level."""
    if levels < 2:
        raise InvalidParameter(f"need at least 2 levels, got {levels}")
    meshes = []
    for lvl in range(levels):
        size = 4 * 2**lvl
        if domain.kind is DomainKind.UNIT_DISK:
            meshes.append(generate_disk_mesh(size, level=lvl))
        else:
            meshes.append(generate_square_mesh(size, level=lvl))
    return meshes


def write_mesh(mesh, path):
    """Write the line-oriented text format (17 significant digits)."""
    lines = ["meshfmt 1", f"vertices {mesh.n_vertices}"]
    lines.extend(f"{x:.17g} {y:.17g}" for x, y in mesh.vertices)
    lines.append(f"triangles {mesh.n_triangles}")
    lines.extend(f"{i} {j} {k}" for i, j, k in mesh.triangles)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path):
    """Parse a mesh file; topology is rebuilt, not stored."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"unexpected end of file, expected {what}", line=pos + 1)
        pos += 1
        return lines[pos - 1], pos

    header, lineno = take("header")
    if header.strip() != "meshfmt 1":
        raise FormatError(f"expected 'meshfmt 1', got {header!r}", line=lineno)
    nv = _take_count(take, "vertices")
    verts = np.empty((nv, 2))
    for i in range(nv):
        text, lineno = take("vertex coordinates")
        parts = text.split()
        if len(parts) != 2:
            raise FormatError(f"expected 'x y', got {text!r}", line=lineno)
        try:
            verts[i] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise FormatError(f"bad coordinate in {text!r}", line=lineno) from None
    nt = _take_count(take, "triangles")
    tris = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        text, lineno = take("triangle indices")
        parts = text.split()
        if len(parts) != 3:
            raise FormatError(f"expected 'i j k', got {text!r}", line=lineno)
        try:
            idx = [int(p) for p in parts]
        except ValueError:
            raise FormatError(f"bad vertex index in {text!r}", line=lineno) from None
        for v in idx:
            if not 0 <= v < nv:
                raise FormatError(f"vertex index {v} out of range", line=lineno)
        tris[i] = idx
    while pos < len(lines):
        text, lineno = take("trailing comment")
        if text.strip() and not text.lstrip().startswith("#"):
            raise FormatError(f"unexpected content {text!r}", line=lineno)
    return Mesh(verts, tris)


def _take_count(take, keyword):
    text, lineno = take(f"'{keyword} <count>'")
    parts = text.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise FormatError(f"expected '{keyword} <count>', got {text!r}", line=lineno)
    try:
        count = int(parts[1])
    except ValueError:
        raise FormatError(f"bad count in {text!r}", line=lineno) from None
    if count < 0:
        raise FormatError(f"negative count in {text!r}", line=lineno)
    return count

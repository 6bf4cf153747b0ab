"""Oriented triangle meshes with boundary loops and corner bookkeeping.

A :class:`SurfaceMesh` is the discrete 2-surface every other module works
on: faces are consistently oriented triangles, boundary edges are chained
into closed loops traversed with the surface on the left, and corner
vertices are user-declared boundary vertices where the boundary direction
is allowed to jump.
"""

from collections import defaultdict, deque

import numpy as np

from .errors import MeshError, NonManifoldEdge, NonOrientable, OpenChain


class BoundaryLoop:
    """One closed boundary loop, traversed with the surface on the left.

    Attributes
    ----------
    edges : list of (tail, head)
        Directed boundary edges in traversal order; head of the last edge
        equals tail of the first.
    vertices : list of int
        Edge tails in traversal order (one entry per edge).
    corners : list of int
        Declared corner vertices lying on this loop, in traversal order.
    """

    def __init__(self, edges, corner_set=()):
        self.edges = [tuple(e) for e in edges]
        self.vertices = [e[0] for e in self.edges]
        self.corners = [v for v in self.vertices if v in corner_set]

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return f"BoundaryLoop({len(self.edges)} edges, {len(self.corners)} corners)"


class SurfaceMesh:
    """Immutable oriented triangle mesh with boundary.

    Use :func:`build_mesh` to construct one; the constructor assumes the
    face orientations are already globally consistent.
    """

    def __init__(self, vertices, faces, corner_vertices=(), _validated=False):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] not in (2, 3):
            raise MeshError("vertex positions must be (V, 2) or (V, 3)")
        if self.vertices.shape[1] == 2:
            self.vertices = np.column_stack(
                [self.vertices, np.zeros(len(self.vertices))]
            )
        self.faces = np.asarray(faces, dtype=int)
        if self.faces.size == 0:
            self.faces = self.faces.reshape(0, 3)
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise MeshError("faces must be an (F, 3) index array")
        self.corner_vertices = frozenset(int(c) for c in corner_vertices)
        self.orientation_repaired = False
        if not _validated:
            _check_faces(self.vertices, self.faces)
            self.faces, self.orientation_repaired = _orient_faces(self.faces)
        self._build_edge_tables()
        self.boundary_loops = _extract_boundary_loops(
            self._boundary_directed, self.corner_vertices
        )
        bad = self.corner_vertices - self.boundary_vertices()
        if bad:
            raise MeshError(f"corner vertices not on the boundary: {sorted(bad)}")
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)

    # -- construction helpers -------------------------------------------------

    def _build_edge_tables(self):
        directed = {}
        undirected = defaultdict(list)
        for f, (a, b, c) in enumerate(self.faces):
            for t, h in ((a, b), (b, c), (c, a)):
                t, h = int(t), int(h)
                if (t, h) in directed:
                    raise NonManifoldEdge(f"edge ({t}, {h}) used twice")
                directed[(t, h)] = f
                undirected[(min(t, h), max(t, h))].append(f)
        for e, fs in undirected.items():
            if len(fs) > 2:
                raise NonManifoldEdge(f"edge {e} shared by {len(fs)} faces")
        self._directed_to_face = directed
        self._undirected = dict(undirected)
        self._boundary_directed = [
            e for e in directed if (e[1], e[0]) not in directed
        ]

    # -- basic queries ---------------------------------------------------------

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_faces(self):
        return len(self.faces)

    @property
    def num_edges(self):
        return len(self._undirected)

    def is_closed(self):
        return not self._boundary_directed

    def euler_characteristic(self):
        """V - E + F."""
        return self.num_vertices - self.num_edges + self.num_faces

    def directed_edges(self):
        """All directed face edges as a dict {(tail, head): face index}."""
        return dict(self._directed_to_face)

    def undirected_edges(self):
        """All undirected edges as (min, max) pairs."""
        return list(self._undirected)

    def boundary_edges(self):
        """Directed boundary edges (surface on the left)."""
        return list(self._boundary_directed)

    def boundary_vertices(self):
        return {v for e in self._boundary_directed for v in e}

    def face_edges(self, f):
        a, b, c = (int(v) for v in self.faces[f])
        return [(a, b), (b, c), (c, a)]

    def face_barycenter(self, f):
        return self.vertices[self.faces[f]].mean(axis=0)

    # -- geometry --------------------------------------------------------------

    def face_normals(self, normalize=True):
        """Per-face normal vectors (right-hand rule on the vertex order)."""
        p = self.vertices[self.faces]
        n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        if normalize:
            lengths = np.linalg.norm(n, axis=1, keepdims=True)
            lengths[lengths == 0] = 1.0
            n = n / lengths
        return n

    def vertex_normals(self):
        """Angle-weighted average of incident face normals, normalized."""
        normals = np.zeros_like(self.vertices)
        fn = self.face_normals()
        p = self.vertices
        for f, (a, b, c) in enumerate(self.faces):
            for v, u, w in ((a, b, c), (b, c, a), (c, a, b)):
                e1 = p[u] - p[v]
                e2 = p[w] - p[v]
                n1 = np.linalg.norm(e1)
                n2 = np.linalg.norm(e2)
                if n1 == 0 or n2 == 0:
                    continue
                cosang = np.clip(e1 @ e2 / (n1 * n2), -1.0, 1.0)
                normals[v] += np.arccos(cosang) * fn[f]
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        lengths[lengths == 0] = 1.0
        return normals / lengths

    def vertex_frames(self):
        """Deterministic orthonormal tangent frame (e1, e2) per vertex.

        e1 is the projection of the global x axis onto the tangent plane
        (y axis where that degenerates); e2 = normal x e1.  Planar meshes
        in the xy plane get exactly (x_hat, y_hat).  This frame fixes the
        meaning of a 2-component section as a surface direction, used by
        the boundary-tangency test and the tangent-field generators.
        """
        n = self.vertex_normals()
        e1 = np.tile([1.0, 0.0, 0.0], (len(n), 1)) - n * n[:, [0]]
        bad = np.linalg.norm(e1, axis=1) < 1e-6
        if bad.any():
            alt = np.tile([0.0, 1.0, 0.0], (bad.sum(), 1)) - n[bad] * n[bad, [1]][:, None]
            e1[bad] = alt
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.cross(n, e1)
        return e1, e2

    def max_face_diameter(self):
        p = self.vertices[self.faces]
        d = [np.linalg.norm(p[:, i] - p[:, j], axis=1) for i, j in ((0, 1), (1, 2), (2, 0))]
        return float(np.max(d)) if len(self.faces) else 0.0

    # -- derived meshes ---------------------------------------------------------

    def reversed(self):
        """Mesh with all face orientations flipped (for symmetry tests)."""
        return SurfaceMesh(
            self.vertices.copy(),
            self.faces[:, ::-1].copy(),
            self.corner_vertices,
            _validated=True,
        )

    def submesh(self, face_ids):
        """Submesh of the given faces.

        Returns (mesh, vertex_map, face_list) where vertex_map maps old
        vertex ids to new ones and face_list records the old face ids in
        the new face order.
        """
        face_ids = sorted(int(f) for f in face_ids)
        used = sorted({int(v) for f in face_ids for v in self.faces[f]})
        vmap = {v: i for i, v in enumerate(used)}
        faces = [[vmap[int(v)] for v in self.faces[f]] for f in face_ids]
        corners = {vmap[c] for c in self.corner_vertices if c in vmap}
        sub = SurfaceMesh(self.vertices[used], faces, corners, _validated=True)
        return sub, vmap, face_ids


def _check_faces(vertices, faces):
    if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
        raise MeshError("face indices out of range")
    for f, (a, b, c) in enumerate(faces):
        if a == b or b == c or a == c:
            raise MeshError(f"degenerate face {f}: ({a}, {b}, {c})")


def _orient_faces(faces):
    """One global BFS pass making face orientations consistent.

    Returns (faces, repaired).  Raises NonOrientable if two constraints
    conflict, NonManifoldEdge if an edge touches more than two faces.
    """
    edge_faces = defaultdict(list)
    for f, (a, b, c) in enumerate(faces):
        for t, h in ((a, b), (b, c), (c, a)):
            edge_faces[(min(t, h), max(t, h))].append(f)
    for e, fs in edge_faces.items():
        if len(fs) > 2:
            raise NonManifoldEdge(f"edge {e} shared by {len(fs)} faces")

    flipped = np.zeros(len(faces), dtype=bool)
    assigned = np.zeros(len(faces), dtype=bool)
    repaired = False

    def directed(f):
        a, b, c = faces[f]
        if flipped[f]:
            a, b, c = c, b, a
        return [(a, b), (b, c), (c, a)]

    for start in range(len(faces)):
        if assigned[start]:
            continue
        assigned[start] = True
        queue = deque([start])
        while queue:
            f = queue.popleft()
            mine = directed(f)
            for t, h in mine:
                key = (min(t, h), max(t, h))
                for g in edge_faces[key]:
                    if g == f:
                        continue
                    # consistent orientation: neighbor must use the edge reversed
                    a, b, c = faces[g]
                    g_dirs = {(a, b), (b, c), (c, a)}
                    needs_flip = (t, h) in g_dirs
                    if assigned[g]:
                        if needs_flip != flipped[g]:
                            raise NonOrientable(
                                f"faces {f} and {g} cannot be oriented consistently"
                            )
                        continue
                    flipped[g] = needs_flip
                    repaired = repaired or needs_flip
                    assigned[g] = True
                    queue.append(g)

    if flipped.any():
        faces = faces.copy()
        faces[flipped] = faces[flipped][:, ::-1]
    return faces, repaired


def _extract_boundary_loops(boundary_directed, corner_set):
    if not boundary_directed:
        return []
    nxt = {}
    for t, h in boundary_directed:
        if t in nxt:
            raise OpenChain(f"vertex {t} has two outgoing boundary edges")
        nxt[t] = h
    unvisited = set(nxt)
    loops = []
    while unvisited:
        start = min(unvisited)
        edges = []
        v = start
        while True:
            if v not in nxt:
                raise OpenChain(f"boundary chain breaks at vertex {v}")
            if v not in unvisited:
                raise OpenChain(f"boundary chain revisits vertex {v}")
            unvisited.discard(v)
            w = nxt[v]
            edges.append((v, w))
            v = w
            if v == start:
                break
        loops.append(BoundaryLoop(edges, corner_set))
    return loops


def build_mesh(vertices, faces, corner_ids=()):
    """Build a validated SurfaceMesh.

    Face orientations are repaired by a single global BFS flip pass;
    genuinely non-orientable input raises NonOrientable.  The returned
    mesh records whether any repair happened in ``orientation_repaired``.
    """
    return SurfaceMesh(vertices, faces, corner_ids)


def euler_characteristic(mesh):
    """V - E + F of the mesh."""
    return mesh.euler_characteristic()


def boundary_loops(mesh):
    """Boundary loops with induced orientation (empty for closed meshes)."""
    return list(mesh.boundary_loops)


def subdivide(mesh):
    """One step of uniform 1-to-4 triangle subdivision.

    Edge midpoints become new vertices; declared corners are preserved.
    """
    verts = list(map(tuple, mesh.vertices))
    mid = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in mid:
            mid[key] = len(verts)
            verts.append(tuple((mesh.vertices[a] + mesh.vertices[b]) / 2.0))
        return mid[key]

    faces = []
    for a, b, c in mesh.faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        faces += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    return SurfaceMesh(np.array(verts), faces, mesh.corner_vertices, _validated=True)

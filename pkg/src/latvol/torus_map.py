"""
Combinatorial maps on the torus.

A lattice graph is stored through its quotient by the translation lattice.
Edge ``k`` owns darts ``2k`` (tail at ``u``) and ``2k + 1`` (tail at ``v``);
``twin(d) = d ^ 1``.  Every dart carries the integer displacement of its
head copy relative to its tail copy in the Z^2 cover, so the periodic
planar graph is recovered exactly.

Faces are traced with ``next(d) = rot_next(twin(d))``.  With
counter-clockwise rotations this keeps the traced face on the right-hand
side of every dart.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np


class MapStructureError(ValueError):
    """Malformed map data (dangling dart or vertex references)."""


class NotCellularError(ValueError):
    """Operation needs faces that are disks on the torus."""


class DegenerateRotationError(ValueError):
    """Two darts at a vertex point in the same direction."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True)
class FaceWalk:
    darts: tuple[int, ...]
    total_shift: tuple[int, int]

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def is_disk(self) -> bool:
        return self.total_shift == (0, 0)


@dataclasses.dataclass(frozen=True, eq=False)
class ToroidalMap:
    """Graph cellularly embedded on the torus.

    Parameters
    ----------
    vertex_of : (2E,) int array
        Tail vertex of every dart.
    rot_next : (2E,) int array
        Counter-clockwise successor of each dart around its tail vertex.
    shift : (2E, 2) int array
        Cell displacement of the head copy relative to the tail copy.
    n_vertices : int
    positions : (V, 2) float array, optional
        Vertex coordinates in units of the lattice basis, in ``[0, 1)^2``.
    name : str
    coloring : tuple of str, optional
        Per-vertex tag ("black"/"white") for bipartite maps.
    """

    vertex_of: np.ndarray
    rot_next: np.ndarray
    shift: np.ndarray
    n_vertices: int
    positions: np.ndarray | None = None
    name: str = ""
    coloring: tuple[str, ...] | None = None

    def __post_init__(self):
        vo = _frozen(self.vertex_of, np.int64).reshape(-1)
        rn = _frozen(self.rot_next, np.int64).reshape(-1)
        sh = _frozen(self.shift, np.int64).reshape(-1, 2)
        object.__setattr__(self, "vertex_of", vo)
        object.__setattr__(self, "rot_next", rn)
        object.__setattr__(self, "shift", sh)
        nd = len(vo)
        if nd % 2:
            raise MapStructureError("odd number of darts")
        if len(rn) != nd or len(sh) != nd:
            raise MapStructureError("dart arrays have different lengths")
        if nd and (rn.min() < 0 or rn.max() >= nd):
            raise MapStructureError("rot_next refers to a dart that does not exist")
        if nd and (vo.min() < 0 or vo.max() >= self.n_vertices):
            raise MapStructureError("vertex_of refers to a vertex that does not exist")
        if self.positions is not None:
            pos = _frozen(self.positions, float).reshape(-1, 2)
            if len(pos) != self.n_vertices:
                raise MapStructureError("positions must have one row per vertex")
            object.__setattr__(self, "positions", pos)
        if self.coloring is not None:
            object.__setattr__(self, "coloring", tuple(self.coloring))

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def n_darts(self) -> int:
        return len(self.vertex_of)

    @property
    def n_edges(self) -> int:
        return len(self.vertex_of) // 2

    @staticmethod
    def twin(d: int) -> int:
        return d ^ 1

    def head(self, d: int) -> int:
        return int(self.vertex_of[d ^ 1])

    @functools.cached_property
    def rot_prev(self) -> np.ndarray:
        inv = np.empty_like(self.rot_next)
        inv[self.rot_next] = np.arange(self.n_darts)
        inv.setflags(write=False)
        return inv

    @functools.cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.vertex_of, minlength=self.n_vertices)

    def edges(self) -> list[tuple[int, int, tuple[int, int]]]:
        """``(u, v, shift)`` for every edge, in edge order."""
        out = []
        for k in range(self.n_edges):
            a, b = self.shift[2 * k]
            out.append((int(self.vertex_of[2 * k]), int(self.vertex_of[2 * k + 1]), (int(a), int(b))))
        return out

    def darts_at(self, v: int) -> list[int]:
        """Darts with tail ``v`` in counter-clockwise order."""
        start = int(np.flatnonzero(self.vertex_of == v)[0])
        out = [start]
        d = int(self.rot_next[start])
        while d != start:
            out.append(d)
            d = int(self.rot_next[d])
        return out

    def face_next(self, d: int) -> int:
        return int(self.rot_next[d ^ 1])

    # ------------------------------------------------------------------
    # faces

    @functools.cached_property
    def _face_data(self):
        nd = self.n_darts
        face_of = np.full(nd, -1, dtype=np.int64)
        walks = []
        for start in range(nd):
            if face_of[start] >= 0:
                continue
            fid = len(walks)
            darts = []
            total = np.zeros(2, dtype=np.int64)
            d = start
            while face_of[d] < 0:
                face_of[d] = fid
                darts.append(d)
                total += self.shift[d]
                d = int(self.rot_next[d ^ 1])
            if d != start:
                raise MapStructureError("rot_next is not a permutation; faces are ill-defined")
            walks.append(FaceWalk(tuple(darts), (int(total[0]), int(total[1]))))
        face_of.setflags(write=False)
        return walks, face_of

    @property
    def face_of(self) -> np.ndarray:
        return self._face_data[1]

    @property
    def n_faces(self) -> int:
        return len(self._face_data[0])

    @functools.cached_property
    def face_offsets(self) -> np.ndarray:
        """Cell of each dart's tail inside the canonical lift of its face.

        The lift of a face puts the tail of its smallest dart in cell (0, 0)
        and walks the boundary accumulating shifts.
        """
        off = np.zeros((self.n_darts, 2), dtype=np.int64)
        for walk in self._face_data[0]:
            cur = np.zeros(2, dtype=np.int64)
            for d in walk.darts:
                off[d] = cur
                cur = cur + self.shift[d]
        off.setflags(write=False)
        return off

    def face_centroid(self, f: int) -> np.ndarray:
        """Mean of the lifted corner positions of face ``f`` (lattice units)."""
        walk = self._face_data[0][f]
        pts = [self.positions[self.vertex_of[d]] + self.face_offsets[d] for d in walk.darts]
        return np.mean(pts, axis=0)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def from_edges(
        cls,
        n_vertices: int,
        edges: Sequence[tuple[int, int, Sequence[int]]],
        rotation: dict[int, Sequence[int]] | None = None,
        positions=None,
        name: str = "",
        coloring=None,
    ) -> "ToroidalMap":
        """Build a map from an edge list.

        ``rotation`` maps each vertex to its darts in counter-clockwise
        order.  When omitted, the order is derived from ``positions`` by
        sorting dart directions by angle.
        """
        ne = len(edges)
        vertex_of = np.empty(2 * ne, dtype=np.int64)
        shift = np.empty((2 * ne, 2), dtype=np.int64)
        for k, (u, v, s) in enumerate(edges):
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise MapStructureError(f"edge {k} refers to a missing vertex")
            vertex_of[2 * k], vertex_of[2 * k + 1] = u, v
            shift[2 * k] = s
            shift[2 * k + 1] = (-s[0], -s[1])
        if rotation is None:
            if positions is None:
                raise MapStructureError("need either a rotation or vertex positions")
            rotation = rotation_from_positions(np.asarray(positions, float), vertex_of, shift, n_vertices)
        rot_next = np.full(2 * ne, -1, dtype=np.int64)
        for v, cyc in rotation.items():
            cyc = list(cyc)
            for i, d in enumerate(cyc):
                if not 0 <= d < 2 * ne:
                    raise MapStructureError(f"rotation at vertex {v} names missing dart {d}")
                rot_next[d] = cyc[(i + 1) % len(cyc)]
        if (rot_next < 0).any():
            missing = np.flatnonzero(rot_next < 0).tolist()
            raise MapStructureError(f"darts {missing} missing from the rotation")
        return cls(vertex_of, rot_next, shift, n_vertices, positions=positions, name=name, coloring=coloring)

    def renamed(self, name: str) -> "ToroidalMap":
        return dataclasses.replace(self, name=name)

    def with_positions(self, positions) -> "ToroidalMap":
        """Same map with new vertex coordinates; shifts are re-based so
        coordinates land in ``[0, 1)^2``."""
        pos = np.asarray(positions, float).reshape(-1, 2)
        cell = np.floor(pos + 1e-12).astype(np.int64)
        pos = pos - cell
        sh = self.shift - cell[self.vertex_of] + cell[self.vertex_of[np.arange(self.n_darts) ^ 1]]
        return dataclasses.replace(self, shift=sh, positions=pos)


def rotation_from_positions(positions, vertex_of, shift, n_vertices) -> dict[int, list[int]]:
    """Counter-clockwise dart order at each vertex from straight-line geometry."""
    positions = np.asarray(positions, float)
    heads = vertex_of[np.arange(len(vertex_of)) ^ 1]
    vec = positions[heads] + shift - positions[vertex_of]
    ang = np.arctan2(vec[:, 1], vec[:, 0])
    rotation = {}
    for v in range(n_vertices):
        ds = np.flatnonzero(vertex_of == v)
        order = ds[np.argsort(ang[ds], kind="stable")]
        a = np.sort(ang[ds])
        if len(a) > 1:
            gaps = np.diff(np.concatenate([a, [a[0] + 2 * math.pi]]))
            if gaps.min() < 1e-9:
                raise DegenerateRotationError(f"two darts at vertex {v} have the same direction")
        rotation[v] = [int(d) for d in order]
    return rotation


# ----------------------------------------------------------------------
# validation


@dataclasses.dataclass
class Diagnostics:
    checks: dict[str, bool] = dataclasses.field(default_factory=dict)
    messages: list[str] = dataclasses.field(default_factory=list)
    counts: dict[str, int] = dataclasses.field(default_factory=dict)

    REQUIRED = (
        "permutation",
        "shift_antisymmetry",
        "vertex_orbits",
        "connected",
        "euler_characteristic",
        "disk_faces",
    )

    @property
    def ok(self) -> bool:
        return all(self.checks.get(k, False) for k in self.REQUIRED)

    def fail(self, key: str, msg: str):
        self.checks[key] = False
        self.messages.append(msg)

    def __str__(self):
        lines = [f"{k}: {'pass' if v else 'FAIL'}" for k, v in self.checks.items()]
        return "\n".join(lines + self.messages)


def _connected_vertices(n, pairs) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return n == 0 or len({find(x) for x in range(n)}) == 1


def validate(m: ToroidalMap, connectivity: bool = True) -> Diagnostics:
    """Check a map for the conditions the volume invariants rely on.

    Structural problems were already rejected at construction; everything
    here is reported as a diagnostic rather than raised.  Connectivity of
    the periodic lift (2- and 3-connectivity, simplicity) is tested on the
    3x3 torus cover.
    """
    diag = Diagnostics()
    nd = m.n_darts
    rn = m.rot_next
    is_perm = len(np.unique(rn)) == nd
    diag.checks["permutation"] = is_perm
    if not is_perm:
        diag.messages.append("rot_next is not a permutation")

    anti = bool((m.shift[np.arange(nd) ^ 1] == -m.shift).all())
    diag.checks["shift_antisymmetry"] = anti
    if not anti:
        bad = np.flatnonzero((m.shift[np.arange(nd) ^ 1] != -m.shift).any(axis=1))
        diag.messages.append(f"shift(twin(d)) != -shift(d) for darts {bad.tolist()}")

    orbits_ok = bool((m.vertex_of[rn] == m.vertex_of).all()) if is_perm else False
    if orbits_ok:
        seen = np.zeros(nd, bool)
        owner = set()
        for d in range(nd):
            if seen[d]:
                continue
            v = int(m.vertex_of[d])
            if v in owner:
                orbits_ok = False
                break
            owner.add(v)
            x = d
            while not seen[x]:
                seen[x] = True
                x = int(rn[x])
        if len(owner) != m.n_vertices:
            orbits_ok = False
    diag.checks["vertex_orbits"] = orbits_ok
    if not orbits_ok:
        diag.messages.append("rotation orbits do not match the vertices")

    pairs = [(int(m.vertex_of[2 * k]), int(m.vertex_of[2 * k + 1])) for k in range(m.n_edges)]
    conn = _connected_vertices(m.n_vertices, pairs)
    diag.checks["connected"] = conn

    if is_perm:
        chi = m.euler_characteristic()
        diag.counts.update(V=m.n_vertices, E=m.n_edges, F=m.n_faces)
        diag.checks["euler_characteristic"] = chi == 0
        if chi != 0:
            diag.messages.append(f"V - E + F = {chi}, expected 0 for the torus")
        walks = m._face_data[0]
        disks = all(w.is_disk for w in walks)
        diag.checks["disk_faces"] = disks
        if not disks:
            diag.messages.append("some face walk has nonzero total shift")
    else:
        diag.checks["euler_characteristic"] = False
        diag.checks["disk_faces"] = False

    loops = [k for k, (u, v, s) in enumerate(m.edges()) if u == v and s == (0, 0)]
    diag.checks["loop_free"] = not loops
    if loops:
        diag.messages.append(f"edges {loops} are loops in the periodic graph")
    keys = set()
    simple = True
    for u, v, s in m.edges():
        key = min((u, v, s), (v, u, (-s[0], -s[1])))
        if key in keys:
            simple = False
        keys.add(key)
    diag.checks["simple"] = simple and not loops

    if connectivity and conn:
        import networkx as nx

        g = nx.Graph()
        g.add_edges_from((a, b) for a, b in cover(m, 3, 3).edges if a != b)
        g.add_nodes_from(range(9 * m.n_vertices))
        two = nx.is_biconnected(g) if g.number_of_nodes() > 2 else False
        diag.checks["two_connected"] = bool(two)
        diag.checks["three_connected"] = bool(two and nx.node_connectivity(g) >= 3)
    return diag


# ----------------------------------------------------------------------
# constructions


def faces(m: ToroidalMap) -> list[FaceWalk]:
    return list(m._face_data[0])


def _require_cellular(m: ToroidalMap):
    walks = m._face_data[0]
    if m.euler_characteristic() != 0 or not all(w.is_disk for w in walks):
        raise NotCellularError(f"map {m.name!r} is not a cellular torus embedding")


def _cells(points):
    return np.floor(np.asarray(points) + 1e-9).astype(np.int64)


def _edge_tail_cells(m: ToroidalMap) -> np.ndarray:
    """Cell of each dart's tail in the reference copy of its edge.

    The reference copy has the tail of the even dart in cell (0, 0).
    """
    t = np.zeros((m.n_darts, 2), dtype=np.int64)
    t[1::2] = m.shift[0::2]
    return t


def _edge_midpoints(m: ToroidalMap):
    if m.positions is None:
        return None, np.zeros((m.n_edges, 2), dtype=np.int64)
    p = m.positions
    u, v = m.vertex_of[0::2], m.vertex_of[1::2]
    mid = (p[u] + p[v] + m.shift[0::2]) / 2.0
    cell = _cells(mid)
    return mid - cell, cell


def _face_lifts(m: ToroidalMap):
    """Face centroids reduced to [0,1)^2 and the cell translation applied."""
    nf = m.n_faces
    if m.positions is None:
        return None, np.zeros((nf, 2), dtype=np.int64)
    cent = np.array([m.face_centroid(f) for f in range(nf)])
    cell = _cells(cent)
    return cent - cell, cell


def dual(m: ToroidalMap) -> ToroidalMap:
    """Dual map; dart ``d`` of the result crosses dart ``d`` of ``m`` from
    its right-hand face to its left-hand face."""
    _require_cellular(m)
    nd = m.n_darts
    face_of = m.face_of
    off = m.face_offsets
    pos, T = _face_lifts(m)
    idx = np.arange(nd)
    rot = m.rot_prev[idx] ^ 1
    c1 = off[idx] - T[face_of[idx]]
    c2 = off[idx ^ 1] - T[face_of[idx ^ 1]]
    sh = c1 + m.shift - c2
    name = f"dual({m.name})" if m.name else ""
    return ToroidalMap(face_of.copy(), rot, sh, m.n_faces, positions=pos, name=name)


def medial(m: ToroidalMap) -> ToroidalMap:
    """Medial map: one vertex per edge, one edge per face corner."""
    _require_cellular(m)
    nd = m.n_darts
    idx = np.arange(nd)
    phi = m.rot_next[idx ^ 1]
    phi_inv = m.rot_prev[idx] ^ 1
    edge_of = idx // 2
    mid_pos, T = _edge_midpoints(m)
    t = _edge_tail_cells(m)

    # medial edge x runs from edge(x) to edge(phi(x)) through the corner at head(x)
    vertex_of = np.empty(2 * nd, dtype=np.int64)
    vertex_of[0::2] = edge_of
    vertex_of[1::2] = edge_of[phi]
    sh = np.empty((2 * nd, 2), dtype=np.int64)
    s = (t[idx] + m.shift[idx] - T[edge_of]) - (t[phi] - T[edge_of[phi]])
    sh[0::2] = s
    sh[1::2] = -s

    rot = np.empty(2 * nd, dtype=np.int64)
    for k in range(m.n_edges):
        d, a = 2 * k, 2 * k + 1
        ne_, nw, sw, se = 2 * phi_inv[a] + 1, 2 * a, 2 * phi_inv[d] + 1, 2 * d
        cyc = [ne_, nw, sw, se]
        for i in range(4):
            rot[cyc[i]] = cyc[(i + 1) % 4]
    name = f"medial({m.name})" if m.name else ""
    return ToroidalMap(vertex_of, rot, sh, m.n_edges, positions=mid_pos, name=name)


@dataclasses.dataclass(frozen=True, eq=False)
class TemperleyanMap:
    """The bipartite quadrangulation built from a map and its dual.

    Vertex ids: ``0..V-1`` primal black, ``V..V+F-1`` dual black,
    ``V+F..V+F+E-1`` white.  Edge ``d`` (for primal dart ``d``) joins
    ``tail(d)`` to the white vertex of ``d``'s edge; edge ``2E + d`` joins
    the face of ``d`` to the same white vertex.  Even darts start at the
    black end.

    ``kites`` lists, per quad face, the pair of black darts whose half
    angles belong to that face: the primal corner first, the dual corner
    second.
    """

    map: ToroidalMap
    base: ToroidalMap
    kites: tuple[tuple[int, int], ...]

    @property
    def n_black(self) -> int:
        return self.base.n_vertices + self.base.n_faces

    def is_black_dart(self, d: int) -> bool:
        return d % 2 == 0

    def black_darts(self) -> np.ndarray:
        return np.arange(0, self.map.n_darts, 2)

    def primal_spoke(self, d: int) -> int:
        """Black dart of G^b leaving ``tail(d)`` toward the white vertex of ``d``."""
        return 2 * d

    def dual_spoke(self, d: int) -> int:
        return 2 * (self.base.n_darts + d)


def temperleyan(m: ToroidalMap) -> TemperleyanMap:
    _require_cellular(m)
    V, F, E = m.n_vertices, m.n_faces, m.n_edges
    nd = m.n_darts
    idx = np.arange(nd)
    face_of = m.face_of
    off = m.face_offsets
    fpos, TF = _face_lifts(m)
    wpos, TW = _edge_midpoints(m)
    t = _edge_tail_cells(m)
    edge_of = idx // 2

    n_edges_b = 2 * nd
    vertex_of = np.empty(2 * n_edges_b, dtype=np.int64)
    sh = np.empty((2 * n_edges_b, 2), dtype=np.int64)
    white = V + F + edge_of
    # primal spokes
    vertex_of[0 : 2 * nd : 2] = m.vertex_of
    vertex_of[1 : 2 * nd : 2] = white
    s = TW[edge_of] - t[idx]
    sh[0 : 2 * nd : 2] = s
    sh[1 : 2 * nd : 2] = -s
    # dual spokes
    vertex_of[2 * nd :: 2] = V + face_of
    vertex_of[2 * nd + 1 :: 2] = white
    s = (off[idx] - TF[face_of]) - (t[idx] - TW[edge_of])
    sh[2 * nd :: 2] = s
    sh[2 * nd + 1 :: 2] = -s

    rot = np.empty(2 * n_edges_b, dtype=np.int64)
    rot[0 : 2 * nd : 2] = 2 * m.rot_next
    phi_inv = m.rot_prev[idx] ^ 1
    rot[2 * nd :: 2] = 2 * (nd + phi_inv)
    for k in range(E):
        d, a = 2 * k, 2 * k + 1
        cyc = [2 * a + 1, 2 * (nd + a) + 1, 2 * d + 1, 2 * (nd + d) + 1]
        for i in range(4):
            rot[cyc[i]] = cyc[(i + 1) % 4]

    positions = None
    if m.positions is not None:
        positions = np.vstack([m.positions, fpos, wpos])
    coloring = ("black",) * (V + F) + ("white",) * E
    name = f"temperleyan({m.name})" if m.name else ""
    gb = ToroidalMap(vertex_of, rot, sh, V + F + E, positions=positions, name=name, coloring=coloring)

    kites = []
    for walk in gb._face_data[0]:
        corners = [x ^ 1 for x in walk.darts if x % 2 == 1]
        corners.sort(key=lambda e: (e >= 2 * nd, e))
        kites.append(tuple(corners))
    return TemperleyanMap(gb, m, tuple(kites))


def truncate(m: ToroidalMap) -> ToroidalMap:
    """Replace every vertex of a 3-regular map by a triangle."""
    if not (m.degrees == 3).all():
        raise ValueError("truncation needs a 3-regular map")
    _require_cellular(m)
    nd, E = m.n_darts, m.n_edges
    idx = np.arange(nd)
    T = np.zeros((nd, 2), dtype=np.int64)
    pos = None
    if m.positions is not None:
        p = m.positions
        raw = p[m.vertex_of] + (p[m.vertex_of[idx ^ 1]] + m.shift - p[m.vertex_of]) / 3.0
        T = _cells(raw)
        pos = raw - T

    vertex_of = np.empty(2 * (E + nd), dtype=np.int64)
    sh = np.empty((2 * (E + nd), 2), dtype=np.int64)
    vertex_of[: 2 * E] = idx
    sh[: 2 * E] = m.shift + T[idx ^ 1] - T[idx]
    nxt = m.rot_next
    vertex_of[2 * E :: 2] = idx
    vertex_of[2 * E + 1 :: 2] = nxt
    s = T[nxt] - T[idx]
    sh[2 * E :: 2] = s
    sh[2 * E + 1 :: 2] = -s

    rot = np.empty(2 * (E + nd), dtype=np.int64)
    prv = m.rot_prev
    for x in range(nd):
        out_tri = 2 * (E + x)
        in_tri = 2 * (E + int(prv[x])) + 1
        rot[x] = out_tri
        rot[out_tri] = in_tri
        rot[in_tri] = x
    name = f"truncate({m.name})" if m.name else ""
    return ToroidalMap(vertex_of, rot, sh, nd, positions=pos, name=name)


def parallel_edges(m: ToroidalMap, s: int) -> ToroidalMap:
    """Replace every edge by ``s`` parallel copies."""
    if s < 2:
        raise ValueError("parallel_edges needs s >= 2")
    E = m.n_edges
    vertex_of = np.empty(2 * E * s, dtype=np.int64)
    sh = np.empty((2 * E * s, 2), dtype=np.int64)
    for k in range(E):
        for j in range(s):
            e = k * s + j
            vertex_of[2 * e], vertex_of[2 * e + 1] = m.vertex_of[2 * k], m.vertex_of[2 * k + 1]
            sh[2 * e], sh[2 * e + 1] = m.shift[2 * k], m.shift[2 * k + 1]

    def block(d):
        k, end = divmod(d, 2)
        js = range(s) if end == 0 else range(s - 1, -1, -1)
        return [2 * (k * s + j) + end for j in js]

    rot = np.empty(2 * E * s, dtype=np.int64)
    for d in range(m.n_darts):
        b = block(d)
        for i in range(s - 1):
            rot[b[i]] = b[i + 1]
        rot[b[-1]] = block(int(m.rot_next[d]))[0]
    name = f"parallel({m.name},{s})" if m.name else ""
    return ToroidalMap(vertex_of, rot, sh, m.n_vertices, positions=m.positions, name=name)


def collapse_parallel(m: ToroidalMap) -> ToroidalMap:
    """Merge runs of parallel edges that bound bigon faces.

    Inverse of :func:`parallel_edges` on maps without other bigons.
    """
    nd = m.n_darts
    # a bigon face (d, e) means edges of d and e are parallel and adjacent
    parent = list(range(m.n_edges))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for w in m._face_data[0]:
        if w.degree == 2:
            a, b = (x // 2 for x in w.darts)
            parent[find(a)] = find(b)
    keep_edge = {}
    for k in range(m.n_edges):
        keep_edge.setdefault(find(k), k)
    kept = sorted(keep_edge.values())
    new_id = {k: i for i, k in enumerate(kept)}
    keep_dart = np.zeros(nd, bool)
    for k in kept:
        keep_dart[2 * k] = keep_dart[2 * k + 1] = True
    dart_map = {}
    for k in kept:
        dart_map[2 * k] = 2 * new_id[k]
        dart_map[2 * k + 1] = 2 * new_id[k] + 1
    rot = np.empty(2 * len(kept), dtype=np.int64)
    for d, nd_ in dart_map.items():
        x = int(m.rot_next[d])
        while not keep_dart[x]:
            x = int(m.rot_next[x])
        rot[nd_] = dart_map[x]
    darts = sorted(dart_map)
    return ToroidalMap(
        m.vertex_of[darts], rot, m.shift[darts], m.n_vertices, positions=m.positions, name=m.name
    )


# ----------------------------------------------------------------------
# finite graphs


@dataclasses.dataclass(frozen=True)
class MultiGraph:
    """Finite multigraph as a vertex count and an edge list (loops allowed)."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg


def cover(m: ToroidalMap, a: int, b: int) -> MultiGraph:
    """Quotient of the periodic graph by the sublattice ``a Z x b Z``.

    Vertex ``(v, i, j)`` gets index ``(i * b + j) * V + v``.
    """
    if a < 1 or b < 1:
        raise ValueError("cover sizes must be positive")
    V = m.n_vertices
    edges = []
    for i in range(a):
        for j in range(b):
            for u, v, (sa, sb) in m.edges():
                x = (i * b + j) * V + u
                y = (((i + sa) % a) * b + (j + sb) % b) * V + v
                edges.append((x, y))
    return MultiGraph(a * b * V, tuple(edges))


class PlanarGraph:
    """Finite plane graph with a rotation system.

    Parameters
    ----------
    positions : (N, 2) array or None
    edges : sequence of (u, v)
    rotation : dict vertex -> darts in counter-clockwise order, optional
        Darts follow the same numbering as :class:`ToroidalMap`.  Derived
        from ``positions`` when omitted; without positions a combinatorial
        embedding is computed.
    """

    def __init__(self, positions, edges, rotation=None, outer_face=None):
        self.edges = [tuple(int(x) for x in e) for e in edges]
        self.positions = None if positions is None else np.asarray(positions, float).reshape(-1, 2)
        if self.positions is not None:
            n = len(self.positions)
        else:
            n = 1 + max((max(e) for e in self.edges), default=-1)
        self.n_vertices = n
        ne = len(self.edges)
        self.vertex_of = np.empty(2 * ne, dtype=np.int64)
        for k, (u, v) in enumerate(self.edges):
            if u == v:
                raise ValueError("planar graphs here must be loop-free")
            self.vertex_of[2 * k], self.vertex_of[2 * k + 1] = u, v
        if rotation is None:
            if self.positions is not None:
                rotation = rotation_from_positions(
                    self.positions, self.vertex_of, np.zeros((2 * ne, 2)), n
                )
            else:
                rotation = self._combinatorial_rotation()
        self.rot_next = np.full(2 * ne, -1, dtype=np.int64)
        for v, cyc in rotation.items():
            for i, d in enumerate(cyc):
                self.rot_next[d] = cyc[(i + 1) % len(cyc)]
        self._trace()
        self.outer = self._pick_outer() if outer_face is None else outer_face

    @classmethod
    def from_multigraph(cls, g: MultiGraph):
        return cls(None, g.edges)

    def _combinatorial_rotation(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        dart_of = {}
        for k, (u, v) in enumerate(self.edges):
            if (u, v) in dart_of:
                raise ValueError("combinatorial embedding needs a simple graph; supply positions")
            g.add_edge(u, v)
            dart_of[(u, v)] = 2 * k
            dart_of[(v, u)] = 2 * k + 1
        planar, emb = nx.check_planarity(g)
        if not planar:
            raise ValueError("graph is not planar")
        rotation = {}
        for v in range(self.n_vertices):
            nbrs = list(emb.neighbors_cw_order(v))[::-1]
            rotation[v] = [dart_of[(v, w)] for w in nbrs]
        return rotation

    def _trace(self):
        nd = len(self.vertex_of)
        face_of = np.full(nd, -1, dtype=np.int64)
        walks = []
        for start in range(nd):
            if face_of[start] >= 0:
                continue
            fid = len(walks)
            darts = []
            d = start
            while face_of[d] < 0:
                face_of[d] = fid
                darts.append(d)
                d = int(self.rot_next[d ^ 1])
            walks.append(tuple(darts))
        self.face_of = face_of
        self.face_walks = walks

    def signed_area(self, f: int) -> float:
        pts = self.positions[self.vertex_of[list(self.face_walks[f])]]
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def _pick_outer(self) -> int:
        if not self.face_walks:
            return -1
        if self.positions is not None:
            return int(np.argmax([self.signed_area(f) for f in range(len(self.face_walks))]))
        return int(np.argmax([len(w) for w in self.face_walks]))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.face_walks)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.vertex_of, minlength=self.n_vertices)

    def bounded_faces(self) -> list[tuple[int, ...]]:
        return [w for i, w in enumerate(self.face_walks) if i != self.outer]

    def outer_vertices(self) -> set[int]:
        if self.outer < 0:
            return set(range(self.n_vertices))
        return {int(self.vertex_of[d]) for d in self.face_walks[self.outer]}

    def is_connected(self) -> bool:
        return _connected_vertices(self.n_vertices, self.edges)

    def to_multigraph(self) -> MultiGraph:
        return MultiGraph(self.n_vertices, tuple(self.edges))

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces


def planar_patch(m: ToroidalMap, n: int) -> PlanarGraph:
    """Finite plane piece of the lattice made of ``n x n`` fundamental domains.

    Keeps edges whose endpoints both lie in the window and returns the
    component holding the copy of vertex 0 in the central cell.  The
    rotation is inherited from the torus map.
    """
    if m.positions is None:
        raise ValueError("planar_patch needs vertex positions")
    if n < 1:
        raise ValueError("n must be positive")
    V = m.n_vertices

    def vid(v, i, j):
        return (i * n + j) * V + v

    kept = []
    for i in range(n):
        for j in range(n):
            for d in range(0, m.n_darts, 2):
                a, b = m.shift[d]
                if 0 <= i + a < n and 0 <= j + b < n:
                    kept.append((d, i, j))
    # component of the center copy of vertex 0
    adj = {}
    for d, i, j in kept:
        a, b = m.shift[d]
        x, y = vid(m.vertex_of[d], i, j), vid(m.vertex_of[d + 1], i + a, j + b)
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    c = n // 2
    root = vid(0, c, c)
    comp = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adj.get(x, ()):
            if y not in comp:
                comp.add(y)
                queue.append(y)
    order = sorted(comp)
    new = {x: k for k, x in enumerate(order)}
    positions = np.empty((len(order), 2))
    for x in order:
        cell, v = divmod(x, V)
        i, j = divmod(cell, n)
        positions[new[x]] = m.positions[v] + (i, j)

    edges = []
    src_dart = []
    for d, i, j in kept:
        a, b = m.shift[d]
        x, y = vid(m.vertex_of[d], i, j), vid(m.vertex_of[d + 1], i + a, j + b)
        if x in comp:
            edges.append((new[x], new[y]))
            src_dart.append((d, i, j))
    # inherited rotation: restrict each vertex's cyclic order to kept darts
    lookup = {}
    for k, (d, i, j) in enumerate(src_dart):
        a, b = m.shift[d]
        lookup[(d, i, j)] = 2 * k
        lookup[(d + 1, i + a, j + b)] = 2 * k + 1
    rotation = {}
    for x in order:
        cell, v = divmod(x, V)
        i, j = divmod(cell, n)
        cyc = [lookup[(d, i, j)] for d in m.darts_at(v) if (d, i, j) in lookup]
        rotation[new[x]] = cyc
    return PlanarGraph(positions, edges, rotation=rotation)


# ----------------------------------------------------------------------
# isomorphism


def _code_from(rot, start, nd):
    label = {start: 0}
    order = [start]
    k = 0
    while k < len(order):
        d = order[k]
        for x in (rot[d], d ^ 1):
            if x not in label:
                label[x] = len(order)
                order.append(x)
        k += 1
    if len(order) != nd:
        return None
    return tuple(v for d in order for v in (label[rot[d]], label[d ^ 1]))


def canonical_form(m: ToroidalMap, reflect: bool = False) -> tuple:
    """Smallest relabelling code of the rotation system over all root darts.

    With ``reflect=True`` the mirror image (inverse rotation) is used.
    """
    rot = (m.rot_prev if reflect else m.rot_next).tolist()
    nd = m.n_darts
    best = None
    for s in range(nd):
        code = _code_from(rot, s, nd)
        if code is not None and (best is None or code < best):
            best = code
    return (m.n_vertices, nd) + (best or ())


def isomorphic(a: ToroidalMap, b: ToroidalMap, allow_reflection: bool = True) -> bool:
    """Combinatorial isomorphism of torus maps.

    On the torus the rotation system fixes the shifts up to a change of
    lattice basis, so only rotations and twins are compared.
    """
    if (a.n_vertices, a.n_darts) != (b.n_vertices, b.n_darts):
        return False
    if sorted(a.degrees.tolist()) != sorted(b.degrees.tolist()):
        return False
    ca = canonical_form(a)
    if ca == canonical_form(b):
        return True
    return allow_reflection and ca == canonical_form(b, reflect=True)


def degree_multiset(values: Iterable[int]) -> list[int]:
    return sorted(int(x) for x in values)

"""
Built-in lattice presentations and the JSON lattice file format.

Archimedean and 2-uniform tilings are generated from unit-edge Cartesian
geometry: vertices of one fundamental domain plus the two period vectors.
Edges are the periodic pairs at distance 1 and the rotation follows from
the directions.  Three lattices known only from pictures are stored as
data files (``data/*.json``) with an explicit rotation system.
"""
import dataclasses
import functools
import itertools
import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .hyp import V_OCT, V_TET
from .invariants import HalfAngleAssignment, angles_from_primal
from .torus_map import MapStructureError, ToroidalMap, dual, medial, validate

SQ3 = math.sqrt(3.0)
SQ2 = math.sqrt(2.0)


class UnknownLatticeError(KeyError):
    pass


class LatticeFileError(ValueError):
    """Malformed lattice file; the message names the offending field."""


@dataclasses.dataclass(frozen=True)
class TableRow:
    row: int
    n_vertices: int
    nu_diamond: float  # nu/(2 pi)
    z: float
    nu_bar: float  # nubar/(2 pi)


# printed columns of the reference table
TABLE1 = {
    "triangular": TableRow(1, 1, 1.61533, 1.61533, 1.74937),
    "square": TableRow(2, 1, 1.16624, 1.16624, 1.16624),
    "hexagonal": TableRow(3, 2, 0.80766, 0.80766, 0.87468),
    "kagome": TableRow(4, 3, 1.12157, 1.13570, 1.16624),
    "square-octagon": TableRow(5, 4, 0.78139, 0.78668, 0.87468),
    "medial-488": TableRow(6, 6, 1.10405, 1.12171, 1.16624),
    "3-12-12": TableRow(7, 6, 0.70590, 0.72056, 0.87468),
    "3-4-6-4": TableRow(8, 6, 1.14390, 1.14480, 1.16624),
    "4-6-12": TableRow(9, 12, 0.76795, 0.77780, 0.87468),
    "cairo-pentagonal": TableRow(10, 6, 0.93886, 0.94057, 0.97187),
    "lattice-11": TableRow(11, 9, 0.84361, 0.84744, 0.90708),
    "lattice-12": TableRow(12, 3, 1.07689, 1.10365, 1.16624),
    "lattice-13": TableRow(13, 2, 1.39079, 1.39928, 1.74937),
    "3^2-4-3-4": TableRow(14, 4, 1.40830, 1.41086, 1.45780),
    "4^4;3^3-4^2": TableRow(15, 3, 1.32761, 1.32774, 1.36062),
    "3^6;3^3-4^2": TableRow(16, 3, 1.47731, 1.47739, 1.55499),
}

EXACT_Z_ROWS = {1, 2, 3, 4, 5, 6, 7, 12, 13}

# numbers for the 3^3-4^2 lattice that are not a table row
COUNTEREXAMPLE = {
    "vol_hyperbolic": 17.55732,
    "two_pi_zfd": 17.67995,
    "vol_diamond_sum": 17.69718,
    "e_voct": 18.31931,
}

ALIASES = {
    "4-8-8": "square-octagon",
    "3^6": "triangular",
    "4^4": "square",
    "6^3": "hexagonal",
    "3-6-3-6": "kagome",
    "snub-square": "3^2-4-3-4",
    "elongated-triangular": "3^3-4^2",
    "counterexample": "3^3-4^2",
}


@dataclasses.dataclass(frozen=True, eq=False)
class CatalogEntry:
    """A lattice with its reference data.

    ``angles`` maps primal darts to half angles (as multiples of pi) at the
    corner counter-clockwise of the dart; dual corners are completed from
    the kite condition.
    """

    name: str
    map: ToroidalMap
    table: TableRow | None = None
    references: dict = dataclasses.field(default_factory=dict)
    angles: dict | None = None
    tags: tuple[str, ...] = ()
    note: str = ""

    @property
    def row(self) -> int | None:
        return None if self.table is None else self.table.row

    def half_angles(self) -> HalfAngleAssignment | None:
        if self.angles is None:
            return None
        th = np.empty(self.map.n_darts)
        for d in range(self.map.n_darts):
            if d not in self.angles:
                raise LatticeFileError(f"{self.name}: no half angle for dart {d}")
            th[d] = float(self.angles[d]) * math.pi
        return angles_from_primal(self.map, th)


# ----------------------------------------------------------------------
# geometry


def unit_distance_map(name, a1, a2, points, tol=1e-9) -> ToroidalMap:
    """Periodic unit-distance graph of ``points`` under the lattice ``<a1, a2>``.

    Coordinates are Cartesian; the returned map stores positions in lattice
    units.
    """
    a1, a2 = np.asarray(a1, float), np.asarray(a2, float)
    pts = np.asarray(points, float).reshape(-1, 2)
    basis = np.column_stack([a1, a2])
    frac = np.linalg.solve(basis, pts.T).T
    n = len(pts)
    edges = []
    rng = range(-2, 3)
    for u in range(n):
        for v in range(u, n):
            for i, j in itertools.product(rng, rng):
                if u == v and (i, j) <= (0, 0):
                    continue
                vec = pts[v] + i * a1 + j * a2 - pts[u]
                if abs(math.hypot(*vec) - 1.0) < tol:
                    edges.append((u, v, (i, j)))
    m = ToroidalMap.from_edges(n, edges, positions=frac, name=name)
    return m.with_positions(frac)


def _polygon(center, radius, start_deg, k):
    c = np.asarray(center, float)
    return [
        c + radius * np.array([math.cos(math.radians(start_deg + 360.0 * t / k)),
                               math.sin(math.radians(start_deg + 360.0 * t / k))])
        for t in range(k)
    ]


def _hex_basis(scale):
    return np.array([scale, 0.0]), np.array([scale / 2, scale * SQ3 / 2])


def _triangular():
    return unit_distance_map("triangular", (1, 0), (0.5, SQ3 / 2), [(0, 0)])


def _square():
    return unit_distance_map("square", (1, 0), (0, 1), [(0, 0)])


def _hexagonal():
    a1, a2 = _hex_basis(SQ3)
    return unit_distance_map("hexagonal", a1, a2, [(a1 + a2) / 3, 2 * (a1 + a2) / 3])


def _kagome():
    pts = [(1, 0), (0.5, SQ3 / 2), (1.5, SQ3 / 2)]
    return unit_distance_map("kagome", (2, 0), (1, SQ3), pts)


def _square_octagon():
    a = 1 + SQ2
    c = np.array([a / 2, a / 2])
    return unit_distance_map("square-octagon", (a, 0), (0, a), _polygon(c, 1 / SQ2, 0, 4))


def _truncated_hexagonal():
    a1, a2 = _hex_basis(2 + SQ3)
    up, down = (a1 + a2) / 3, 2 * (a1 + a2) / 3
    r = 1 / SQ3
    pts = []
    for c, others in ((up, (down, down - a1, down - a2)), (down, (up, up + a1, up + a2))):
        for o in others:
            d = o - c
            pts.append(c + r * d / np.linalg.norm(d))
    return unit_distance_map("3-12-12", a1, a2, pts)


def _rhombitrihexagonal():
    a1, a2 = _hex_basis(1 + SQ3)
    return unit_distance_map("3-4-6-4", a1, a2, _polygon((0, 0), 1, 30, 6))


def _truncated_trihexagonal():
    a1, a2 = _hex_basis(3 + SQ3)
    r = (math.sqrt(6) + SQ2) / 2
    return unit_distance_map("4-6-12", a1, a2, _polygon((0, 0), r, 15, 12))


def _snub_square():
    s = math.sqrt(2 + SQ3)
    return unit_distance_map("3^2-4-3-4", (s, 0), (0, s), _polygon((0, 0), 1 / SQ2, 30, 4))


def _elongated_triangular():
    return unit_distance_map("3^3-4^2", (1, 0), (0.5, 1 + SQ3 / 2), [(0, 0), (0, 1)])


def _two_uniform_square_strip():
    return unit_distance_map("4^4;3^3-4^2", (1, 0), (0.5, 2 + SQ3 / 2), [(0, 0), (0, 1), (0, 2)])


def _two_uniform_triangle_strip():
    pts = [(0, 0), (0, 1), (0.5, 1 + SQ3 / 2)]
    return unit_distance_map("3^6;3^3-4^2", (1, 0), (0, 1 + SQ3), pts)


def barycentric_positions(m: ToroidalMap) -> np.ndarray:
    """Periodic Tutte embedding in lattice units (vertex 0 at the origin)."""
    V = m.n_vertices
    L = np.zeros((V, V))
    rhs = np.zeros((V, 2))
    for d in range(m.n_darts):
        u, v = int(m.vertex_of[d]), int(m.vertex_of[d ^ 1])
        L[u, u] += 1
        L[u, v] -= 1
        rhs[u] += m.shift[d]
    x = np.zeros((V, 2))
    if V > 1:
        x[1:] = np.linalg.lstsq(L[1:, 1:], rhs[1:], rcond=None)[0]
    return x


# ----------------------------------------------------------------------
# lattice files


def _require(obj, key, kind, where):
    if key not in obj:
        raise LatticeFileError(f"{where}: missing field {key!r}")
    val = obj[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise LatticeFileError(f"{where}.{key}: expected an integer, got {val!r}")
    if kind is list and not isinstance(val, list):
        raise LatticeFileError(f"{where}.{key}: expected a list")
    return val


def _int_pair(val, where):
    if not (isinstance(val, list) and len(val) == 2 and all(isinstance(x, int) for x in val)):
        raise LatticeFileError(f"{where}: expected a pair of integers, got {val!r}")
    return int(val[0]), int(val[1])


def entry_from_dict(doc: dict, source: str = "<lattice>") -> CatalogEntry:
    """Parse a lattice document (already decoded from JSON)."""
    if not isinstance(doc, dict):
        raise LatticeFileError(f"{source}: top level must be an object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise LatticeFileError(f"{source}.name: expected a string")
    verts = _require(doc, "vertices", list, source)
    ids = []
    pos = {}
    for i, v in enumerate(verts):
        where = f"{source}.vertices[{i}]"
        if not isinstance(v, dict):
            raise LatticeFileError(f"{where}: expected an object")
        vid = _require(v, "id", int, where)
        ids.append(vid)
        if "pos" in v:
            p = v["pos"]
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, (int, float)) for x in p)):
                raise LatticeFileError(f"{where}.pos: expected two numbers")
            pos[vid] = (float(p[0]), float(p[1]))
    n = len(ids)
    if sorted(ids) != list(range(n)):
        raise LatticeFileError(f"{source}.vertices: ids must be 0..{n - 1} without gaps")
    edges = []
    for k, e in enumerate(_require(doc, "edges", list, source)):
        where = f"{source}.edges[{k}]"
        if not isinstance(e, dict):
            raise LatticeFileError(f"{where}: expected an object")
        u, v = _require(e, "u", int, where), _require(e, "v", int, where)
        if not (0 <= u < n and 0 <= v < n):
            raise LatticeFileError(f"{where}: endpoint outside 0..{n - 1}")
        edges.append((u, v, _int_pair(e.get("shift", [0, 0]), f"{where}.shift")))
    rotation = None
    if doc.get("rotation") is not None:
        rot = doc["rotation"]
        if not isinstance(rot, dict):
            raise LatticeFileError(f"{source}.rotation: expected an object keyed by vertex id")
        rotation = {}
        for key, refs in rot.items():
            where = f"{source}.rotation[{key}]"
            try:
                vid = int(key)
            except ValueError:
                raise LatticeFileError(f"{where}: key is not a vertex id") from None
            if not isinstance(refs, list):
                raise LatticeFileError(f"{where}: expected a list of [edge, end] pairs")
            darts = []
            for ref in refs:
                k, end = _int_pair(ref, where)
                if not (0 <= k < len(edges)) or end not in (0, 1):
                    raise LatticeFileError(f"{where}: bad dart reference {ref!r}")
                if edges[k][end] != vid:
                    raise LatticeFileError(f"{where}: dart {ref!r} does not start at vertex {vid}")
                darts.append(2 * k + end)
            rotation[vid] = darts
    positions = None
    if pos:
        if len(pos) != n:
            raise LatticeFileError(f"{source}.vertices: give pos for all vertices or none")
        positions = np.array([pos[i] for i in range(n)])
    try:
        m = ToroidalMap.from_edges(n, edges, rotation=rotation, positions=positions, name=name)
    except MapStructureError as exc:
        raise LatticeFileError(f"{source}: {exc}") from None
    if positions is not None:
        m = m.with_positions(positions)

    angles = None
    if doc.get("angles") is not None:
        angles = {}
        for i, a in enumerate(doc["angles"]):
            where = f"{source}.angles[{i}]"
            k, end = _require(a, "edge", int, where), _require(a, "end", int, where)
            if not (0 <= k < len(edges)) or end not in (0, 1):
                raise LatticeFileError(f"{where}: bad dart reference")
            try:
                angles[2 * k + end] = Fraction(str(_require(a, "theta_over_pi", None, where)))
            except (ValueError, ZeroDivisionError):
                raise LatticeFileError(f"{where}.theta_over_pi: not a rational number") from None
    refs = doc.get("references") or {}
    if not isinstance(refs, dict) or not all(isinstance(x, (int, float)) for x in refs.values()):
        raise LatticeFileError(f"{source}.references: expected an object of numbers")
    return CatalogEntry(name=name, map=m, references=dict(refs), angles=angles)


def load(path) -> CatalogEntry:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LatticeFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return entry_from_dict(doc, str(path))


def entry_to_dict(entry: CatalogEntry) -> dict:
    m = entry.map
    doc = {"name": entry.name, "vertices": [], "edges": []}
    for v in range(m.n_vertices):
        item = {"id": v}
        if m.positions is not None:
            item["pos"] = [float(x) for x in m.positions[v]]
        doc["vertices"].append(item)
    for u, v, s in m.edges():
        doc["edges"].append({"u": u, "v": v, "shift": list(s)})
    doc["rotation"] = {str(v): [[d // 2, d % 2] for d in m.darts_at(v)] for v in range(m.n_vertices)}
    if entry.angles is not None:
        doc["angles"] = [
            {"edge": d // 2, "end": d % 2, "theta_over_pi": str(entry.angles[d])}
            for d in sorted(entry.angles)
        ]
    if entry.references:
        doc["references"] = dict(entry.references)
    return doc


def dumps(entry: CatalogEntry) -> str:
    return json.dumps(entry_to_dict(entry), indent=1)


# ----------------------------------------------------------------------
# registry


def _regular_angle_table(m: ToroidalMap) -> dict:
    """Primal half angles pi/|v| as exact fractions of pi."""
    return {d: Fraction(1, int(m.degrees[m.vertex_of[d]])) for d in range(m.n_darts)}


def _data_entry(fname: str) -> CatalogEntry:
    text = resources.files("latvol").joinpath("data").joinpath(fname).read_text(encoding="utf-8")
    return entry_from_dict(json.loads(text), fname)


def _exact_z(zfd: float, n: int) -> dict:
    return {"z_exact": zfd / n}


def _builders():
    hexa = _hexagonal()
    kag = _kagome()
    s488 = _square_octagon()
    snub = _snub_square()
    z_tri = 10 * V_TET / (2 * math.pi)
    return {
        "triangular": (lambda: _triangular(), _exact_z(z_tri, 1)),
        "square": (lambda: _square(), _exact_z(2 * V_OCT / (2 * math.pi), 1)),
        "hexagonal": (lambda: hexa, _exact_z(z_tri, 2)),
        "kagome": (lambda: kag, _exact_z(z_tri + math.log(6), 3)),
        "square-octagon": (lambda: s488, {}),
        "medial-488": (lambda: medial(s488).renamed("medial-488"), {}),
        "3-12-12": (lambda: _truncated_hexagonal(), _exact_z(z_tri + math.log(15), 6)),
        "3-4-6-4": (lambda: _rhombitrihexagonal(), {}),
        "4-6-12": (lambda: _truncated_trihexagonal(), {}),
        "cairo-pentagonal": (lambda: dual(snub).renamed("cairo-pentagonal"), {}),
        "lattice-11": (None, {}),
        "lattice-12": (None, {}),
        "lattice-13": (None, {}),
        "3^2-4-3-4": (lambda: snub, {}),
        "4^4;3^3-4^2": (lambda: _two_uniform_square_strip(), {}),
        "3^6;3^3-4^2": (lambda: _two_uniform_triangle_strip(), {}),
        "3^3-4^2": (lambda: _elongated_triangular(), {"vol_hyperbolic": COUNTEREXAMPLE["vol_hyperbolic"]}),
    }


NAMES = tuple(list(TABLE1) + ["3^3-4^2"])
ANGLE_REGULAR = ("triangular", "square", "hexagonal")


@functools.lru_cache(maxsize=None)
def _all_entries() -> dict:
    out = {}
    for name, (build, refs) in _builders().items():
        if build is None:
            base = _data_entry(f"{name}.json")
            m, refs = base.map, {**base.references, **refs}
        else:
            m = build()
        tags = []
        table = TABLE1.get(name)
        if table is not None:
            tags.append("z_exact" if table.row in EXACT_Z_ROWS else "z_numeric")
        else:
            tags.append("counterexample")
        angles = _regular_angle_table(m) if name in ANGLE_REGULAR else None
        out[name] = CatalogEntry(
            name=name, map=m.renamed(name), table=table, references=refs, angles=angles, tags=tuple(tags)
        )
    return out


def names() -> tuple[str, ...]:
    return NAMES


def resolve(name: str) -> str:
    key = ALIASES.get(name, name)
    if key not in NAMES:
        raise UnknownLatticeError(f"unknown lattice {name!r}; try one of: {', '.join(NAMES)}")
    return key


def get(name: str) -> CatalogEntry:
    return _all_entries()[resolve(name)]


def table_entries() -> list[CatalogEntry]:
    return [get(n) for n in TABLE1]


def export(name: str) -> str:
    return dumps(get(name))


def lookup(name_or_path: str) -> CatalogEntry:
    """Catalog name or path to a lattice file."""
    try:
        return get(name_or_path)
    except UnknownLatticeError:
        p = Path(name_or_path)
        if p.suffix == ".json" or p.exists():
            return load(p)
        raise


def check_entry(entry: CatalogEntry):
    """Diagnostics for an entry's presentation."""
    return validate(entry.map)

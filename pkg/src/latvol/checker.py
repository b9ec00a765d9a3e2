"""
Numerical checks of the volume bounds for spanning tree entropy.

Every comparison is a :class:`BoundVerdict` carrying both sides, the margin
and the error budget used to decide it.  Values are in the table
convention: per vertex and divided by 2 pi.
"""
import csv
import dataclasses
import enum
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import networkx as nx

from .catalog import COUNTEREXAMPLE, CatalogEntry, table_entries
from .entropy import entropy_logdet, tau_exact
from .hyp import V_OCT, V_TET
from .invariants import (
    AngleError,
    nu_bar,
    nu_bipyramid,
    nu_bipyramid_planar,
    right_angled_volume,
    vol_bipyramid_planar,
    vol_bipyramid_planar_dual,
)
from .torus_map import PlanarGraph, ToroidalMap, medial, parallel_edges, truncate

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
EXACT_ERR = 1e-12
# tolerances for comparing with the printed table columns
TABLE_TOL = {"nu_diamond": 1e-5, "z": 2e-3, "nu_bar": 1e-5}


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive-within-tolerance"


@dataclasses.dataclass(frozen=True)
class BoundVerdict:
    """``lhs <= rhs`` (or ``<``) decided against an error budget.

    A margin smaller than the budget makes a strict inequality
    inconclusive and a non-strict one hold.
    """

    label: str
    lhs_name: str
    rhs_name: str
    lhs: float
    rhs: float
    error: float
    strict: bool
    asserted: bool = True

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def verdict(self) -> Verdict:
        if self.margin > self.error:
            return Verdict.HOLDS
        if self.margin < -self.error:
            return Verdict.FAILS
        return Verdict.INCONCLUSIVE if self.strict else Verdict.HOLDS

    @property
    def failed(self) -> bool:
        return self.asserted and self.verdict is Verdict.FAILS

    def __str__(self):
        op = "<" if self.strict else "<="
        return (
            f"{self.label}: {self.lhs_name} {op} {self.rhs_name}  "
            f"({self.lhs:.5f} vs {self.rhs:.5f}, margin {self.margin:+.2e}) -> {self.verdict.value}"
        )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["margin"] = self.margin
        d["verdict"] = self.verdict.value
        return d


def compare(label, lhs_name, lhs, rhs_name, rhs, error, strict=False, asserted=True) -> BoundVerdict:
    return BoundVerdict(label, lhs_name, rhs_name, float(lhs), float(rhs), float(error), strict, asserted)


@dataclasses.dataclass
class InvariantReport:
    """One lattice's invariants, bound verdicts and table deviations."""

    name: str
    n_vertices: int
    n_edges: int
    nu_diamond: float
    nu_bar: float
    z: float | None = None
    z_error: float | None = None
    vol_perp: float | None = None
    verdicts: list = dataclasses.field(default_factory=list)
    deviations: dict = dataclasses.field(default_factory=dict)
    row: int | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return any(v.failed for v in self.verdicts)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["verdicts"] = [v.to_dict() for v in self.verdicts]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InvariantReport":
        d = dict(d)
        vs = []
        for v in d.pop("verdicts", []):
            v = {k: v[k] for k in ("label", "lhs_name", "rhs_name", "lhs", "rhs", "error", "strict", "asserted")}
            vs.append(BoundVerdict(**v))
        return cls(verdicts=vs, **d)


def _z_estimate(m: ToroidalMap, tol: float):
    est = entropy_logdet(m, tol=tol)
    err = max(est.error, tol) / m.n_vertices
    return est.value / m.n_vertices, err


def check_bounds(entry: CatalogEntry | ToroidalMap, tol: float = 1e-4) -> InvariantReport:
    """Invariants and both sides of the volume bound for one lattice.

    Raises
    ------
    ConvergenceError
        When the entropy quadrature exceeds its budget.
    """
    if isinstance(entry, ToroidalMap):
        entry = CatalogEntry(name=entry.name, map=entry)
    m = entry.map
    V = m.n_vertices
    nu = nu_bipyramid(m) / TWO_PI
    nb = nu_bar(m) / TWO_PI
    z, zerr = _z_estimate(m, tol)
    rep = InvariantReport(entry.name, V, m.n_edges, nu, nb, z, zerr, row=entry.row)
    ang = entry.half_angles()
    if ang is not None:
        try:
            rep.vol_perp = right_angled_volume(m, ang) / V / TWO_PI
        except AngleError as exc:
            log.warning("%s: stored half angles rejected: %s", entry.name, exc)
    err = zerr + EXACT_ERR
    rep.verdicts.append(compare("lower", "nu_diamond/2pi", nu, "z", z, err))
    rep.verdicts.append(compare("upper", "z", z, "nu_bar/2pi", nb, err))
    vol = entry.references.get("vol_hyperbolic")
    if vol is not None:
        rep.verdicts.append(compare("volume-lower", "vol/2pi|V|", vol / V / TWO_PI, "z", z, err))
    if entry.table is not None:
        t = entry.table
        rep.deviations = {"nu_diamond": nu - t.nu_diamond, "z": z - t.z, "nu_bar": nb - t.nu_bar}
    return rep


def table_within(rep: InvariantReport) -> dict:
    return {k: abs(v) <= TABLE_TOL[k] for k, v in rep.deviations.items()}


def _run_all(fn, items, threads):
    if threads is not None and threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def table1(tol: float = 1e-4, threads: int | None = None) -> list[InvariantReport]:
    """All table rows; per-row errors are recorded rather than raised."""

    def one(entry):
        try:
            return check_bounds(entry, tol)
        except Exception as exc:  # collected per row
            m = entry.map
            rep = InvariantReport(
                entry.name, m.n_vertices, m.n_edges, nu_bipyramid(m) / TWO_PI, nu_bar(m) / TWO_PI, row=entry.row
            )
            rep.error = f"{type(exc).__name__}: {exc}"
            return rep

    reps = _run_all(one, table_entries(), threads)
    return sorted(reps, key=lambda r: (r.row or 99, r.name))


# ----------------------------------------------------------------------
# constructions that propagate the bounds


@dataclasses.dataclass
class FamilyCheck:
    """Verdicts for a derived lattice and the identities behind them."""

    name: str
    verdicts: list = dataclasses.field(default_factory=list)
    values: dict = dataclasses.field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(v.failed for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"name": self.name, "values": self.values, "verdicts": [v.to_dict() for v in self.verdicts]}


def _hypothesis(out: FamilyCheck, m: ToroidalMap, z: float, err: float):
    nu, nb = nu_bipyramid(m) / TWO_PI, nu_bar(m) / TWO_PI
    out.verdicts.append(compare("hypothesis-lower", "nu_diamond/2pi", nu, "z", z, err, asserted=False))
    out.verdicts.append(compare("hypothesis-upper", "z", z, "nu_bar/2pi", nb, err, asserted=False))


def _strict_bounds(out: FamilyCheck, m2: ToroidalMap, z2: float, err: float):
    nu2, nb2 = nu_bipyramid(m2) / TWO_PI, nu_bar(m2) / TWO_PI
    out.values.update(nu_diamond=nu2, nu_bar=nb2, z=z2)
    out.verdicts.append(compare("strict-lower", "nu_diamond/2pi", nu2, "z", z2, err, strict=True))
    out.verdicts.append(compare("strict-upper", "z", z2, "nu_bar/2pi", nb2, err, strict=True))


def _shift_identity(out: FamilyCheck, m: ToroidalMap, m2: ToroidalMap, zfd: float, shift: float, tol: float):
    """Compare a computed entropy of the derived lattice with ``zfd + shift``."""
    est = entropy_logdet(m2, tol=tol)
    budget = 3 * max(tol, est.error)
    out.values.update(zfd=zfd, zfd_derived=est.value, zfd_predicted=zfd + shift)
    out.verdicts.append(
        compare("entropy-shift", "|computed - predicted|", abs(est.value - zfd - shift), "budget", budget, 0.0)
    )


def verify_parallel(entry: CatalogEntry, s: int, tol: float = 1e-4) -> FamilyCheck:
    """Strict bounds for the lattice with every edge replaced by ``s`` copies."""
    if s < 2:
        raise ValueError("s must be at least 2")
    m = entry.map
    zfd = entropy_logdet(m, tol=tol)
    z, err = zfd.value / m.n_vertices, max(zfd.error, tol) / m.n_vertices
    out = FamilyCheck(f"parallel({entry.name},{s})")
    _hypothesis(out, m, z, err)
    ms = parallel_edges(m, s)
    _strict_bounds(out, ms, z + math.log(s), err)
    out.verdicts.append(
        compare(
            "parallel-volume",
            "nu_diamond(G_s)",
            nu_bipyramid(ms),
            "nu_diamond(G)+2pi log s",
            nu_bipyramid(m) + TWO_PI * math.log(s),
            EXACT_ERR,
            strict=True,
        )
    )
    _shift_identity(out, m, ms, zfd.value, m.n_vertices * math.log(s), tol)
    return out


def proof_constants() -> list[BoundVerdict]:
    """Scalar inequalities used by the truncation and medial arguments."""
    pi = math.pi
    return [
        compare("truncation-constant", "pi log 2 + 6 v_tet", pi * math.log(2) + 6 * V_TET,
                "pi log 15", pi * math.log(15), EXACT_ERR, strict=True),
        compare("truncation-upper", "log 15", math.log(15), "6 v_oct/2pi", 6 * V_OCT / TWO_PI, EXACT_ERR, strict=True),
        compare("medial-constant", "3 v_oct", 3 * V_OCT, "2pi log 6", TWO_PI * math.log(6), EXACT_ERR, strict=True),
    ]


def _require_cubic(m: ToroidalMap):
    if not (m.degrees == 3).all():
        raise ValueError(f"{m.name or 'lattice'} is not 3-regular")


def _verify_cubic(entry, tol, build, factor, label, constants):
    m = entry.map
    _require_cubic(m)
    zfd = entropy_logdet(m, tol=tol)
    V = m.n_vertices
    z, err = zfd.value / V, max(zfd.error, tol) / V
    out = FamilyCheck(f"{label}({entry.name})")
    _hypothesis(out, m, z, err)
    m2 = build(m)
    shift = V / 2 * math.log(factor)
    _strict_bounds(out, m2, (zfd.value + shift) / m2.n_vertices, max(zfd.error, tol) / m2.n_vertices)
    _shift_identity(out, m, m2, zfd.value, shift, tol)
    out.verdicts.extend(v for v in proof_constants() if v.label.startswith(constants))
    return out


def verify_truncate(entry: CatalogEntry, tol: float = 1e-4) -> FamilyCheck:
    """Strict bounds for the truncation of a 3-regular lattice."""
    return _verify_cubic(entry, tol, truncate, 15, "truncate", "truncation")


def verify_medial(entry: CatalogEntry, tol: float = 1e-4) -> FamilyCheck:
    """Strict bounds for the medial graph of a 3-regular lattice."""
    return _verify_cubic(entry, tol, medial, 6, "medial", "medial")


MAX_FAMILY_STEPS = 6


def family_closed_form(n: int) -> float:
    """Entropy per fundamental domain of the medial of the n-th truncation."""
    return 10 * V_TET / TWO_PI + (3**n - 1) / 2 * math.log(15) + 3**n * math.log(6)


def medial_truncation_family(k: int, base: ToroidalMap | None = None) -> list[FamilyCheck]:
    """Iterated truncations of the hexagonal lattice and their medial graphs."""
    if not 0 <= k <= MAX_FAMILY_STEPS:
        raise ValueError(f"k must be between 0 and {MAX_FAMILY_STEPS}")
    if base is None:
        from .catalog import get

        base = get("hexagonal").map
    zfd = 10 * V_TET / TWO_PI
    g = base
    out = []
    for n in range(k + 1):
        if n > 0:
            zfd += g.n_vertices / 2 * math.log(15)
            g = truncate(g)
        gm = medial(g)
        composed = zfd + g.n_vertices / 2 * math.log(6)
        closed = family_closed_form(n)
        chk = FamilyCheck(f"medial(truncate^{n}(hexagonal))")
        V2, E2 = gm.n_vertices, gm.n_edges
        chk.values.update(n=n, n_vertices=V2, n_edges=E2, zfd_closed=closed, zfd_composed=composed)
        chk.verdicts.append(compare("closed-form", "|closed - composed|", abs(closed - composed), "1e-12", 1e-12, 0.0))
        chk.verdicts.append(compare("edge-count", "|E'|", E2, "2*3^(n+1)", 2 * 3 ** (n + 1), 0.0))
        chk.verdicts.append(compare("strict-upper", "2pi zfd", TWO_PI * closed, "|E'| v_oct", E2 * V_OCT, EXACT_ERR, strict=True))
        chk.verdicts.append(
            compare("strict-lower", "vol(G')+vol(G'*)", nu_bipyramid(gm) * V2, "2pi zfd", TWO_PI * closed, EXACT_ERR, strict=True)
        )
        out.append(chk)
    return out


# ----------------------------------------------------------------------
# finite planar graphs


@dataclasses.dataclass
class PlanarReport:
    n_vertices: int
    n_edges: int
    tau: int
    vol_diamond: float
    vol_diamond_dual: float
    hyperbolic: bool
    flags: dict
    verdicts: list

    @property
    def failed(self) -> bool:
        return any(v.failed for v in self.verdicts)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["tau"] = str(self.tau)
        d["verdicts"] = [v.to_dict() for v in self.verdicts]
        return d


def _planar_dual_graph(g: PlanarGraph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.n_faces))
    for k in range(g.n_edges):
        h.add_edge(int(g.face_of[2 * k]), int(g.face_of[2 * k + 1]))
    return h


def _shape_flags(h: nx.MultiGraph) -> dict:
    simple = nx.Graph(h)
    simple.remove_edges_from(nx.selfloop_edges(simple))
    degs = [d for _, d in h.degree()]
    return {
        "loops": nx.number_of_selfloops(h) > 0,
        "cut_vertex": any(True for _ in nx.articulation_points(simple)),
        "cycle": nx.is_connected(h) and all(d == 2 for d in degs),
    }


def check_planar(g: PlanarGraph) -> PlanarReport:
    """Exact tree count against the bipyramid and octahedral bounds."""
    if not g.is_connected():
        raise ValueError("planar graph is disconnected")
    tau = tau_exact(g.to_multigraph())
    lt = math.log(tau) if tau > 0 else float("-inf")
    vd, vdd = vol_bipyramid_planar(g), vol_bipyramid_planar_dual(g)
    prim = nx.MultiGraph()
    prim.add_nodes_from(range(g.n_vertices))
    prim.add_edges_from(g.edges)
    fp, fd = _shape_flags(prim), _shape_flags(_planar_dual_graph(g))
    flags = {f"graph_{k}": v for k, v in fp.items()} | {f"dual_{k}": v for k, v in fd.items()}
    hyperbolic = not any(flags.values())
    verdicts = [
        compare("upper", "2pi log tau", TWO_PI * lt, "|E| v_oct", g.n_edges * V_OCT, EXACT_ERR, strict=True),
        compare("lower", "vol(G)+vol(G*)", vd + vdd, "2pi log tau", TWO_PI * lt, EXACT_ERR, asserted=False),
    ]
    return PlanarReport(g.n_vertices, g.n_edges, tau, vd, vdd, hyperbolic, flags, verdicts)


def patch_convergence(m: ToroidalMap, sizes) -> list[tuple[int, float]]:
    """``nu_diamond`` of growing planar patches (per vertex, over 2 pi)."""
    from .torus_map import planar_patch

    return [(n, nu_bipyramid_planar(planar_patch(m, n)) / TWO_PI) for n in sizes]


# ----------------------------------------------------------------------
# counterexample summary and report output


def counterexample_ordering(entry: CatalogEntry, tol: float = 1e-4) -> dict:
    """The four numbers ``vol < 2pi zfd < vol(G)+vol(G*) < |E| v_oct``."""
    m = entry.map
    zfd = entropy_logdet(m, tol=tol)
    return {
        "vol_hyperbolic": entry.references.get("vol_hyperbolic", COUNTEREXAMPLE["vol_hyperbolic"]),
        "two_pi_zfd": TWO_PI * zfd.value,
        "vol_diamond_sum": nu_bipyramid(m) * m.n_vertices,
        "e_voct": m.n_edges * V_OCT,
    }


COLUMNS = ("row", "name", "V", "nu_diamond/2pi", "z", "nu_bar/2pi", "lower", "upper", "max_dev")


def _row_values(r: InvariantReport):
    lower = next((v.verdict.value for v in r.verdicts if v.label == "lower"), "error")
    upper = next((v.verdict.value for v in r.verdicts if v.label == "upper"), "error")
    dev = max((abs(x) for x in r.deviations.values()), default=float("nan"))
    z = float("nan") if r.z is None else r.z
    return (r.row or "", r.name, r.n_vertices, r.nu_diamond, z, r.nu_bar, lower, upper, dev)


def format_reports(reports, fmt: str = "md") -> str:
    """Render invariant reports as a Markdown table, CSV or JSON."""
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=1, sort_keys=True)
    rows = [_row_values(r) for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([f"{x:.10g}" if isinstance(x, float) else x for x in row])
        return buf.getvalue()
    if fmt != "md":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for row in rows:
        cells = []
        for i, x in enumerate(row):
            if isinstance(x, float):
                cells.append(f"{x:.1e}" if COLUMNS[i] == "max_dev" else f"{x:.5f}")
            else:
                cells.append(str(x))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def reports_from_json(text: str) -> list[InvariantReport]:
    return [InvariantReport.from_dict(d) for d in json.loads(text)]


def scan(entries, tol: float = 1e-4) -> list[InvariantReport]:
    """Bounds for user lattices; returns those breaking either inequality."""
    out = []
    for e in entries:
        rep = check_bounds(e, tol)
        if rep.failed:
            out.append(rep)
    return out


__all__ = [
    "BoundVerdict",
    "FamilyCheck",
    "InvariantReport",
    "PlanarReport",
    "Verdict",
    "check_bounds",
    "check_planar",
    "counterexample_ordering",
    "format_reports",
    "medial_truncation_family",
    "proof_constants",
    "table1",
    "verify_medial",
    "verify_parallel",
    "verify_truncate",
]

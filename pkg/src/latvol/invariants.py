"""
Volume invariants of toroidal and finite planar graphs.

All per-vertex quantities are returned unnormalised (not divided by 2 pi);
callers that want the table convention divide by ``2 * math.pi``.
"""
import dataclasses
import math
from fractions import Fraction

import numpy as np

from .hyp import V_OCT, bipyramid_volume, bipyramid_volumes, lobachevsky
from .torus_map import (
    Diagnostics,
    PlanarGraph,
    TemperleyanMap,
    ToroidalMap,
    dual,
    faces,
    temperleyan,
)

ANGLE_TOL = 1e-9


class AngleError(ValueError):
    """Half-angle data fails the kite or vertex constraints."""


def _face_degrees(m: ToroidalMap) -> np.ndarray:
    return np.array([w.degree for w in faces(m)], dtype=np.int64)


def vol_bipyramid(m: ToroidalMap) -> float:
    """Sum of regular ideal bipyramid volumes over the faces of ``m``."""
    return float(bipyramid_volumes(_face_degrees(m)).sum())


def nu_bipyramid(m: ToroidalMap) -> float:
    """``(vol(G) + vol(G*)) / |V|``.

    The faces of the dual are the vertices of ``m``, so the dual sum is
    taken over vertex degrees without building the dual map.
    """
    total = vol_bipyramid(m) + float(bipyramid_volumes(m.degrees).sum())
    return total / m.n_vertices


def nu_bar(m: ToroidalMap) -> float:
    """``|E| v_oct / |V|``."""
    return m.n_edges * V_OCT / m.n_vertices


# ----------------------------------------------------------------------
# finite planar graphs


def vol_bipyramid_planar(g: PlanarGraph) -> float:
    """Bipyramid volume summed over bounded faces only."""
    degs = np.array([len(f) for f in g.bounded_faces()], dtype=np.int64)
    return float(bipyramid_volumes(degs).sum()) if len(degs) else 0.0


def vol_bipyramid_planar_dual(g: PlanarGraph) -> float:
    """Bounded-face volume of the planar dual.

    Bounded faces of the dual are the vertices of ``g`` off the outer face;
    their degree is the vertex degree in ``g``.
    """
    outer = g.outer_vertices()
    degs = [int(d) for v, d in enumerate(g.degrees()) if v not in outer and d >= 2]
    return float(bipyramid_volumes(np.array(degs, dtype=np.int64)).sum()) if degs else 0.0


def nu_bipyramid_planar(g: PlanarGraph) -> float:
    if g.euler_characteristic() != 2:
        raise ValueError("graph is not a connected plane graph")
    return (vol_bipyramid_planar(g) + vol_bipyramid_planar_dual(g)) / g.n_vertices


# ----------------------------------------------------------------------
# half angles on the Temperleyan graph


@dataclasses.dataclass(frozen=True, eq=False)
class HalfAngleAssignment:
    """Half angle at the black end of every edge of the Temperleyan graph.

    ``theta[k]`` belongs to edge ``k`` of ``tmap.map``; edges ``0..2E-1``
    are primal spokes and ``2E..4E-1`` dual spokes.
    """

    tmap: TemperleyanMap
    theta: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float).reshape(-1)
        if len(th) != self.tmap.map.n_edges:
            raise AngleError(
                f"expected {self.tmap.map.n_edges} half angles, got {len(th)}"
            )
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    @property
    def base(self) -> ToroidalMap:
        return self.tmap.base

    def primal(self, d: int) -> float:
        """Half angle at the primal corner counter-clockwise of dart ``d``."""
        return float(self.theta[d])

    def weights(self) -> np.ndarray:
        """Critical edge weights ``2 sin theta``."""
        return 2.0 * np.sin(self.theta)


def kite_partner(tmap: TemperleyanMap) -> np.ndarray:
    """Map each Temperleyan edge to the edge sharing its kite."""
    out = np.empty(tmap.map.n_edges, dtype=np.int64)
    for a, b in tmap.kites:
        out[a // 2] = b // 2
        out[b // 2] = a // 2
    return out


def angles_from_primal(m: ToroidalMap, primal_theta, tmap: TemperleyanMap | None = None):
    """Complete primal-corner half angles with ``pi/2 - theta`` at dual corners."""
    tmap = tmap or temperleyan(m)
    nd = m.n_darts
    primal_theta = np.asarray(primal_theta, dtype=float)
    if len(primal_theta) != nd:
        raise AngleError(f"need one primal half angle per dart ({nd}), got {len(primal_theta)}")
    partner = kite_partner(tmap)
    theta = np.empty(2 * nd)
    theta[:nd] = primal_theta
    theta[partner[:nd]] = math.pi / 2 - primal_theta
    return HalfAngleAssignment(tmap, theta)


def validate_angles(m: ToroidalMap, ang: HalfAngleAssignment, tol: float = ANGLE_TOL) -> Diagnostics:
    """Range, vertex-sum and kite-sum checks for a half-angle assignment."""
    if ang.base is not m and ang.base.n_darts != m.n_darts:
        raise AngleError("half angles were built for a different map")
    diag = Diagnostics()
    th = ang.theta
    gb = ang.tmap.map
    in_range = bool(((th > 0) & (th < math.pi / 2)).all())
    diag.checks["range"] = in_range
    if not in_range:
        diag.messages.append("half angles must lie strictly between 0 and pi/2")

    black = gb.vertex_of[0::2]
    sums = np.bincount(black, weights=th, minlength=ang.tmap.n_black)
    err = np.abs(sums - math.pi)
    diag.checks["vertex_sums"] = bool(err.max() <= tol)
    if err.max() > tol:
        v = int(err.argmax())
        diag.messages.append(f"half angles at black vertex {v} sum to {sums[v]:.12g}, expected pi")

    kite = np.array([th[a // 2] + th[b // 2] for a, b in ang.tmap.kites])
    kerr = np.abs(kite - math.pi / 2)
    diag.checks["kite_sums"] = bool(kerr.max() <= tol)
    if kerr.max() > tol:
        i = int(kerr.argmax())
        diag.messages.append(f"kite {i} has half angles summing to {kite[i]:.12g}, expected pi/2")
    diag.counts.update(edges=gb.n_edges, kites=len(ang.tmap.kites))
    return diag


def _require_valid(m, ang):
    diag = validate_angles(m, ang)
    if not all(diag.checks.values()):
        raise AngleError("invalid half angles: " + "; ".join(diag.messages))


def regular_angles(m: ToroidalMap) -> HalfAngleAssignment:
    """``theta = pi / deg`` at every black vertex, if that is consistent."""
    tmap = temperleyan(m)
    deg = tmap.map.degrees
    black = tmap.map.vertex_of[0::2]
    ang = HalfAngleAssignment(tmap, math.pi / deg[black])
    diag = validate_angles(m, ang)
    if not all(diag.checks.values()):
        raise AngleError(f"lattice {m.name or '?'} is not angle-regular: " + "; ".join(diag.messages))
    return ang


def right_angled_volume(m: ToroidalMap, ang: HalfAngleAssignment) -> float:
    """``sum 2 L(theta_e)`` over the Temperleyan edges (per fundamental domain)."""
    _require_valid(m, ang)
    return float(2.0 * np.sum(lobachevsky(ang.theta)))


def isoradial_entropy(m: ToroidalMap, ang: HalfAngleAssignment) -> float:
    """Dimer entropy for critical weights ``2 sin theta``.

    ``sum_e (2 theta_e log(2 sin theta_e) + 2 L(theta_e)) / (2 pi)``.
    """
    gb = ang.tmap.map
    sums = np.bincount(gb.vertex_of[0::2], weights=ang.theta, minlength=ang.tmap.n_black)
    if np.abs(sums - math.pi).max() > ANGLE_TOL:
        raise AngleError("half angles must sum to pi around every black vertex")
    if not ((ang.theta > 0) & (ang.theta < math.pi / 2)).all():
        raise AngleError("half angles must lie strictly between 0 and pi/2")
    th = ang.theta
    total = np.sum(2 * th * np.log(2 * np.sin(th)) + 2 * lobachevsky(th))
    return float(total / (2 * math.pi))


def uniform_weight_shift(ang: HalfAngleAssignment) -> float:
    """``sum_b log w_b`` over black vertices whose edges share a weight ``w_b``.

    Scaling every edge at a black vertex by ``w_b`` multiplies each dimer
    cover by ``w_b`` once, so the entropy moves by exactly this amount.
    """
    gb = ang.tmap.map
    black = gb.vertex_of[0::2]
    w = ang.weights()
    out = 0.0
    for b in range(ang.tmap.n_black):
        wb = w[black == b]
        if np.ptp(wb) > 1e-12:
            raise AngleError(f"black vertex {b} carries unequal weights")
        out += math.log(wb[0])
    return out


def parse_theta_over_pi(text) -> Fraction:
    return Fraction(str(text))

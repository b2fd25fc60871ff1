"""Prover-local computations and plaintext oracles.

Everything here runs on plain Python integers, off-circuit.  The triangle
search and barycentric conversion are the helper computations a prover
performs before wiring hints into the circuit; the ``oracle_*`` functions
are independent straight-line evaluations of the two policies, used as
ground truth when checking circuit satisfiability.  They deliberately do
not share code with the gadget implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .poseidon import PoseidonParams


class DegenerateTriangle(Exception):
    pass


def isqrt(v: int) -> int:
    """Integer square root, rounded toward zero."""
    if v < 0:
        raise ValueError("negative input")
    return math.isqrt(v)


def area_dbl_sgn(a1: int, b1: int, a2: int, b2: int, a3: int, b3: int) -> int:
    """Signed double area: det [[a1,a2,a3],[b1,b2,b3],[1,1,1]]."""
    return a1 * (b2 - b3) - a2 * (b1 - b3) + a3 * (b1 - b2)


def area_dbl(a1: int, b1: int, a2: int, b2: int, a3: int, b3: int) -> int:
    return abs(area_dbl_sgn(a1, b1, a2, b2, a3, b3))


def find_triangle(x: int, y: int, triangles) -> int:
    """1-based index of the first triangle containing (x, y), or 1 if none.

    Containment is decided by the area-sum criterion: the three triangles
    formed by the point and each pair of vertices cover exactly the
    original triangle iff the point is inside or on its boundary.
    """
    for i, ((x1, y1), (x2, y2), (x3, y3)) in enumerate(triangles, start=1):
        a = area_dbl(x1, y1, x2, y2, x3, y3)
        b = area_dbl(x1, y1, x2, y2, x, y)
        c = area_dbl(x1, y1, x, y, x3, y3)
        d = area_dbl(x, y, x2, y2, x3, y3)
        if a == b + c + d:
            return i
    return 1


@dataclass(frozen=True)
class BaryCoords:
    """Unnormalized barycentric pair; u = A - s - t is implied."""

    s: int
    t: int


def get_bcoords(x, y, a1, b1, a2, b2, a3, b3) -> BaryCoords:
    """Vertex-approach barycentric conversion, division-free.

    The sign correction makes all three coordinates non-negative exactly
    when the point is inside or on the boundary, regardless of vertex
    orientation.
    """
    area = area_dbl_sgn(a1, b1, a2, b2, a3, b3)
    if area == 0:
        raise DegenerateTriangle("zero-area triangle")
    sgn = 1 if area >= 0 else -1
    s = sgn * (b1 * a3 - a1 * b3 + (b3 - b1) * x + (a1 - a3) * y)
    t = sgn * (a1 * b2 - b1 * a2 + (b1 - b2) * x + (a2 - a1) * y)
    return BaryCoords(s, t)


# -- plaintext membership oracles (independent of the circuit gadgets) --


def point_in_triangle(x: int, y: int, tri) -> bool:
    """Sign-of-edge-crosses test; boundary counts as inside."""
    (x1, y1), (x2, y2), (x3, y3) = tri
    c1 = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
    c2 = (x3 - x2) * (y - y2) - (y3 - y2) * (x - x2)
    c3 = (x1 - x3) * (y - y3) - (y1 - y3) * (x - x3)
    return (c1 >= 0 and c2 >= 0 and c3 >= 0) or (c1 <= 0 and c2 <= 0 and c3 <= 0)


def point_in_any_triangle(x: int, y: int, triangles) -> bool:
    return any(point_in_triangle(x, y, tri) for tri in triangles)


def point_in_circles(x: int, y: int, circles) -> bool:
    """Non-strict membership in the union of circles."""
    return any((x - u) ** 2 + (y - v) ** 2 <= r * r for u, v, r in circles)


def oracle_ev(trail, circles, policy) -> bool:
    """Plaintext verdict of the subsidy policy on a trail.

    ``trail`` must expose ``padded_points(...)`` or be a plain point list;
    distances use floor integer square roots, membership the non-strict
    in-circle inequality.
    """
    pts = list(trail.points) if hasattr(trail, "points") else list(trail)
    circ = circles.circles if hasattr(circles, "circles") else circles
    tot = 0
    cc = 0
    inside_prev = point_in_circles(pts[0][0], pts[0][1], circ) if pts else False
    for i in range(1, len(pts)):
        (x0, y0), (x1, y1) = pts[i - 1], pts[i]
        d = isqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
        tot += d
        inside = point_in_circles(x1, y1, circ)
        if inside_prev and inside:
            cc += d
        inside_prev = inside
    return tot >= policy.d_req and cc * 100 >= tot * policy.p_req


def off_road_split(points, triangles) -> tuple[int, int]:
    """(tot, hw): total length and length with both endpoints in triangles."""
    tot = 0
    hw = 0
    inside_prev = (
        point_in_any_triangle(points[0][0], points[0][1], triangles) if points else False
    )
    for i in range(1, len(points)):
        (x0, y0), (x1, y1) = points[i - 1], points[i]
        d = isqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
        tot += d
        inside = point_in_any_triangle(x1, y1, triangles)
        if inside_prev and inside:
            hw += d
        inside_prev = inside
    return tot, hw


def taxed_distance(trail, tris) -> int:
    pts = list(trail.points) if hasattr(trail, "points") else list(trail)
    triangles = tris.triangles if hasattr(tris, "triangles") else tris
    tot, hw = off_road_split(pts, triangles)
    return tot - hw


def oracle_hwtax(trail, tris, policy) -> bool:
    """Plaintext verdict of the highway-tax policy on a trail."""
    return taxed_distance(trail, tris) <= policy.d_max


# -- reference Poseidon permutation and sponge (plaintext oracle) --------


def poseidon_permutation_ref(state, pp: PoseidonParams) -> list[int]:
    """Straight-line reference permutation on plain residues.

    Round structure: half the full rounds, all partial rounds, then the
    remaining full rounds.  Each round adds constants, applies x^alpha to
    every lane (full) or lane 0 only (partial), then multiplies by the MDS
    matrix.
    """
    p = pp.prime
    t = pp.t
    if len(state) != t:
        raise ValueError(f"state width must be {t}")
    s = [v % p for v in state]
    rc = pp.round_constants
    half = pp.r_full // 2
    for rnd in range(pp.n_rounds):
        off = rnd * t
        s = [(s[i] + rc[off + i]) % p for i in range(t)]
        if half <= rnd < half + pp.r_partial:
            s[0] = pow(s[0], pp.alpha, p)
        else:
            s = [pow(v, pp.alpha, p) for v in s]
        s = [sum(pp.mds[i][j] * s[j] for j in range(t)) % p for i in range(t)]
    return s


def poseidon_digest_ref(msg, pp: PoseidonParams) -> int:
    """Reference sponge digest of a non-empty message of residues.

    Lane 0 is the capacity lane, seeded with the message length; chunks of
    ``rate`` elements are added into the remaining lanes (zero-padded at
    the end) with a permutation after each chunk; the digest is lane 0 of
    the final state.
    """
    if not msg:
        raise ValueError("empty message")
    p = pp.prime
    state = [len(msg) % p] + [0] * (pp.t - 1)
    for start in range(0, len(msg), pp.rate):
        chunk = msg[start : start + pp.rate]
        for i, m in enumerate(chunk):
            state[1 + i] = (state[1 + i] + m) % p
        state = poseidon_permutation_ref(state, pp)
    return state[0]

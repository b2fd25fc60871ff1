"""Shared fixtures and random-instance generators for the test suite."""

from __future__ import annotations

import random

import pytest

from zkpol import localcalc
from zkpol.field import FieldParams
from zkpol.statements import (
    CircleSet,
    SubsidyPolicy,
    TaxPolicy,
    Trail,
    TriangleSet,
    make_instance,
)

FP12 = FieldParams(coord_bits=12)
COORD_BOUND = 1 << 12


@pytest.fixture(scope="session")
def fp12() -> FieldParams:
    return FP12


def random_trail(rng: random.Random, n_traj: int, bound: int = COORD_BOUND) -> Trail:
    n_pts = rng.randint(1, n_traj)
    return Trail(tuple((rng.randrange(bound), rng.randrange(bound)) for _ in range(n_pts)))


def random_circles(rng: random.Random, n_circ: int, bound: int = COORD_BOUND) -> CircleSet:
    return CircleSet(
        tuple(
            (rng.randrange(bound), rng.randrange(bound), rng.randrange(1, bound))
            for _ in range(n_circ)
        )
    )


def random_triangles(rng: random.Random, n_tri: int, bound: int = COORD_BOUND) -> TriangleSet:
    tris = []
    while len(tris) < n_tri:
        verts = tuple((rng.randrange(bound), rng.randrange(bound)) for _ in range(3))
        if localcalc.area_dbl_sgn(*verts[0], *verts[1], *verts[2]) != 0:
            tris.append(verts)
    return TriangleSet.oriented(tris)


def _trail_stats_ev(trail: Trail, n_traj: int, circles: CircleSet) -> tuple[int, int]:
    pts = trail.padded(n_traj)
    tot = cc = 0
    prev_in = localcalc.point_in_circles(pts[0][0], pts[0][1], circles.circles)
    for i in range(1, len(pts)):
        (x0, y0), (x1, y1) = pts[i - 1], pts[i]
        d = localcalc.isqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
        tot += d
        cur_in = localcalc.point_in_circles(x1, y1, circles.circles)
        if prev_in and cur_in:
            cc += d
        prev_in = cur_in
    return tot, cc

def random_ev_instance(rng: random.Random, max_traj: int = 64, max_circ: int = 8):
    """Random subsidy instance with a policy sampled near the achieved
    values, so verdicts mix between true and false."""
    n_traj = rng.randint(2, max_traj)
    n_circ = rng.randint(1, max_circ)
    circles = random_circles(rng, n_circ)
    # Bias some trails into the first circle so in-circle shares vary.
    if rng.random() < 0.5:
        u, v, r = circles.circles[0]
        half = max(1, r // 2)
        n_pts = rng.randint(1, n_traj)
        pts = tuple(
            (
                min(COORD_BOUND - 1, max(0, u + rng.randint(-half, half))),
                min(COORD_BOUND - 1, max(0, v + rng.randint(-half, half))),
            )
            for _ in range(n_pts)
        )
        trail = Trail(pts)
    else:
        trail = random_trail(rng, n_traj)
    tot, cc = _trail_stats_ev(trail, n_traj, circles)
    d_req = max(0, tot + rng.randint(-3, 3))
    pct = (cc * 100) // tot if tot else 100
    p_req = min(100, max(0, pct + rng.randint(-3, 3)))
    policy = SubsidyPolicy(d_req=d_req, p_req=p_req)
    return make_instance("ev", FP12, n_traj, policy, circles, trail)


def random_tax_instance(rng: random.Random, max_traj: int = 64, max_tri: int = 16):
    n_traj = rng.randint(2, max_traj)
    n_tri = rng.randint(1, max_tri)
    tris = random_triangles(rng, n_tri)
    trail = random_trail(rng, n_traj)
    taxed = localcalc.taxed_distance(trail.padded(n_traj), tris.triangles)
    d_max = max(0, taxed + rng.randint(-3, 3))
    return make_instance("tax", FP12, n_traj, TaxPolicy(d_max=d_max), tris, trail)

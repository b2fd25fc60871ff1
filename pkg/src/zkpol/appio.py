"""Instance file formats, fixture generation, and corridor triangulation.

Instances travel as JSON with every integer encoded as a decimal string
(field elements exceed 64-bit ranges).  Loading validates against the
statement invariants and re-orients clockwise triangles; errors carry a
JSON-pointer-style path to the offending field.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .field import FieldParams
from . import localcalc, statements
from .poseidon import PoseidonParams, params_for
from .statements import (
    CircleSet,
    InstanceError,
    StatementInstance,
    SubsidyPolicy,
    TaxPolicy,
    Trail,
    TriangleSet,
)

SCHEMA_VERSION = 1


class SchemaError(Exception):
    """Instance document malformed; message carries a JSON pointer."""


class GenerationFailed(Exception):
    pass


class Unsupported(Exception):
    pass


# -- instance (de)serialization -----------------------------------------


def _want(doc: dict, key: str, ptr: str):
    if key not in doc:
        raise SchemaError(f"{ptr}/{key}: missing")
    return doc[key]


def _as_int(value, ptr: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise SchemaError(f"{ptr}: not an integer (decimal string expected)")


def serialize_instance(inst: StatementInstance) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": inst.kind,
        "field_params": {
            "modulus": str(inst.field_params.modulus),
            "coord_bits": inst.field_params.coord_bits,
        },
        "poseidon": {
            "seed": inst.pp.seed.hex(),
            "t": inst.pp.t,
            "alpha": inst.pp.alpha,
            "r_full": inst.pp.r_full,
            "r_partial": inst.pp.r_partial,
        },
        "sizes": {"n_traj": inst.n_traj},
        "h_ex": str(inst.h_ex),
        "trail": {
            "declared_len": inst.trail.declared_len,
            "points": [[str(x), str(y)] for x, y in inst.trail.points],
        },
    }
    if inst.kind == "ev":
        doc["sizes"]["n_circ"] = inst.geometry.count
        doc["policy"] = {"d_req": str(inst.policy.d_req), "p_req": str(inst.policy.p_req)}
        doc["geometry"] = {
            "circles": [[str(u), str(v), str(r)] for u, v, r in inst.geometry.circles]
        }
    else:
        doc["sizes"]["n_tri"] = inst.geometry.count
        doc["policy"] = {"d_max": str(inst.policy.d_max)}
        doc["geometry"] = {
            "triangles": [
                [[str(x), str(y)] for x, y in tri] for tri in inst.geometry.triangles
            ]
        }
    return doc


def instance_from_doc(doc: dict) -> StatementInstance:
    if _as_int(doc.get("schema_version", 0), "/schema_version") != SCHEMA_VERSION:
        raise SchemaError("/schema_version: unsupported")
    kind = _want(doc, "kind", "")
    if kind not in ("ev", "tax"):
        raise SchemaError("/kind: must be 'ev' or 'tax'")
    fp_doc = _want(doc, "field_params", "")
    try:
        fp = FieldParams(
            modulus=_as_int(_want(fp_doc, "modulus", "/field_params"), "/field_params/modulus"),
            coord_bits=_as_int(_want(fp_doc, "coord_bits", "/field_params"), "/field_params/coord_bits"),
        )
    except Exception as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"/field_params: {exc}")
    ps_doc = _want(doc, "poseidon", "")
    try:
        pp = PoseidonParams(
            prime=fp.modulus,
            t=int(ps_doc.get("t", 3)),
            alpha=int(ps_doc.get("alpha", 5)),
            r_full=int(ps_doc.get("r_full", 8)),
            r_partial=int(ps_doc.get("r_partial", 56)),
            seed=bytes.fromhex(ps_doc.get("seed", "")) or params_for(fp).seed,
        )
    except Exception as exc:
        raise SchemaError(f"/poseidon: {exc}")
    sizes = _want(doc, "sizes", "")
    n_traj = _as_int(_want(sizes, "n_traj", "/sizes"), "/sizes/n_traj")
    trail_doc = _want(doc, "trail", "")
    points = []
    for i, pt in enumerate(_want(trail_doc, "points", "/trail")):
        if len(pt) != 2:
            raise SchemaError(f"/trail/points/{i}: expected [x, y]")
        points.append(
            (_as_int(pt[0], f"/trail/points/{i}/0"), _as_int(pt[1], f"/trail/points/{i}/1"))
        )
    trail = Trail(tuple(points))
    if "declared_len" in trail_doc and int(trail_doc["declared_len"]) != len(points):
        raise SchemaError("/trail/declared_len: does not match point count")
    pol_doc = _want(doc, "policy", "")
    geo_doc = _want(doc, "geometry", "")
    bound = 1 << fp.coord_bits
    if kind == "ev":
        policy = SubsidyPolicy(
            d_req=_as_int(_want(pol_doc, "d_req", "/policy"), "/policy/d_req"),
            p_req=_as_int(_want(pol_doc, "p_req", "/policy"), "/policy/p_req"),
        )
        circles = []
        for i, c in enumerate(_want(geo_doc, "circles", "/geometry")):
            u, v, r = (_as_int(x, f"/geometry/circles/{i}") for x in c)
            if not (0 <= u < bound and 0 <= v < bound and 0 < r < bound):
                raise SchemaError(f"/geometry/circles/{i}: out of coordinate range")
            circles.append((u, v, r))
        geometry = CircleSet(tuple(circles))
        if "n_circ" in sizes and int(sizes["n_circ"]) != len(circles):
            raise SchemaError("/sizes/n_circ: does not match geometry")
    else:
        policy = TaxPolicy(d_max=_as_int(_want(pol_doc, "d_max", "/policy"), "/policy/d_max"))
        tris = []
        for j, tri in enumerate(_want(geo_doc, "triangles", "/geometry")):
            if len(tri) != 3:
                raise SchemaError(f"/geometry/triangles/{j}: expected 3 vertices")
            verts = []
            for k, pt in enumerate(tri):
                x, y = (_as_int(v, f"/geometry/triangles/{j}/{k}") for v in pt)
                if not (0 <= x < bound and 0 <= y < bound):
                    raise SchemaError(f"/geometry/triangles/{j}/{k}: out of range")
                verts.append((x, y))
            tris.append(tuple(verts))
        try:
            geometry = TriangleSet.oriented(tris)
        except InstanceError as exc:
            raise SchemaError(f"/geometry/triangles: {exc}")
        if "n_tri" in sizes and int(sizes["n_tri"]) != len(tris):
            raise SchemaError("/sizes/n_tri: does not match geometry")
    h_ex = _as_int(_want(doc, "h_ex", ""), "/h_ex")
    try:
        inst = StatementInstance(
            kind=kind,
            field_params=fp,
            pp=pp,
            n_traj=n_traj,
            policy=policy,
            geometry=geometry,
            trail=trail,
            h_ex=h_ex,
        )
        statements.validate_instance(inst)
    except InstanceError as exc:
        raise SchemaError(f"/: {exc}")
    return inst


def load_instance(path) -> StatementInstance:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}")
    return instance_from_doc(doc)


def save_instance(inst: StatementInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(serialize_instance(inst), fh, indent=2)
        fh.write("\n")


# -- fixture generation --------------------------------------------------


@dataclass(frozen=True)
class FixtureSpec:
    kind: str  # "ev" | "tax"
    seed: int
    n_traj: int
    n_geo: int
    coord_bits: int = 12
    mode: str = "compliant"  # compliant | non_compliant | boundary

    def __post_init__(self):
        if self.kind not in ("ev", "tax"):
            raise GenerationFailed(f"unknown kind {self.kind!r}")
        if self.mode not in ("compliant", "non_compliant", "boundary"):
            raise GenerationFailed(f"unknown mode {self.mode!r}")
        if not 1 <= self.n_traj <= 4096:
            raise GenerationFailed("n_traj outside desk-scale cap [1, 4096]")
        if self.n_geo < 1:
            raise GenerationFailed("n_geo must be positive")


def _field_for(coord_bits: int) -> FieldParams:
    return FieldParams(coord_bits=coord_bits)


def _gen_ev(spec: FixtureSpec, rng: random.Random) -> StatementInstance:
    fp = _field_for(spec.coord_bits)
    bound = 1 << spec.coord_bits
    span = bound // 4
    circles = []
    for _ in range(spec.n_geo):
        r = rng.randrange(max(2, span // 4), max(3, span))
        u = rng.randrange(r, bound - r)
        v = rng.randrange(r, bound - r)
        circles.append((u, v, r))
    # Walk inside the first circle: every point in its inscribed box.
    u0, v0, r0 = circles[0]
    half = max(1, localcalc.isqrt(r0 * r0 // 2))
    n_pts = rng.randrange(2, spec.n_traj + 1) if spec.n_traj > 1 else 1
    pts = [
        (rng.randrange(u0 - half, u0 + half + 1), rng.randrange(v0 - half, v0 + half + 1))
        for _ in range(n_pts)
    ]
    trail = Trail(tuple(pts))
    padded = trail.padded(spec.n_traj)
    tot = 0
    for i in range(1, len(padded)):
        (x0, y0), (x1, y1) = padded[i - 1], padded[i]
        tot += localcalc.isqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
    # All points inside circle 0, so cc == tot and the achieved share is 100%.
    if spec.mode == "compliant":
        policy = SubsidyPolicy(d_req=rng.randrange(0, tot + 1), p_req=rng.randrange(0, 101))
    elif spec.mode == "boundary":
        policy = SubsidyPolicy(d_req=tot, p_req=100)
    else:
        policy = SubsidyPolicy(d_req=tot + 1, p_req=rng.randrange(0, 101))
    return statements.make_instance(
        "ev", fp, spec.n_traj, policy, CircleSet(tuple(circles)), trail
    )


def _gen_tax(spec: FixtureSpec, rng: random.Random) -> StatementInstance:
    fp = _field_for(spec.coord_bits)
    bound = 1 << spec.coord_bits
    side = bound - 1
    road_y = side // 2
    margin = max(1, side // 16)
    tris = corridor_triangulate(
        [(0, road_y), (side, road_y)], margin, (0, 0, side, side)
    ).triangles
    if len(tris) > spec.n_geo:
        # Keep the area bookkeeping simple: require enough triangle slots.
        raise GenerationFailed("n_geo too small for the corridor triangulation")
    tris = list(tris)
    while len(tris) < spec.n_geo:
        tris.append(tris[-1])
    tri_set = TriangleSet(tuple(tris))

    def pick_off_road():
        y = rng.randrange(0, road_y - margin) if rng.random() < 0.5 else rng.randrange(
            road_y + margin + 1, side + 1
        )
        return (rng.randrange(0, side + 1), y)

    def pick_on_road():
        return (rng.randrange(0, side + 1), road_y)

    n_pts = rng.randrange(2, spec.n_traj + 1) if spec.n_traj > 1 else 1
    pts = [pick_off_road() for _ in range(n_pts)]
    if spec.mode in ("non_compliant", "boundary") and n_pts >= 2:
        # Plant a taxed stretch: consecutive on-road points.
        k = rng.randrange(0, n_pts - 1)
        pts[k] = pick_on_road()
        pts[k + 1] = (min(side, pts[k][0] + margin + 5), road_y)
    trail = Trail(tuple(pts))
    taxed = localcalc.taxed_distance(trail.padded(spec.n_traj), tris)
    if spec.mode == "compliant":
        policy = TaxPolicy(d_max=taxed + rng.randrange(0, 100))
    elif spec.mode == "boundary":
        policy = TaxPolicy(d_max=taxed)
    else:
        if taxed == 0:
            raise GenerationFailed("could not plant a taxed segment")
        policy = TaxPolicy(d_max=taxed - 1)
    return statements.make_instance("tax", fp, spec.n_traj, policy, tri_set, trail)


def gen_fixture(spec: FixtureSpec, max_retries: int = 20) -> StatementInstance:
    """Deterministic fixture whose oracle verdict matches the mode flag."""
    rng = random.Random(spec.seed)
    last_err = None
    for _ in range(max_retries):
        try:
            inst = _gen_ev(spec, rng) if spec.kind == "ev" else _gen_tax(spec, rng)
        except (GenerationFailed, InstanceError) as exc:
            last_err = exc
            continue
        verdict = statements.oracle_verdict(inst)
        want = spec.mode != "non_compliant"
        if verdict == want:
            return inst
        last_err = GenerationFailed(f"verdict {verdict} != wanted {want}")
    raise GenerationFailed(f"no fixture after {max_retries} tries: {last_err}")


# -- corridor triangulation ---------------------------------------------


def _inflate(polyline, margin: int):
    rects = []
    for (x0, y0), (x1, y1) in zip(polyline, polyline[1:]):
        if x0 != x1 and y0 != y1:
            raise Unsupported("only axis-aligned segments are supported")
        rects.append(
            (
                min(x0, x1) - margin,
                min(y0, y1) - margin,
                max(x0, x1) + margin,
                max(y0, y1) + margin,
            )
        )
    return rects


def corridor_triangulate(polyline, margin: int, bbox) -> TriangleSet:
    """Triangulate bbox minus the margin-inflated axis-aligned corridor.

    The complement is decomposed on the grid induced by all rectangle
    edges; every kept cell is split into two positively oriented
    triangles, so total triangle area exactly equals bbox area minus the
    corridor's intersection with the bbox.
    """
    if margin <= 0:
        raise Unsupported("margin must be positive")
    if len(polyline) < 2:
        raise Unsupported("polyline needs at least two points")
    bx0, by0, bx1, by1 = bbox
    rects = _inflate(polyline, margin)
    xs = {bx0, bx1}
    ys = {by0, by1}
    for rx0, ry0, rx1, ry1 in rects:
        for v in (rx0, rx1):
            if bx0 < v < bx1:
                xs.add(v)
        for v in (ry0, ry1):
            if by0 < v < by1:
                ys.add(v)
    xs = sorted(xs)
    ys = sorted(ys)
    tris = []
    for cx0, cx1 in zip(xs, xs[1:]):
        for cy0, cy1 in zip(ys, ys[1:]):
            covered = any(
                rx0 <= cx0 and cx1 <= rx1 and ry0 <= cy0 and cy1 <= ry1
                for rx0, ry0, rx1, ry1 in rects
            )
            if covered:
                continue
            tris.append(((cx0, cy0), (cx1, cy0), (cx1, cy1)))
            tris.append(((cx0, cy0), (cx1, cy1), (cx0, cy1)))
    return TriangleSet.oriented(tris) if tris else TriangleSet(())

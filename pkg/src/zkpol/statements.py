"""The two proof statements: EV subsidy and highway tax.

Each builder lays down the full circuit for one statement instance on a
caller-supplied ConstraintSystem and returns a handle whose ``check``
method evaluates the system and reports satisfiability plus gate
counters.  Hint parameters allow tests to substitute adversarial
prover-local values (square roots, triangle indices) while keeping the
rest of the witness honest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import ConstraintSystem, Domain, SatisfactionReport, Wire
from .field import FieldParams
from . import gadgets, localcalc
from .poseidon import PoseidonParams, params_for


class InstanceError(Exception):
    pass


@dataclass(frozen=True)
class Trail:
    """Raw coordinate trail; padding repeats the last real point, so padded
    segments have zero length and never change tot/cc/hw."""

    points: tuple[tuple[int, int], ...]

    @property
    def declared_len(self) -> int:
        return len(self.points)

    def padded(self, n_traj: int) -> list[tuple[int, int]]:
        if not 0 < self.declared_len <= n_traj:
            raise InstanceError(
                f"trail length {self.declared_len} outside (0, {n_traj}]"
            )
        pts = list(self.points)
        pts.extend([pts[-1]] * (n_traj - len(pts)))
        return pts


@dataclass(frozen=True)
class CircleSet:
    circles: tuple[tuple[int, int, int], ...]  # (u, v, r)

    @property
    def count(self) -> int:
        return len(self.circles)


@dataclass(frozen=True)
class TriangleSet:
    triangles: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def count(self) -> int:
        return len(self.triangles)

    @classmethod
    def oriented(cls, triangles) -> "TriangleSet":
        """Re-orient clockwise triangles (swap vertices 2 and 3); reject
        degenerate ones."""
        out = []
        for tri in triangles:
            (x1, y1), (x2, y2), (x3, y3) = tri
            a = localcalc.area_dbl_sgn(x1, y1, x2, y2, x3, y3)
            if a == 0:
                raise InstanceError(f"degenerate triangle {tri}")
            if a < 0:
                tri = ((x1, y1), (x3, y3), (x2, y2))
            out.append(tuple(tuple(v) for v in tri))
        return cls(tuple(out))


@dataclass(frozen=True)
class SubsidyPolicy:
    d_req: int
    p_req: int

    def __post_init__(self):
        if not 0 <= self.p_req <= 100:
            raise InstanceError("p_req must be in [0, 100]")
        if self.d_req < 0:
            raise InstanceError("d_req must be non-negative")


@dataclass(frozen=True)
class TaxPolicy:
    d_max: int

    def __post_init__(self):
        if self.d_max < 0:
            raise InstanceError("d_max must be non-negative")


@dataclass(frozen=True)
class StatementInstance:
    kind: str  # "ev" | "tax"
    field_params: FieldParams
    pp: PoseidonParams
    n_traj: int
    policy: SubsidyPolicy | TaxPolicy
    geometry: CircleSet | TriangleSet
    trail: Trail
    h_ex: int

    @property
    def n_geo(self) -> int:
        return self.geometry.count


def tot_width(field_params: FieldParams, n_traj: int) -> int:
    """Bit width covering the accumulated trail length."""
    return field_params.coord_bits + 1 + max(n_traj, 1).bit_length()


def honest_hash(field_params: FieldParams, pp: PoseidonParams, trail: Trail, n_traj: int) -> int:
    pts = trail.padded(n_traj)
    msg = [x for x, _ in pts] + [y for _, y in pts]
    return localcalc.poseidon_digest_ref(msg, pp)


def validate_instance(inst: StatementInstance) -> None:
    fp = inst.field_params
    bound = 1 << fp.coord_bits
    if inst.kind not in ("ev", "tax"):
        raise InstanceError(f"unknown statement kind {inst.kind!r}")
    if inst.n_traj < 1:
        raise InstanceError("n_traj must be positive")
    if not 0 < inst.trail.declared_len <= inst.n_traj:
        raise InstanceError("trail length outside (0, n_traj]")
    for i, (x, y) in enumerate(inst.trail.points):
        if not (0 <= x < bound and 0 <= y < bound):
            raise InstanceError(f"trail point {i} outside [0, 2^{fp.coord_bits})")
    w = tot_width(fp, inst.n_traj)
    if inst.kind == "ev":
        if not isinstance(inst.geometry, CircleSet) or not isinstance(inst.policy, SubsidyPolicy):
            raise InstanceError("ev instance needs CircleSet + SubsidyPolicy")
        if inst.geometry.count < 1:
            raise InstanceError("need at least one circle")
        for i, (u, v, r) in enumerate(inst.geometry.circles):
            if not (0 <= u < bound and 0 <= v < bound):
                raise InstanceError(f"circle {i} center out of range")
            if not 0 < r < bound:
                raise InstanceError(f"circle {i} radius out of range")
        if inst.policy.d_req >= 1 << w:
            raise InstanceError("d_req exceeds the accumulator width")
    else:
        if not isinstance(inst.geometry, TriangleSet) or not isinstance(inst.policy, TaxPolicy):
            raise InstanceError("tax instance needs TriangleSet + TaxPolicy")
        if inst.geometry.count < 1:
            raise InstanceError("need at least one triangle")
        for j, tri in enumerate(inst.geometry.triangles):
            for (x, y) in tri:
                if not (0 <= x < bound and 0 <= y < bound):
                    raise InstanceError(f"triangle {j} vertex out of range")
            if localcalc.area_dbl_sgn(*tri[0], *tri[1], *tri[2]) <= 0:
                raise InstanceError(f"triangle {j} not positively oriented")


def make_instance(kind, field_params, n_traj, policy, geometry, trail, pp=None, h_ex=None) -> StatementInstance:
    """Assemble an instance, computing the honest trail hash by default."""
    pp = pp or params_for(field_params)
    if h_ex is None:
        h_ex = honest_hash(field_params, pp, trail, n_traj)
    inst = StatementInstance(
        kind=kind,
        field_params=field_params,
        pp=pp,
        n_traj=n_traj,
        policy=policy,
        geometry=geometry,
        trail=trail,
        h_ex=h_ex,
    )
    validate_instance(inst)
    return inst


@dataclass
class StatementHandle:
    cs: ConstraintSystem
    trail_input_ids: list[int]

    def check(self, overrides: dict[int, int] | None = None) -> SatisfactionReport:
        return self.cs.evaluate_and_check(overrides)


def _wire_trail(cs: ConstraintSystem, inst: StatementInstance):
    pts = inst.trail.padded(inst.n_traj)
    xs = [cs.wire_input(x, Domain.PROVER) for x, _ in pts]
    ys = [cs.wire_input(y, Domain.PROVER) for _, y in pts]
    digest = gadgets.poseidon_hash(cs, xs + ys, inst.pp)
    cs.assert_eq(digest, cs.wire_input(inst.h_ex, Domain.SHARED))
    return pts, xs, ys


def _segment_sq(cs, xs, ys, i) -> Wire:
    dx = cs.sub(xs[i], xs[i - 1])
    dy = cs.sub(ys[i], ys[i - 1])
    return cs.add(cs.mul(dx, dx), cs.mul(dy, dy))


def build_ev_subsidy(
    inst: StatementInstance,
    cs: ConstraintSystem,
    sqrt_hints: list[int] | None = None,
) -> StatementHandle:
    """Circuit for the subsidy statement.

    Binds the trail to h_ex, accumulates total length and in-circles
    length over consecutive segments, and asserts d_req <= tot and
    tot * p_req <= cc * 100.

    Segment square roots are checked on both sides.  Dropping the upper
    bound would let a prover understate the lengths of segments outside
    the circles, shrinking tot while cc stays put and inflating the
    coverage share; the percentage condition makes the one-sided
    relaxation unsound here, unlike in the tax statement.
    """
    if inst.kind != "ev":
        raise InstanceError("not an ev instance")
    validate_instance(inst)
    fp = inst.field_params
    kc = fp.coord_bits
    pts, xs, ys = _wire_trail(cs, inst)
    us = [cs.wire_input(u, Domain.SHARED) for u, _, _ in inst.geometry.circles]
    vs = [cs.wire_input(v, Domain.SHARED) for _, v, _ in inst.geometry.circles]
    ss = [cs.wire_input(r * r, Domain.SHARED) for _, _, r in inst.geometry.circles]

    tot = cs.const(0)
    cc = cs.const(0)
    b_pi = gadgets.check_inside(cs, us, vs, ss, xs[0], ys[0], kc)
    k_seg = kc + 1
    for i in range(1, inst.n_traj):
        b_in = gadgets.check_inside(cs, us, vs, ss, xs[i], ys[i], kc)
        sq = _segment_sq(cs, xs, ys, i)
        hint = sqrt_hints[i - 1] if sqrt_hints is not None else None
        d = gadgets.sqrt_floor(cs, sq, k_seg, "both", hint)
        # Range proof on d keeps the tot comparison widths honest.
        gadgets.decompose_bits(cs, d, k_seg)
        tot = cs.add(tot, d)
        both = gadgets.and_gate(cs, b_pi, b_in)
        cc = cs.oblivious_choice(both, cs.add(cc, d), cc)
        b_pi = b_in

    w = tot_width(fp, inst.n_traj)
    d_req = cs.wire_input(inst.policy.d_req, Domain.SHARED)
    gadgets.assert_leq(cs, d_req, tot, w)
    p_req = cs.wire_input(inst.policy.p_req, Domain.SHARED)
    lhs = cs.mul(tot, p_req)
    rhs = cs.affine([100], [cc])
    gadgets.assert_leq(cs, lhs, rhs, w + 7)
    return StatementHandle(cs, [w.id for w in xs] + [w.id for w in ys])


def build_highway_tax(
    inst: StatementInstance,
    cs: ConstraintSystem,
    sqrt_hints: list[int] | None = None,
    tri_hints: list[int] | None = None,
) -> StatementHandle:
    """Circuit for the highway-tax statement.

    Per point the prover locally finds a containing triangle, the circuit
    obliviously looks up its vertices and verifies the barycentric
    membership claim; the accumulator hw counts segment length with both
    endpoints off the taxed road, and the final assertion bounds
    tot - hw by d_max.
    """
    if inst.kind != "tax":
        raise InstanceError("not a tax instance")
    validate_instance(inst)
    fp = inst.field_params
    kc = fp.coord_bits
    tris = inst.geometry.triangles
    pts, xs, ys = _wire_trail(cs, inst)
    rows_x = []
    rows_y = []
    for tri in tris:
        rows_x.append(tuple(cs.wire_input(vx, Domain.SHARED) for vx, _ in tri))
        rows_y.append(tuple(cs.wire_input(vy, Domain.SHARED) for _, vy in tri))

    tot = cs.const(0)
    hw = cs.const(0)
    k_seg = kc + 1
    c_prev = None
    for i in range(inst.n_traj):
        x, y = pts[i]
        if tri_hints is not None and tri_hints[i] is not None:
            t_i = tri_hints[i]
        else:
            t_i = localcalc.find_triangle(x, y, tris)
        ref = tris[t_i - 1] if 1 <= t_i <= len(tris) else tris[0]
        bc = localcalc.get_bcoords(x, y, *ref[0], *ref[1], *ref[2])
        a_vec = gadgets.lookup(cs, t_i, rows_x)
        b_vec = gadgets.lookup(cs, t_i, rows_y)
        c_i = gadgets.check_inside_triangle(
            cs, a_vec, b_vec, xs[i], ys[i], (bc.s, bc.t), kc
        )
        if i > 0:
            sq = _segment_sq(cs, xs, ys, i)
            hint = sqrt_hints[i - 1] if sqrt_hints is not None else None
            d = gadgets.sqrt_floor(cs, sq, k_seg, "upper_only", hint)
            gadgets.decompose_bits(cs, d, k_seg)
            tot = cs.add(tot, d)
            off_road = gadgets.and_gate(cs, c_prev, c_i)
            hw = cs.oblivious_choice(off_road, cs.add(hw, d), hw)
        c_prev = c_i

    w = tot_width(fp, inst.n_traj)
    taxed = cs.sub(tot, hw)
    # d_max beyond the accumulator width always satisfies; clamp keeps the
    # comparison in range without changing the verdict.
    d_max = min(inst.policy.d_max, (1 << w) - 1)
    gadgets.assert_leq(cs, taxed, cs.wire_input(d_max, Domain.SHARED), w)
    return StatementHandle(cs, [w_.id for w_ in xs] + [w_.id for w_ in ys])


def build_statement(inst: StatementInstance, cs: ConstraintSystem, **hints) -> StatementHandle:
    if inst.kind == "ev":
        return build_ev_subsidy(inst, cs, **hints)
    return build_highway_tax(inst, cs, **hints)


def oracle_verdict(inst: StatementInstance) -> bool:
    pts = inst.trail.padded(inst.n_traj)
    if inst.kind == "ev":
        return localcalc.oracle_ev(pts, inst.geometry.circles, inst.policy)
    return localcalc.oracle_hwtax(pts, inst.geometry.triangles, inst.policy)


def _dummy_instance(kind: str, n_traj: int, n_geo: int, field_params: FieldParams, pp=None) -> StatementInstance:
    trail = Trail(tuple((1, 1) for _ in range(n_traj)))
    if kind == "ev":
        geometry = CircleSet(tuple((1, 1, 1) for _ in range(n_geo)))
        policy = SubsidyPolicy(d_req=0, p_req=0)
    else:
        geometry = TriangleSet.oriented([((0, 0), (3, 0), (0, 3))] * n_geo)
        policy = TaxPolicy(d_max=0)
    return make_instance(kind, field_params, n_traj, policy, geometry, trail, pp=pp)


def statement_cost(kind: str, n_traj: int, n_geo: int, field_params: FieldParams | None = None, pp=None) -> dict[str, int]:
    """Gate counters of a statement as a function of its sizes only."""
    if n_traj < 1 or n_geo < 1:
        raise InstanceError("sizes must be positive")
    fp = field_params or FieldParams()
    inst = _dummy_instance(kind, n_traj, n_geo, fp, pp)
    cs = ConstraintSystem(fp)
    build_statement(inst, cs)
    return cs.counters.as_dict()

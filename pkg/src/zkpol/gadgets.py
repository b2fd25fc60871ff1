"""Reusable circuit fragments.

Booleanity, bit decomposition, comparisons, the floor square root with
prover-supplied hint, Poseidon permutation/sponge, circle and triangle
membership, and the characteristic-vector lookup.  All gadgets append to a
caller-owned ConstraintSystem; prover-local hint values are derived from
the builder's eager values unless the caller supplies them explicitly
(which the adversarial tests do).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import ConstraintSystem, Domain, Wire
from .localcalc import isqrt
from .poseidon import PoseidonParams


class EmptyMessage(Exception):
    pass


@dataclass(frozen=True)
class BitVector:
    """Little-endian boolean-asserted wires recomposing to a source wire."""

    bits: tuple[Wire, ...]

    @property
    def width(self) -> int:
        return len(self.bits)


def assert_boolean(cs: ConstraintSystem, w: Wire) -> None:
    """Assert w * (w - 1) = 0."""
    cs.assert_zero(cs.mul(w, cs.sub(w, cs.const(1))))


def decompose_bits(cs: ConstraintSystem, w: Wire, k: int, hint: int | None = None) -> BitVector:
    """Split w into k boolean-asserted bits with a recomposition assertion.

    The bits enter as prover-only inputs computed from the prover-local
    value of w; if that value does not fit k bits the recomposition
    assertion fails and the system is unsatisfiable.
    """
    return BitVector(tuple(cs.decompose(w, k, hint)))


def leq(cs: ConstraintSystem, a: Wire, b: Wire, k: int) -> Wire:
    """Boolean wire: 1 iff a <= b, for prover-local values in [0, 2^k).

    Realized as the top bit of the (k+1)-bit decomposition of
    b - a + 2^k.  Callers must have range-constrained a and b; the
    statement builders do so by construction.
    """
    shifted = cs.affine([1, cs.p - 1], [b, a], 1 << k)
    return decompose_bits(cs, shifted, k + 1).bits[k]


def assert_leq(cs: ConstraintSystem, a: Wire, b: Wire, k: int) -> None:
    cs.assert_eq(leq(cs, a, b, k), cs.const(1))


def sqrt_floor(
    cs: ConstraintSystem,
    sq: Wire,
    k: int,
    mode: str = "both",
    hint: int | None = None,
) -> Wire:
    """Prover-supplied floor square root of sq in [0, 2^(2k)).

    mode selects which side of  d^2 <= sq < (d+1)^2  is enforced:
    "both", "lower_only" (subsidy use), or "upper_only" (tax use).
    """
    if mode not in ("both", "lower_only", "upper_only"):
        raise ValueError(f"unknown mode {mode!r}")
    d_val = hint if hint is not None else isqrt(cs.value(sq))
    d = cs.wire_input(d_val, Domain.PROVER)
    if mode in ("both", "lower_only"):
        dsq = cs.mul(d, d)
        assert_leq(cs, dsq, sq, 2 * k)
    if mode in ("both", "upper_only"):
        dp = cs.add(d, cs.const(1))
        dpsq = cs.mul(dp, dp)
        # sq < (d+1)^2  <=>  sq <= (d+1)^2 - 1
        assert_leq(cs, sq, cs.sub(dpsq, cs.const(1)), 2 * k)
    return d


def or_gate(cs: ConstraintSystem, a: Wire, b: Wire) -> Wire:
    """Boolean OR as a + b - a*b."""
    return cs.sub(cs.add(a, b), cs.mul(a, b))


def and_gate(cs: ConstraintSystem, a: Wire, b: Wire) -> Wire:
    return cs.mul(a, b)


def is_nonneg(cs: ConstraintSystem, v: Wire, m: int) -> Wire:
    """Boolean: the signed value of v lies in [0, 2^m), given |v| < 2^m."""
    shifted = cs.affine([1], [v], 1 << m)
    return decompose_bits(cs, shifted, m + 1).bits[m]


def check_inside(
    cs: ConstraintSystem,
    us: list[Wire],
    vs: list[Wire],
    ss: list[Wire],
    x: Wire,
    y: Wire,
    coord_bits: int,
) -> Wire:
    """Boolean: (x, y) lies inside at least one circle.

    ss holds the squared radii; membership per circle is the non-strict
    inequality (x-u)^2 + (y-v)^2 <= s checked at width 2*coord_bits + 1.
    """
    acc = cs.const(0)
    width = 2 * coord_bits + 1
    for u, v, s in zip(us, vs, ss):
        dx = cs.sub(x, u)
        dy = cs.sub(y, v)
        sqdist = cs.add(cs.mul(dx, dx), cs.mul(dy, dy))
        acc = or_gate(cs, acc, leq(cs, sqdist, s, width))
    return acc


def area_dbl_wire(cs, a1, b1, a2, b2, a3, b3) -> Wire:
    """Doubled triangle area as the determinant expansion.

    No absolute value on-circuit: ingestion guarantees positive
    orientation.
    """
    prods = [
        cs.mul(a1, b2),
        cs.mul(a1, b3),
        cs.mul(a2, b1),
        cs.mul(a2, b3),
        cs.mul(a3, b1),
        cs.mul(a3, b2),
    ]
    return cs.affine([1, cs.p - 1, cs.p - 1, 1, 1, cs.p - 1], prods)


def check_inside_triangle(
    cs: ConstraintSystem,
    a_wires: tuple[Wire, Wire, Wire],
    b_wires: tuple[Wire, Wire, Wire],
    x: Wire,
    y: Wire,
    bcoords: tuple[int, int],
    coord_bits: int,
) -> Wire:
    """Boolean: (x, y) inside or on the boundary of the triangle.

    The prover wires the unnormalized barycentric pair (s, t); the circuit
    derives u = A - s - t, asserts the exact Cartesian reconstruction
    identities, and returns the conjunction of the three sign checks.
    """
    a1, a2, a3 = a_wires
    b1, b2, b3 = b_wires
    A = area_dbl_wire(cs, a1, b1, a2, b2, a3, b3)
    p = cs.p
    s = cs.wire_input(bcoords[0] % p, Domain.PROVER)
    t = cs.wire_input(bcoords[1] % p, Domain.PROVER)
    u = cs.affine([1, p - 1, p - 1], [A, s, t])
    x_rec = cs.affine([1, 1, 1], [cs.mul(u, a1), cs.mul(s, a2), cs.mul(t, a3)])
    y_rec = cs.affine([1, 1, 1], [cs.mul(u, b1), cs.mul(s, b2), cs.mul(t, b3)])
    cs.assert_eq(x_rec, cs.mul(x, A))
    cs.assert_eq(y_rec, cs.mul(y, A))
    m = 2 * coord_bits + 3
    inside = and_gate(cs, is_nonneg(cs, s, m), is_nonneg(cs, t, m))
    return and_gate(cs, inside, is_nonneg(cs, u, m))


def lookup(cs: ConstraintSystem, t_index: int, rows: list[tuple[Wire, Wire, Wire]]) -> tuple[Wire, Wire, Wire]:
    """Oblivious row selection via a prover-supplied characteristic vector.

    t_index is 1-based; the vector is boolean-asserted and must sum to 1,
    so a malformed vector makes the system unsatisfiable.
    """
    n = len(rows)
    sel = []
    for i in range(1, n + 1):
        xi = cs.wire_input(1 if i == t_index else 0, Domain.PROVER)
        assert_boolean(cs, xi)
        sel.append(xi)
    total = cs.affine([1] * n, sel)
    cs.assert_eq(total, cs.const(1))
    out = []
    for k in range(3):
        prods = [cs.mul(sel[i], rows[i][k]) for i in range(n)]
        out.append(cs.affine([1] * n, prods))
    return tuple(out)


# -- Poseidon gadget ----------------------------------------------------


def _sbox(cs: ConstraintSystem, w: Wire, alpha: int) -> Wire:
    if alpha == 5:
        w2 = cs.mul(w, w)
        w4 = cs.mul(w2, w2)
        return cs.mul(w4, w)
    out = w
    for _ in range(alpha - 1):
        out = cs.mul(out, w)
    return out


def poseidon_permute(cs: ConstraintSystem, state: list[Wire], pp: PoseidonParams) -> list[Wire]:
    """In-circuit Poseidon permutation; mirrors the reference round
    structure exactly."""
    t = pp.t
    if len(state) != t:
        raise ValueError(f"state width must be {t}")
    s = list(state)
    rc = pp.round_constants
    half = pp.r_full // 2
    for rnd in range(pp.n_rounds):
        off = rnd * t
        s = [cs.affine([1], [s[i]], rc[off + i]) for i in range(t)]
        if half <= rnd < half + pp.r_partial:
            s[0] = _sbox(cs, s[0], pp.alpha)
        else:
            s = [_sbox(cs, v, pp.alpha) for v in s]
        s = [cs.affine(list(pp.mds[i]), s) for i in range(t)]
    return s


def poseidon_hash(cs: ConstraintSystem, msg: list[Wire], pp: PoseidonParams) -> Wire:
    """Sponge digest of a non-empty wire message; lane 0 is the capacity
    lane seeded with the public message length and squeezed at the end."""
    if not msg:
        raise EmptyMessage("cannot hash an empty message")
    state = [cs.const(len(msg)), cs.const(0), cs.const(0)][: pp.t]
    while len(state) < pp.t:
        state.append(cs.const(0))
    for start in range(0, len(msg), pp.rate):
        chunk = msg[start : start + pp.rate]
        for i, m in enumerate(chunk):
            state[1 + i] = cs.add(state[1 + i], m)
        state = poseidon_permute(cs, state, pp)
    return state[0]

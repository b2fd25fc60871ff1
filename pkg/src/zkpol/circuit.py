"""Visibility-tagged arithmetic circuit builder and satisfiability checker.

The circuit is an append-only list of gates over wires.  Each wire carries a
visibility domain (prover-only / shared / public) and a stage (local /
circuit); gates may only consume circuit-stage wires, and the domain of a
gate output is the most secret domain among its operands.

Construction is eager: every gate's value is computed as it is appended,
so gadget code can derive prover-local hints (bit decompositions, square
roots, characteristic vectors) from intermediate values.  This mirrors the
prover's side of a real backend.  ``evaluate_and_check`` then re-runs the
whole gate list from the input witnesses alone (optionally with some input
witnesses overridden) and checks every assertion, standing in for the
verifier-side protocol run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .field import FieldElement, FieldParams


class CircuitError(Exception):
    pass


class PublicNeedsNoWire(CircuitError):
    """Public constants enter through ``const``, not ``wire_input``."""


class StageViolation(CircuitError):
    """A local-stage wire was used where a circuit-stage wire is required."""


class IncompleteWitness(CircuitError):
    """An input wire has no witness value at evaluation time."""


class Domain(enum.IntEnum):
    """Visibility of a value; larger means more secret."""

    PUBLIC = 0
    SHARED = 1
    PROVER = 2


class Stage(enum.IntEnum):
    LOCAL = 0
    CIRCUIT = 1


class Wire:
    """Handle to a circuit value; compared by identity of its id."""

    __slots__ = ("id", "domain", "stage")

    def __init__(self, id: int, domain: Domain, stage: Stage):
        self.id = id
        self.domain = domain
        self.stage = stage

    def __repr__(self):
        return f"Wire({self.id}, {Domain(self.domain).name}, {Stage(self.stage).name})"

    def __eq__(self, other):
        if not isinstance(other, Wire):
            return NotImplemented
        return (self.id, self.domain, self.stage) == (other.id, other.domain, other.stage)

    def __hash__(self):
        return hash((self.id, self.domain, self.stage))


_CIRCUIT = Stage.CIRCUIT

# Gate opcodes (stored as plain tuples for evaluation speed).
_INPUT = 0
_CONST = 1
_ADD = 2
_SUB = 3
_MUL = 4
_AFFINE = 5  # (op, coeffs, wire_ids, const)


@dataclass(frozen=True)
class Counters:
    n_mul: int
    n_add: int
    n_assert: int
    n_prover_inputs: int
    n_shared_inputs: int

    def as_dict(self) -> dict[str, int]:
        return {
            "n_mul": self.n_mul,
            "n_add": self.n_add,
            "n_assert": self.n_assert,
            "n_prover_inputs": self.n_prover_inputs,
            "n_shared_inputs": self.n_shared_inputs,
        }


@dataclass(frozen=True)
class SatisfactionReport:
    satisfied: bool
    first_failed_assertion: int | None
    counters: Counters


class ConstraintSystem:
    """Single-writer builder; evaluation is read-only."""

    def __init__(self, params: FieldParams | None = None):
        self.params = params or FieldParams()
        self.p = self.params.modulus
        self._gates: list[tuple] = []
        self._domains: list[int] = []
        self._values: list[int | None] = []
        self._assertions: list[int] = []  # wire ids asserted == 0
        self.n_mul = 0
        self.n_add = 0
        self.n_prover_inputs = 0
        self.n_shared_inputs = 0
        self._const_cache: dict[int, Wire] = {}

    # -- wire creation -------------------------------------------------

    def _new_wire(self, gate: tuple, domain: int, value: int | None) -> Wire:
        wid = len(self._gates)
        self._gates.append(gate)
        self._domains.append(domain)
        self._values.append(value)
        return Wire(wid, domain, _CIRCUIT)

    def wire_input(self, value, domain: Domain) -> Wire:
        """Inject a local value into the circuit as a protocol input."""
        if domain == Domain.PUBLIC:
            raise PublicNeedsNoWire("public constants use const()")
        if domain == Domain.PROVER:
            self.n_prover_inputs += 1
        else:
            self.n_shared_inputs += 1
        v = None
        if value is not None:
            v = int(value) % self.p if not isinstance(value, FieldElement) else value.value
        return self._new_wire((_INPUT,), int(domain), v)

    def const(self, value) -> Wire:
        v = int(value) % self.p
        w = self._const_cache.get(v)
        if w is None:
            w = self._new_wire((_CONST, v), int(Domain.PUBLIC), v)
            self._const_cache[v] = w
        return w

    def local(self, value, domain: Domain = Domain.PROVER) -> Wire:
        """A local-stage handle; not usable as a gate operand."""
        w = Wire(-1, domain, Stage.LOCAL)
        return w

    # -- gates ---------------------------------------------------------

    def _check_operand(self, w: Wire):
        if w.stage != Stage.CIRCUIT:
            raise StageViolation("local-stage value used as gate operand")

    def gate(self, kind: str, a: Wire, b: Wire) -> Wire:
        if kind == "add":
            return self.add(a, b)
        if kind == "sub":
            return self.sub(a, b)
        if kind == "mul":
            return self.mul(a, b)
        raise CircuitError(f"unknown gate kind {kind!r}")

    def add(self, a: Wire, b: Wire) -> Wire:
        self._check_operand(a)
        self._check_operand(b)
        self.n_add += 1
        va, vb = self._values[a.id], self._values[b.id]
        v = None if va is None or vb is None else (va + vb) % self.p
        return self._new_wire((_ADD, a.id, b.id), max(a.domain, b.domain), v)

    def sub(self, a: Wire, b: Wire) -> Wire:
        self._check_operand(a)
        self._check_operand(b)
        self.n_add += 1
        va, vb = self._values[a.id], self._values[b.id]
        v = None if va is None or vb is None else (va - vb) % self.p
        return self._new_wire((_SUB, a.id, b.id), max(a.domain, b.domain), v)

    def mul(self, a: Wire, b: Wire) -> Wire:
        self._check_operand(a)
        self._check_operand(b)
        self.n_mul += 1
        va, vb = self._values[a.id], self._values[b.id]
        v = None if va is None or vb is None else (va * vb) % self.p
        return self._new_wire((_MUL, a.id, b.id), max(a.domain, b.domain), v)

    def affine(self, coeffs: list[int], wires: list[Wire], const: int = 0) -> Wire:
        """Linear combination sum(c_i * w_i) + const; counts len(coeffs)-1 adds.

        Exists so long summations (lookups, hash linear layers) do not
        inflate n_add misleadingly relative to a backend with cheap linear
        gates.
        """
        if len(coeffs) != len(wires) or not coeffs:
            raise CircuitError("affine needs matching non-empty coeffs/wires")
        p = self.p
        dom = 0
        ids = []
        for w in wires:
            if w.stage != _CIRCUIT:
                raise StageViolation("local-stage value used as gate operand")
            ids.append(w.id)
            if w.domain > dom:
                dom = w.domain
        self.n_add += len(coeffs) - 1 + (1 if const else 0)
        cs = tuple(c if 0 <= c < p else c % p for c in coeffs)
        vals = self._values
        v: int | None = const % p
        for c, i in zip(cs, ids):
            vi = vals[i]
            if vi is None:
                v = None
                break
            v += c * vi
        if v is not None:
            v %= p
        return self._new_wire((_AFFINE, cs, tuple(ids), const % p), dom, v)

    # -- assertions ----------------------------------------------------

    def assert_zero(self, w: Wire) -> None:
        self._check_operand(w)
        self._assertions.append(w.id)

    def assert_eq(self, a: Wire, b: Wire) -> None:
        self.assert_zero(self.sub(a, b))

    def oblivious_choice(self, b: Wire, x: Wire, y: Wire) -> Wire:
        """Branch-free select: y + b*(x - y); exactly one mul gate.

        Callers must separately assert that b is boolean.
        """
        return self.add(y, self.mul(b, self.sub(x, y)))

    def decompose(self, w: Wire, k: int, hint: int | None = None) -> list[Wire]:
        """Bulk primitive behind bit decomposition: k prover-only input
        bits, each boolean-asserted (b*(b-1)=0), plus a recomposition
        assertion against w.  Semantically identical to composing
        wire_input / mul / sub / affine / assert gates; implemented as one
        batch append for construction speed."""
        self._check_operand(w)
        v = self._values[w.id] if hint is None else hint
        if v is None:
            raise IncompleteWitness(f"wire {w.id} has no value to decompose")
        gates = self._gates
        doms = self._domains
        vals = self._values
        asserts = self._assertions
        prover = int(Domain.PROVER)
        bits = []
        bit_ids = []
        one = self.const(1).id
        for i in range(k):
            b = (v >> i) & 1
            wid = len(gates)
            gates.append((_INPUT,))
            doms.append(prover)
            vals.append(b)
            bits.append(Wire(wid, prover, _CIRCUIT))
            bit_ids.append(wid)
            # b - 1
            gates.append((_SUB, wid, one))
            doms.append(prover)
            vals.append((b - 1) % self.p)
            # b * (b - 1)
            gates.append((_MUL, wid, wid + 1))
            doms.append(prover)
            vals.append(0 if b in (0, 1) else (b * (b - 1)) % self.p)
            asserts.append(wid + 2)
        self.n_prover_inputs += k
        self.n_mul += k
        self.n_add += k
        recomposed = self.affine([1 << i for i in range(k)], bits)
        self.assert_eq(recomposed, w)
        return bits

    # -- prover-local access -------------------------------------------

    def value(self, w: Wire) -> int:
        """Construction-time value of a wire (the prover's local view)."""
        v = self._values[w.id]
        if v is None:
            raise IncompleteWitness(f"wire {w.id} has no value")
        return v

    def set_input_witness(self, w: Wire, value: int) -> None:
        """Replace the stored witness of an input wire (mutation testing)."""
        if self._gates[w.id][0] != _INPUT:
            raise CircuitError("only input wires carry free witnesses")
        self._values[w.id] = int(value) % self.p

    # -- evaluation ----------------------------------------------------

    @property
    def counters(self) -> Counters:
        return Counters(
            n_mul=self.n_mul,
            n_add=self.n_add,
            n_assert=len(self._assertions),
            n_prover_inputs=self.n_prover_inputs,
            n_shared_inputs=self.n_shared_inputs,
        )

    def evaluate_and_check(self, overrides: dict[int, int] | None = None) -> SatisfactionReport:
        """Topologically re-evaluate every wire from the inputs and check
        all assertions.  ``overrides`` maps input wire ids to replacement
        witness values."""
        p = self.p
        n = len(self._gates)
        vals: list[int] = [0] * n
        stored = self._values
        for wid, g in enumerate(self._gates):
            op = g[0]
            if op == _ADD:
                vals[wid] = (vals[g[1]] + vals[g[2]]) % p
            elif op == _MUL:
                vals[wid] = (vals[g[1]] * vals[g[2]]) % p
            elif op == _SUB:
                vals[wid] = (vals[g[1]] - vals[g[2]]) % p
            elif op == _AFFINE:
                acc = g[3]
                for c, i in zip(g[1], g[2]):
                    acc += c * vals[i]
                vals[wid] = acc % p
            elif op == _INPUT:
                if overrides is not None and wid in overrides:
                    vals[wid] = overrides[wid] % p
                else:
                    v = stored[wid]
                    if v is None:
                        raise IncompleteWitness(f"input wire {wid} unset")
                    vals[wid] = v
            else:  # _CONST
                vals[wid] = g[1]
        first_fail = None
        for idx, wid in enumerate(self._assertions):
            if vals[wid] != 0:
                first_fail = idx
                break
        return SatisfactionReport(
            satisfied=first_fail is None,
            first_failed_assertion=first_fail,
            counters=self.counters,
        )

    def check_domain_monotonicity(self) -> bool:
        """Structural check: no gate output less secret than any operand."""
        doms = self._domains
        for wid, g in enumerate(self._gates):
            op = g[0]
            if op in (_ADD, _SUB, _MUL):
                if doms[wid] < max(doms[g[1]], doms[g[2]]):
                    return False
            elif op == _AFFINE:
                if g[2] and doms[wid] < max(doms[i] for i in g[2]):
                    return False
        return True

    def input_wire_ids(self, domain: Domain | None = None) -> list[int]:
        return [
            wid
            for wid, g in enumerate(self._gates)
            if g[0] == _INPUT and (domain is None or self._domains[wid] == int(domain))
        ]

"""Executable model of the Witness / Prover / Verifier system.

Three machines communicate through a deterministic single-threaded
scheduler.  The zero-knowledge sub-protocol is realized by the
constraint-check stand-in (the circuit is built from the authority's data
and the prover-submitted witness and evaluated for satisfiability); the
verifier machine itself never reads prover-only witness values, which an
access audit on the trail store enforces.

An executable reference of the ideal functionality is provided so tests
can compare per-party outputs of the real system against it under the
same corruption scenarios.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .circuit import ConstraintSystem
from .field import FieldParams
from . import localcalc, statements
from .poseidon import PoseidonParams, params_for
from .statements import (
    CircleSet,
    StatementInstance,
    SubsidyPolicy,
    TaxPolicy,
    Trail,
    TriangleSet,
)


class ProtocolOrderViolation(Exception):
    pass


class InvalidScenario(Exception):
    pass


# -- pluggable signature scheme -----------------------------------------

# RFC 3526 2048-bit MODP group: a safe prime p = 2q + 1.  g = 4 generates
# the order-q subgroup of squares.
_MODP_2048 = int(
    "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
    "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
    "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
    "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
    "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
    "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
    "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
    "3995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff",
    16,
)
_Q = (_MODP_2048 - 1) // 2
_G = 4


def _h_int(*parts: bytes) -> int:
    h = hashlib.sha256()
    for part in parts:
        h.update(len(part).to_bytes(4, "big") + part)
    return int.from_bytes(h.digest(), "big")


class SchnorrSignature:
    """Schnorr signatures over a fixed 2048-bit Schnorr group.

    Nonces are derived deterministically from the secret key and message,
    so signing is reproducible across runs.
    """

    def keygen(self, rng: random.Random) -> tuple[int, int]:
        sk = rng.randrange(1, _Q)
        pk = pow(_G, sk, _MODP_2048)
        return pk, sk

    def sign(self, sk: int, msg: bytes) -> tuple[int, int]:
        k = _h_int(b"nonce", sk.to_bytes(256, "big"), msg) % _Q
        if k == 0:
            k = 1
        r = pow(_G, k, _MODP_2048)
        e = _h_int(b"chal", r.to_bytes(256, "big"), msg) % _Q
        s = (k - sk * e) % _Q
        return e, s

    def verify(self, pk: int, msg: bytes, sig) -> bool:
        try:
            e, s = sig
            e, s = int(e), int(s)
        except (TypeError, ValueError):
            return False
        if not (0 <= e < _Q and 0 <= s < _Q):
            return False
        r = pow(_G, s, _MODP_2048) * pow(pk, e, _MODP_2048) % _MODP_2048
        return _h_int(b"chal", r.to_bytes(256, "big"), msg) % _Q == e


def signing_bytes(sid: str, h: int) -> bytes:
    """Canonical bytes signed by the witness device: a domain tag, the
    length-prefixed UTF-8 session id, and the 32-byte big-endian hash."""
    sid_b = sid.encode("utf-8")
    return b"zkpol-sig-v1" + len(sid_b).to_bytes(4, "big") + sid_b + h.to_bytes(32, "big")


# -- authority data and witness store -----------------------------------


@dataclass(frozen=True)
class AuthorityData:
    """Everything the verifier knows about the statement: policy, geometry,
    sizes, and hash parameters.  Never contains prover-only material."""

    kind: str
    n_traj: int
    policy: SubsidyPolicy | TaxPolicy
    geometry: CircleSet | TriangleSet
    field_params: FieldParams
    pp: PoseidonParams


class TrailStore:
    """Holds the raw trail; every read is recorded with the reader's
    context label so tests can audit who touched prover-only data."""

    def __init__(self, points):
        self._points = tuple(tuple(p) for p in points)
        self.access_log: list[str] = []

    def read(self, reader: str):
        self.access_log.append(reader)
        return self._points


def policy_holds(trail_points, ad: AuthorityData) -> bool:
    """The relation R evaluated in plaintext (prover-local)."""
    trail = Trail(tuple(trail_points))
    if not 0 < trail.declared_len <= ad.n_traj:
        return False
    bound = 1 << ad.field_params.coord_bits
    if any(not (0 <= x < bound and 0 <= y < bound) for x, y in trail_points):
        return False
    pts = trail.padded(ad.n_traj)
    if ad.kind == "ev":
        return localcalc.oracle_ev(pts, ad.geometry.circles, ad.policy)
    return localcalc.oracle_hwtax(pts, ad.geometry.triangles, ad.policy)


def trail_hash(trail_points, ad: AuthorityData) -> int:
    trail = Trail(tuple(trail_points))
    return statements.honest_hash(ad.field_params, ad.pp, trail, ad.n_traj)


def fzk_check(ad: AuthorityData, h: int, store: TrailStore) -> bool:
    """Constraint-check stand-in for the ideal ZK functionality: build the
    statement circuit from (AD, h) and the submitted witness, evaluate."""
    points = store.read("fzk")
    try:
        inst = statements.make_instance(
            ad.kind,
            ad.field_params,
            ad.n_traj,
            ad.policy,
            ad.geometry,
            Trail(points),
            pp=ad.pp,
            h_ex=h,
        )
        cs = ConstraintSystem(ad.field_params)
        handle = statements.build_statement(inst, cs)
    except statements.InstanceError:
        return False
    return handle.check().satisfied


# -- machines ------------------------------------------------------------


class WitnessDevice:
    def __init__(self, scheme: SchnorrSignature, hash_fn):
        self.scheme = scheme
        self.hash_fn = hash_fn  # points -> int
        self.sid = None
        self.pk = None
        self._sk = None
        self.coords: list[tuple[int, int]] = []

    def handle(self, cmd: tuple, rng: random.Random):
        name = cmd[0]
        if name == "init":
            self.sid = cmd[1]
            self.pk, self._sk = self.scheme.keygen(rng)
            self.coords = []
            return [("witpk", self.sid, self.pk)]
        if self.sid is None:
            raise ProtocolOrderViolation(f"{name} before init")
        if name == "move":
            _, sid, point = cmd
            self.coords.append((int(point[0]), int(point[1])))
            return []
        if name == "getcoords":
            h = self.hash_fn(self.coords)
            sigma = self.scheme.sign(self._sk, signing_bytes(self.sid, h))
            return [("coords", self.sid, tuple(self.coords), sigma)]
        raise ProtocolOrderViolation(f"unknown command {name!r}")


@dataclass
class SessionTranscript:
    sid: str
    scenario: str
    messages: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    witness_access_log: list = field(default_factory=list)

    def record(self, sender: str, receiver: str, payload):
        self.messages.append({"from": sender, "to": receiver, "payload": _plain(payload)})

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "sid": self.sid,
            "scenario": self.scenario,
            "messages": self.messages,
            "outputs": dict(self.outputs),
            "witness_access_log": list(self.witness_access_log),
        }


def _plain(obj):
    """Transcript-friendly representation (big ints as decimal strings)."""
    if isinstance(obj, int) and abs(obj) >= 2**63:
        return str(obj)
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (SubsidyPolicy, TaxPolicy)):
        return repr(obj)
    return obj


# -- session driver ------------------------------------------------------


def run_session(
    scenario: str,
    ad_p: AuthorityData,
    moves,
    ad_v: AuthorityData | None = None,
    sid: str = "session-1",
    seed: int = 0,
    prover_tamper=None,
    verifier_tamper=None,
) -> SessionTranscript:
    """Drive one full session and return its transcript.

    scenario is one of "honest", "corrupt_prover", "corrupt_verifier".
    Tamper specs are pure functions rewriting the corrupted party's
    outgoing messages: prover_tamper(kind, payload) -> payload where kind
    is "sig" (payload (h, sigma)) or "fzk" (payload (ad, h, points));
    verifier_tamper(ad_v, h) -> (ad_v, h) rewrites what the verifier
    submits to the ZK check.
    """
    if scenario not in ("honest", "corrupt_prover", "corrupt_verifier"):
        raise InvalidScenario(f"unknown scenario {scenario!r}")
    if prover_tamper is not None and verifier_tamper is not None:
        raise InvalidScenario("at most one party may be corrupted")
    if scenario == "honest" and (prover_tamper or verifier_tamper):
        raise InvalidScenario("honest scenario admits no tampering")

    ad_v = ad_v if ad_v is not None else ad_p
    rng = random.Random(seed)
    scheme = SchnorrSignature()
    witness = WitnessDevice(scheme, lambda pts: trail_hash(pts, ad_p))
    transcript = SessionTranscript(sid=sid, scenario=scenario)

    # init + moves
    for out in witness.handle(("init", sid), rng):
        transcript.record("witness", "prover+verifier", out)
    pk = witness.pk
    for point in moves:
        witness.handle(("move", sid, point), rng)
        transcript.record("env", "witness", ("move", sid, tuple(point)))

    # Prover turn.
    transcript.record("env", "prover", ("prove", sid))
    transcript.record("prover", "witness", ("getcoords", sid))
    (_, _, points, sigma) = witness.handle(("getcoords", sid), rng)[0]
    transcript.record("witness", "prover", ("coords", sid, points, sigma))
    store = TrailStore(points)

    prover_out = "not_ok"
    sig_msg = None
    fzk_submission = None
    h = trail_hash(store.read("prover"), ad_p)
    if scheme.verify(pk, signing_bytes(sid, h), sigma) and policy_holds(
        store.read("prover"), ad_p
    ):
        prover_out = "ok"
        sig_payload = (h, sigma)
        fzk_payload = (ad_p, h, store.read("prover"))
        if prover_tamper is not None:
            sig_payload = prover_tamper("sig", sig_payload)
            fzk_payload = prover_tamper("fzk", fzk_payload)
        sig_msg = sig_payload
        fzk_submission = fzk_payload
        transcript.record("prover", "verifier", ("sig", sid, sig_payload[0], "sigma"))
        transcript.record("prover", "fzk", ("prove!", sid))

    # Verifier turn.
    transcript.record("env", "verifier", ("verify", sid))
    verifier_out = "not_ok"
    if sig_msg is not None:
        h_recv, sigma_recv = sig_msg
        if scheme.verify(pk, signing_bytes(sid, h_recv), sigma_recv):
            ad_check, h_check = ad_v, h_recv
            if verifier_tamper is not None:
                ad_check, h_check = verifier_tamper(ad_check, h_check)
            transcript.record("verifier", "fzk", ("prove?", sid))
            # F_ZK: instances must agree and the relation must hold.
            sub_ad, sub_h, sub_points = fzk_submission
            sub_store = TrailStore(sub_points)
            if sub_ad == ad_check and sub_h == h_check and fzk_check(
                ad_check, h_check, sub_store
            ):
                verifier_out = "ok"
                transcript.record("fzk", "verifier", ("proven", sid))
            store.access_log.extend(sub_store.access_log)

    transcript.outputs = {"prover": prover_out, "verifier": verifier_out}
    transcript.witness_access_log = list(store.access_log)
    return transcript


# -- ideal functionality reference --------------------------------------


def ideal_outputs(
    trail_points,
    ad_p: AuthorityData,
    ad_v: AuthorityData,
    corrupted: str | None = None,
    adversary_result: str | None = None,
) -> dict:
    """Per-party outputs of the ideal functionality for relation R.

    corrupted is None, "prover", or "verifier"; adversary_result, when a
    party is corrupted, is the output the adversary forces for it.
    """
    if corrupted not in (None, "prover", "verifier"):
        raise InvalidScenario(f"unknown corruption {corrupted!r}")
    res_p = 1 if policy_holds(trail_points, ad_p) else 0
    res_v = 1
    if ad_p != ad_v or not policy_holds(trail_points, ad_v):
        res_v = 0
    if corrupted == "prover" and adversary_result is not None:
        res_p = 1 if adversary_result == "ok" else 0
    if corrupted == "verifier" and adversary_result is not None:
        res_v = 1 if adversary_result == "ok" else 0
    return {
        "prover": "ok" if res_p else "not_ok",
        "verifier": "ok" if res_v else "not_ok",
    }

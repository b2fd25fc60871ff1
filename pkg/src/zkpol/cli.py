"""Command-line driver.

Exit codes: 0 success, 1 statement unsatisfied (or fuzz violation),
2 usage error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .circuit import ConstraintSystem
from .field import FieldParams
from . import appio, protocol, statements

EXIT_OK = 0
EXIT_UNSAT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _cmd_check(args) -> int:
    inst = appio.load_instance(args.instance)
    cs = ConstraintSystem(inst.field_params)
    handle = statements.build_statement(inst, cs)
    report = handle.check()
    out = {
        "satisfied": report.satisfied,
        "first_failed_assertion": report.first_failed_assertion,
        **report.counters.as_dict(),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK if report.satisfied else EXIT_UNSAT


def _cmd_oracle(args) -> int:
    inst = appio.load_instance(args.instance)
    verdict = statements.oracle_verdict(inst)
    print(json.dumps({"verdict": verdict}))
    return EXIT_OK if verdict else EXIT_UNSAT


def _cmd_fuzz(args) -> int:
    inst = appio.load_instance(args.instance)
    rng = random.Random(args.seed)
    cs = ConstraintSystem(inst.field_params)
    honest = statements.build_statement(inst, cs).check().satisfied
    oracle = statements.oracle_verdict(inst)
    violations = 0
    if honest != oracle:
        violations += 1
        print(f"EQUIVALENCE VIOLATION: circuit={honest} oracle={oracle}")
    bound = 1 << inst.field_params.coord_bits
    pts = list(inst.trail.points)
    for trial in range(args.mutations):
        i = rng.randrange(len(pts))
        axis = rng.randrange(2)
        old = pts[i]
        new_coord = rng.randrange(bound)
        while new_coord == old[axis]:
            new_coord = rng.randrange(bound)
        mutated = list(pts)
        mutated[i] = (new_coord, old[1]) if axis == 0 else (old[0], new_coord)
        m_inst = statements.make_instance(
            inst.kind,
            inst.field_params,
            inst.n_traj,
            inst.policy,
            inst.geometry,
            statements.Trail(tuple(mutated)),
            pp=inst.pp,
            h_ex=inst.h_ex,  # original hash: binding must reject the mutation
        )
        m_cs = ConstraintSystem(inst.field_params)
        if statements.build_statement(m_inst, m_cs).check().satisfied:
            violations += 1
            print(f"HASH BINDING VIOLATION at mutation {trial} (point {i})")
    print(json.dumps({"mutations": args.mutations, "violations": violations}))
    return EXIT_OK if violations == 0 else EXIT_UNSAT


def _cmd_cost(args) -> int:
    rows = []
    for n_traj in args.n_traj:
        for n_geo in args.n_geo:
            counters = statements.statement_cost(
                args.kind, n_traj, n_geo, FieldParams(coord_bits=args.coord_bits)
            )
            rows.append({"kind": args.kind, "n_traj": n_traj, "n_geo": n_geo, **counters})
    if args.csv:
        cols = ["kind", "n_traj", "n_geo", "n_mul", "n_add", "n_assert", "n_prover_inputs", "n_shared_inputs"]
        print(",".join(cols))
        for row in rows:
            print(",".join(str(row[c]) for c in cols))
    else:
        print(json.dumps(rows, indent=2))
    return EXIT_OK


def _cmd_session(args) -> int:
    inst = appio.load_instance(args.instance)
    ad = protocol.AuthorityData(
        kind=inst.kind,
        n_traj=inst.n_traj,
        policy=inst.policy,
        geometry=inst.geometry,
        field_params=inst.field_params,
        pp=inst.pp,
    )
    scenario = args.scenario.replace("-", "_")
    prover_tamper = None
    verifier_tamper = None
    if scenario == "corrupt_prover":
        def prover_tamper(kind, payload):
            if kind != "fzk":
                return payload
            ad_p, h, points = payload
            pts = list(points)
            x, y = pts[0]
            pts[0] = ((x + 1) % (1 << ad_p.field_params.coord_bits), y)
            return (ad_p, h, tuple(pts))
    elif scenario == "corrupt_verifier":
        def verifier_tamper(ad_v, h):
            return (ad_v, (h + 1) % ad_v.field_params.modulus)
    transcript = protocol.run_session(
        scenario,
        ad,
        list(inst.trail.points),
        sid=args.sid,
        seed=args.seed,
        prover_tamper=prover_tamper,
        verifier_tamper=verifier_tamper,
    )
    print(json.dumps(transcript.to_json(), indent=2))
    return EXIT_OK if transcript.outputs["verifier"] == "ok" else EXIT_UNSAT


def _cmd_gen(args) -> int:
    with open(args.spec) as fh:
        doc = json.load(fh)
    spec = appio.FixtureSpec(
        kind=doc["kind"],
        seed=int(doc.get("seed", 0)),
        n_traj=int(doc["n_traj"]),
        n_geo=int(doc["n_geo"]),
        coord_bits=int(doc.get("coord_bits", 12)),
        mode=doc.get("mode", "compliant"),
    )
    inst = appio.gen_fixture(spec)
    if args.out:
        appio.save_instance(inst, args.out)
    else:
        print(json.dumps(appio.serialize_instance(inst), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zkpol")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="build the circuit and report satisfiability")
    p.add_argument("instance")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("oracle", help="plaintext policy verdict")
    p.add_argument("instance")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("fuzz", help="witness-mutation soundness battery")
    p.add_argument("instance")
    p.add_argument("--mutations", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("cost", help="gate-counter table over sizes")
    p.add_argument("--kind", choices=["ev", "tax"], required=True)
    p.add_argument("--n-traj", dest="n_traj", type=int, nargs="+", required=True)
    p.add_argument("--n-circ", "--n-tri", dest="n_geo", type=int, nargs="+", required=True)
    p.add_argument("--coord-bits", type=int, default=12)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("session", help="run a protocol session and emit the transcript")
    p.add_argument("instance")
    p.add_argument(
        "--scenario",
        choices=["honest", "corrupt-prover", "corrupt-verifier"],
        default="honest",
    )
    p.add_argument("--sid", default="session-1")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_session)

    p = sub.add_parser("gen", help="generate a fixture from a spec file")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (appio.SchemaError, appio.GenerationFailed, appio.Unsupported,
            statements.InstanceError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

import json
import random

import pytest

from zkpol import appio, localcalc, statements
from zkpol.appio import (
    FixtureSpec,
    GenerationFailed,
    SchemaError,
    Unsupported,
    corridor_triangulate,
    gen_fixture,
    instance_from_doc,
    load_instance,
    save_instance,
    serialize_instance,
)
from zkpol.cli import main as cli_main

from conftest import random_ev_instance, random_tax_instance


# -- serialization -------------------------------------------------------


def test_round_trip_ev(tmp_path):
    inst = random_ev_instance(random.Random(71), max_traj=8, max_circ=3)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    again = load_instance(path)
    assert again == inst


def test_round_trip_tax(tmp_path):
    inst = random_tax_instance(random.Random(73), max_traj=8, max_tri=3)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert load_instance(path) == inst


def test_integers_travel_as_decimal_strings():
    inst = random_ev_instance(random.Random(79), max_traj=4, max_circ=1)
    doc = serialize_instance(inst)
    assert isinstance(doc["h_ex"], str)
    assert isinstance(doc["field_params"]["modulus"], str)
    assert all(isinstance(c, str) for c in doc["trail"]["points"][0])
    json.dumps(doc)  # plain JSON throughout


def _doc():
    inst = random_ev_instance(random.Random(83), max_traj=4, max_circ=2)
    return serialize_instance(inst)


def test_schema_error_carries_json_pointer():
    doc = _doc()
    del doc["policy"]["d_req"]
    with pytest.raises(SchemaError, match="/policy/d_req"):
        instance_from_doc(doc)


def test_schema_rejects_bad_version():
    doc = _doc()
    doc["schema_version"] = 99
    with pytest.raises(SchemaError, match="/schema_version"):
        instance_from_doc(doc)


def test_schema_rejects_non_integer_coordinate():
    doc = _doc()
    doc["trail"]["points"][0][0] = "twelve"
    with pytest.raises(SchemaError, match="/trail/points/0"):
        instance_from_doc(doc)


def test_schema_rejects_mismatched_declared_len():
    doc = _doc()
    doc["trail"]["declared_len"] = 99
    with pytest.raises(SchemaError, match="declared_len"):
        instance_from_doc(doc)


def test_schema_rejects_out_of_range_circle():
    doc = _doc()
    doc["geometry"]["circles"][0] = ["0", "0", "99999999"]
    with pytest.raises(SchemaError, match="/geometry/circles/0"):
        instance_from_doc(doc)


def test_load_reorients_clockwise_triangles():
    inst = random_tax_instance(random.Random(89), max_traj=4, max_tri=1)
    doc = serialize_instance(inst)
    tri = doc["geometry"]["triangles"][0]
    doc["geometry"]["triangles"][0] = [tri[0], tri[2], tri[1]]  # flip orientation
    again = instance_from_doc(doc)
    for t in again.geometry.triangles:
        assert localcalc.area_dbl_sgn(*t[0], *t[1], *t[2]) > 0


def test_load_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_instance(path)


# -- fixture generation --------------------------------------------------


def test_fixture_spec_validation():
    with pytest.raises(GenerationFailed):
        FixtureSpec(kind="bus", seed=0, n_traj=4, n_geo=1)
    with pytest.raises(GenerationFailed):
        FixtureSpec(kind="ev", seed=0, n_traj=0, n_geo=1)
    with pytest.raises(GenerationFailed):
        FixtureSpec(kind="ev", seed=0, n_traj=4, n_geo=1, mode="maybe")


@pytest.mark.parametrize("mode", ["compliant", "non_compliant", "boundary"])
def test_gen_ev_modes_match_verdict(mode):
    for seed in range(25):
        spec = FixtureSpec(kind="ev", seed=seed, n_traj=8, n_geo=2, mode=mode)
        inst = gen_fixture(spec)
        want = mode != "non_compliant"
        assert statements.oracle_verdict(inst) == want


@pytest.mark.parametrize("mode", ["compliant", "non_compliant", "boundary"])
def test_gen_tax_modes_match_verdict(mode):
    for seed in range(25):
        spec = FixtureSpec(kind="tax", seed=seed, n_traj=8, n_geo=8, mode=mode)
        inst = gen_fixture(spec)
        want = mode != "non_compliant"
        assert statements.oracle_verdict(inst) == want


def test_gen_is_deterministic():
    spec = FixtureSpec(kind="ev", seed=42, n_traj=8, n_geo=2)
    assert gen_fixture(spec) == gen_fixture(spec)


def test_gen_fixture_survives_round_trip(tmp_path):
    spec = FixtureSpec(kind="tax", seed=5, n_traj=8, n_geo=8)
    inst = gen_fixture(spec)
    path = tmp_path / "fix.json"
    save_instance(inst, path)
    assert load_instance(path) == inst


# -- corridor triangulation ----------------------------------------------


def _total_area_dbl(tris):
    return sum(localcalc.area_dbl(*t[0], *t[1], *t[2]) for t in tris)


def test_corridor_area_bookkeeping_straight_road():
    # Horizontal road across a 100x100 box, margin 10: the inflated
    # corridor is a 100x20 strip (clipped), complement area 8000.
    ts = corridor_triangulate([(0, 50), (100, 50)], 10, (0, 0, 100, 100))
    assert _total_area_dbl(ts.triangles) == 2 * (100 * 100 - 100 * 20)
    for t in ts.triangles:
        assert localcalc.area_dbl_sgn(*t[0], *t[1], *t[2]) > 0


def test_corridor_area_bookkeeping_l_shaped_road():
    # L-shaped road; the two inflated rectangles overlap at the corner, so
    # compute covered cells directly for the expected area.
    bbox = (0, 0, 100, 100)
    ts = corridor_triangulate([(0, 50), (60, 50), (60, 100)], 10, bbox)
    covered = 0
    for x in range(100):
        for y in range(100):
            in_h = 0 <= x < 100 and 40 <= y < 60 and x < 70
            in_v = 50 <= x < 70 and 40 <= y < 100
            if in_h or in_v:
                covered += 1
    assert _total_area_dbl(ts.triangles) == 2 * (100 * 100 - covered)


def test_corridor_covering_whole_bbox_yields_empty_set():
    ts = corridor_triangulate([(0, 5), (10, 5)], 50, (0, 0, 10, 10))
    assert ts.triangles == ()


def test_corridor_rejects_diagonal_segment():
    with pytest.raises(Unsupported):
        corridor_triangulate([(0, 0), (10, 10)], 5, (0, 0, 20, 20))


def test_corridor_rejects_bad_margin():
    with pytest.raises(Unsupported):
        corridor_triangulate([(0, 0), (10, 0)], 0, (0, 0, 20, 20))


def test_corridor_points_off_road_are_in_triangles():
    ts = corridor_triangulate([(0, 50), (100, 50)], 10, (0, 0, 100, 100))
    assert localcalc.point_in_any_triangle(5, 5, ts.triangles)
    assert localcalc.point_in_any_triangle(95, 95, ts.triangles)
    assert not localcalc.point_in_any_triangle(50, 50, ts.triangles)


# -- CLI -----------------------------------------------------------------


def _write_fixture(tmp_path, mode="compliant", kind="ev"):
    n_geo = 2 if kind == "ev" else 8
    inst = gen_fixture(FixtureSpec(kind=kind, seed=3, n_traj=8, n_geo=n_geo, mode=mode))
    path = tmp_path / f"{kind}-{mode}.json"
    save_instance(inst, path)
    return str(path)


def test_cli_check_compliant_exits_zero(tmp_path, capsys):
    path = _write_fixture(tmp_path)
    assert cli_main(["check", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["satisfied"] is True
    assert out["n_mul"] > 0


def test_cli_check_non_compliant_exits_one(tmp_path, capsys):
    path = _write_fixture(tmp_path, mode="non_compliant")
    assert cli_main(["check", path]) == 1
    assert json.loads(capsys.readouterr().out)["satisfied"] is False


def test_cli_oracle_agrees_with_check(tmp_path, capsys):
    for mode, code in [("compliant", 0), ("non_compliant", 1)]:
        path = _write_fixture(tmp_path, mode=mode)
        assert cli_main(["oracle", path]) == code
        capsys.readouterr()


def test_cli_fuzz_clean_run(tmp_path, capsys):
    path = _write_fixture(tmp_path)
    assert cli_main(["fuzz", path, "--mutations", "5", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out.splitlines()[-1])["violations"] == 0


def test_cli_cost_csv(capsys):
    assert cli_main(["cost", "--kind", "ev", "--n-traj", "4", "8", "--n-circ", "2", "--csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("kind,n_traj,n_geo,n_mul")
    assert len(lines) == 3


def test_cli_session_honest(tmp_path, capsys):
    path = _write_fixture(tmp_path)
    assert cli_main(["session", path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["outputs"] == {"prover": "ok", "verifier": "ok"}


def test_cli_session_corrupt_prover(tmp_path, capsys):
    path = _write_fixture(tmp_path)
    assert cli_main(["session", path, "--scenario", "corrupt-prover"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["outputs"]["verifier"] == "not_ok"


def test_cli_gen_writes_loadable_file(tmp_path, capsys):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"kind": "ev", "seed": 1, "n_traj": 8, "n_geo": 2}))
    out_path = tmp_path / "out.json"
    assert cli_main(["gen", str(spec_path), "--out", str(out_path)]) == 0
    inst = load_instance(out_path)
    assert statements.oracle_verdict(inst)


def test_cli_usage_errors_exit_two(tmp_path, capsys):
    assert cli_main(["frobnicate"]) == 2
    assert cli_main(["check", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert cli_main(["check", str(bad)]) == 2
    capsys.readouterr()

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from helpers import four_orbit, triple
from novikov import io
from novikov.cli import main
from novikov.complex import validate
from novikov.equivariant import validate_equivariant

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FOUR = str(FIXTURES / "four_orbit.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_decimal_actions_load_exactly():
    C = io.read_complex(FOUR)
    assert C.exact and C.orbit("b").action == Fraction(1, 5)
    assert C._entry_dict() == four_orbit()._entry_dict()


def test_complex_round_trip():
    for seed in range(20):
        T = triple(seed)
        C2 = io.complex_from_dict(io.loads(io.dumps(io.complex_to_dict(T.C))))
        assert C2._entry_dict() == T.C._entry_dict() and C2.orbits == T.C.orbits
        E2 = io.equivariant_from_dict(io.loads(io.dumps(io.equivariant_to_dict(T.E))))
        assert E2.corrections == T.E.corrections
        P2 = io.pop_from_dict(io.loads(io.dumps(io.pop_to_dict(T.P))))
        assert P2.values == T.P.values and P2.squaring == T.P.squaring


def test_fixtures_validate_as_documented():
    assert validate(io.read_complex(FOUR)).ok
    assert validate(io.read_complex(FIXTURES / "zero_differential.json")).ok
    assert validate(io.read_complex(FIXTURES / "d_squared_nonzero.json")).kinds() == {"d^2"}


def test_format_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(io.FormatError):
        io.read_complex(bad)
    bad.write_text(json.dumps({"params": {"N": 1, "lambda0": 1}, "orbits": [{"label": "x"}]}))
    with pytest.raises((io.FormatError, KeyError, ValueError)):
        io.read_complex(bad)


def test_validate_exit_codes(capsys, tmp_path):
    assert run(capsys, "validate", FOUR)[0] == 0
    code, out = run(capsys, "validate", str(FIXTURES / "d_squared_nonzero.json"))
    assert code == 1 and json.loads(out)["violations"][0]["kind"] == "d^2"
    missing = tmp_path / "missing.json"
    assert main(["validate", str(missing)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["validate", str(bad)]) == 2


def test_barcode_command(capsys):
    code, out = run(capsys, "barcode", FOUR)
    d = json.loads(out)
    assert code == 0 and d["barsExact"] == ["1", "11/10"] and d["betaMin"] == 1.0
    assert run(capsys, "barcode", FOUR, "--method", "greedy")[1] == out
    code, out = run(capsys, "barcode", FOUR, "--format", "text")
    assert out.splitlines()[0] == "1 11/10"


def test_graph_commands(capsys):
    code, out = run(capsys, "graph", FOUR, "--dot")
    assert code == 0 and out.startswith("digraph {") and out.count("->") == 3
    code, out = run(capsys, "graph", FOUR)
    assert code == 0 and json.loads(out)


def test_generate_then_verify(capsys, tmp_path):
    code, out = run(capsys, "generate", "--orbits", "5", "--seed", "3", "--out-dir", str(tmp_path))
    assert code == 0
    files = [str(tmp_path / f) for f in ("complex.json", "equivariant.json", "pop.json")]
    assert validate_equivariant(io.read_equivariant(files[1])).ok
    code, out = run(capsys, "verify-pop", *files)
    assert code == 0 and json.loads(out)["ok"]
    code, out = run(capsys, "verify-main", *files)
    assert code == 0 and json.loads(out)["correspondenceHolds"]
    code, out = run(capsys, "barcode", files[1], "--h1")
    assert code == 0
    code, out = run(capsys, "eq-graph", files[1], "--dot")
    assert code == 0 and out.startswith("digraph {")


def test_generate_is_byte_identical(capsys, tmp_path):
    for d in ("one", "two"):
        assert main(["generate", "--seed", "11", "--orbits", "7", "--bars", "0.5,1.25",
                     "--out-dir", str(tmp_path / d)]) == 0
    capsys.readouterr()
    for f in ("complex.json", "equivariant.json", "pop.json"):
        assert (tmp_path / "one" / f).read_bytes() == (tmp_path / "two" / f).read_bytes()


def test_seed_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("NOVIKOV_SEED", "11")
    assert main(["generate", "--orbits", "7", "--out-dir", str(tmp_path / "env")]) == 0
    assert main(["generate", "--orbits", "7", "--seed", "11",
                 "--out-dir", str(tmp_path / "arg")]) == 0
    capsys.readouterr()
    assert (tmp_path / "env" / "pop.json").read_bytes() == \
        (tmp_path / "arg" / "pop.json").read_bytes()


def test_verify_pop_detects_corruption(capsys, tmp_path):
    main(["generate", "--orbits", "4", "--seed", "2", "--out-dir", str(tmp_path)])
    capsys.readouterr()
    pop = json.loads((tmp_path / "pop.json").read_text())
    pop["values"] = []
    (tmp_path / "pop.json").write_text(json.dumps(pop))
    code, out = run(capsys, "verify-pop", *(str(tmp_path / f) for f in
                                           ("complex.json", "equivariant.json", "pop.json")))
    assert code == 1 and not json.loads(out)["ok"]


def test_verify_main_batch(capsys):
    code, out = run(capsys, "verify-main", "--batch", "6", "--orbits", "5", "--seed", "4")
    d = json.loads(out)
    assert code == 0 and d["instances"] == 6 and d["failed"] == []
    code2, out2 = run(capsys, "verify-main", "--batch", "6", "--orbits", "5", "--seed", "4",
                      "--jobs", "2")
    assert out2 == out


def test_verify_main_stops_on_background(capsys, tmp_path):
    from novikov.complex import FilteredComplex, GlobalParams
    from novikov.pop import frobenius_double, seidel_potentials, transported_pop
    import random
    C = FilteredComplex(GlobalParams(5, 10), [("x", 0, 0), ("y", 1, 1), ("z", 2, 0)],
                        {("x", "y"): "1"})
    m = seidel_potentials(C)
    E = frobenius_double(C, m)
    P = transported_pop(C, m, random.Random(0))
    paths = []
    for name, obj in (("c", io.complex_to_dict(C)), ("e", io.equivariant_to_dict(E)),
                      ("p", io.pop_to_dict(P))):
        path = tmp_path / f"{name}.json"
        io.write_json(path, obj)
        paths.append(str(path))
    code, out = run(capsys, "verify-main", *paths)
    assert code == 3 and json.loads(out)["stopped"]


def test_tower_command(capsys):
    code, out = run(capsys, "tower", FOUR, "--k", "8")
    d = json.loads(out)
    assert [lv["betaMin"] for lv in d["levels"]] == [2.0**j for j in range(9)]
    code, out = run(capsys, "tower", FOUR, "--k", "8", "--cap", "100")
    assert json.loads(out)["firstLevelExceedingCap"] == 7


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "novikov.cli", "barcode", FOUR, "--format", "text"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("1 11/10")

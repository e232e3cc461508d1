import json
import os
import random

import pytest

from homotopylie import serialize
from homotopylie.cli import main
from homotopylie.generators import nilpotent_tower_with_corruption
from homotopylie.bv import OrientationCocycle
from fractions import Fraction


def _run(tmp_path, *argv):
    return main(list(argv))


def _read(path):
    with open(path) as fh:
        return fh.read()


def test_gen_examples_and_check(tmp_path):
    ex = str(tmp_path / "ex")
    assert main(["gen-examples", "--out", ex, "--seed", "3"]) == 0
    towers = sorted(f for f in os.listdir(ex) if f.startswith("tower"))
    assert len(towers) == 3
    for f in towers:
        assert main(["check", os.path.join(ex, f), "--out", str(tmp_path)]) == 0
    rep = json.loads(_read(str(tmp_path / "check.json")))
    assert rep["kind"] == "validation_report"
    assert rep["payload"]["ok"] is True


def test_gen_examples_deterministic(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["gen-examples", "--out", a, "--seed", "7"]) == 0
    assert main(["gen-examples", "--out", b, "--seed", "7"]) == 0
    files = sorted(os.listdir(a))
    assert files == sorted(os.listdir(b))
    for f in files:
        assert _read(os.path.join(a, f)) == _read(os.path.join(b, f))


def test_check_rejects_corrupted_tower(tmp_path):
    rng = random.Random(40)
    alg, bad, loc = nilpotent_tower_with_corruption(rng)
    good_p = str(tmp_path / "good.json")
    bad_p = str(tmp_path / "bad.json")
    with open(good_p, "w") as fh:
        fh.write(serialize.dumps("linfty_algebra", serialize.algebra_payload(alg)))
    with open(bad_p, "w") as fh:
        fh.write(serialize.dumps("linfty_algebra", serialize.algebra_payload(bad)))
    assert main(["check", good_p, "--out", str(tmp_path / "g")]) == 0
    assert main(["check", bad_p, "--out", str(tmp_path / "b")]) == 1
    rep = json.loads(_read(str(tmp_path / "b" / "check.json")))
    assert rep["payload"]["ok"] is False
    assert "witness" in rep["payload"]
    assert rep["payload"]["witness"]["input_word"]


def test_transfer_outputs_parse(tmp_path):
    ex = str(tmp_path / "ex")
    main(["gen-examples", "--out", ex, "--seed", "1"])
    out = str(tmp_path / "tr")
    assert main(["transfer", os.path.join(ex, "tower_0.json"), "--out", out]) == 0
    _, payload = serialize.loads(_read(os.path.join(out, "minimal.json")))
    small = serialize.algebra_from_payload(payload)
    assert small.validate(3).ok
    _, pincl = serialize.loads(_read(os.path.join(out, "inclusion.json")))
    serialize.morphism_from_payload(pincl)


def test_orient_exit_codes(tmp_path):
    good = OrientationCocycle(
        2, [Fraction(4), Fraction(9)], {(0, 1): Fraction(3, 2)}
    )
    badc = OrientationCocycle(
        3,
        [Fraction(1)] * 3,
        {(0, 1): Fraction(1), (1, 2): Fraction(1), (0, 2): Fraction(-1)},
    )
    gp, bp = str(tmp_path / "g.json"), str(tmp_path / "b.json")
    with open(gp, "w") as fh:
        fh.write(serialize.dumps("orientation_cocycle", serialize.cocycle_payload(good)))
    with open(bp, "w") as fh:
        fh.write(serialize.dumps("orientation_cocycle", serialize.cocycle_payload(badc)))
    assert main(["orient", gp, "--out", str(tmp_path / "og")]) == 0
    assert main(["orient", bp, "--out", str(tmp_path / "ob")]) == 1
    rep = json.loads(_read(str(tmp_path / "ob" / "orientation.json")))
    assert rep["payload"]["orientable"] is False
    assert len(rep["payload"]["cycle"]) >= 3


def test_malformed_input_is_structural_error(tmp_path):
    p = str(tmp_path / "junk.json")
    with open(p, "w") as fh:
        fh.write("{not json")
    assert main(["check", p]) == 2
    q = str(tmp_path / "wrongkind.json")
    with open(q, "w") as fh:
        fh.write(serialize.dumps("polynomial", {"nvars": 1, "terms": [], "scalar": "rational"}))
    assert main(["bv-verify", q]) == 2

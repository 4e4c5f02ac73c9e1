import shutil
import subprocess

import pytest

from simpcert.cli import main
from simpcert.textio import generator_document
from simpcert.treelab import thompson_v_gens


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def make_instance(capsys, tmp_path, kind, seed):
    d = tmp_path / f"{kind}{seed}"
    code, out, _ = run(capsys, "random", "--kind", kind, "--seed", seed, "--out", d)
    assert code == 0 and "wrote" in out
    info = dict(line.split(" ", 1) for line in (d / "instance.txt").read_text().splitlines())
    return d, info


def test_order_round_trip(capsys, tmp_path):
    d, info = make_instance(capsys, tmp_path, "order", 12)
    cert = tmp_path / "o.cert"
    code, _, _ = run(capsys, "order-decompose", "--q", info["q"], "--target", d / "target.txt",
                     "--g", d / "g.txt", "--out", cert)
    assert code == 0
    code, out, _ = run(capsys, "verify", cert)
    assert code == 0 and out.strip() == "ACCEPT"
    strict = tmp_path / "s.cert"
    assert run(capsys, "order-decompose", "--q", info["q"], "--target", d / "target.txt",
               "--g", d / "g.txt", "--strict", "--out", strict)[0] == 0
    assert "meta mode strict" in strict.read_text()
    assert run(capsys, "verify", strict)[0] == 0
    w = tmp_path / "w.cert"
    assert run(capsys, "width", "--mode", "order", "--q", info["q"], "--target", d / "target.txt",
               "--g", d / "g.txt", "--out", w)[0] == 0
    assert "bound 2" in w.read_text()
    assert run(capsys, "verify", w)[0] == 0


def test_cantor_round_trip(capsys, tmp_path):
    d, info = make_instance(capsys, tmp_path, "cantor", 12)
    cert = tmp_path / "c.cert"
    args = ["--shape", info["shape"], "--target", d / "target.txt", "--g", d / "g.txt",
            "--g-witness", d / "g-witness.txt"]
    assert run(capsys, "cantor-decompose", *args, "--out", cert)[0] == 0
    assert run(capsys, "verify", cert)[1].strip() == "ACCEPT"
    w = tmp_path / "w.cert"
    assert run(capsys, "width", "--mode", "cantor", *args, "--out", w)[0] == 0
    assert "bound 3" in w.read_text()
    assert run(capsys, "verify", w)[0] == 0


def test_determinism(capsys, tmp_path, monkeypatch):
    a, info = make_instance(capsys, tmp_path, "order", 7)
    monkeypatch.setenv("SIMPCERT_SEED", "7")
    b = tmp_path / "env"
    assert run(capsys, "random", "--kind", "order", "--out", b)[0] == 0
    for name in ("target.txt", "g.txt", "instance.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    certs = []
    for i in range(2):
        out = tmp_path / f"c{i}"
        run(capsys, "order-decompose", "--q", info["q"], "--target", a / "target.txt", "--g", a / "g.txt", "--out", out)
        certs.append(out.read_bytes())
    assert certs[0] == certs[1]


def test_verify_rejects(capsys, tmp_path):
    bad = tmp_path / "bad.cert"
    bad.write_text("simpcert v1\nkind commutator-word\n")
    code, out, _ = run(capsys, "verify", bad)
    assert code == 1 and out.startswith("REJECT parse")


def test_usage_errors(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("SIMPCERT_SEED", raising=False)
    assert run(capsys, "random", "--kind", "order", "--out", tmp_path / "x")[0] == 2
    assert run(capsys, "width", "--mode", "order", "--target", "t", "--g", "g")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_missing_file_is_failure(capsys, tmp_path):
    code, _, err = run(capsys, "verify", tmp_path / "nope.cert")
    assert code in (1, 2) and err


def test_malformed_input_is_failure(capsys, tmp_path):
    t = tmp_path / "t.txt"
    t.write_text("simpcert v1\nkind word\ncarrier plmap q=2\nbegin pair 1 a\nplmap q=2\n0 -> 1\nend\n")
    code, _, err = run(capsys, "order-decompose", "--q", 2, "--target", t, "--g", t)
    assert code == 1 and "line" in err


def test_tree_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "tree", "measure-check", "--builtin", "thompson-v", "--depth", 4)
    assert code == 0 and "infeasible" in out.lower()
    gens = tmp_path / "gens.txt"
    gens.write_text(generator_document(thompson_v_gens()).to_text())
    code, out, _ = run(capsys, "tree", "minimal-check", "--gens", gens, "--depth", 2, "--shrink", "0")
    assert code == 0 and "16" in out
    graph = tmp_path / "g.txt"
    graph.write_text("c black white 3\nc white black 4\n")
    code, out, _ = run(capsys, "tree", "tits", "--graph", graph, "--radius", 2, "--root", "black")
    assert code == 0 and "vertices 13" in out
    code, out, _ = run(capsys, "tree", "free", "--n", 2)
    assert code == 0 and "vmap m=4 d=3" in out
    assert run(capsys, "tree", "free", "--n", 1)[0] == 1


def test_ordprox_demo(capsys):
    code, out, _ = run(capsys, "ordprox", "demo", "--level", 1)
    assert code == 0 and out
    assert run(capsys, "ordprox", "demo", "--level", 0)[0] == 1


@pytest.mark.skipif(shutil.which("simpcert") is None, reason="console script not installed")
def test_console_script(tmp_path):
    p = subprocess.run(["simpcert", "verify", str(tmp_path / "none")], capture_output=True, text=True)
    assert p.returncode in (1, 2)
    p = subprocess.run(["simpcert", "tree", "free", "--n", "2"], capture_output=True, text=True)
    assert p.returncode == 0

import hashlib
import json
import subprocess
import sys

import pytest

from fanstalk import __version__
from fanstalk.cli import dumps, main

SINGLE = "vars: x1 x2 y\nx1^2*x2^2 - y^3\n"
EX1 = "vars: x y\nx^2 - y^3\nx^2 - y^5\n"
EX2 = "vars: x y z\nx^2 - y^3\nx^4 - z^5\n"
BAD_AT_2 = "vars: x y\nx - 1\ny - 1\nx*y^2 - 1\n"
BAD_AT_3 = "vars: x y\nx - 1\ny - 1\nx*y^3 - 1\n"


@pytest.fixture
def write(tmp_path):
    def _write(text, name="in.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_resolve_single_binomial(write, capsys):
    code, out, _ = run(capsys, "resolve", "--input", write(SINGLE))
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["version"] == __version__
    assert data["input_sha256"] == hashlib.sha256(SINGLE.encode()).hexdigest()
    assert data["stacky_fan"]["M"] == [[1, 0, 0, 3, 0], [0, 1, 0, 0, 3], [0, 0, 1, 2, 2]]
    assert len(data["charts"]) == 2
    for chart in data["charts"]:
        assert chart["members"][0]["transform"] == "z1^6*z2^6*(x1'^2*x2'^2 - y'^3)"
        assert chart["snc"] is True
    assert data["verdict"]["ok"]


def test_resolve_oracle_verify(write, capsys):
    code, out, _ = run(capsys, "resolve", "--input", write(EX1), "--oracle-verify")
    data = json.loads(out)
    assert code == 0
    assert data["oracle"] == {"minkowski_agrees": True, "rays_certified": True}
    assert all(v == 0 for c in data["charts"] for v in c["oracle_scan"].values())


def test_resolve_at_problematic_prime(write, capsys):
    code, out, _ = run(capsys, "resolve", "--input", write(BAD_AT_2), "--char", "2")
    assert code == 2
    assert json.loads(out)["primes"] == [2]


def test_resolve_monomial_only(write, capsys):
    code, out, _ = run(capsys, "resolve", "--input", write("vars: x y\nx^2*y\n"))
    data = json.loads(out)
    assert code == 0 and data["primes"] == [] and data["charts"][0]["snc"]


def test_star_subdivide(write, capsys):
    code, out, _ = run(capsys, "fan", "--input", write(EX2), "--star-subdivide")
    data = json.loads(out)
    assert code == 0 and len(data["rays"]) == 6
    assert all(len(c) == 3 for c in data["maximal_cones"])


def test_fan_command(write, capsys):
    code, out, _ = run(capsys, "fan", "--input", write(EX1))
    assert code == 0
    assert json.loads(out)["rays"] == [[0, 1], [1, 0], [3, 2], [5, 2]]


def test_primes_command(write, capsys):
    code, out, _ = run(capsys, "primes", "--input", write(BAD_AT_3))
    assert code == 0 and json.loads(out)["primes"] == [3]
    code, _, _ = run(capsys, "primes", "--input", write(BAD_AT_3), "--char", "3")
    assert code == 2


def test_oracle_command(write, capsys):
    code, out, _ = run(capsys, "oracle", "--input", write(EX2), "--check", "minkowski")
    assert code == 0
    assert len(json.loads(out)["minkowski"]["vertices"]) == 4
    code, out, _ = run(capsys, "oracle", "--input", write(EX1))
    assert code == 0 and json.loads(out)["verdict"]["ok"]


def test_ideal_command(write, capsys):
    code, out, _ = run(capsys, "ideal", "--input", write("vars: x1 x2\nx1\nx2\n"), "--oracle-verify")
    data = json.loads(out)
    assert code == 0
    assert [c["strata_text"] for c in data["charts"]] == [["V(z1)"], ["V(z1)"]]
    assert all(c["oracle_point_sets_equal"] for c in data["charts"])


def test_text_format(write, capsys):
    code, out, _ = run(capsys, "fan", "--input", write(EX1), "--format", "text")
    assert code == 0
    assert "schema: 1" in out and "rays:" in out and "{" not in out


def test_deterministic(write, capsys):
    path = write(EX2)
    first = run(capsys, "resolve", "--input", path)[1]
    second = run(capsys, "resolve", "--input", path)[1]
    assert first == second


@pytest.mark.parametrize("argv", [
    ["resolve"],
    ["bogus", "--input", "x"],
    ["resolve", "--input", "x", "--char", "4"],
    ["resolve", "--input", "x", "--format", "xml"],
    ["primes", "--input", "x", "--max-subset-size", "0"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1


def test_input_errors(write, tmp_path, capsys):
    assert main(["resolve", "--input", str(tmp_path / "missing")]) == 1
    code, _, err = run(capsys, "resolve", "--input", write("vars: x y\nx^2 - y^3 - x\n"))
    assert code == 1 and "NotBinomial" in err
    assert main(["resolve", "--input", write("vars: x\n# nothing\n")]) == 1


def test_console_entry_point(write):
    proc = subprocess.run(
        [sys.executable, "-m", "fanstalk.cli", "fan", "--input", write(EX1)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["command"] == "fan"


def test_dumps_inlines_scalar_lists():
    assert dumps({"a": [1, 2], "b": [[1], [2]]}) == '{\n  "a": [1, 2],\n  "b": [\n    [1],\n    [2]\n  ]\n}'

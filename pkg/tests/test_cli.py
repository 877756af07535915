import json

import pytest

from alccat.cli import cli_main


@pytest.fixture
def files(tmp_path):
    empty = tmp_path / "empty.onto"
    empty.write_text("")
    o1 = tmp_path / "o1.onto"
    o1.write_text("concepts: A B\nroles: R\nA => (some R B)\nB => bot\n")
    return tmp_path, str(empty), str(o1)


def run(argv, capsys):
    code = cli_main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_both(files, capsys):
    _, empty, o1 = files
    code, out, _ = run(["check", "--concept", "(and A (not A))", "--onto", empty,
                        "--mode", "both"], capsys)
    assert code == 0 and out.strip() == "unsat / unsat"
    code, out, _ = run(["check", "-c", "B", "-O", o1, "--mode", "both"], capsys)
    assert code == 0 and out.strip() == "unsat / unsat"
    code, out, _ = run(["check", "-c", "(some R A)", "--mode", "both",
                        "--universe", "syntactic"], capsys)
    assert code == 0 and out.strip() == "sat / open"
    code, out, _ = run(["check", "-c", "(and A (not A))", "--trace"], capsys)
    assert "rule=and" in out and out.strip().endswith("unsat")


def test_entail(files, capsys):
    _, _, o1 = files
    assert run(["entail", "A", "(some R B)", "-O", o1], capsys)[1].strip() == "entailed"
    assert run(["entail", "(not A)", "A", "-O", o1], capsys)[1].strip() == "not entailed"


def test_certificate_round_trip(files, capsys):
    tmp, _, o1 = files
    cert = str(tmp / "c.json")
    code, out, _ = run(["extract-cert", "-c", "A", "-O", o1, "-o", cert], capsys)
    assert code == 0 and "steps written" in out
    code, out, _ = run(["verify-cert", cert, "-O", o1, "--strict"], capsys)
    assert code == 0 and out.strip() == "certificate accepted"
    data = json.loads(open(cert).read())
    data["steps"][0]["rule"] = "exists-cod"
    bad = tmp / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(["verify-cert", str(bad), "-O", o1], capsys)
    assert code == 1 and "at step 0" in out
    code, _, _ = run(["verify-cert", cert], capsys)
    assert code == 1  # ontology hash mismatch
    code, _, err = run(["extract-cert", "-c", "(not A)", "-O", o1], capsys)
    assert code == 1 and "satisfiable" in err


def test_model(files, capsys):
    tmp, _, _ = files
    code, out, _ = run(["model", "-c", "(and A (some R A))", "--emit-model"], capsys)
    assert code == 0 and out.startswith("model of size 1")
    m = json.loads(out.split("\n", 1)[1])
    assert m == {"concepts": {"A": [0]}, "domain_size": 1, "roles": {"R": [[0, 0]]}}
    path = tmp / "m.json"
    run(["model", "-c", "A", "--emit-model", str(path)], capsys)
    assert json.loads(path.read_text())["domain_size"] == 1
    code, out, _ = run(["model", "-c", "(and A (not A))"], capsys)
    assert code == 0 and out.strip() == "no model up to size 3"


def test_export_dot_is_deterministic(files, capsys):
    _, _, o1 = files
    first = run(["export-dot", "-c", "A", "-O", o1, "--derived"], capsys)
    second = run(["export-dot", "-c", "A", "-O", o1, "--derived"], capsys)
    assert first == second and first[1].startswith("digraph category {")


def test_fuzz(files, capsys):
    tmp, _, _ = files
    code, out, _ = run(["fuzz", "--seed", "42", "--count", "20", "--report", str(tmp / "rep")],
                       capsys)
    assert code == 0 and "discrepancies           0" in out
    assert (tmp / "rep" / "report.json").exists() and (tmp / "rep" / "timing.png").exists()


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["check"], ["check", "-c", "(and A"], ["check", "-c", "A", "-O", "/nope"],
    ["check", "-c", "C", "-O", "{o1}"], ["fuzz", "--depth", "9"], ["fuzz", "--weights", "and"],
    ["check", "-c", "A", "--mode", "magic"],
])
def test_usage_errors(argv, files, capsys):
    _, _, o1 = files
    argv = [a.replace("{o1}", o1) for a in argv]
    assert cli_main(argv) == 2


def test_help_documents_every_command(capsys):
    assert cli_main(["--help"]) == 0
    out = capsys.readouterr().out
    for cmd in ("check", "entail", "extract-cert", "verify-cert", "export-dot", "fuzz", "model"):
        assert cmd in out

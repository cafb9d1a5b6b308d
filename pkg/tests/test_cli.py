import json

import pytest

import cli
from cli import EXIT_DECIDED, EXIT_ERROR, EXIT_UNDECIDED, main
from field import EnumerationBudgetExceeded
from skeleta import GenericityFailure

S1 = "1,0;0,1;1,0;0,1"
S5 = "2,0;0,2;0,0;0,0"


@pytest.fixture
def q(quivers_dir):
    def path(name):
        return str(quivers_dir / name)
    return path


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_realizable(q, capsys):
    assert main(["realizable", q("ex_r1s1.quiver"), "--seq", S5]) == EXIT_DECIDED
    assert "is realizable" in capsys.readouterr().out
    assert main(["realizable", q("ex_r1s1.quiver"), "--seq", "1,0;0,2;1,0", "--json"]) == EXIT_DECIDED
    payload = _json(capsys)
    assert payload["realizable"] is False
    assert payload["seed"] == 0


def test_sequences(q, capsys):
    assert main(["sequences", q("ex_r1s1.quiver"), "--dim", "2,2", "--json"]) == EXIT_DECIDED
    assert len(_json(capsys)["sequences"]) == 64


def test_components_json(q, capsys):
    code = main(["components", q("ex_r1s1.quiver"), "--dim", "2,2", "--prime", "31", "--json"])
    assert code == EXIT_DECIDED
    payload = _json(capsys)
    assert payload["prime"] == 31
    assert {c["layering"] for c in payload["components"]} == {S1, "0,1;1,0;0,1;1,0"}


def test_components_human(q, capsys):
    assert main(["components", q("branch2.quiver"), "--dim", "0,1,1,1", "--prime", "31"]) == EXIT_DECIDED
    out = capsys.readouterr().out
    assert "1 irreducible components" in out
    assert "✅ (S2⊕S4, S3)" in out


def test_filt_with_module_file(q, capsys):
    args = ["filt", q("ex_r3s1.quiver"), "--module", q("r3s1_two_tops.module"), "--prime", "31"]
    assert main(args + ["--seq", S1]) == EXIT_DECIDED
    assert "yes" in capsys.readouterr().out
    assert main(args + ["--seq", "1,0;0,2;1,0;0,0", "--json"]) == EXIT_DECIDED
    assert _json(capsys)["verdict"] == "no"


def test_filt_over_several_primes(q, capsys):
    args = ["filt", q("ex_r3s1.quiver"), "--module", q("r3s1_two_tops.module"),
            "--seq", S1, "--primes", "29,31", "--json"]
    assert main(args) == EXIT_DECIDED
    payload = _json(capsys)
    assert [run["prime"] for run in payload["runs"]] == [29, 31]
    assert payload["verdict"] == "yes"


def test_undecided_exit_code(q, tmp_path, capsys):
    semisimple = tmp_path / "semisimple.module"
    semisimple.write_text("dim 2,2\n")
    args = ["filt", q("ex_r1s1.quiver"), "--module", str(semisimple),
            "--seq", "1,1;1,1", "--prime", "31", "--budget", "1"]
    assert main(args) == EXIT_UNDECIDED
    assert "undecided" in capsys.readouterr().out


def test_cofilt_and_theta(q, capsys):
    base = [q("ex_r3s1.quiver"), "--module", q("r3s1_two_tops.module"), "--prime", "31"]
    assert main(["cofilt"] + base + ["--seq", "0,2;2,0;0,0;0,0"]) == EXIT_DECIDED
    assert "yes" in capsys.readouterr().out
    assert main(["theta"] + base + ["--plus", "--json"]) == EXIT_DECIDED
    payload = _json(capsys)
    assert payload["radical"] == S5
    assert payload["socle"] == "0,2;2,0;0,0;0,0"
    assert payload["path_ranks"]["a1"] == 2


def test_gamma(q, capsys):
    assert main(["gamma", q("branch2.quiver"), "--seq", "0,1,0,1;0,0,1,0", "--json"]) == EXIT_DECIDED
    (run,) = _json(capsys)["runs"]
    assert run["gamma"] == 1
    assert main(["gamma", q("branch2.quiver"), "--seq", "0,1,0,1;0,0,1,0",
                 "--all-sequences", "--json"]) == EXIT_DECIDED
    (run,) = _json(capsys)["runs"]
    assert run["gamma"] == 2


def test_generic_writes_files(q, tmp_path, capsys):
    dot = tmp_path / "h.dot"
    module = tmp_path / "g.module"
    args = ["generic", q("ex_r2s1.quiver"), "--seq", "1,0;0,2;1,0;0,0",
            "--dot", str(dot), "--out", str(module)]
    assert main(args) == EXIT_DECIDED
    assert dot.read_text().startswith("digraph")
    assert module.read_text().startswith("dim 2,2")
    capsys.readouterr()
    assert main(["skeleta", q("ex_r2s1.quiver"), "--module", str(module), "--json"]) == EXIT_DECIDED
    assert len(_json(capsys)["skeleta"]) == 2


def test_closure(q, capsys):
    assert main(["closure", q("ex_r1s1.quiver"), "--seq", S5, "--target", S1, "--prime", "31"]) == EXIT_DECIDED
    assert "yes" in capsys.readouterr().out


@pytest.mark.slow
def test_allocate(q, capsys):
    args = ["allocate", q("ex_r3s1.quiver"), "--module", q("r3s1_two_tops.module"),
            "--dim", "2,2", "--prime", "31", "--json"]
    assert main(args) == EXIT_DECIDED
    assert {c["layering"] for c in _json(capsys)["containing"]} == {S1, S5}


# ---------------------------------------------------------
# Errors
# ---------------------------------------------------------
def test_missing_file_is_an_error(q, capsys):
    assert main(["realizable", q("nope.quiver"), "--seq", S1]) == EXIT_ERROR
    assert "❌" in capsys.readouterr().err


def test_bad_sequence_is_an_error(q, capsys):
    assert main(["realizable", q("ex_r1s1.quiver"), "--seq", "1,x"]) == EXIT_ERROR
    assert "bad sequence" in capsys.readouterr().err


def test_bad_prime_is_an_error(q, capsys):
    assert main(["realizable", q("ex_r1s1.quiver"), "--seq", S1, "--prime", "33"]) == EXIT_ERROR


def test_usage_errors_exit_with_one(q):
    with pytest.raises(SystemExit) as exc:
        main(["components", q("ex_r1s1.quiver")])
    assert exc.value.code == EXIT_ERROR
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_ERROR


def test_unrealizable_sequence(q, capsys):
    assert main(["realizable", q("ex_r2s1.quiver"), "--seq", "1,0;1,1;0,1;0,0", "--json"]) == EXIT_DECIDED
    assert _json(capsys)["realizable"] is False


def test_extension_degree_flag(q, tmp_path, capsys):
    pencil = tmp_path / "pencil.module"
    pencil.write_text("dim 2,2\nmat a1\n1 0\n0 1\nmat a2\n0 2\n1 0\n")
    args = ["filt", q("ex_r2s1.quiver"), "--module", str(pencil), "--seq", S1, "--prime", "5", "--json"]
    assert main(args + ["--extension-degree", "1"]) == EXIT_DECIDED
    assert _json(capsys)["verdict"] == "no"
    assert main(args) == EXIT_DECIDED
    (run,) = _json(capsys)["runs"]
    assert run["verdict"] == "yes"
    assert run["field"] == "F_5^2"


@pytest.mark.parametrize("error, code", [
    (GenericityFailure(31, 8), EXIT_UNDECIDED),
    (EnumerationBudgetExceeded(32, 1, "F_31"), EXIT_UNDECIDED),
    (RuntimeError("worker pool died"), EXIT_ERROR),
    (KeyError("a9"), EXIT_ERROR),
])
def test_only_search_limits_exit_undecided(q, capsys, monkeypatch, error, code):
    def fail(*args, **kwargs):
        raise error

    monkeypatch.setattr(cli, "classify", fail)
    assert main(["components", q("ex_r1s1.quiver"), "--dim", "2,2", "--prime", "31"]) == code
    assert "❌ components failed" in capsys.readouterr().err

"""Command-line front end: subcommands, exit codes, structured output
round-trips, environment catalog paths, and determinism."""

import textwrap

import pytest

from hypersym import cli, verify


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_structured(text):
    """Blocks of `key = value` lines separated by blank lines."""
    blocks = []
    for chunk in text.strip().split("\n\n"):
        fields = {}
        for line in chunk.splitlines():
            key, sep, value = line.partition(" = ")
            assert sep, f"not a key = value line: {line!r}"
            fields[key] = value
        blocks.append(fields)
    return blocks


def test_list_text_and_structured(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "hyp4" in out and "ev21" in out
    code, out, _ = run(capsys, "--format", "structured", "list")
    assert code == 0
    block = parse_structured(out)[0]
    assert block["entries"] == "28"
    assert block["entry[0].id"] == "hyp2"
    code, out, _ = run(capsys, "--format", "structured", "list",
                       "--role", "evolution")
    assert parse_structured(out)[0]["entries"] == "15"


def test_show_entry_and_transform(capsys):
    code, out, _ = run(capsys, "--format", "structured", "show", "hyp4")
    assert code == 0
    block = parse_structured(out)[0]
    assert block["id"] == "hyp4"
    assert block["role"] == "hyperbolic"
    assert block["expr"] == "exp(u) + exp(-2*u)"
    code, out, _ = run(capsys, "show", "T1")
    assert code == 0
    assert "S1" in out


def test_show_unknown_id_is_usage_error(capsys):
    code, out, err = run(capsys, "show", "nosuch")
    assert code == 2
    assert out == ""
    assert "error:" in err


def test_verify_exact_pair(capsys):
    code, out, _ = run(capsys, "--format", "structured",
                       "verify", "hyp4", "ev12", "--samples", "5")
    assert code == 0
    block = parse_structured(out)[0]
    assert block["pair"] == "hyp4 ev12 x"
    assert block["residual_is_zero"] == "true"
    assert float(block["numeric_max_residual"]) < 1e-9
    assert block["samples"] == "5"


def test_verify_direction_flag(capsys):
    code, out, _ = run(capsys, "--format", "structured",
                       "verify", "hyp4", "ev12", "--dir", "y")
    assert code == 0
    assert parse_structured(out)[0]["pair"] == "hyp4 ev12 y"


def test_verify_failing_pair_exit_and_localization(capsys):
    code, out, _ = run(capsys, "--format", "structured",
                       "verify", "hyp3", "ev12")
    assert code == 1
    block = parse_structured(out)[0]
    assert block["residual_is_zero"] == "false"
    assert block["failing_count"] == "5"
    assert block["failing[0].monomial"] == "u1^3*u2"
    assert block["failing[0].coefficient"] == "10"
    assert block["cleared_denominator"] == "exp(u)"


def test_verify_param_binding(capsys):
    code, out, _ = run(capsys, "--format", "structured",
                       "verify", "S3", "ev17", "--param", "mu=0")
    assert code == 0
    assert parse_structured(out)[0]["pair"] == "S3 ev17 x mu=0"
    # without the forced binding the symbolic residual persists
    code, out, _ = run(capsys, "verify", "S3", "ev17")
    assert code == 1


def test_verify_rejects_bad_parameter_value(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "S3", "ev17", "--param", "mu=oops"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_admissibility_violation_is_data_error(capsys):
    code, _, err = run(capsys, "verify", "S1", "ev11", "--param", "a=0")
    assert code == 2
    assert "error:" in err


def test_lemma_output(capsys):
    code, out, _ = run(capsys, "lemma", "ev17")
    assert code == 0
    assert "g = (-1)/(2*u1)" in out
    code, out, _ = run(capsys, "lemma", "ev17", "--hyp", "S3")
    assert code == 0
    assert "first_condition_zero = true" in out
    assert "second_condition_zero = true" in out


def test_lemma_failing_conditions_exit_one(capsys):
    # hyp3 does not satisfy the conditions for ev17's g
    code, out, _ = run(capsys, "lemma", "ev17", "--hyp", "hyp3")
    assert code == 1


def test_transform_command(capsys):
    code, out, _ = run(capsys, "transform")
    assert code == 0
    code, out, _ = run(capsys, "--format", "structured", "transform", "T1")
    assert code == 0
    block = parse_structured(out)[0]
    assert block["verified_convention"] == "second-coefficient-plus"
    assert block["convention[0].fitted.c1"] == "1/3"
    assert block["convention[0].fitted.c2"] == "1/6*a^3"
    assert block["status"] == "verified"


def test_sample_deterministic(capsys):
    code, out1, _ = run(capsys, "--format", "structured",
                        "sample", "--seed", "3")
    assert code == 0
    _, out2, _ = run(capsys, "--format", "structured",
                     "sample", "--seed", "3")
    assert out1 == out2
    block = parse_structured(out1)[0]
    assert block["seed"] == "3"
    assert float(block["max_relation_residual"]) < 1e-12


def test_verify_all_round_trips_field_for_field(capsys, catalog):
    code, out, _ = run(capsys, "--format", "structured",
                       "verify-all", "--samples", "3", "--seed", "4",
                       "--jobs", "1")
    assert code == 0
    blocks = parse_structured(out)
    reports = verify.verify_all(catalog, samples=3, seed=4, jobs=1)
    assert len(blocks) == len(reports) == 12
    for block, report in zip(blocks, reports):
        lines = dict(line.partition(" = ")[::2]
                     for line in report.structured_lines())
        assert block == lines


def test_verify_all_text_summary(capsys):
    code, out, _ = run(capsys, "verify-all")
    assert code == 0
    assert out.rstrip().endswith("12/12 pairings verified")


def test_verify_all_sampling_agrees_with_symbolic(capsys):
    _, out0, _ = run(capsys, "--format", "structured", "verify-all",
                     "--samples", "0", "--jobs", "1")
    _, out25, _ = run(capsys, "--format", "structured", "verify-all",
                      "--samples", "25", "--seed", "1", "--jobs", "2")
    v0 = {b["pair"]: b["residual_is_zero"] for b in parse_structured(out0)}
    v25 = {b["pair"]: b["residual_is_zero"] for b in parse_structured(out25)}
    assert v0 == v25
    assert all(float(b["numeric_max_residual"]) < float(b["tolerance"])
               for b in parse_structured(out25))


def test_byte_identical_runs(capsys):
    args = ("--format", "structured", "verify-all",
            "--samples", "5", "--seed", "7", "--jobs", "2")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_environment_catalog_path(capsys, tmp_path, monkeypatch):
    (tmp_path / "extra.txt").write_text(textwrap.dedent("""\
        id: envdemo
        role: hyperbolic
        params:
        provenance: demo
        expr:
        exp(u) + u1*v1
        """))
    monkeypatch.setenv(cli.ENV_CATALOG, str(tmp_path))
    code, out, _ = run(capsys, "--format", "structured", "show", "envdemo")
    assert code == 0
    assert parse_structured(out)[0]["id"] == "envdemo"
    monkeypatch.delenv(cli.ENV_CATALOG)
    code, _, _ = run(capsys, "show", "envdemo")
    assert code == 2


def test_catalog_flag_equivalent_to_env(capsys, tmp_path):
    (tmp_path / "extra.txt").write_text(
        "id: flagdemo\nrole: evolution\nparams:\nprovenance: demo\n"
        "expr:\nu1*u4 + u2\n")
    code, out, _ = run(capsys, "--catalog", str(tmp_path),
                       "--format", "structured", "show", "flagdemo")
    assert code == 0
    assert parse_structured(out)[0]["id"] == "flagdemo"


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()

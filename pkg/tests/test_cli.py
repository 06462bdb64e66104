import csv
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegap.cli import main, run_verify_appendix
from primegap.config import RunConfig, parse_config, serialize_config
from primegap.errors import ConfigError, ReportIOError
from primegap.report import emit_report, render_csv, render_json
from primegap.variational import mk_lower_bound


def test_parse_minimal():
    cfg = parse_config("command = mk\nk = 105\ndegree = 11")
    assert (cfg.command, cfg.k, cfg.degree) == ("mk", 105, 11)


def test_parse_full_syntax():
    text = '''
    # experiment
    command = "sums"   # quoted string
    kind = Maynard
    tuple = [0, 2]
    range = [1000, 2000]
    theta = 0.48
    rho = 1
    out = "out dir # not a comment"
    '''
    cfg = parse_config(text)
    assert cfg.kind == "Maynard" and cfg.tuple == [0, 2] and cfg.range == [1000, 2000]
    assert cfg.rho == 1.0 and isinstance(cfg.rho, float)
    assert cfg.out == "out dir # not a comment"


def test_constraint_violation_has_line_number():
    with pytest.raises(ConfigError) as err:
        parse_config("command = mk\nell = 5\nk = 3")
    assert err.value.violations == [(2, "need 0 <= ell < k, got ell=5, k=3")]


def test_empty_file_missing_command():
    with pytest.raises(ConfigError, match="command"):
        parse_config("")


def test_every_violation_listed():
    text = "command = fly\nbogus = 1\nk = abc\nomega = 2.0\ntuple = [3, 1]"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    lines = [v[0] for v in err.value.violations]
    assert lines == [1, 2, 3, 4, 5]


configs = st.builds(
    RunConfig,
    command=st.sampled_from(["tuples", "weights", "sums", "equidist", "mk", "verify-appendix"]),
    k=st.none() | st.integers(5, 200),
    ell=st.none() | st.integers(0, 4),
    D=st.none() | st.integers(1, 10**6),
    theta=st.none() | st.floats(1e-6, 1.0),
    omega=st.none() | st.floats(1e-6, 0.999),
    rho=st.none() | st.floats(-10, 10, allow_nan=False),
    kind=st.none() | st.sampled_from(["SelbergTwin", "GPY", "SmoothedMP", "Maynard"]),
    range=st.none() | st.tuples(st.integers(0, 1000), st.integers(0, 1000)).map(lambda t: sorted(t)),
    out=st.none() | st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=20),
)


@given(configs)
@settings(max_examples=200, deadline=None)
def test_config_round_trip(cfg):
    assert parse_config(serialize_config(cfg)) == cfg


def test_report_formatting_and_stability(tmp_path):
    cert = mk_lower_bound(3, 2)
    text = render_json(cert, {"command": "mk", "k": 3})
    doc = json.loads(text)
    assert doc["report"]["bound"] == f"{cert.bound.numerator}/{cert.bound.denominator}"
    assert doc["report"]["bound_decimal"] == f"{float(cert.bound):.12g}"
    assert doc["config"] == {"command": "mk", "k": 3}
    assert render_json(mk_lower_bound(3, 2), {"command": "mk", "k": 3}) == text
    assert render_json({"x": Fraction(2, 6), "y": 1 / 3}) == '{\n  "report": {\n    "x": "1/3",\n    "y": 0.333333333333\n  }\n}\n'
    (tmp_path / "file").write_text("")
    with pytest.raises(ReportIOError):
        emit_report(cert, "json", tmp_path / "file" / "x.json")


def test_equidist_csv_header(table):
    from primegap.equidist import error_sum_El

    text = render_csv(error_sum_El(10**4, 10, 1, table))
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["q", "witness_a", "max_error", "tau_weight"]
    assert len(rows) == 11


def test_verify_appendix_default_and_trivial():
    status, rep = run_verify_appendix(RunConfig(command="verify-appendix"))
    assert status == 0 and all(c["passed"] for c in rep["checks"])
    status, rep = run_verify_appendix(RunConfig(command="verify-appendix", D=1))
    assert status == 0
    s0 = next(c for c in rep["checks"] if c["name"] == "S0 direct = S0 eta")
    assert json.loads(s0["detail"])["direct"] == "1/1"


def test_verify_appendix_mutation_detected():
    status, rep = run_verify_appendix(RunConfig(command="verify-appendix", D=30), mutate=True)
    assert status == 2
    failed = {c["name"] for c in rep["checks"] if not c["passed"]}
    assert "S0 direct = S0 eta" in failed


def _run(args, tmp_path):
    out = tmp_path / "out"
    code = main(["--out", str(out)] + args)
    return code, out


def test_cli_subcommands(tmp_path):
    code, out = _run(["tuples", "--k", "10", "--window", "60"], tmp_path)
    assert code == 0
    rep = json.loads((out / "tuples.json").read_text())["report"]
    assert rep["greedy"]["admissible"] and rep["shifted_primes"]["admissible"]

    code, out = _run(["weights", "--kind", "Maynard", "--k", "2", "--ell", "1", "--D", "10"], tmp_path)
    rows = list(csv.reader((out / "weights.csv").read_text().splitlines()))
    assert code == 0 and rows[0] == ["key", "numerator", "denominator"] and len(rows) == 6

    code, out = _run(["equidist", "--x", "10000", "--Q", "12", "--l", "2"], tmp_path)
    assert code == 0 and (out / "equidist.csv").read_text().startswith("q,witness_a,max_error,tau_weight\n")

    code, out = _run(["sums", "--range", "1000,3000", "--theta", "0.48"], tmp_path)
    assert code == 0
    rep = json.loads((out / "sums.json").read_text())
    assert rep["config"]["theta"] == 0.48 and rep["report"]["T1"] > 0
    assert (out / "sums-partials.csv").read_text().startswith("start,stop,T1,T2\n")

    code, out = _run(["mk", "--k", "4", "--degree", "2", "--theta", "0.5"], tmp_path)
    rep = json.loads((out / "mk.json").read_text())["report"]
    assert code == 0 and rep["threshold"]["m"] == 1


def test_cli_spec_file_and_config(tmp_path):
    spec = tmp_path / "spec.cfg"
    spec.write_text("kind = Maynard\nk = 2\nell = 1\nD = 30\n")
    code, out = _run(["sums", "--range", "[1000, 2000]", "--spec-file", str(spec)], tmp_path)
    assert code == 0
    rep = json.loads((out / "sums.json").read_text())["report"]
    assert rep["kind"] == "Maynard" and "/" in rep["T1"]
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = verify-appendix\nD = 10\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "va")]) == 0


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("command = mk\nell = 5\nk = 3\n")
    assert main(["--config", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    empty = tmp_path / "empty.cfg"
    empty.write_text("")
    assert main(["--config", str(empty)]) == 1
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 3
    inadm = tmp_path / "t.json"
    inadm.write_text("[0, 1]")
    assert main(["--out", str(tmp_path / "o"), "tuples", "--verify", str(inadm)]) == 2
    assert main(["--out", str(tmp_path / "o"), "verify-appendix", "--mutate"]) == 2
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["--out", str(blocker / "sub"), "mk", "--k", "1", "--degree", "1"]) == 3


def test_reruns_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["--out", str(tmp_path / "same"), "mk", "--k", "3", "--degree", "3"]) == 0
        (tmp_path / "same" / "mk.json").rename(tmp_path / f"{name}.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    for name in ("c", "d"):
        assert main(["--out", str(tmp_path / "same"), "--format", "csv", "equidist", "--x", "5000", "--Q", "9"]) == 0
        (tmp_path / "same" / "equidist.csv").rename(tmp_path / f"{name}.csv")
    assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "d.csv").read_bytes()

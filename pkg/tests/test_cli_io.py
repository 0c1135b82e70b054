"""Ingestion, canonical serialization, schema validation and CLI exit codes."""
import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st

from singtrace.cli import EXIT_INPUT, EXIT_OK, EXIT_STRICT, main
from singtrace.errors import InputError
from singtrace.io import (InputSpec, ReportEnvelope, dumps, ingest, load_schema, read_csv_values,
                          read_json_values, read_pieces, to_jsonable, validate_report)

SCHEMA = load_schema()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_csv_formats(tmp_path):
    assert read_csv_values("3\n2\n\n# note\n1\n")[0] == [3.0, 2.0, 1.0]
    assert read_csv_values("3, 2, 1\n")[0] == [3.0, 2.0, 1.0]
    with pytest.raises(InputError, match="line 2"):
        read_csv_values("1\nabc\n")
    with pytest.raises(InputError, match="empty"):
        read_csv_values("# only a comment\n")


def test_csv_ingest_reports_line_of_bad_value(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("# header\n3\n2\n2.5\n")
    with pytest.raises(InputError, match=r"index 3.*line 4"):
        ingest(InputSpec("csv_sequence", path=str(path)))


def test_json_and_pieces():
    assert read_json_values('{"values": [2, 1]}') == [2.0, 1.0]
    with pytest.raises(InputError):
        read_json_values('[1, "a"]')
    with pytest.raises(InputError):
        read_json_values("{bad")
    assert read_pieces('{"pieces": [[1, 2], [3, 0.5]]}') == [(1.0, 2.0), (3.0, 0.5)]
    assert read_pieces("1,2\n3,0.5\n") == [(1.0, 2.0), (3.0, 0.5)]
    with pytest.raises(InputError):
        read_pieces("1,2,3\n")


def test_input_spec_validation():
    with pytest.raises(InputError):
        InputSpec("named_family")
    with pytest.raises(InputError):
        InputSpec("named_family", family={"name": "nope"})
    with pytest.raises(InputError):
        InputSpec("csv_sequence", path="x.csv", horizon=-1.0)
    with pytest.raises(InputError):
        InputSpec("tsv", path="x")


def test_non_finite_floats_serialize_as_strings():
    data = to_jsonable({"a": float("inf"), "b": np.float64("nan"), "c": -np.inf, "d": np.int64(3)})
    assert data == {"a": "inf", "b": "nan", "c": "-inf", "d": 3}


@given(st.recursive(st.floats(allow_nan=False, allow_infinity=False) | st.integers(-10**6, 10**6)
                    | st.text(max_size=5) | st.booleans() | st.none(),
                    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=4), kids,
                                                                              max_size=4),
                    max_leaves=20))
def test_dumps_is_canonical(data):
    text = dumps(data)
    assert dumps(json.loads(text)) == text


def test_analyze_cli_report(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "power(2.0)", "--no-cross-checks")
    assert code == EXIT_OK
    data = json.loads(out)
    validate_report(data)
    assert "wall_time" not in data
    assert data["results"]["trace_value"] == pytest.approx(0.0, abs=1e-4)


def test_analyze_cli_is_reproducible(capsys):
    argv = ("analyze", "--family", "finite_rank(2)", "--horizon", "1e5", "--no-cross-checks")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_timing_flag_adds_wall_time(capsys):
    _, out, _ = run(capsys, "psi-check", "--psi", "log1p", "--timing")
    data = json.loads(out)
    validate_report(data)
    assert data["wall_time"] > 0


def test_csv_input_cli(tmp_path, capsys):
    path = tmp_path / "s.csv"
    path.write_text("\n".join(str(1.0 / n) for n in range(1, 200)))
    code, out, _ = run(capsys, "analyze", "--csv", str(path), "--horizon", "1e5", "--no-cross-checks")
    assert code == EXIT_OK
    validate_report(json.loads(out))


def test_input_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "analyze", "--family", "nope")[0] == EXIT_INPUT
    missing = tmp_path / "missing.csv"
    code, _, err = run(capsys, "analyze", "--csv", str(missing))
    assert code == EXIT_INPUT and "cannot read" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("1\n2\n")
    code, _, err = run(capsys, "analyze", "--csv", str(bad))
    assert code == EXIT_INPUT and "line 2" in err
    assert run(capsys, "classify-kappa", "--kappa", "nope")[0] == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--family", "harmonic", "--horizon", "0"])
    assert exc.value.code == 2


def test_strict_non_convergence_exit_3(capsys):
    # exp_exp leaves the float range early, so restricted growth stays undetermined
    code, out, err = run(capsys, "classify-kappa", "--kappa", "exp_exp", "--strict")
    assert json.loads(out)["results"]["restricted"] == "undetermined"
    assert code == EXIT_STRICT and "non-convergence" in err
    # a slow oscillation outlasts a short horizon
    code, _, err = run(capsys, "band", "--function", "sin_log(0.5, 0.1)", "--horizon", "1e4", "--strict")
    assert code == EXIT_STRICT and "not stabilized" in err
    assert run(capsys, "band", "--function", "sin_log(0.5, 0.1)", "--horizon", "1e4")[0] == EXIT_OK


def test_band_and_classify_reports_validate(capsys):
    for argv in (("band", "--function", "sin_log(0.5, 1)", "--horizon", "1e5"),
                 ("band", "--sequence", "alternating(1)", "--horizon", "1e4"),
                 ("classify-kappa", "--kappa", "exp"),
                 ("classify-kappa", "--kappa", "psi_inverse", "--psi", "pow(0.5)")):
        code, out, _ = run(capsys, *argv)
        assert code == EXIT_OK
        jsonschema.validate(json.loads(out), SCHEMA)


def test_text_format(capsys):
    code, out, _ = run(capsys, "classify-kappa", "--kappa", "exp", "--format", "text")
    assert code == EXIT_OK
    assert "restricted: pass_strong" in out
    assert "dominated_sup: 1" in out


def test_envelope_rejects_unknown_command():
    env = ReportEnvelope("nope", {}, {})
    with pytest.raises(jsonschema.ValidationError):
        validate_report(env.to_dict())

import json

import numpy as np
import pytest

from parcorr import ScenarioConfig, gen_scenario, run_test
from parcorr.errors import ParseError, ValidationError
from parcorr.io import (
    dump_dataset,
    emit_plot_data,
    load_csv_series,
    load_manifest,
    report_to_dict,
    write_csv_series,
    write_report,
)
from parcorr.model import Dataset

REPORT_KEYS = {
    "g", "t_stat", "df", "p_value", "skewness", "qq_points", "mode", "rho",
    "n", "t_len", "warnings", "tool_version",
}


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_plain_csv(tmp_path):
    m = load_csv_series(write(tmp_path, "a.csv", "1,2\n3,4\n"))
    assert m.tolist() == [[1, 2], [3, 4]]


def test_header_skipped(tmp_path):
    assert load_csv_series(write(tmp_path, "a.csv", "a,b\n1,2\n")).tolist() == [[1, 2]]


def test_ragged_row(tmp_path):
    with pytest.raises(ParseError, match="row 2"):
        load_csv_series(write(tmp_path, "a.csv", "1,2\n3\n"))


def test_non_numeric_cell(tmp_path):
    with pytest.raises(ParseError, match="row 3, column 2"):
        load_csv_series(write(tmp_path, "a.csv", "x,y\n1,2\n3,oops\n"))


@pytest.mark.parametrize("text", ["", "\n\n", "a,b\n"])
def test_empty(tmp_path, text):
    with pytest.raises(ParseError):
        load_csv_series(write(tmp_path, "a.csv", text))


def test_non_finite_rejected(tmp_path):
    with pytest.raises(ParseError, match="non-finite"):
        load_csv_series(write(tmp_path, "a.csv", "1\nnan\n"))


def test_round_trip_bit_identical(tmp_path, rng):
    values = rng.standard_normal((50, 3)) * np.array([1e-300, 1.0, 1e300])
    values[0, 0] = 0.1 + 0.2
    path = tmp_path / "s.csv"
    write_csv_series(path, values)
    assert load_csv_series(path).tobytes() == values.tobytes()


def manifest(tmp_path, entries):
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps({"version": 1, "experiments": entries}))
    return p


def make_files(tmp_path, label, t_len, rng, with_z=True):
    entry = {"label": label}
    for name in ("x", "y", "z") if with_z else ("x", "y"):
        write_csv_series(tmp_path / f"{label}_{name}.csv", rng.standard_normal(t_len))
        entry[f"{name}_path"] = f"{label}_{name}.csv"
    return entry


def test_manifest_three_experiments(tmp_path, rng):
    d = load_manifest(manifest(tmp_path, [make_files(tmp_path, k, 30, rng) for k in "abc"]))
    assert len(d) == 3 and d.labels == ["a", "b", "c"]
    assert all(e.z.shape == (30, 1) for e in d)


def test_manifest_missing_z(tmp_path, rng):
    entries = [make_files(tmp_path, k, 30, rng) for k in "ab"]
    entries.append(make_files(tmp_path, "c", 30, rng, with_z=False))
    d = load_manifest(manifest(tmp_path, entries))
    assert d[2].z.shape == (30, 0)


def test_manifest_mixed_t_len(tmp_path, rng):
    entries = [make_files(tmp_path, "a", 30, rng), make_files(tmp_path, "b", 30, rng),
               make_files(tmp_path, "short", 20, rng)]
    with pytest.raises(ValidationError, match="short"):
        load_manifest(manifest(tmp_path, entries))


def test_manifest_errors(tmp_path, rng):
    entries = [make_files(tmp_path, k, 10, rng) for k in "abc"]
    bad_version = tmp_path / "v.json"
    bad_version.write_text(json.dumps({"version": 2, "experiments": entries}))
    with pytest.raises(ParseError, match="version"):
        load_manifest(bad_version)
    with pytest.raises(ParseError, match="duplicate"):
        load_manifest(manifest(tmp_path, entries + [dict(entries[0])]))
    missing = dict(entries[0], label="m", x_path="nope.csv")
    with pytest.raises(ParseError, match="nope.csv"):
        load_manifest(manifest(tmp_path, entries + [missing]))
    not_json = write(tmp_path, "bad.json", "{")
    with pytest.raises(ParseError):
        load_manifest(not_json)


def test_dump_and_reload(tmp_path):
    d = gen_scenario(ScenarioConfig("fig1", noise_sd=0.5, seed=3))
    d2 = load_manifest(dump_dataset(d, tmp_path / "data"))
    for a, b in zip(d, d2):
        assert a.x.tobytes() == b.x.tobytes() and a.z.tobytes() == b.z.tobytes()
    assert run_test(d, z_intercept=False) == run_test(d2, z_intercept=False)


# -- reports ---------------------------------------------------------------

def fig_report(scenario="fig1", n=3):
    cfg = ScenarioConfig(scenario, n=n, seed=42)
    d = gen_scenario(cfg)
    return d, run_test(d, mode=cfg.mode, z_intercept=False)


def test_report_schema(tmp_path):
    _, report = fig_report()
    path = tmp_path / "r.json"
    write_report(report, path)
    obj = json.loads(path.read_text())
    assert REPORT_KEYS <= set(obj)
    assert len(obj["g"]) == 3
    assert obj["df"] == 2 and obj["n"] == 3
    assert isinstance(obj["warnings"], list)
    assert all(len(pair) == 2 for pair in obj["qq_points"])


def test_p_value_serialized_as_float(tmp_path):
    _, report = fig_report("fig2")
    assert report.p_value == 1.0
    path = tmp_path / "r.json"
    write_report(report, path)
    assert '"p_value": 1.0' in path.read_text()


def test_empty_warnings_key_present(tmp_path, rng):
    from conftest import random_dataset

    report = run_test(random_dataset(rng, n=10))
    assert report.warnings == []
    path = tmp_path / "r.json"
    write_report(report, path)
    assert json.loads(path.read_text())["warnings"] == []


def test_full_precision_and_infinite_t(tmp_path):
    _, report = fig_report()
    obj = report_to_dict(report)
    assert obj["g"] == report.g
    report.t_stat = float("inf")
    assert report_to_dict(report)["t_stat"] is None


def test_report_unwritable(tmp_path):
    _, report = fig_report()
    with pytest.raises(OSError, match="cannot write"):
        write_report(report, tmp_path / "missing" / "r.json")


# -- plot data ---------------------------------------------------------------

def read_residual(out):
    return load_csv_series(out / "residual_1_2.csv")[:, 1]


def test_plot_data_fig1(tmp_path):
    d, report = fig_report("fig1", n=10)
    emit_plot_data(d, report, tmp_path)
    names = {p.name for p in tmp_path.iterdir()}
    assert {"g_values.csv", "qq.csv", "residual_1_2.csv", "exp01_x.csv", "exp10_z.csv"} <= names
    r = read_residual(tmp_path)
    s0 = d[0].z[:, 0]
    pulse = d[0].x[:, 0] - s0
    # the step is projected out, the pulse remains
    assert abs(r @ s0) < 1e-10
    assert np.corrcoef(r, pulse)[0, 1] > 0.9
    rest = r - pulse
    assert np.ptp(rest[s0 == 1]) < 1e-12 and np.ptp(rest[s0 == 0]) < 1e-12


def test_plot_data_fig2(tmp_path):
    d, report = fig_report("fig2", n=10)
    emit_plot_data(d, report, tmp_path)
    r = read_residual(tmp_path)
    for e in d[:2]:
        assert abs(r @ e.z[:, 0]) < 1e-10


def test_plot_data_needs_experiments(tmp_path):
    _, report = fig_report()
    out = tmp_path / "plots"
    with pytest.raises(ValidationError):
        emit_plot_data(Dataset(()), report, out)
    assert not out.exists()

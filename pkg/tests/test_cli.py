import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from srgtools import cli, region as rg


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rate_pp(capsys):
    code, out, _ = run(["rate", "--method", "pp", "--mu", "1", "--alpha", "1"], capsys)
    assert code == 0 and "closed_form=0.5\n" in out


def test_rate_missing_flag_is_usage_error(capsys):
    code, _, err = run(["rate", "--method", "gd"], capsys)
    assert code == 2 and "needs alpha" in err


def test_unknown_verb_exit_code(capsys):
    assert run(["bogus"], capsys)[0] == 2


def test_tightness_row(capsys):
    code, out, _ = run(["tightness", "--method", "fs_mono_lip", "--alpha", "0.4", "--mu", "1", "--L", "2"], capsys)
    header, row = out.strip().splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert code == 0 and float(rec["gap"]) <= 1e-3 and rec["tight"] == "true"


def test_tightness_sweep_is_deterministic(capsys):
    args = ["tightness", "--method", "drs_refl_cvx", "--draws", "5", "--seed", "4"]
    a = run(args, capsys)
    b = run(args, capsys)
    assert a == b and len(a[1].splitlines()) == 6


def test_sample_is_deterministic(capsys, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        assert cli.main(["sample", "--matrix", "1,2,0;0,1,0;0,0,3", "--pairs", "50", "--seed", "2",
                         "--out", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().startswith("re,im,is_infinity\n")


def test_sample_named_operator(capsys):
    code, out, _ = run(["sample", "--op", "a_z", "--z", "0,1", "--pairs", "3"], capsys)
    assert code == 0 and out.count("0.0,1.0,0") == 3


def test_iterate_worst_case_rate_check(capsys):
    base = ["iterate", "--method", "drs", "--worst-case", "--alpha", "1", "--mu", "0.5", "--beta", "1",
            "--max-iters", "10"]
    code, out, err = run(base + ["--rate", "0.7237"], capsys)
    assert code == 0 and "rate_verify=true" in err
    code, _, err = run(base + ["--rate", "0.7228"], capsys)
    assert code == 1 and "rate_verify=false" in err


def test_iterate_requires_operator(capsys):
    assert run(["iterate", "--method", "gd"], capsys)[0] == 2


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("method = pp\nmu = 1\nalpha = 2  # step\n")
    assert "closed_form=0.3333333333333333" in run(["rate", "--config", str(cfg)], capsys)[1]
    assert "closed_form=0.5\n" in run(["rate", "--config", str(cfg), "--alpha", "1"], capsys)[1]


def test_bad_config_number(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = one\n")
    assert run(["rate", "--config", str(cfg)], capsys)[0] == 2


def _landmarks(svg):
    root = ET.fromstring(svg)
    return [float(t.text) for t in root.iter("{http://www.w3.org/2000/svg}text") if t.get("class") == "landmark"]


def test_plot_resolvent_landmarks(capsys):
    code, svg, _ = run(["plot", "M mu=1 |resolvent 1", "--grid", "60"], capsys)
    assert code == 0 and _landmarks(svg) == [0.0, 0.5]
    assert "∪{∞}" not in svg


def test_plot_averaged_disk(capsys):
    assert _landmarks(run(["plot", "N theta=0.5", "--grid", "40"], capsys)[1]) == [0.0, 1.0]


def test_plot_negated_symmetric_disk_matches_region_text(capsys):
    a = run(["plot", "L L=1 |scale -1", "--grid", "40"], capsys)[1]
    b = run(["plot", "DISK 0.0 1.0", "--grid", "40"], capsys)[1]
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("<title>")]
    assert strip(a) == strip(b) and _landmarks(a) == [-1.0, 1.0]


def test_plot_unbounded_has_infinity_annotation(capsys):
    svg = run(["plot", "M", "--grid", "30"], capsys)[1]
    assert "∪{∞}" in svg
    assert 'viewBox="0 0 480 480"' in svg


def test_plot_with_cloud_overlay(capsys, tmp_path):
    cloud = tmp_path / "c.csv"
    cli.main(["sample", "--matrix", "0.5,0;0,0.5", "--pairs", "5", "--out", str(cloud)])
    capsys.readouterr()
    svg = run(["plot", "N theta=0.5", "--grid", "20", "--cloud", str(cloud)], capsys)[1]
    assert svg.count('r="1.2"') == 10


def test_plot_parse_error_reports_column(capsys):
    code, _, err = run(["plot", "M mu=abc"], capsys)
    assert code == 2 and "column 3" in err


def test_plot_region_parse_error_reports_line(capsys):
    code, _, err = run(["plot", "INTERSECT / DISK 0 1 / BLOB"], capsys)
    assert code == 2 and "line 3" in err


def test_plot_unwritable_path(capsys):
    assert run(["plot", "N theta=0.5", "--out", "/nonexistent/dir/x.svg"], capsys)[0] == 2


def test_plot_is_deterministic(capsys):
    a = run(["plot", "C beta=1 |compose N theta=0.5", "--grid", "40"], capsys)
    b = run(["plot", "C beta=1 |compose N theta=0.5", "--grid", "40"], capsys)
    assert a == b


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "srgtools", "rate", "--method", "gd", "--alpha", "1",
                          "--mu", "0.5", "--L", "1.5"], capture_output=True, text=True)
    assert res.returncode == 0 and "closed_form=0.5" in res.stdout

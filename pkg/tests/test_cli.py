import itertools
import json
import subprocess
import sys

import pytest

from waringlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


# -------------------------------------------------------------------- zk


def test_zk_reference_agreement(capsys):
    code, payload, _ = run_json(capsys, "zk", "--k", "3")
    assert code == 0
    assert payload["agrees"] is True
    assert payload["lower"] <= payload["reference_value"] + 0.01
    assert payload["upper"] - payload["lower"] <= 1e-3


def test_zk_unattainable_precision_exits_2(capsys):
    code, out, err = run(capsys, "zk", "--k", "2", "--precision", "1e-12")
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


# ----------------------------------------------------------------- local


def test_local_check_failing_pair(capsys):
    code, payload, _ = run_json(capsys, "local", "check", "--q", "5", "--s", "3")
    assert code == 1
    assert payload["holds"] is False
    assert payload["counterexample"] == [[1, 4], 0]


def test_local_check_holding_pair(capsys):
    code, payload, _ = run_json(capsys, "local", "check", "--q", "5", "--s", "4")
    assert code == 0
    assert payload["holds"] is True
    assert payload["counterexample"] is None


def test_local_minimal_s(capsys):
    code, payload, _ = run_json(capsys, "local", "minimal-s", "--q", "5")
    assert code == 0
    assert payload["s_min"] == 4


def test_local_minimal_s_exhausted(capsys):
    code, _, err = run(capsys, "local", "minimal-s", "--q", "5", "--s-max", "2")
    assert code == 3
    assert err.startswith("internal error:")


def test_local_check_needs_s(capsys):
    code, _, err = run(capsys, "local", "check", "--q", "5")
    assert code == 2
    assert "error:" in err


# --------------------------------------------------------------- downset


def test_downset_demo(capsys, tmp_path):
    f1 = tmp_path / "a.txt"
    f2 = tmp_path / "b.txt"
    f1.write_text("2\n14\n")
    f2.write_text("# units\n1\n2\n4\n8\n")
    code, payload, _ = run_json(
        capsys, "downset", "demo", "--q", "15", "--sets", str(f1), str(f2)
    )
    assert code == 0
    assert payload["after"][0] == [0, 6]
    assert payload["compressed_are_downsets"] is True
    assert payload["sumset_size_after"] <= payload["sumset_size_before"]


def test_set_file_bad_token(capsys, tmp_path):
    f1 = tmp_path / "bad.txt"
    f1.write_text("1\nxyz\n")
    code, _, err = run(
        capsys, "downset", "demo", "--q", "15", "--sets", str(f1), str(f1)
    )
    assert code == 2
    assert "bad.txt:2" in err


def test_set_file_empty(capsys, tmp_path):
    f1 = tmp_path / "empty.txt"
    f1.write_text("# nothing\n")
    code, _, err = run(
        capsys, "downset", "demo", "--q", "15", "--sets", str(f1), str(f1)
    )
    assert code == 2


# ---------------------------------------------------------- spectral side


def test_pseudo_small_grid(capsys):
    code, payload, _ = run_json(capsys, "pseudo", "--n", "256")
    assert code == 0
    assert payload["eta"] > 0
    assert payload["arc_class"] in ("major", "minor")


def test_restrict_small_grid(capsys):
    code, payload, _ = run_json(capsys, "restrict", "--n", "1024")
    assert code == 0
    assert payload["K_hat"] > 1.0


def test_vq_csv_default(capsys):
    code, out, _ = run(capsys, "vq", "--q-max", "3")
    assert code == 0
    lines = out.split("\r\n")
    assert lines[0] == "q,a,abs_vq"
    assert lines[1] == "1,0,2.0"  # V_1 = sigma-average, k=2 w=2 b=1


def test_vq_json_format(capsys):
    code, payload, _ = run_json(capsys, "--format", "json", "vq", "--q-max", "2")
    assert code == 0
    assert payload["rows"][0][:2] == [1, 0]


def test_jcount_bare_integer(capsys):
    code, out, _ = run(capsys, "jcount", "--t", "2", "--k", "2", "--x", "5")
    assert code == 0
    want = sum(
        1
        for x in itertools.product(range(1, 6), repeat=2)
        for y in itertools.product(range(1, 6), repeat=2)
        if all(sum(v**j for v in x) == sum(v**j for v in y) for j in (1, 2))
    )
    assert out == f"{want}\n"


def test_transfer_schema(capsys):
    code, payload, _ = run_json(capsys, "transfer", "--n", "4096")
    # squares fail the window check at desk scale: exit 1, by design
    assert code == 1
    assert sorted(payload) == [
        "K_hat",
        "bohr_size",
        "eta",
        "holds",
        "means",
        "min_convolution",
        "window",
    ]
    assert payload["holds"] is False
    assert payload["min_convolution"] == 0.0


# ------------------------------------------------------------- experiment


def test_experiment_overrides(capsys):
    code, payload, _ = run_json(
        capsys, "experiment", "k=2", "N=500", "s=44", "n_min=44", "subset_mode=full"
    )
    assert code == 0
    assert payload["config"]["s"] == 44
    names = [c["name"] for c in payload["checks"]]
    assert "window_coverage_full" in names


def test_experiment_unknown_key(capsys):
    code, _, err = run(capsys, "experiment", "mystery=1")
    assert code == 2
    assert "error:" in err


def test_experiment_seed_flag(capsys):
    code, payload, _ = run_json(
        capsys, "--seed", "7", "experiment", "N=500", "density=0.9"
    )
    assert code in (0, 1)
    assert payload["config"]["seed"] == 7


# ------------------------------------------------------------ global flags


def test_config_file_defaults(capsys, tmp_path):
    cfg = tmp_path / "flags.cfg"
    cfg.write_text("q-max=2\n")
    code, out, _ = run(capsys, "--config", str(cfg), "vq")
    assert code == 0
    rows = [ln for ln in out.split("\r\n") if ln][1:]
    assert all(int(r.split(",")[0]) <= 2 for r in rows)


def test_out_writes_file(capsys, tmp_path):
    dest = tmp_path / "zk.json"
    code, out, _ = run(capsys, "--out", str(dest), "zk", "--k", "2")
    assert code == 0
    assert out == ""
    assert json.loads(dest.read_text())["k"] == 2


def test_csv_rendering(capsys):
    code, out, _ = run(capsys, "--format", "csv", "zk", "--k", "2")
    assert code == 0
    rows = dict(
        line.split(",", 1) for line in out.split("\r\n") if line
    )
    assert rows["k"] == "2"
    assert float(rows["lower"]) > 1.7


def test_bad_flag_systemexit(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["zk", "--nope"])
    assert exc.value.code == 2


def test_version_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "waringlab" in capsys.readouterr().out


def test_console_script_installed():
    out = subprocess.run(
        ["waringlab", "jcount", "--t", "1", "--k", "2", "--x", "9"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout == "9\n"  # diagonal: x == y

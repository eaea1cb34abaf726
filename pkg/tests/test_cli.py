import csv
import json
import os

import numpy as np
import pytest

from photonops.cli import main


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_pnd_sums_to_one(tmp_path):
    code, out = run(tmp_path, "pnd", "--family", "thermal", "--order", "sa", "--nbar", "0.25", "--p", "2", "--q", "2")
    assert code == 0
    header, data = read_csv(out)
    assert header == ["n", "probability"]
    assert data[:, 1].sum() == pytest.approx(1.0, abs=1e-10)
    assert np.array_equal(data[:, 0], np.arange(len(data)))


def test_pnd_ecs_parity(tmp_path):
    code, out = run(tmp_path, "pnd", "--family", "ecs", "--alpha", "2", "--order", "as", "--p", "4", "--q", "8")
    assert code == 0
    _, data = read_csv(out)
    odd = (data[:, 0] - 4 + 8) % 2 == 1
    assert np.all(data[odd, 1] == 0.0)


def test_pnd_identity_is_geometric(tmp_path):
    _, out = run(tmp_path, "pnd", "--family", "thermal", "--order", "sa", "--nbar", "0.25", "--p", "0", "--q", "0")
    _, data = read_csv(out)
    assert np.allclose(data[1:, 1] / data[:-1, 1], 0.2, rtol=1e-12)


def test_wigner_thermal_central_dip(tmp_path):
    code, out = run(tmp_path, "wigner", "--family", "thermal", "--nbar", "0.04", "--p", "1", "--q", "1")
    assert code == 0
    header, data = read_csv(out)
    assert header == ["re", "im", "w"]
    assert len(data) == 81 * 81
    assert data[:, 2].min() >= -1e-10
    # the origin sits below the peak of the untransformed thermal Gaussian, (2/pi)/(1+2 nbar)
    center = data[(data[:, 0] == 0) & (data[:, 1] == 0), 2][0]
    assert center < 2 / np.pi / 1.08


@pytest.mark.parametrize("p,q,alpha", [("1", "1", "1"), ("1", "0", "0.1")])
def test_wigner_ecs_has_negative_values(tmp_path, p, q, alpha):
    _, out = run(tmp_path, "wigner", "--family", "ecs", "--alpha", alpha, "--p", p, "--q", q)
    _, data = read_csv(out)
    assert data[:, 2].min() < 0


def test_q_sweep_increasing(tmp_path):
    code, out = run(tmp_path, "q-sweep", "--family", "thermal", "--order", "sa", "--p", "4", "--q", "2",
                    "--sweep-min", "0.01", "--sweep-max", "1", "--sweep-points", "50")
    assert code == 0
    header, data = read_csv(out)
    assert header == ["x", "q", "q_closed"]
    assert np.all(np.diff(data[:, 1]) > 0)
    assert np.allclose(data[:, 1], data[:, 2], atol=1e-7)


def test_q_sweep_singular_branch_has_no_closed_column(tmp_path):
    _, out = run(tmp_path, "q-sweep", "--family", "thermal", "--p", "1", "--q", "1", "--sweep-points", "5")
    header, _ = read_csv(out)
    assert header == ["x", "q"]


def test_q_sweep_pure_fock_limit(tmp_path):
    _, out = run(tmp_path, "q-sweep", "--family", "thermal", "--p", "3", "--q", "0",
                 "--sweep-min", "1e-9", "--sweep-max", "1e-3", "--sweep-points", "3")
    _, data = read_csv(out)
    assert data[0, 1] == pytest.approx(-1.0, abs=1e-6)


def test_q_decreases_with_added_photons(tmp_path):
    values = {}
    for p in ("4", "6"):
        _, out = run(tmp_path, "q-sweep", "--family", "thermal", "--p", p, "--q", "2",
                     "--sweep-min", "0.5", "--sweep-max", "0.6", "--sweep-points", "2", name=f"q{p}.csv")
        values[p] = read_csv(out)[1][0, 1]
    assert values["6"] < values["4"]


def test_figure_1(tmp_path):
    code = main(["figure", "1", "--out", str(tmp_path)])
    assert code == 0
    files = sorted(f for f in os.listdir(tmp_path) if f.endswith(".csv"))
    assert files == [f"fig1_{c}.csv" for c in "abcdef"]
    for f in files:
        assert read_csv(tmp_path / f)[1][:, 1].sum() == pytest.approx(1.0, abs=1e-10)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["library_version"]
    assert manifest["panels"]["fig1_c.csv"] == {
        "kind": "pnd", "family": "thermal", "nbar": 0.25, "order": "sa", "p": 8, "q": 6,
        "tail_tol": 1e-14, "cutoff": manifest["panels"]["fig1_c.csv"]["cutoff"]}


def test_figure_3_range(tmp_path):
    assert main(["figure", "3", "--out", str(tmp_path)]) == 0
    files = sorted(f for f in os.listdir(tmp_path) if f.endswith(".csv"))
    assert len(files) == 4
    for f in files:
        q = read_csv(tmp_path / f)[1][:, 1]
        assert np.all(q > -1) and np.all(q < 0.5)


def test_figure_5_panels_a_and_d(tmp_path):
    # expected to agree closely; the two orders give different states, so this fails as written
    assert main(["figure", "5", "--out", str(tmp_path), "--grid-points", "41"]) == 0
    a = read_csv(tmp_path / "fig5_a.csv")[1][:, 2]
    d = read_csv(tmp_path / "fig5_d.csv")[1][:, 2]
    assert np.max(np.abs(a - d)) < 1e-6


def test_unknown_figure_exit_code(tmp_path):
    assert main(["figure", "8", "--out", str(tmp_path)]) == 2


def test_null_state_exit_code(tmp_path):
    code, _ = run(tmp_path, "pnd", "--nbar", "0", "--q", "1", "--order", "as")
    assert code == 3


def test_bad_config_exit_code(tmp_path):
    code, _ = run(tmp_path, "pnd", "--nbar", "-1")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["pnd", "--order", "xy"])
    assert exc.value.code == 2


def test_outputs_are_byte_identical(tmp_path):
    args = ["wigner", "--family", "ecs", "--alpha", "1", "--p", "2", "--q", "1", "--grid-points", "31"]
    main([*args, "--out", str(tmp_path / "a.csv")])
    main([*args, "--out", str(tmp_path / "b.csv"), "--workers", "4"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_round_trips_exactly(tmp_path):
    from photonops import OpSequence, StateSpec, pnd, prepare_state

    _, out = run(tmp_path, "pnd", "--nbar", "0.3", "--p", "3", "--q", "1")
    state, _, _ = prepare_state(StateSpec.thermal(0.3), OpSequence(3, 1))
    assert np.array_equal(read_csv(out)[1][:, 1], pnd(state))


def test_json_format(tmp_path):
    _, out = run(tmp_path, "pnd", "--nbar", "0.3", "--format", "json", name="out.json")
    data = json.loads(out.read_text())
    assert set(data["data"]) == {"n", "probability"}
    assert data["params"]["nbar"] == 0.3


def test_validate(tmp_path):
    code, out = run(tmp_path, "validate", name="report.json")
    assert code == 0
    report = json.loads(out.read_text())
    assert report["summary"]["fail"] == 0
    signs = [r for r in report["records"] if r["quantity"] == "n4_sign"]
    assert signs and all(r["status"] == "flagged-paper-discrepancy" for r in signs)
    thermal = [r for r in report["records"] if r["params"].get("family") == "thermal"
               and r["quantity"] in ("pnd", "wigner", "q")]
    assert all(r["status"] in ("pass", "singular-branch") for r in thermal)


def test_validate_unwritable(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        code = main(["validate", "--out", str(locked / "report.json")])
        if os.access(locked, os.W_OK):  # running as root ignores the mode bits
            pytest.skip("directory permissions are not enforced for this user")
        assert code == 2
    finally:
        locked.chmod(0o700)


def test_validate_missing_directory(tmp_path):
    assert main(["validate", "--out", str(tmp_path / "missing" / "report.json")]) == 2

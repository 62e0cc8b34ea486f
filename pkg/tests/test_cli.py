"""Command line layer: grids, units, formats, exit codes.

Everything crosses the CLI in reduced units (frequencies in sqrt(Q^2/m a^3),
temperatures in half that), so these tests pin the conversion happening
exactly once against API calls made directly in raw units.
"""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ionlattice.cli import (
    COLUMNS,
    SweepSpec,
    _format_cell,
    _parse_grid,
    main,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from ionlattice.covariance import block_covariance
from ionlattice.errors import ConfigError
from ionlattice.lattice import LatticeParams, solve_equilibrium

#: reduced-unit value of the canonical test ring's raw nu = 1 (m=2, Q=1, a=1)
NU_PAPER = "1.4142135623730951"


def parse_csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def small_spec(**over):
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    kwargs = dict(
        params=params,
        nu_t_grid=(1.2, 2.2),
        temperatures=(0.0, 0.4),
        measures=("negativity", "entropy"),
    )
    kwargs.update(over)
    return SweepSpec(**kwargs)


# ---------------------------------------------------------------- validation


def test_spec_rejects_unsorted_grid():
    with pytest.raises(ConfigError, match="strictly increasing"):
        small_spec(nu_t_grid=(2.0, 1.0))


def test_spec_rejects_unknown_measure():
    with pytest.raises(ConfigError, match="unknown measures"):
        small_spec(measures=("negativity", "purity"))


def test_spec_rejects_empty_measures():
    with pytest.raises(ConfigError):
        small_spec(measures=())


def test_spec_rejects_bulk_limit_with_thermal_grid():
    with pytest.raises(ConfigError, match="temperature 0 only"):
        small_spec(td_limit=True, temperatures=(0.0, 0.5))


def test_spec_rejects_unchargeable_units():
    params = LatticeParams(n=8, mass=2.0, charge=0.0, spacing=1.0, nu=1.0)
    with pytest.raises(ConfigError, match="positive charge"):
        small_spec(params=params)


def test_parse_grid_forms():
    assert _parse_grid("0.9,1.0") == (0.9, 1.0)
    assert _parse_grid("0.5:2.0:4") == (0.5, 1.0, 1.5, 2.0)
    assert _parse_grid("2.5:9:1") == (2.5,)
    for bad in ("bogus", "1:2", "1:2:0", "1:2:x"):
        with pytest.raises(ConfigError):
            _parse_grid(bad)


# ---------------------------------------------------------------- formatting


def test_format_cell():
    assert _format_cell(1.0 / 3.0) == "0.333333333333"
    assert _format_cell(math.inf) == "inf"
    assert _format_cell(-math.inf) == "-inf"
    assert _format_cell(math.nan) == "nan"
    assert _format_cell(None) == ""
    assert _format_cell(True) == "true"
    assert _format_cell(False) == "false"
    assert _format_cell(np.bool_(True)) == "true"
    assert _format_cell(np.float64(0.25)) == "0.25"
    assert _format_cell("zigzag") == "zigzag"


def test_csv_header_matches_schema():
    text = rows_to_csv([])
    assert text == ",".join(COLUMNS) + "\n"


def test_csv_and_json_carry_identical_values():
    rows = run_sweep(small_spec())
    csv_rows = parse_csv(rows_to_csv(rows))
    json_rows = json.loads(rows_to_json(rows))["rows"]
    assert len(csv_rows) == len(json_rows) == 4
    for crow, jrow in zip(csv_rows, json_rows):
        for col in COLUMNS:
            c, j = crow[col], jrow[col]
            if c == "":
                assert j in (None, "")
            elif c in ("true", "false"):
                assert j is (c == "true")
            elif c in ("inf", "-inf", "nan"):
                assert j == c
            else:
                try:
                    assert float(c) == j
                except ValueError:
                    assert c == str(j)


def test_parallel_rows_identical_to_serial():
    spec = small_spec()
    serial = rows_to_csv(run_sweep(spec, jobs=1))
    parallel = rows_to_csv(run_sweep(spec, jobs=2))
    assert serial == parallel


# ------------------------------------------------------------------ commands


def base_args(n=8):
    return [
        "--n", str(n), "--mass", "2", "--charge", "1", "--spacing", "1",
        "--nu", NU_PAPER,
    ]


def test_sweep_converts_units_exactly_once(tmp_path, capsys):
    # reduced 0.8 * sqrt(2) is raw nu_t = 0.8 for this ring
    nu_t_paper = 0.8 * math.sqrt(2.0)
    rc = main(["sweep", *base_args(), "--nu-t", repr(nu_t_paper)])
    assert rc == 0
    row = parse_csv(capsys.readouterr().out)[0]
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    config = solve_equilibrium(params, 0.8)
    assert row["configVariant"] == "zigzag"
    assert_allclose(float(row["b"]), config.b / params.spacing, rtol=1e-12)


def test_sweep_exit_codes(capsys):
    assert main(["sweep", *base_args(), "--nu-t", "bogus"]) == 2
    capsys.readouterr()
    assert main(["sweep", *base_args()]) == 2  # no grid at all
    capsys.readouterr()
    assert main(["sweep", *base_args(), "--nu-t", "1.5,2.0"]) == 0


def test_check_negative_control(capsys):
    assert main(["check", "--corrupt-normal-form"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "symplectic" in out


def test_numerical_failure_exit_code(capsys):
    # far below the buckling point the quadratic expansion is unstable
    rc = main([
        "spectrum", "--n", "64", "--mass", "2", "--charge", "1",
        "--spacing", "1", "--nu", NU_PAPER, "--model", "LR", "--nu-t", "0.29",
    ])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_spectrum_zone_centre_row(capsys):
    rc = main(["spectrum", *base_args(), "--nu-t", "2.5"])
    assert rc == 0
    rows = parse_csv(capsys.readouterr().out)
    assert len(rows) == 8
    last = rows[-1]
    assert last["l"] == "8" and last["variant"] == "linear"
    # CSV cells carry 12 significant digits
    assert_allclose(float(last["omegaX"]), math.sqrt(2.0), rtol=1e-11)
    assert_allclose(float(last["omegaY"]), 2.5, rtol=1e-11)
    assert last["omegaV"] == "" and last["omegaW"] == ""


def test_covariance_dump_round_trips(tmp_path, capsys):
    dump = tmp_path / "cov.csv"
    rc = main([
        "covariance", *base_args(), "--nu-t", "2.0", "--temp", "0.3",
        "--sites", "1,3", "--dump", str(dump),
    ])
    assert rc == 0
    capsys.readouterr()
    loaded = np.loadtxt(dump, delimiter=",")
    # replicate the command's reduced-to-raw conversion bit for bit
    unit = math.sqrt(0.5)
    params = LatticeParams(
        n=8, mass=2.0, charge=1.0, spacing=1.0, nu=float(NU_PAPER) * unit
    )
    cov = block_covariance(params, 2.0 * unit, 0.3 * (0.5 * unit), (1, 3))
    assert np.array_equal(loaded, cov.matrix)


def test_block_entropy_command(capsys):
    rc = main([
        "block-entropy", *base_args(), "--nu-t", "2.0", "--sites", "2",
        "--direction", "y", "--format", "json",
    ])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["nSites"] == 2 and payload["direction"] == "y"
    assert payload["entropy"] >= 0.0
    assert len(payload["spectrum"]) == 2


def test_witness_command(capsys):
    rc = main(["witness", *base_args(), "--nu-t", "2.0", "--temp", "0.1"])
    assert rc == 0
    row = parse_csv(capsys.readouterr().out)[0]
    assert row["triggered"] in ("true", "false")
    assert float(row["bound"]) > 0.0
    # dressed frequencies are reported in reduced units
    assert_allclose(float(row["omegaX"]), math.sqrt(3.0) / math.sqrt(0.5), rtol=1e-10)


def test_bulk_limit_below_transition_uses_large_ring(capsys):
    nu_t_paper = 0.8 * math.sqrt(2.0)
    rc = main([
        "sweep", *base_args(), "--nu-t", repr(nu_t_paper), "--td-limit",
        "--measures", "negativity",
    ])
    assert rc == 0
    row = parse_csv(capsys.readouterr().out)[0]
    assert row["configVariant"] == "zigzag"
    assert float(row["b"]) > 0.0
    assert row["S1y"] != ""


def test_measure_subsetting_leaves_other_cells_empty(capsys):
    rc = main(["sweep", *base_args(), "--nu-t", "2.0", "--measures", "negativity"])
    assert rc == 0
    row = parse_csv(capsys.readouterr().out)[0]
    assert row["S1y"] != "" and row["ENy"] != ""
    for col in ("SV1x", "SV2y", "U", "bound", "Tc", "witnessTriggered"):
        assert row[col] == ""
    assert row["error"] == ""


def test_config_file_with_flag_overrides(tmp_path, capsys):
    cfg = {
        "params": {"n": 6, "mass": 2.0, "charge": 1.0, "spacing": 1.0,
                   "nu": float(NU_PAPER)},
        "nuTGrid": [2.0],
        "measures": ["negativity"],
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(cfg))
    rc = main(["sweep", "--config", str(path), "--n", "8"])
    assert rc == 0
    out = capsys.readouterr().out
    rows = parse_csv(out)
    assert len(rows) == 1
    # the override ring (n=8) is what actually ran
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    unit = params.nu_t_unit
    from ionlattice.covariance import pair_moments
    from ionlattice.entanglement import separability_criteria

    s1, _ = separability_criteria(pair_moments(params, 2.0 * unit, 0.0, 1, "y"))
    assert_allclose(float(rows[0]["S1y"]), s1, rtol=1e-10)


def test_unreadable_config_is_a_config_error(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["sweep", "--config", str(missing), "--nu-t", "2.0"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    capsys.readouterr()
    assert main(["sweep", "--config", str(bad), "--nu-t", "2.0"]) == 2

"""End-to-end tests of the command-line interface.

Most cases call cli.main in process and capture stdout; one subprocess
case exercises the module entry point for real.
"""

import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from freeconv import cli

SEMI = json.dumps({"type": "law", "name": "semicircle", "params": [0, 1]})
WPLUS = json.dumps({"type": "law", "name": "semicircle", "params": [2, 1]})
MP1 = json.dumps({"type": "law", "name": "marchenko_pastur", "params": [1]})
MP2 = json.dumps({"type": "law", "name": "marchenko_pastur", "params": [2]})
QC = json.dumps({"type": "law", "name": "quarter_circle", "params": [1]})


def run_cli(capsys, *args):
    try:
        code = cli.main(list(args))
    except SystemExit as exc:
        code = exc.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# measure-spec files


class TestSpecIO:
    def test_atomic_fraction_round_trip(self):
        obj = {"type": "atomic", "atoms": [["-1/2", "1/3"], [2, "2/3"]]}
        mu = cli.parse_measure_spec_obj(obj)
        assert mu.atoms == ((Fraction(-1, 2), Fraction(1, 3)), (2, Fraction(2, 3)))
        assert cli.serialize_measure_spec(mu) == obj

    def test_law_round_trip(self):
        obj = {
            "type": "law",
            "name": "semicircle",
            "params": ["1/2", "3/2"],
            "scale": 2,
            "offset": "-1/3",
        }
        mu = cli.parse_measure_spec_obj(obj)
        assert mu.law == "semicircle"
        assert mu.params == (Fraction(1, 2), Fraction(3, 2))
        assert cli.serialize_measure_spec(mu) == obj

    def test_grid_round_trip(self):
        xs = [0.0, 0.5, 1.0, 1.5, 2.0]
        dens = [0.5, 0.5, 0.5, 0.5, 0.5]
        obj = {"type": "grid", "xs": xs, "densities": dens, "atoms": []}
        mu = cli.parse_measure_spec_obj(obj)
        assert cli.serialize_measure_spec(mu) == obj

    def test_sequence_round_trips(self):
        for kind in ("moments", "free_cumulants"):
            obj = {"type": kind, "values": [0, 1, 0, 2]}
            mu = cli.parse_measure_spec_obj(obj)
            assert cli.serialize_measure_spec(mu) == obj

    def test_bad_normalization_rejected(self):
        obj = {"type": "atomic", "atoms": [[1, 0.5], [2, 0.4]]}
        with pytest.raises(cli.SpecError, match="weights sum to 0.9"):
            cli.parse_measure_spec_obj(obj)

    def test_tiny_normalization_slack_rescaled(self):
        obj = {"type": "atomic", "atoms": [[1, 0.5], [2, 0.5000000004]]}
        mu = cli.parse_measure_spec_obj(obj)
        assert math.isclose(sum(w for _, w in mu.atoms), 1.0, rel_tol=0, abs_tol=1e-15)

    def test_exact_weights_kept_exact(self):
        obj = {"type": "atomic", "atoms": [[1, "1/3"], [2, "2/3"]]}
        mu = cli.parse_measure_spec_obj(obj)
        assert mu.atoms == ((1, Fraction(1, 3)), (2, Fraction(2, 3)))

    def test_field_errors(self):
        with pytest.raises(cli.SpecError, match="type"):
            cli.parse_measure_spec_obj({"type": "laws"})
        with pytest.raises(cli.SpecError, match="atoms"):
            cli.parse_measure_spec_obj({"type": "atomic", "atoms": [[1]]})
        with pytest.raises(cli.SpecError, match="finite"):
            cli.parse_measure_spec_obj(
                {"type": "moments", "values": [float("nan")]}
            )
        with pytest.raises(cli.SpecError, match="boolean"):
            cli.parse_measure_spec_obj({"type": "moments", "values": [True]})
        with pytest.raises(cli.SpecError, match="p/q"):
            cli.parse_measure_spec_obj({"type": "moments", "values": ["0.5"]})

    def test_inline_and_missing_file(self, tmp_path):
        mu = cli.parse_measure_spec(SEMI)
        assert mu.law == "semicircle"
        with pytest.raises(cli.SpecError, match="cannot read"):
            cli.parse_measure_spec(str(tmp_path / "absent.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{truncated")
        with pytest.raises(cli.SpecError, match="invalid JSON"):
            cli.parse_measure_spec(str(bad))


class TestTripletIO:
    def test_round_trip_with_grid(self):
        obj = {
            "eta": "1/2",
            "a": 0,
            "levy": {
                "atoms": [[0.5, 0.3], [2.0, 0.7]],
                "grid": {"xs": [1.0, 2.0, 3.0], "densities": [0.1, 0.2, 0.1]},
            },
        }
        t = cli.parse_triplet(json.dumps(obj))
        assert t.eta == Fraction(1, 2)
        assert t.levy.atoms == ((0.5, 0.3), (2.0, 0.7))
        assert cli.serialize_triplet(t) == obj

    def test_validation(self):
        with pytest.raises(cli.SpecError, match="eta"):
            cli.parse_triplet(json.dumps({"a": 0, "levy": None}))
        with pytest.raises(cli.SpecError):
            cli.parse_triplet(json.dumps({"eta": 0, "a": -1, "levy": None}))
        with pytest.raises(cli.SpecError, match="charge 0"):
            cli.parse_triplet(
                json.dumps({"eta": 0, "a": 0, "levy": {"atoms": [[0, 1]]}})
            )


# ---------------------------------------------------------------------------
# exit codes


class TestExitCodes:
    def test_no_subcommand_is_usage_error(self, capsys):
        code, out, _ = run_cli(capsys)
        assert code == 2
        assert "subcommand" in out

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run_cli(capsys, "bogus")
        assert code == 2

    def test_invalid_spec_is_2(self, capsys):
        bad = json.dumps({"type": "atomic", "atoms": [[1, 0.4]]})
        code, _, err = run_cli(capsys, "moments", bad, "--order", "2")
        assert code == 2
        assert "weights sum" in err

    def test_computation_error_is_1(self, capsys):
        code, _, err = run_cli(capsys, "power", SEMI, "--t", "1/2", "--order", "4")
        assert code == 1
        assert "fid" in err or "t >= 1" in err

    def test_density_of_sequence_spec_is_1(self, capsys):
        seq = json.dumps({"type": "moments", "values": [0, 1]})
        code, _, err = run_cli(capsys, "density", seq)
        assert code == 1
        assert "density" in err


# ---------------------------------------------------------------------------
# subcommands


class TestLaw:
    def test_listing(self, capsys):
        code, out, _ = run_cli(capsys, "law")
        assert code == 0
        for name in (
            "semicircle",
            "marchenko_pastur",
            "quarter_circle",
            "symmetric_bernoulli",
            "symmetric_beta",
            "beta_1a",
            "chi_squared_1",
            "commutator_ww",
        ):
            assert name in out

    def test_emit_spec(self, capsys):
        code, out, _ = run_cli(
            capsys, "law", "semicircle", "--params", "1/2,3/2", "--scale", "2"
        )
        assert code == 0
        obj = json.loads(out)
        assert obj == {
            "type": "law",
            "name": "semicircle",
            "params": ["1/2", "3/2"],
            "scale": 2,
            "offset": 0,
        }

    def test_bad_params_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "law", "semicircle", "--params", "1")
        assert code == 2
        assert "semicircle" in err


class TestMomentsAndCumulants:
    def test_semicircle_moments_table(self, capsys):
        code, out, _ = run_cli(capsys, "moments", SEMI, "--order", "6")
        assert code == 0
        rows = [line.split() for line in out.splitlines()]
        assert [r[1] for r in rows] == ["0", "1", "0", "2", "0", "5"]

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(capsys, "moments", MP1, "--order", "3", "--out", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,value"
        assert lines[1:] == ["1,1", "2,2", "3,5"]

    def test_free_cumulants_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "cumulants", MP2, "--order", "4", "--out", "json"
        )
        assert code == 0
        assert json.loads(out) == {"kind": "free_cumulant", "values": [2, 2, 2, 2]}

    def test_boolean_cumulants(self, capsys):
        code, out, _ = run_cli(
            capsys, "cumulants", SEMI, "--order", "4", "--kind", "boolean",
            "--out", "json",
        )
        assert code == 0
        assert json.loads(out)["values"] == [0, 1, 0, 1]


class TestConvolve:
    def test_free_add_semicircles(self, capsys):
        code, out, _ = run_cli(
            capsys, "convolve", "--op", "add", "--a", SEMI, "--b", SEMI,
            "--order", "6",
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["type"] == "free_cumulants"
        assert obj["values"] == [0, 2, 0, 0, 0, 0]

    def test_boolean_add(self, capsys):
        code, out, _ = run_cli(
            capsys, "convolve", "--op", "boolean", "--a", SEMI, "--b", SEMI,
            "--order", "4",
        )
        assert code == 0
        assert json.loads(out)["type"] == "moments"

    def test_mult(self, capsys):
        code, out, _ = run_cli(
            capsys, "convolve", "--op", "mult", "--a", MP1, "--b", MP2,
            "--order", "4",
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["type"] == "moments"
        assert obj["values"][0] == 2

    def test_density_needs_add(self, capsys):
        code, _, err = run_cli(
            capsys, "convolve", "--op", "mult", "--a", MP1, "--b", MP2,
            "--density", "--grid", "0:1:5",
        )
        assert code == 2
        assert "add" in err

    def test_density_needs_grid(self, capsys, monkeypatch):
        monkeypatch.delenv(cli.GRID_ENV, raising=False)
        code, _, err = run_cli(
            capsys, "convolve", "--op", "add", "--a", SEMI, "--b", SEMI,
            "--density",
        )
        assert code == 2
        assert cli.GRID_ENV in err

    def test_density_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "convolve", "--op", "add", "--a", SEMI, "--b", SEMI,
            "--density", "--grid=-3.2:3.2:161",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "x,density"
        mid = dict(
            (float(l.split(",")[0]), float(l.split(",")[1])) for l in lines[1:]
        )
        # the free sum of two standard semicircles is semicircle(0, 2)
        assert math.isclose(mid[0.0], math.sqrt(8) / (4 * math.pi), abs_tol=1e-3)


class TestPower:
    def test_fraction_exponent(self, capsys):
        code, out, _ = run_cli(capsys, "power", MP1, "--t", "3/2", "--order", "4")
        assert code == 0
        obj = json.loads(out)
        assert obj["values"] == ["3/2", "3/2", "3/2", "3/2"]

    def test_fid_small_t(self, capsys):
        code, out, _ = run_cli(
            capsys, "power", SEMI, "--t", "1/4", "--order", "4", "--fid"
        )
        assert code == 0
        assert json.loads(out)["values"] == [0, "1/4", 0, 0]

    def test_boolean_power(self, capsys):
        code, out, _ = run_cli(
            capsys, "power", SEMI, "--t", "2", "--order", "4", "--conv", "boolean"
        )
        assert code == 0
        assert json.loads(out)["type"] == "moments"


class TestDensity:
    def test_csv_header_and_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "density", SEMI, "--grid=-2:2:5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "x,density"
        vals = {float(l.split(",")[0]): float(l.split(",")[1]) for l in lines[1:]}
        assert math.isclose(vals[0.0], 1 / math.pi, rel_tol=1e-12)
        assert vals[2.0] == 0.0

    def test_env_default_grid(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.GRID_ENV, "-2:2:5")
        code, out, _ = run_cli(capsys, "density", SEMI)
        assert code == 0
        assert len(out.splitlines()) == 6

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.GRID_ENV, "-2:2:5")
        code, out, _ = run_cli(capsys, "density", SEMI, "--grid=-1:1:3")
        assert code == 0
        assert len(out.splitlines()) == 4

    def test_default_window_from_support(self, capsys, monkeypatch):
        monkeypatch.delenv(cli.GRID_ENV, raising=False)
        code, out, _ = run_cli(capsys, "density", QC)
        assert code == 0
        xs = [float(l.split(",")[0]) for l in out.splitlines()[1:]]
        assert xs[0] == 0.0 and xs[-1] == 2.0

    def test_grid_spec_passthrough(self, capsys):
        spec = json.dumps(
            {
                "type": "grid",
                "xs": [0.0, 1.0, 2.0],
                "densities": [0.5, 0.5, 0.5],
                "atoms": [],
            }
        )
        code, out, _ = run_cli(capsys, "density", spec)
        assert code == 0
        assert out.splitlines()[1] == "0,0.5"

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "density", SEMI, "--grid=-2:2:3", "--out", "json"
        )
        assert code == 0
        obj = json.loads(out)
        assert set(obj) == {"xs", "density", "atoms"}


class TestCommutatorSquareFactor:
    def test_commutator_cumulants(self, capsys):
        code, out, _ = run_cli(
            capsys, "commutator", "--a", SEMI, "--b", SEMI, "--order", "6"
        )
        assert code == 0
        assert json.loads(out)["values"] == [0, 2, 0, 2, 0, 2]

    def test_square_of_semicircle_is_mp(self, capsys):
        code, out, _ = run_cli(capsys, "square", SEMI)
        assert code == 0
        obj = json.loads(out)
        assert obj["type"] == "law" and obj["name"] == "marchenko_pastur"

    def test_factor_main3(self, capsys):
        code, out, _ = run_cli(capsys, "factor-main3", SEMI, "--order", "8")
        assert code == 0
        assert json.loads(out)["values"] == [1, 0, 0, 0]

    def test_factor_main3_needs_symmetry(self, capsys):
        code, _, err = run_cli(capsys, "factor-main3", MP1, "--order", "8")
        assert code == 1
        assert "odd" in err or "symmetric" in err


class TestCheck:
    def test_kurtosis_fail_exit_1(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--kurtosis", QC)
        assert code == 1
        obj = json.loads(out)
        assert obj["verdict"] == "fail"
        assert math.isclose(obj["statistic"], -0.0233443, abs_tol=1e-6)

    def test_kurtosis_pass_exit_0(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--kurtosis", SEMI)
        assert code == 0
        assert json.loads(out)["verdict"] == "pass"

    def test_kurtosis_degenerate(self, capsys):
        point = json.dumps({"type": "atomic", "atoms": [[2, 1]]})
        code, out, _ = run_cli(capsys, "check", "--kurtosis", point)
        assert code == 0
        obj = json.loads(out)
        assert obj["verdict"] == "degenerate" and obj["statistic"] is None

    def test_regular_rejects_semicircular_part(self, capsys, tmp_path):
        path = tmp_path / "wplus.json"
        path.write_text(json.dumps({"eta": 1, "a": 1, "levy": None}))
        code, out, _ = run_cli(capsys, "check", "--regular", str(path))
        assert code == 1
        obj = json.loads(out)
        assert obj["representable"] is False
        assert "semicircular" in obj["reason"]

    def test_regular_accepts_compound_poisson(self, capsys, tmp_path):
        path = tmp_path / "cfp.json"
        path.write_text(
            json.dumps(
                {
                    "eta": 0.5,
                    "a": 0,
                    "levy": {"atoms": [[0.5, 0.3], [2, 0.7]], "grid": None},
                }
            )
        )
        code, out, _ = run_cli(capsys, "check", "--regular", str(path))
        assert code == 0
        obj = json.loads(out)
        assert obj["representable"] and obj["free_regular"]

    def test_regular_negative_drift(self, capsys):
        spec = json.dumps(
            {"eta": -5, "a": 0, "levy": {"atoms": [[1, 1]], "grid": None}}
        )
        code, out, _ = run_cli(capsys, "check", "--regular", spec)
        assert code == 1
        obj = json.loads(out)
        assert obj["representable"] and not obj["free_regular"]


class TestScan:
    def test_wplus_edges(self, capsys):
        code, out, _ = run_cli(capsys, "scan", WPLUS, "--t", "0.25,1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t,left_edge,atoms,converged"
        assert lines[-1] == "regular evidence: no"
        for line in lines[1:-1]:
            t, edge = (float(v) for v in line.split(",")[:2])
            assert abs(edge - (2 * t - 2 * math.sqrt(t))) < 1e-3

    def test_range_syntax(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", WPLUS, "--t", "0.5:1:0.25", "--grid-points", "301"
        )
        assert code == 0
        ts = [float(l.split(",")[0]) for l in out.splitlines()[1:-1]]
        assert ts == [0.5, 0.75, 1.0]

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "scan", WPLUS, "--t", "0.5", "--out", "json"
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["regular_evidence"] is False
        assert len(obj["points"]) == 1

    def test_bad_range_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "scan", WPLUS, "--t", "1:0:0.5")
        assert code == 2


class TestVerify:
    def test_identities_byte_identical(self, capsys):
        code1, out1, _ = run_cli(capsys, "verify", "--suite", "identities")
        code2, out2, _ = run_cli(capsys, "verify", "--suite", "identities")
        assert code1 == code2 == 0
        assert out1 == out2
        assert "w2_equals_m" in out1
        assert "seed=1418" in out1.splitlines()[0]

    def test_regularity_with_jobs(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--suite", "regularity", "--jobs", "2"
        )
        assert code == 0
        assert "quarter_circle_kurtosis" in out
        assert out.rstrip().endswith("7/7 checks passed")

    def test_seed_flag_in_header(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--suite", "regularity", "--seed", "7"
        )
        assert code == 0
        assert "seed=7" in out.splitlines()[0]

    def test_unknown_suite_rejected(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "--suite", "nonsense")
        assert code == 2


class TestNc:
    def test_count(self, capsys):
        code, out, _ = run_cli(capsys, "nc", "--count", "5")
        assert code == 0
        assert out.strip() == "42"

    def test_list_matches_count(self, capsys):
        code, out, _ = run_cli(capsys, "nc", "--count", "4", "--list")
        assert code == 0
        assert len(out.splitlines()) == 14


class TestTransform:
    def test_cauchy_matches_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "transform", SEMI, "--which", "G", "--at", "0,1")
        assert code == 0
        re, im = (float(v) for v in out.strip().split(","))
        g = (1j - 1j * math.sqrt(5)) / 2
        assert abs(complex(re, im) - g) < 1e-9

    def test_f_and_k_are_consistent(self, capsys):
        z = complex(0.4, 0.8)
        _, out_g, _ = run_cli(capsys, "transform", MP1, "--which", "G", "--at", "0.4,0.8")
        _, out_f, _ = run_cli(capsys, "transform", MP1, "--which", "F", "--at", "0.4,0.8")
        _, out_k, _ = run_cli(capsys, "transform", MP1, "--which", "K", "--at", "0.4,0.8")
        g = complex(*(float(v) for v in out_g.strip().split(",")))
        f = complex(*(float(v) for v in out_f.strip().split(",")))
        k = complex(*(float(v) for v in out_k.strip().split(",")))
        assert abs(f - 1 / g) < 1e-9
        assert abs(k - (z - f)) < 1e-9

    def test_s_transform_real_point(self, capsys):
        code, out, _ = run_cli(capsys, "transform", MP2, "--which", "S", "--at", "0.3,0")
        assert code == 0
        re, im = (float(v) for v in out.strip().split(","))
        assert abs(re - 1 / 2.3) < 1e-9 and abs(im) < 1e-12

    def test_real_axis_rejected_for_g(self, capsys):
        code, _, err = run_cli(capsys, "transform", SEMI, "--which", "G", "--at", "1,0")
        assert code == 2
        assert "real axis" in err

    def test_format_is_two_floats(self, capsys):
        _, out, _ = run_cli(capsys, "transform", SEMI, "--which", "G", "--at", "0,2")
        parts = out.strip().split(",")
        assert len(parts) == 2
        for p in parts:
            float(p)
            mantissa = p.lstrip("-").replace(".", "").split("e")[0].lstrip("0")
            assert len(mantissa) <= 12


def test_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "freeconv.cli", "nc", "--count", "4"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.strip() == "14"

import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from onebit_mimo.errors import InvalidParameterError
from onebit_mimo.precoding import precode_one_bit_multi
from onebit_mimo.sim import (
    ExperimentConfig,
    ResultTable,
    SchemeSpec,
    emit_table,
    interpolate_crossing,
    load_config,
    parse_config_text,
    parse_scheme,
    precode_once,
    read_table,
    run_experiment,
    run_mse_sweep,
    run_ser_vs_antennas,
    run_ser_vs_snr,
)
from onebit_mimo.sim.config import ConfigError

EXAMPLE = """
# small single-user run
kind = ser_vs_snr
k_users = 1
m_antennas = 32
n_side = 4
snr_db = -6:0:2          # inclusive range
schemes = inf_total, onebit:m2=4, onebit:m2=4:range=1.0
trials = 3
symbols_per_channel = 20
master_seed = 0x2a
"""


def small_cfg(**kw):
    base = dict(kind="ser_vs_snr", m_antennas=(32,), snr_db=(-6.0, -3.0, 0.0), trials=4,
                symbols_per_channel=30, schemes=("inf_total", "onebit:m2=4"), master_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_parse_example(self):
        cfg = parse_config_text(EXAMPLE)
        assert cfg.snr_db == (-6.0, -4.0, -2.0, 0.0)
        assert cfg.m_antennas == (32,)
        assert cfg.master_seed == 42
        assert [s.label for s in cfg.schemes] == ["inf_total", "onebit:m2=4", "onebit:m2=4:range=1"]
        assert cfg.schemes[2].range_factor == 1.0

    def test_overrides_win(self):
        cfg = parse_config_text(EXAMPLE, ["trials=7", "snr_db=1,2"])
        assert cfg.trials == 7 and cfg.snr_db == (1.0, 2.0)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text(EXAMPLE)
        assert load_config(path) == parse_config_text(EXAMPLE)
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.txt")

    def test_float_range_is_exact(self):
        cfg = parse_config_text("lambdas = 0.5:1.0:0.1")
        assert cfg.lambdas == (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
        assert parse_config_text("m_antennas = 32:128:32").m_antennas == (32, 64, 96, 128)

    @pytest.mark.parametrize("text,match", [
        ("bogus = 1", "unknown key"),
        ("trials = many", "bad value"),
        ("trials", "expected 'key = value'"),
        ("snr_db = 3, 1", "sorted"),
        ("m_antennas = 16\nschemes = oracle", "oracle"),
        ("k_users = 2\nschemes = inf_total", "single-user"),
        ("schemes = onebit, onebit:m2=8", "duplicate"),
        ("n_side = 3", "even"),
        ("trials = 1.5", "bad value"),
        ("lambdas = 0:1:0", "step"),
        ("k_users = 4\nm_antennas = 2", "m_antennas >= k_users"),
        ("hardened_range = maybe", "bad value"),
        ("k_users = 2\nschemes = zf\nmse_target = gamma", "single-user"),
    ])
    def test_rejects(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config_text(text)

    def test_to_dict_round_trip(self):
        cfg = parse_config_text(EXAMPLE)
        d = cfg.to_dict()
        text = "\n".join(f"{k} = {', '.join(map(str, v)) if isinstance(v, list) else v}" for k, v in d.items())
        assert parse_config_text(text) == cfg


class TestScheme:
    def test_defaults(self):
        s = parse_scheme("onebit")
        assert s == SchemeSpec("onebit", 8, None)
        assert s.label == "onebit:m2=8"

    @given(st.sampled_from(["inf_total", "zf", "onebit", "quantized_zf"]), st.integers(0, 16),
           st.one_of(st.none(), st.floats(0.01, 10).map(lambda v: float(f"{v:g}"))))
    def test_label_round_trip(self, kind, m2, factor):
        spec = SchemeSpec(kind, m2 if kind == "onebit" else 8, factor)
        assert parse_scheme(spec.label) == spec

    @pytest.mark.parametrize("token", ["", "laser", "onebit:m2", "onebit:m2=x", "onebit:depth=2",
                                       "onebit:m2=17", "zf:range=-1"])
    def test_rejects(self, token):
        with pytest.raises(ConfigError):
            parse_scheme(token)


class TestTable:
    def test_std_err(self):
        t = ResultTable("x")
        t.add(1.0, "a", "ser", [0.0, 1.0, 0.0, 1.0])
        row = t.rows[0]
        assert row[3] == 0.5
        assert row[4] == pytest.approx(np.std([0, 1, 0, 1], ddof=1) / 2)
        assert row[5] == 4 and math.isnan(row[6])

    def test_header_only_csv(self):
        assert emit_table(ResultTable("snr_db"), "csv") == "snr_db,scheme,metric,mean,std_err,trials,analytic\n"

    @given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(0, 1), st.floats(1e-300, 1)), min_size=1, max_size=5))
    def test_round_trip_bit_exact(self, tmp_path_factory, rows):
        d = tmp_path_factory.mktemp("tab")
        t = ResultTable("snr_db", metadata={"k": 1})
        for x, a, b in rows:
            t.add(x, "onebit:m2=8", "ser", [a, b], analytic=b)
        for fmt in ("csv", "json"):
            path = d / f"t.{fmt}"
            emit_table(t, fmt, path)
            back = read_table(path)
            for r0, r1 in zip(t.rows, back.rows):
                assert r0 == r1
        assert read_table(d / "t.json").metadata == {"k": 1}

    def test_nan_survives(self, tmp_path):
        t = ResultTable("m_antennas")
        t.add(32, "zf", "ser", [0.25])
        for fmt in ("csv", "json"):
            emit_table(t, fmt, tmp_path / f"t.{fmt}")
            back = read_table(tmp_path / f"t.{fmt}")
            assert back.rows[0][0] == 32 and math.isnan(back.rows[0][4])

    def test_write_error_names_path(self, tmp_path):
        bad = tmp_path / "nope" / "t.csv"
        with pytest.raises(OSError, match="nope"):
            emit_table(ResultTable("x"), "csv", bad)
        with pytest.raises(ValueError):
            emit_table(ResultTable("x"), "xml")


class TestCrossing:
    def test_log_linear(self):
        assert interpolate_crossing([0, 1], [1e-1, 1e-3], 1e-2) == pytest.approx(0.5)
        assert interpolate_crossing([10, 1000], [1e-1, 1e-3], 1e-2, log_x=True) == pytest.approx(100)
        assert math.isnan(interpolate_crossing([0, 1], [1e-1, 5e-2], 1e-2))


class TestSweeps:
    def test_inf_total_mse_vanishes(self):
        cfg = small_cfg(kind="mse_sweep", snr_db=(0.0,), lambdas=(0.5, 0.8, 1.0), schemes=("inf_total",))
        t = run_mse_sweep(cfg)
        assert t.sweep_name == "lambda"
        assert max(r[3] for r in t.rows) <= 1e-20

    def test_zf_transition_at_one(self):
        cfg = ExperimentConfig(kind="mse_sweep", k_users=8, m_antennas=(128,), lambdas=(0.8, 1.2),
                               schemes=("zf",), trials=6, symbols_per_channel=40)
        _, mse, _, _ = run_mse_sweep(cfg).series("zf", "mse")
        assert mse[0] < 1e-2 * mse[1]

    def test_gamma_mode(self):
        cfg = small_cfg(kind="mse_sweep", mse_target="gamma", lambdas=(0.5, 1.2), schemes=("inf_total",))
        t = run_mse_sweep(cfg)
        assert t.sweep_name == "gamma"
        _, mse, _, _ = t.series("inf_total", "mse")
        assert mse[0] <= 1e-20 and mse[1] == pytest.approx(0.2**2 * 32, rel=0.3)

    def test_ser_bounded_and_monotone(self):
        t = run_ser_vs_snr(small_cfg(snr_db=(-10.0, -5.0, 0.0, 5.0)))
        for label in ("inf_total", "onebit:m2=4"):
            _, y, se, ana = t.series(label, "ser")
            assert np.all((0 <= y) & (y <= 1))
            assert np.all(np.diff(y) <= 2 * np.maximum(se[1:], se[:-1]) + 1e-12)
            assert np.all(np.diff(ana) <= 0)

    def test_std_err_shrinks(self):
        a = run_ser_vs_snr(small_cfg(snr_db=(-6.0,), trials=40))
        b = run_ser_vs_snr(small_cfg(snr_db=(-6.0,), trials=160))
        ratio = b.series("onebit:m2=4", "ser")[2][0] / a.series("onebit:m2=4", "ser")[2][0]
        assert 0.35 < ratio < 0.7  # 1/sqrt(4) = 0.5

    def test_trials_are_a_prefix(self):
        # trial t uses the same draws whatever the total trial count
        a = run_ser_vs_snr(small_cfg(trials=2, symbols_per_channel=10))
        b = run_ser_vs_snr(small_cfg(trials=1, symbols_per_channel=10))
        c = run_ser_vs_snr(small_cfg(trials=1, symbols_per_channel=10, master_seed=4))
        assert a.rows != b.rows and b.rows != c.rows

    def test_threads_do_not_change_results(self):
        cfg = small_cfg(trials=5)
        assert emit_table(run_experiment(cfg, threads=1)) == emit_table(run_experiment(cfg, threads=3))

    def test_antenna_sweep(self):
        cfg = small_cfg(kind="ser_vs_antennas", m_antennas=(16, 64), snr_db=(-4.0,), trials=3)
        t = run_ser_vs_antennas(cfg)
        assert t.sweep_name == "m_antennas"
        assert [r[0] for r in t.select("inf_total")] == [16, 64]
        with pytest.raises(InvalidParameterError):
            run_ser_vs_antennas(small_cfg(kind="ser_vs_antennas"))

    def test_multi_user_reports_power_violation(self):
        cfg = ExperimentConfig(k_users=4, m_antennas=(32,), snr_db=(0.0,), schemes=("zf", "onebit:m2=4"),
                               trials=3, symbols_per_channel=20)
        t = run_ser_vs_snr(cfg)
        assert len(t.select("zf", "power_violation")) == 1
        assert not t.select("onebit:m2=4", "power_violation")

    def test_oracle_and_quantized_schemes(self):
        cfg = small_cfg(m_antennas=(6,), snr_db=(20.0,), schemes=("oracle", "quantized_zf", "onebit:m2=6"),
                        trials=2, symbols_per_channel=10)
        t = run_ser_vs_snr(cfg)
        assert t.series("oracle", "ser")[1][0] <= t.series("quantized_zf", "ser")[1][0] + 1e-12

    def test_precode_once_kind_has_no_table(self):
        with pytest.raises(InvalidParameterError):
            run_experiment(small_cfg(kind="precode_once"))


class TestPrecodeOnce:
    def test_matches_library(self):
        cfg = small_cfg(kind="precode_once", schemes=("onebit:m2=4",))
        rep = precode_once(cfg, symbols=[0.3 + 0.1j])
        H = np.array([[complex(*v) for v in row] for row in rep["channel"]])
        ref = precode_one_bit_multi(H, [0.3 + 0.1j], cfg.power, 4)
        assert rep["schemes"][0]["residual_inf"] == ref.residual_inf
        assert rep["schemes"][0]["indices"] == ref.indices.tolist()
        assert rep == precode_once(cfg, symbols=[0.3 + 0.1j])

    def test_explicit_channel(self):
        cfg = ExperimentConfig(kind="precode_once", m_antennas=(2,), power=2.0, schemes=("onebit:m2=2",))
        rep = precode_once(cfg, symbols=[math.sqrt(2) * 1j], channel=[[1, 1]])
        assert rep["schemes"][0]["residual_inf"] < 1e-15
        with pytest.raises(InvalidParameterError):
            precode_once(cfg, channel=[[1, 1, 1]])

    def test_scatter(self):
        cfg = ExperimentConfig(kind="precode_once", m_antennas=(8,), power=4.0, schemes=("oracle",))
        rep = precode_once(cfg, scatter=True)
        sc = rep["scatter"]
        assert len(sc["points"]) == 4**8
        assert sc["radius_one_bit"] == pytest.approx(math.sqrt(2 / math.pi) * sc["radius_inf_total"])
        pts = np.array(sc["points"])
        assert np.max(np.hypot(pts[:, 0], pts[:, 1])) <= sc["radius_inf_total"] * (1 + 1e-12)
        assert sc["fraction_inside_one_bit"] >= 0.99


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "onebit_mimo", *args], capture_output=True, text=True, cwd=cwd)


class TestCli:
    def test_csv_to_stdout(self, tmp_path):
        cfg = tmp_path / "c.txt"
        cfg.write_text(EXAMPLE)
        res = run_cli("ser-vs-snr", "--config", str(cfg), "--set", "trials=2")
        assert res.returncode == 0, res.stderr
        lines = res.stdout.splitlines()
        assert lines[0] == "snr_db,scheme,metric,mean,std_err,trials,analytic"
        assert len(lines) == 1 + 4 * 3

    def test_json_file_and_seed(self, tmp_path):
        out = tmp_path / "o.json"
        res = run_cli("mse-sweep", "--set", "m_antennas=16", "--set", "trials=2", "--set", "lambdas=0.5,1.0",
                      "--seed", "9", "--format", "json", "--out", str(out))
        assert res.returncode == 0, res.stderr
        doc = json.loads(out.read_text())
        assert doc["metadata"]["master_seed"] == 9
        assert doc["columns"][0] == "lambda"

    def test_precode_once(self):
        res = run_cli("precode-once", "--set", "m_antennas=2", "--set", "power=2", "--set", "schemes=onebit:m2=2",
                      "--channel", "1,1", "--symbols", "1.4142135623730951j")
        assert res.returncode == 0, res.stderr
        assert json.loads(res.stdout)["schemes"][0]["residual_inf"] < 1e-12

    @pytest.mark.parametrize("args,error", [
        (("ser-vs-snr", "--set", "bogus=1"), "ConfigError"),
        (("ser-vs-snr", "--config", "/nonexistent/cfg.txt"), "ConfigError"),
        (("ser-vs-snr", "--threads", "0"), "ConfigError"),
        (("precode-once", "--set", "m_antennas=13", "--set", "schemes=oracle"), "ConfigError"),
        (("ser-vs-snr", "--set", "trials=1", "--out", "/nonexistent/dir/x.csv"), "FileNotFoundError"),
    ])
    def test_errors_are_json_lines(self, args, error):
        res = run_cli(*args)
        assert res.returncode == 2
        msg = json.loads(res.stderr.strip().splitlines()[-1])
        assert msg["error"] == error and msg["message"]

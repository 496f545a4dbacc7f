import math
import textwrap

import pytest

from opinion_merge.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_ENGINE,
    EXIT_OK,
    ConfigError,
    load_config,
    main,
    read_transcript_csv,
    write_report,
    write_transcript_csv,
)
from opinion_merge.engine import InvalidBetError, run_competitive
from opinion_merge.extmath import INF, LogCapital
from opinion_merge.strategies import alpha_pair
from opinion_merge.scenarios import gen_forecast_pair, reality_from
from opinion_merge.verify import CheckReport

BASE_CONFIG = textwrap.dedent("""\
    [run]
    protocol = "competitive"
    horizon = 40
    outcomes = 2
    seed = 42
    output = "{out}"

    [scenario]
    regime = "drift"
    reality = "sample_I"

    [sceptics]
    joint = "alpha_pair"
    alpha = 0.0

    [checks]
    names = ["small_alpha"]
    """)


def write_config(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestConfigLoading:
    def test_minimal_round_trip(self, tmp_path):
        cfg = load_config(write_config(tmp_path, BASE_CONFIG.format(out="t.csv")))
        assert cfg["run"]["horizon"] == 40
        assert cfg["sceptics"]["joint"] == "alpha_pair"

    def test_unknown_section_rejected(self, tmp_path):
        text = BASE_CONFIG.format(out="t.csv") + "\n[mystery]\nx = 1\n"
        with pytest.raises(ConfigError, match="unknown section"):
            load_config(write_config(tmp_path, text))

    def test_unknown_key_rejected(self, tmp_path):
        text = BASE_CONFIG.format(out="t.csv").replace(
            'regime = "drift"', 'regime = "drift"\nbanana = 2')
        with pytest.raises(ConfigError, match="unknown key scenario.banana"):
            load_config(write_config(tmp_path, text))

    def test_degenerate_alpha_names_precondition(self, tmp_path):
        text = BASE_CONFIG.format(out="t.csv").replace("alpha = 0.0", "alpha = 1.0")
        with pytest.raises(ConfigError, match="alpha must differ from -1 and 1"):
            load_config(write_config(tmp_path, text))

    def test_timid_regime_needs_c(self, tmp_path):
        text = BASE_CONFIG.format(out="t.csv").replace('regime = "drift"', 'regime = "timid"')
        with pytest.raises(ConfigError, match="scenario.c"):
            load_config(write_config(tmp_path, text))

    def test_env_seed_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OPINION_MERGE_SEED", "99")
        cfg = load_config(write_config(tmp_path, BASE_CONFIG.format(out="t.csv")))
        assert cfg["run"]["seed"] == 99

    def test_joint_and_sides_are_exclusive(self, tmp_path):
        text = BASE_CONFIG.format(out="t.csv") + '\n[sceptic_I]\nname = "constant"\n'
        with pytest.raises(ConfigError, match="not both"):
            load_config(write_config(tmp_path, text))


class TestRunCommand:
    def test_run_writes_transcript_and_passes_check(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code = main(["run", write_config(tmp_path, BASE_CONFIG.format(out=out))])
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "small_alpha_identity: PASS" in stdout
        assert out.exists()
        lines = out.read_text().splitlines()
        assert len(lines) == 41  # header + 40 rounds
        assert lines[0].startswith("n,p_I_0,p_I_1,p_II_0,p_II_1,f_I_0")

    def test_reproducible_bytes(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        cfg = write_config(tmp_path, BASE_CONFIG.format(out="ignored.csv"))
        assert main(["run", cfg, "--output", str(out1)]) == EXIT_OK
        assert main(["run", cfg, "--output", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = BASE_CONFIG.format(out="t.csv").replace("alpha = 0.0", "alpha = -1.0")
        code = main(["run", write_config(tmp_path, bad)])
        assert code == EXIT_CONFIG
        assert "alpha must differ" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["run", "/nonexistent/x.toml"]) == EXIT_CONFIG

    def test_engine_error_exit_code(self, tmp_path, capsys, monkeypatch):
        import opinion_merge.cli as cli_mod

        def boom(*args, **kwargs):
            raise InvalidBetError("Sceptic I", "forced by test")

        monkeypatch.setattr(cli_mod, "run_competitive", boom)
        code = main(["run", write_config(tmp_path, BASE_CONFIG.format(out="t.csv"))])
        assert code == EXIT_ENGINE
        assert "engine error" in capsys.readouterr().err

    def test_modified_protocol_and_sides(self, tmp_path, capsys, monkeypatch):
        text = textwrap.dedent("""\
            [run]
            protocol = "modified"
            horizon = 10
            outcomes = 3
            seed = 5
            output = "m.csv"

            [scenario]
            regime = "zero_mixed"
            reality = "sample_II"

            [sceptic_I]
            name = "big_alpha"
            alpha = -2.0

            [sceptic_II]
            name = "random"

            [checks]
            names = ["big_alpha"]
            alpha = -2.0
            """)
        monkeypatch.chdir(tmp_path)
        code = main(["run", write_config(tmp_path, text)])
        assert code == EXIT_OK
        assert "big_alpha_bound: PASS" in capsys.readouterr().out


class TestVerifyCommand:
    def test_divergence_suite_passes(self, tmp_path, capsys):
        report = tmp_path / "report.txt"
        code = main(["verify", "--suite", "divergence", "--seed", "3",
                     "--report", str(report)])
        assert code == EXIT_OK
        assert "divergence_relations: PASS" in capsys.readouterr().out
        text = report.read_text()
        assert text.startswith("check=divergence_relations pass=true")
        assert "tolerance=" in text

    def test_growth_suite_passes(self, capsys):
        assert main(["verify", "--suite", "growth", "--seed", "1"]) == EXIT_OK

    def test_failed_checks_exit_one(self, monkeypatch, capsys):
        import opinion_merge.cli as cli_mod

        monkeypatch.setattr(cli_mod, "run_suite", lambda name, seed: [
            CheckReport("doomed", False, 1.0, 1e-9)])
        assert main(["verify", "--suite", "divergence"]) == EXIT_CHECK_FAILED

    def test_env_seed_fallback(self, monkeypatch, capsys):
        import opinion_merge.cli as cli_mod

        captured = {}

        def fake(name, seed):
            captured["seed"] = seed
            return [CheckReport("ok", True, 0.0, 1e-9)]

        monkeypatch.setattr(cli_mod, "run_suite", fake)
        monkeypatch.setenv("OPINION_MERGE_SEED", "123")
        assert main(["verify", "--suite", "divergence"]) == EXIT_OK
        assert captured["seed"] == 123


class TestDivergenceCommand:
    def test_anchor_table(self, capsys):
        code = main(["divergence", "0.5,0.5", "0.9,0.1", "--alpha", "0"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "0.8944272" in out and "0.4222912" in out and "0.4462871" in out

    def test_identical_vectors_zero_row(self, capsys):
        main(["divergence", "0.5,0.5", "0.5,0.5", "--alpha", "0"])
        out = capsys.readouterr().out
        assert "1.0000000" in out and "0.0000000" in out

    def test_singular_row(self, capsys):
        main(["divergence", "1,0", "0,1", "--alpha", "0"])
        out = capsys.readouterr().out
        assert "4.0000000" in out and "inf" in out

    def test_malformed_vector(self, capsys):
        assert main(["divergence", "0.5,x", "0.9,0.1"]) == EXIT_CONFIG
        assert main(["divergence", "0.5,0.7", "0.9,0.1"]) == EXIT_CONFIG
        assert main(["divergence", "0.5,0.5", "0.9,0.1", "--alpha", "1"]) == EXIT_CONFIG


class TestTranscriptCsv:
    def build(self, horizon=25):
        f_i, f_ii = gen_forecast_pair(13, 3, "drift")
        s_i, s_ii = alpha_pair(0.5)
        return run_competitive(f_i, f_ii, s_i, s_ii, reality_from("II", 2), horizon)

    def test_round_trip_is_field_exact(self, tmp_path):
        t = self.build()
        path = str(tmp_path / "t.csv")
        write_transcript_csv(t, path, report_alpha=0.5)
        back = read_transcript_csv(path)
        assert len(back) == len(t)
        for a, b in zip(t.rounds, back.rounds):
            assert a.index == b.index and a.outcome == b.outcome
            assert a.p_i == b.p_i and a.p_ii == b.p_ii
            assert a.f_i == b.f_i and a.f_ii == b.f_ii
            assert a.log_k_i == b.log_k_i and a.log_k_ii == b.log_k_ii

    def test_write_read_write_is_byte_stable(self, tmp_path):
        t = self.build()
        p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        write_transcript_csv(t, p1, report_alpha=0.5)
        write_transcript_csv(read_transcript_csv(p1), p2, report_alpha=0.5)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_infinities_serialize(self, tmp_path):
        from conftest import FixedForecaster, ScriptedReality, ScriptedSceptic
        from opinion_merge.strategies import ConstantSceptic

        f_i = FixedForecaster([0.5, 0.5])
        f_ii = FixedForecaster([1.0, 0.0])
        s_ii = ScriptedSceptic([[1.0, INF]])
        t = run_competitive(f_i, f_ii, ConstantSceptic(), s_ii, ScriptedReality([1]), 1)
        path = str(tmp_path / "inf.csv")
        write_transcript_csv(t, path)
        content = open(path).read()
        assert "inf" in content
        back = read_transcript_csv(path)
        assert back.rounds[0].log_k_ii.is_infinite
        assert back.rounds[0].f_ii[1] == INF

    def test_indefinite_serializes(self, tmp_path):
        t = self.build(horizon=2)
        object.__setattr__(t.rounds[1], "log_k_i", LogCapital(0.0, indefinite=True))
        path = str(tmp_path / "ind.csv")
        write_transcript_csv(t, path)
        back = read_transcript_csv(path)
        assert back.rounds[1].log_k_i.indefinite


class TestReportFile:
    def test_format(self, tmp_path):
        path = str(tmp_path / "r.txt")
        write_report([
            CheckReport("a_check", True, 1.5e-12, 1e-9),
            CheckReport("b_check", False, 2.0, 1e-9, skipped=True, note="NOT TIMID"),
        ], path)
        lines = open(path).read().splitlines()
        assert lines[0] == "check=a_check pass=true max_violation=1.5000000000000001e-12 tolerance=1.0000000000000001e-09"
        assert "skipped=true" in lines[1] and "note=NOT_TIMID" in lines[1]


class TestSpecifiedCliScenarios:
    def test_minimal_constant_run(self, tmp_path, capsys):
        text = textwrap.dedent("""\
            [run]
            protocol = "competitive"
            horizon = 5
            outcomes = 2
            seed = 1
            output = "min.csv"

            [scenario]
            regime = "agree"
            reality = "sample_I"

            [sceptic_I]
            name = "constant"

            [sceptic_II]
            name = "constant"
            """)
        out = tmp_path / "min.csv"
        code = main(["run", write_config(tmp_path, text), "--output", str(out)])
        assert code == EXIT_OK
        t = read_transcript_csv(str(out))
        assert len(t) == 5
        for rec in t.rounds:
            assert rec.log_k_i.log_value == 0.0
            assert rec.log_k_ii.log_value == 0.0

    def test_verify_all_suites_pass(self, capsys):
        assert main(["verify", "--suite", "all", "--seed", "42"]) == EXIT_OK
        out = capsys.readouterr().out
        for fragment in ("divergence_relations", "small_alpha_identity",
                         "density_ratio_tail", "truncated_log_bound",
                         "growth_fixed_lower", "growth_intermediate_mix"):
            assert fragment in out

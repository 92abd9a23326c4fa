import json

import pytest

from mmwave_bitalloc.channel import ArrayGeometry, ChannelConfig
from mmwave_bitalloc.cli import main
from mmwave_bitalloc.config import (
    ConfigError,
    ExperimentConfig,
    McConfig,
    config_to_dict,
    parse_config,
    preset_config,
    serialize_config,
)
from mmwave_bitalloc.runner import run_experiment, run_policies, rows_to_csv


def _tiny_config(tmp_path, policies=("all-2-bit", "crlb"), mc_symbols=0):
    return ExperimentConfig(
        name="tiny",
        channel=ChannelConfig(
            geometry=ArrayGeometry(num_tx_antennas=6, num_rx_antennas=8),
            num_streams=3,
            num_clusters=4,
            num_rays_per_cluster=5,
            rng_seed=3,
        ),
        snr_grid_db=(0.0, 10.0),
        policies=policies,
        mc=McConfig(num_symbols=mc_symbols, seed=11),
        output_dir=str(tmp_path / "out"),
    )


def test_config_round_trip(tmp_path):
    config = _tiny_config(tmp_path)
    assert parse_config(serialize_config(config)) == config


def test_preset_round_trip():
    config = preset_config("fig2-shape")
    assert parse_config(serialize_config(config)) == config


def test_unknown_top_level_key_rejected(tmp_path):
    data = config_to_dict(_tiny_config(tmp_path))
    data["surprise"] = 1
    with pytest.raises(ConfigError, match="surprise"):
        parse_config(json.dumps(data))


def test_unknown_nested_key_rejected(tmp_path):
    data = config_to_dict(_tiny_config(tmp_path))
    data["channel"]["carrier_ghz"] = 28
    with pytest.raises(ConfigError, match="carrier_ghz"):
        parse_config(json.dumps(data))
    data = config_to_dict(_tiny_config(tmp_path))
    data["mc"]["oversampling"] = 4
    with pytest.raises(ConfigError, match="oversampling"):
        parse_config(json.dumps(data))


def test_wrong_version_rejected(tmp_path):
    data = config_to_dict(_tiny_config(tmp_path))
    data["version"] = 99
    with pytest.raises(ConfigError, match="version"):
        parse_config(json.dumps(data))


def test_empty_policy_list_rejected(tmp_path):
    with pytest.raises(ConfigError, match="policies"):
        _tiny_config(tmp_path, policies=())


def test_unknown_policy_rejected(tmp_path):
    with pytest.raises(ConfigError, match="policies"):
        _tiny_config(tmp_path, policies=("dither",))


def test_bad_quantizer_mode_rejected():
    with pytest.raises(ConfigError, match="quantizer_mode"):
        McConfig(quantizer_mode="midtread")


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        preset_config("fig9-shape")


def test_run_experiment_bundle(tmp_path):
    config = _tiny_config(tmp_path, mc_symbols=1000)
    result = run_experiment(config)
    csv_text = open(result.csv_path).read()
    lines = csv_text.strip().split("\n")
    assert lines[0] == "snr_db,policy,delta_analytic,delta_mc,std_err,b_vector"
    assert len(lines) == 1 + len(config.policies) * len(config.snr_grid_db)
    summary = open(result.summary_path).read()
    assert "|B_set|" in summary
    assert "1896" in summary and "133271" in summary
    meta = json.loads(open(result.metadata_path).read())
    assert meta["config"]["name"] == "tiny"
    plot = open(result.plot_path).read()
    assert "results.csv" in plot


def test_summary_reference_cells_for_standard_geometry(tmp_path):
    from mmwave_bitalloc.runner import build_summary

    config = preset_config("table3", output_dir=str(tmp_path))
    summary = build_summary(config, rows=[])
    # GA cells at the 32x64 array with the preset evaluation budgets
    assert "279936" in summary and "274752" in summary
    assert "2721600" in summary and "2673000" in summary


def test_run_experiment_csv_deterministic(tmp_path):
    config = _tiny_config(tmp_path, mc_symbols=500)
    first = open(run_experiment(config).csv_path, "rb").read()
    second = open(run_experiment(config).csv_path, "rb").read()
    assert first == second


def test_parallel_rows_match_serial(tmp_path):
    config = _tiny_config(tmp_path)
    serial = run_policies(config, jobs=1)
    parallel = run_policies(config, jobs=2)
    assert rows_to_csv(serial) == rows_to_csv(parallel)


def test_cli_enumerate(capsys):
    assert main(["enumerate-bset", "--num-paths", "8"]) == 0
    out = capsys.readouterr().out
    assert "cardinality=1896" in out


def test_cli_enumerate_list(capsys):
    assert main(["enumerate-bset", "--num-paths", "1", "--budget", "4", "--list"]) == 0
    out = capsys.readouterr().out
    assert "1\n2" in out


def test_cli_run_and_sweep(tmp_path, capsys):
    config = _tiny_config(tmp_path)
    path = tmp_path / "config.json"
    path.write_text(serialize_config(config))
    assert main(["run", "--config", str(path)]) == 0
    capsys.readouterr()
    assert main(["sweep", "--config", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("snr_db,policy")


def test_cli_allocate(tmp_path, capsys):
    config = _tiny_config(tmp_path)
    path = tmp_path / "config.json"
    path.write_text(serialize_config(config))
    assert main(["allocate", "--config", str(path), "--method", "fs", "--snr-db", "10"]) == 0
    out = capsys.readouterr().out
    assert "allocation=" in out and "evaluations=" in out


def test_cli_invalid_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "zzz": true}')
    assert main(["run", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "zzz" in err


def test_cli_missing_config_exits_1(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1


def test_cli_verify_passes(capsys):
    assert main(["verify", "--instances", "20"]) == 0
    out = capsys.readouterr().out
    assert "all 5 checks passed" in out


def test_cli_verify_detects_tampered_distortion(capsys):
    assert main(["verify", "--instances", "5", "--override-distortion", "2=0.12"]) == 3
    out = capsys.readouterr().out
    assert "FAIL distortion-table" in out


def test_cli_verify_detects_inconsistent_evaluations(capsys):
    assert main(["verify", "--instances", "5", "--override-evaluations", "8=1896"]) == 3
    out = capsys.readouterr().out
    assert "FAIL complexity-cells" in out


def test_cli_write_preset_round_trip(tmp_path, capsys):
    out_path = tmp_path / "preset.json"
    assert main(["write-preset", "--preset", "table3", "--out", str(out_path)]) == 0
    config = parse_config(out_path.read_text())
    assert config.name == "table3"


def test_cli_seed_override(tmp_path, capsys):
    config = _tiny_config(tmp_path)
    path = tmp_path / "config.json"
    path.write_text(serialize_config(config))
    assert main(["sweep", "--config", str(path), "--seed", "1234"]) == 0
    first = capsys.readouterr().out
    assert main(["sweep", "--config", str(path)]) == 0
    second = capsys.readouterr().out
    assert first != second

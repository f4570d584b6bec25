import json

import polars as pl
import pytest

from app import main
from commands import CommandRunner, load_config
from commands.runner import config_hash
from common import ConfigError
from forest import forest_to_jsonl, write_forest
from utils.artifact_sink import MemorySink

from .common import *

POINT_ENSEMBLE = {"mu": [["dirac(0)"]], "nu": ["dirac(0)"], "k": [1]}
BROWNIAN = {"beta": [0.5], "alpha": [[0.0]], "delta": [1.0], "x": [0.0]}


def write_config(tmp_path, **payload) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_generate_writes_forests(tmp_path):
    config = write_config(tmp_path, ensemble=POINT_ENSEMBLE, scales={"h_max": 3})
    out = tmp_path / "run"
    assert main(["generate", "--config", config, "--output", str(out), "--threads", "1"]) == 0
    lines = (out / "forest_0000.jsonl").read_text().splitlines()
    assert len(lines) == 6
    assert json.loads(lines[0]) == {"n_types": 1, "h_max": 3}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["scales"]["h_max"] == 3
    assert manifest["config"]["ensemble"]["k"] == [1]
    assert manifest["outputs"]["forest_0000"]["vertices"] == 5


def test_generate_is_reproducible(tmp_path):
    """
    Same seed, same bytes
    """
    ensemble = {
        "mu": [["binomial(2, 0.4)", "poisson(0.2)"], ["dirac(0)", "geometric(0.6)"]],
        "nu": ["poisson(0.7)", "poisson(0.5)"],
        "k": [1, 1],
    }
    config = write_config(tmp_path, ensemble=ensemble, scales={"h_max": 8})
    for name in ("a", "b"):
        args = ["generate", "--config", config, "--output", str(tmp_path / name), "--seed", "9", "--forests", "3"]
        assert main(args + ["--threads", "1"]) == 0
    for k in range(3):
        first = (tmp_path / "a" / f"forest_{k:04d}.jsonl").read_text()
        assert first == (tmp_path / "b" / f"forest_{k:04d}.jsonl").read_text()


def test_invalid_law_is_a_config_error(tmp_path):
    ensemble = {"mu": [["explicit([0.5, 0.4])"]], "nu": ["dirac(0)"], "k": [1]}
    config = write_config(tmp_path, ensemble=ensemble)
    assert main(["generate", "--config", config, "--output", str(tmp_path / "run")]) == 2


def test_unknown_experiment_is_rejected():
    with pytest.raises(SystemExit) as err:
        main(["experiment", "--experiment", "nope"])
    assert err.value.code == 2


def test_dry_run_writes_nothing(tmp_path, capsys):
    config = write_config(tmp_path, mechanism=BROWNIAN)
    out = tmp_path / "run"
    code = main(["experiment", "--experiment", "sde-moment", "--config", config, "--output", str(out), "--dry-run"])
    assert code == 0
    echoed = json.loads(capsys.readouterr().out)
    assert echoed["experiment"] == "sde-moment"
    assert echoed["dry_run"] is True
    assert not out.exists()


def test_verify(tmp_path, hand_forest, capsys):
    path = tmp_path / "forest.jsonl"
    write_forest(hand_forest, path)
    assert main(["verify", "--input", str(path), "--output", str(tmp_path / "run")]) == 0
    assert "hd:" in capsys.readouterr().out
    report = json.loads((tmp_path / "run" / "identities.json").read_text())
    assert report["checks"]["partition"] > 0


def test_verify_rejects_corrupted_forest(tmp_path, hand_forest):
    lines = forest_to_jsonl(hand_forest).splitlines()
    lines[8] = lines[8].replace('"parent":4', '"parent":9')
    path = tmp_path / "forest.jsonl"
    path.write_text("\n".join(lines))
    assert main(["verify", "--input", str(path), "--output", str(tmp_path / "run")]) == 3


def test_encode_from_generated_forest(tmp_path):
    config = write_config(tmp_path, ensemble=POINT_ENSEMBLE, scales={"h_max": 3})
    out = tmp_path / "run"
    assert main(["encode", "--config", config, "--output", str(out), "--threads", "1"]) == 0
    spine = pl.read_csv(out / "forest_0000" / "lukasiewicz_1.csv")
    assert spine["value"].to_list() == [0, -1]


def test_experiment_and_report(tmp_path, capsys):
    """
    A stored report re-renders with the same verdict; a tampered one does not
    """
    config = write_config(
        tmp_path,
        mechanism=BROWNIAN,
        scales={"v_list": [0.25]},
        thresholds={"sde_mean_rel": 0.5, "clamp_fraction": 1.0},
    )
    out = tmp_path / "run"
    args = ["experiment", "--experiment", "sde-moment", "--config", config, "--output", str(out), "--replicates", "600"]
    assert main(args + ["--threads", "1"]) == 0
    assert "sde-moment: PASS" in capsys.readouterr().out
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["mechanism"]["beta"] == [0.5]
    assert (out / "ks_table.csv").exists()
    assert (out / "samples_sde_v0.25_type1.csv").exists()

    assert main(["report", "--input", str(out / "report.json"), "--output", str(tmp_path / "again")]) == 0
    assert pl.read_csv(tmp_path / "again" / "ks_table.csv").height == len(report["statistics"])

    report["statistics"][0]["threshold"] = 0.0
    report["statistics"][0]["value"] = 1.0
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(report))
    assert main(["report", "--input", str(tampered), "--output", str(tmp_path / "third")]) == 4


def test_simulate_semimartingale_scaling(tmp_path):
    config = write_config(tmp_path, mechanism=BROWNIAN, scales={"v_max": 0.25, "v_list": [0.1], "t_cap": 5.0})
    plain, scaled = tmp_path / "plain", tmp_path / "scaled"
    assert main(["simulate", "--config", config, "--output", str(plain), "--seed", "4"]) == 0
    assert main(["simulate", "--config", config, "--output", str(scaled), "--seed", "4", "--semimartingale"]) == 0
    manifest = json.loads((plain / "manifest.json").read_text())
    assert manifest["monotone"]
    for name in ("Z.csv", "H_1.csv", "left_height_1.csv", "U_1.csv"):
        assert (plain / name).exists()
    first = pl.read_csv(plain / "local_time_1.csv")["local_time"].to_numpy()
    second = pl.read_csv(scaled / "local_time_1.csv")["local_time"].to_numpy()
    assert second == pytest.approx(0.25 * first)


def test_load_config_overrides(tmp_path):
    config = write_config(tmp_path, seed=1, scales={"h_max": 4, "p": [10]})
    loaded = load_config(config, {"seed": 5, "scales": {"h_max": 7}, "threads": None})
    assert loaded.seed == 5
    assert loaded.scales.h_max == 7
    assert loaded.scales.p == [10]
    with pytest.raises(ConfigError):
        load_config(config, {"bogus": 1})
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, scales={"dt": 0}))


def test_runner_needs_a_mechanism():
    runner = CommandRunner(load_config(None, {"command": "simulate", "threads": 1}), sink=MemorySink())
    with pytest.raises(ConfigError):
        runner.run()


def test_frames_carry_the_config_hash():
    config = load_config(None, {"command": "generate", "ensemble": POINT_ENSEMBLE, "scales": {"h_max": 3}, "threads": 1})
    sink = MemorySink()
    runner = CommandRunner(config, sink=sink)
    assert runner.run() == 0
    census = sink.frames["forest_0000_census.csv"]
    assert census["config_hash"].unique().to_list() == [config_hash(config)]
    assert json.loads(sink.texts["manifest.json"])["config_hash"] == config_hash(config)
    other = load_config(None, {"command": "generate", "ensemble": POINT_ENSEMBLE, "scales": {"h_max": 4}, "threads": 1})
    assert config_hash(other) != config_hash(config)

import json

from dcsim import cli
from dcsim import datasets as ds


def write_config(path, **overrides):
    cfg = dict(
        method="centralized",
        synthetic={"n_per_class": 40, "m": 16, "template_density": 0.3, "flip_prob": 0.1},
        partition_mode="label_bias",
        bias_r=0.5,
        anchor_strategy="binary01",
        anchor_count=20,
        k=6,
        k1=4,
        k2=4,
        k_collab=5,
        hidden_dims=[8],
        dropout_rates=[0.0],
        learning_rate=0.01,
        max_epochs=10,
        patience=10,
        fed_max_rounds=10,
        fed_patience=10,
        repetitions=1,
        base_seed=0,
    )
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


class TestGenSynth:
    def test_writes_valid_dataset(self, tmp_path, capsys):
        out = tmp_path / "synth.dcsim"
        code = cli.main(
            ["gen-synth", "--out", str(out), "--n-per-class", "10",
             "--dims", "32", "--flip", "0.1", "--density", "0.3", "--seed", "1"]
        )
        assert code == 0
        d = ds.load_dataset(out)
        assert d.n_samples == 20 and d.feature_dim == 32
        assert "wrote 20 samples" in capsys.readouterr().out

    def test_invalid_density_is_config_error(self, tmp_path, capsys):
        code = cli.main(
            ["gen-synth", "--out", str(tmp_path / "x"), "--n-per-class", "10",
             "--density", "0"]
        )
        assert code == cli.EXIT_CONFIG
        assert "config error" in capsys.readouterr().err


class TestPartition:
    def make_data(self, tmp_path):
        d = ds.generate_synthetic_fingerprint_dataset(20, 16, 0.3, 0.1, 0)
        p = tmp_path / "data.dcsim"
        ds.save_dataset(d, p)
        return p

    def test_bias_plan_written(self, tmp_path, capsys):
        data = self.make_data(tmp_path)
        out = tmp_path / "plan.json"
        code = cli.main(
            ["partition", "--data", str(data), "--mode", "bias", "--r", "1.0",
             "--seed", "0", "--out", str(out)]
        )
        assert code == 0
        plan = json.loads(out.read_text())
        assert plan["n_users"] == 4
        assert len(plan["assignments"]) == 4
        assert plan["plan_hash"]

    def test_iid_plan_with_custom_users(self, tmp_path):
        data = self.make_data(tmp_path)
        out = tmp_path / "plan.json"
        assert cli.main(
            ["partition", "--data", str(data), "--mode", "iid", "--users", "5",
             "--out", str(out)]
        ) == 0
        assert json.loads(out.read_text())["n_users"] == 5

    def test_missing_data_file_is_data_error(self, tmp_path, capsys):
        code = cli.main(
            ["partition", "--data", str(tmp_path / "absent.dcsim"), "--mode", "iid",
             "--out", str(tmp_path / "plan.json")]
        )
        assert code == cli.EXIT_DATA
        assert "data error" in capsys.readouterr().err

    def test_malformed_data_file_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.dcsim"
        bad.write_text("#dcsim-dataset v1 m=8\n1\t9\n")
        code = cli.main(
            ["partition", "--data", str(bad), "--mode", "iid",
             "--out", str(tmp_path / "plan.json")]
        )
        assert code == cli.EXIT_DATA


class TestRun:
    def test_end_to_end(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        out = tmp_path / "results"
        code = cli.main(["run", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "results.json").read_text())
        assert payload["type"] == "experiment"
        assert "ROC-AUC" in capsys.readouterr().out

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        code = cli.main(
            ["run", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]
        )
        assert code == cli.EXIT_CONFIG

    def test_invalid_json_is_config_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert cli.main(
            ["run", "--config", str(cfg), "--out", str(tmp_path)]
        ) == cli.EXIT_CONFIG

    def test_unknown_config_key_is_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", warp_speed=True)
        code = cli.main(["run", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == cli.EXIT_CONFIG
        assert "unknown config keys" in capsys.readouterr().err

    def test_missing_dataset_path_is_data_error(self, tmp_path):
        cfg = write_config(
            tmp_path / "cfg.json",
            synthetic=None,
            dataset_path=str(tmp_path / "ghost.dcsim"),
        )
        assert cli.main(
            ["run", "--config", str(cfg), "--out", str(tmp_path)]
        ) == cli.EXIT_DATA


class TestSweep:
    def test_end_to_end(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", method="dc")
        out = tmp_path / "sweep"
        code = cli.main(
            ["sweep-r", "--config", str(cfg), "--r", "0.0,1.0",
             "--methods", "fedavg,dc", "--out", str(out)]
        )
        assert code == 0
        payload = json.loads((out / "results.json").read_text())
        assert payload["type"] == "sweep"
        assert payload["r_values"] == [0.0, 1.0]
        assert (out / "plot_roc.svg").exists()

    def test_unknown_method_is_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        code = cli.main(
            ["sweep-r", "--config", str(cfg), "--r", "0.0",
             "--methods", "telepathy", "--out", str(tmp_path)]
        )
        assert code == cli.EXIT_CONFIG

import pytest

from app.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, _radius, build_parser, experiment_config, main, merged_options
from app.schemas import RadiusSchedule
from app.services import export
from app.services.geometry import radius


def test_bounds_to_stdout(capsys):
    assert main(["bounds", "--dim", "2", "--n", "1000", "--r", "0.2", "--t", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "hs_bound" in out and "ws_bound" in out


def test_bounds_csv(tmp_path):
    path = tmp_path / "b.csv"
    assert main(["bounds", "--dim", "2", "--side", "16", "--side", "32", "--t", "1", "--t", "2", "--out", str(path)]) == EXIT_OK
    df = export.read_csv(str(path))
    assert len(df) == 4
    assert set(df["n"]) == {256, 1024}


def test_concentration_writes_records_with_seed(tmp_path):
    path = tmp_path / "c.csv"
    code = main(["concentration", "--dim", "2", "--side", "6", "--trials", "2", "--seed", "41", "--t", "1", "--out", str(path)])
    assert code == EXIT_OK
    assert export.read_metadata(str(path))["master_seed"] == "41"
    assert len(export.read_csv(str(path))) == 2


def test_concentration_is_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["concentration", "--side", "6", "--trials", "2", "--out", str(path)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert "a.csv" not in paths[0].read_text()


def test_conjecture_writes_summary(tmp_path):
    path = tmp_path / "conj.csv"
    assert main(["conjecture", "--side", "6", "--trials", "2", "--out", str(path)]) == EXIT_OK
    summary = export.read_csv(f"{path}.summary.csv")
    assert set(summary["function"]) == {"identity", "square", "abs", "cos_pi"}


def test_generate_spectrum_and_match(tmp_path):
    assert main(["generate", "--kind", "grid", "--side", "4", "--out", str(tmp_path / "p.csv"), "--edges", str(tmp_path / "e.txt")]) == EXIT_OK
    assert (tmp_path / "e.txt").read_text().startswith("16 2 ")
    assert main(["spectrum", "--kind", "grid", "--side", "5", "--out", str(tmp_path / "s.csv")]) == EXIT_OK
    assert len(export.read_csv(str(tmp_path / "s.csv"))) == 25
    assert main(["match", "--side", "5", "--out", str(tmp_path / "m.csv")]) == EXIT_OK
    assert len(export.read_csv(str(tmp_path / "m.csv"))) == 25


def test_recbound(tmp_path):
    path = tmp_path / "r.csv"
    assert main(["recbound", "--n", "200", "--p", "0.3", "--t", "0.5", "--draws", "10000", "--out", str(path)]) == EXIT_OK
    df = export.read_csv(str(path))
    assert bool(df.loc[0, "within_bound"])


def test_config_file_and_flag_override(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("dim=2\nside=6,8\ntrials=3\nseed=5\ncd=feasible\nt=0.5,1\n")
    args = build_parser().parse_args(["concentration", "--config", str(config), "--trials", "1"])
    cfg = experiment_config(merged_options(args))
    assert cfg.sides == [6, 8]
    assert cfg.trials == 1
    assert cfg.master_seed == 5
    assert cfg.c_d_mode.kind == "feasible"
    assert cfg.t_grid == [0.5, 1.0]


def test_usage_errors_exit_one(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == EXIT_USAGE
    assert main(["concentration", "--trials", "0", "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE
    assert main(["concentration", "--cd", "sometimes", "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE
    assert main(["concentration", "--side", "6"]) == EXIT_USAGE
    bad = tmp_path / "bad.env"
    bad.write_text("colour=blue\n")
    assert main(["bounds", "--config", str(bad)]) == EXIT_USAGE


def test_runtime_errors_exit_two(tmp_path):
    target = tmp_path / "missing" / "c.csv"
    assert main(["concentration", "--side", "4", "--trials", "1", "--out", str(target)]) == EXIT_RUNTIME
    assert main(["bounds", "--n", "1", "--t", "1"]) == EXIT_RUNTIME


def test_partial_schedule_keeps_dimension_defaults():
    args = build_parser().parse_args(["concentration", "--dim", "2", "--dim", "3", "--c", "2"])
    cfg = experiment_config(merged_options(args))
    assert cfg.schedule.beta is None
    assert _radius(cfg, 1000, 3) == radius(RadiusSchedule(c=2.0, beta=1.5), 1000, 3)
    assert _radius(cfg, 1000, 2) == radius(RadiusSchedule(c=2.0, beta=2.0), 1000, 2)


def test_partial_schedule_reaches_records(tmp_path):
    path = tmp_path / "c.csv"
    assert main(["concentration", "--dim", "3", "--side", "4", "--trials", "1", "--c", "2", "--out", str(path)]) == EXIT_OK
    df = export.read_csv(str(path))
    assert df.loc[0, "r"] == radius(RadiusSchedule(c=2.0, beta=1.5), 64, 3)

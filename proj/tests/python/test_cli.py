import json
import shutil


def extract(run, manifest, out, *extra):
    return run("extract", "--out", out, "--manifest", manifest, "--window", 4, *extra)


def test_synth_layout(small_dataset):
    root = small_dataset.parent
    manifest = json.loads(small_dataset.read_text())
    assert len(manifest["subjects"]) == 2
    assert (root / "audio").is_dir() and (root / "eeg").is_dir() and (root / "annotations").is_dir()


def test_extract_caches_unchanged_trials(run, small_dataset, tmp_path):
    first = extract(run, small_dataset, tmp_path)
    assert "skipped (cached)" not in first.stdout + first.stderr
    tables = sorted((tmp_path / "features" / "w4").glob("*.eeg.csv"))
    assert len(tables) == 4
    header = tables[0].read_text().splitlines()[0].split(",")
    assert header[:2] == ["trial_id", "window_start"] and len(header) == 19
    assert (tmp_path / "config.toml").exists()

    second = extract(run, small_dataset, tmp_path)
    log = second.stdout + second.stderr
    assert log.count("skipped (cached)") == 4


def test_missing_annotation_names_the_trial(run, small_dataset, tmp_path):
    data = tmp_path / "data"
    shutil.copytree(small_dataset.parent, data)
    (data / "annotations" / "s02" / "song01.csv").unlink()
    proc = run("extract", "--out", tmp_path / "run", "--manifest", data / "manifest.json", "--window", 4, check=False)
    assert proc.returncode != 0
    assert "s02/song01" in proc.stdout + proc.stderr


def test_evaluate_is_deterministic(run, small_dataset, tmp_path):
    extract(run, small_dataset, tmp_path)
    features = tmp_path / "features"
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        run("--seed", 5, "evaluate", "--out", out, "--manifest", small_dataset, "--features", features,
            "--window", 4, "--alpha", 0.55, "--repetitions", 2)
        outputs.append(out)
    for target in ("arousal", "valence"):
        a = (outputs[0] / f"evaluation_{target}.json").read_bytes()
        b = (outputs[1] / f"evaluation_{target}.json").read_bytes()
        assert a == b
        report = json.loads(a)
        assert report["config"]["alpha"] == 0.55
        assert report["config"]["target"] == target


def test_sweep_windows_and_report(run, small_dataset, tmp_path):
    run("extract", "--out", tmp_path, "--manifest", small_dataset, "--sweep-windows")
    run("evaluate", "--out", tmp_path, "--manifest", small_dataset, "--sweep-windows", "--repetitions", 1)
    sweep = json.loads((tmp_path / "sweep_windows.json").read_text())
    assert sweep["axis"] == [2, 3, 4, 5, 6, 7, 8, 9, 10]
    assert sweep["rows"] == ["DLF_EEG", "DLF_MF", "EEG", "MF", "Chance"]
    assert len(sweep["cells"]) == 90
    table = run("report", "--in", tmp_path / "sweep_windows.json", "--metric", "mcc").stdout
    assert table == (tmp_path / "sweep_windows_mcc.csv").read_text()


def test_sweep_alpha(run, small_dataset, tmp_path):
    extract(run, small_dataset, tmp_path)
    run("evaluate", "--out", tmp_path, "--manifest", small_dataset, "--window", 4, "--sweep-alpha", "--repetitions", 1)
    sweep = json.loads((tmp_path / "sweep_alpha.json").read_text())
    assert len(sweep["axis"]) == 41
    assert sweep["axis"][0] == 0 and sweep["axis"][-1] == 1
    lines = (tmp_path / "sweep_alpha.csv").read_text().splitlines()
    assert lines[0] == "alpha,target,accuracy_mean,accuracy_std,mcc_mean,mcc_std"
    assert len(lines) == 83


def test_conflicting_flags_are_rejected(run, small_dataset, tmp_path):
    proc = run("evaluate", "--out", tmp_path, "--manifest", small_dataset, "--alpha", 0.5, "--sweep-alpha", check=False)
    assert proc.returncode != 0

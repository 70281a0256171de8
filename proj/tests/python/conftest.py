import os
import shutil
import subprocess
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("EMOMUSIC_CLI") or shutil.which("emomusic")
    if not path:
        pytest.skip("emomusic executable not available (set EMOMUSIC_CLI)")
    return Path(path)


@pytest.fixture(scope="session")
def run(cli):
    def _run(*args, check=True):
        proc = subprocess.run([str(cli), *map(str, args)], capture_output=True, text=True)
        if check and proc.returncode != 0:
            raise AssertionError(f"{args} exited {proc.returncode}\n{proc.stdout}\n{proc.stderr}")
        return proc

    return _run


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory, run):
    out = tmp_path_factory.mktemp("synth")
    run("--seed", 2, "synth", "--out", out, "--subjects", 2, "--trials", 2, "--trial-length", 20, "--segment-length", 10)
    return out / "manifest.json"

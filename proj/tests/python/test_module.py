import json
import math

import numpy as np
import pytest

import emomusic


def test_names_and_channels():
    assert emomusic.eeg_channels()[:4] == ["Fp1", "Fp2", "F3", "F4"]
    assert len(emomusic.eeg_feature_names()) == 17
    names = emomusic.music_feature_names()
    assert len(names) == 37
    assert names[0] == "rms" and names[-1] == "hcdf"


def test_higuchi():
    assert emomusic.higuchi_fd(np.arange(1000.0)) == pytest.approx(1.0, abs=0.01)
    noise = np.random.default_rng(0).standard_normal(10000)
    assert 1.90 <= emomusic.higuchi_fd(noise) <= 2.05
    with pytest.raises(ValueError):
        emomusic.higuchi_fd(np.zeros(10), k_max=32)


def test_eeg_features_shape():
    x = np.random.default_rng(1).standard_normal((12, 500))
    f = emomusic.eeg_features(x, 250.0)
    assert f.shape == (17,)
    assert f[12] == pytest.approx(f[0] - f[1])
    with pytest.raises(ValueError):
        emomusic.eeg_features(x[:11], 250.0)


def test_music_features():
    t = np.arange(88200) / 44100.0
    values, flags = emomusic.music_features(0.5 * np.sin(2 * np.pi * 441.0 * t))
    assert values.shape == (37,)
    assert values[0] == pytest.approx(0.5 / math.sqrt(2), abs=1e-3)
    assert set(flags) == {"tempo_no_onsets", "attack_no_onsets", "flat_chroma"}


def test_svm_two_points_and_serialization():
    x = np.array([[-1.0], [1.0]])
    svm = emomusic.train_svm(x, [-1, 1], c=10.0)
    assert svm.converged
    assert svm.support_vector_count == 2
    assert abs(svm.decision_function(np.array([[0.0]]))[0]) < 1e-6
    p = svm.predict_proba(np.array([[-2.0], [2.0]]))
    assert p[0] < 0.5 < p[1]
    text = svm.to_json()
    assert json.loads(text)["format"] == "emomusic-svm/1"
    assert emomusic.Svm.from_json(text) == svm
    with pytest.raises(ValueError):
        emomusic.train_svm(x, [1, 1])


def test_fusion_and_metrics():
    assert emomusic.fuse_decision(0.8, 0.2, 1.0) == 0.8
    assert emomusic.fuse_decision(0.8, 0.2, 0.0) == 0.2
    assert emomusic.decide(0.71) == 1
    assert emomusic.decide(0.2) == 2
    ties = [emomusic.decide(0.5, seed=3, window_id=w) for w in range(2000)]
    assert ties == [emomusic.decide(0.5, seed=3, window_id=w) for w in range(2000)]
    assert 0.45 < ties.count(1) / len(ties) < 0.55
    assert emomusic.mcc(6, 3, 1, 2) == pytest.approx(0.4781, abs=1e-4)
    assert emomusic.accuracy(6, 3, 1, 2) == 75.0
    assert emomusic.chance_level([1, 1, 1, 0]) == 75.0


def test_synth_and_evaluate(tmp_path):
    manifest = emomusic.synth(str(tmp_path), seed=1, subjects=2, trials=4)
    trials = emomusic.manifest_trials(str(manifest))
    assert len(trials) == 8
    events = emomusic.load_annotations(str(tmp_path / "annotations" / "s01" / "song01.csv"))
    assert events[0][0] == 0
    assert all(-1.0 <= v <= 1.0 and -1.0 <= a <= 1.0 for _, v, a in events)
    report = emomusic.evaluate(str(manifest), window_s=4.0, repetitions=1)
    assert report["config"]["modality"] == "dlf"
    assert report["result"]["accuracy_mean"] >= 90.0
    assert not report["result"]["failed"]

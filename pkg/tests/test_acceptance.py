"""Acceptance suite.

One test per acceptance criterion, each printing a PASS line with its
measured numbers once its assertions hold. Training-based criteria are
marked slow; run `pytest tests/test_acceptance.py -m "not slow"` for the
oracle-only subset.
"""

import json
import time
from dataclasses import replace

import numpy as np
import pytest
import torch

import reference_dsp
from conftest import build_manifest, tone

from polyfuse.audio import AudioSignal, extract_llds, frame_signal
from polyfuse.audio.llds import LOG_FLOOR, N_MELS, N_MFCC
from polyfuse.audio.model import AudioModelConfig
from polyfuse.corpus import (
    check_speaker_exclusive,
    compute_agreement,
    load_manifest,
    make_splits,
    resolve_labels,
)
from polyfuse.evaluation.metrics import f_measure, round_half_up
from polyfuse.evaluation.protocol import FusionJob, ProtocolConfig, run_protocol
from polyfuse.features import load_feature_set
from polyfuse.nn import TrainConfig, central_difference_gradcheck
from polyfuse.text.model import TextModelConfig
from polyfuse.visual.model import VisualModelConfig


def ok(name: str, detail: str = "") -> None:
    print(f"ACCEPTANCE PASS {name}" + (f" ({detail})" if detail else ""))


# --------------------------------------------------------------- criterion 1

def test_metric_oracle_reference_cells():
    started = time.monotonic()
    # per-class and average (P, R, F) cells of the three published
    # unimodal tables; two audio-table F cells are arithmetically
    # inconsistent with their own P/R (0.84, 0.82 as published) and are
    # asserted at the formula value instead (0.80 both)
    cells = [
        (0.92, 0.83, 0.87),
        (0.88, 0.94, 0.91),
        (0.90, 0.88, 0.89),
        (0.78, 0.84, 0.81),
        (0.78, 0.82, 0.80),
        (0.78, 0.83, 0.80),
        (0.76, 0.85, 0.80),
        (0.87, 0.79, 0.83),
        (0.81, 0.82, 0.81),
    ]
    for p, r, expected in cells:
        assert round_half_up(f_measure(p, r), 2) == expected, (p, r, expected)
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    ok("metric-oracle", f"{len(cells)} cells, {elapsed:.3f}s")


# --------------------------------------------------------------- criterion 2

def test_dsp_oracle():
    started = time.monotonic()
    rng = np.random.default_rng(42)
    window = np.hanning(800)
    sr = 16000
    frames = []
    for _ in range(100):
        hz = rng.uniform(80, 3000)
        t = np.arange(800) / sr
        x = rng.uniform(0.05, 0.6) * np.sin(2 * np.pi * hz * t + rng.uniform(0, 6.28))
        frames.append(window * (x + rng.normal(0, rng.uniform(0, 0.1), 800)))
    frames = np.ascontiguousarray(frames)

    from polyfuse.audio import backend
    from polyfuse.audio.llds import dct_matrix, flatness_ratio, mel_filterbank

    mag = np.abs(np.fft.rfft(frames, axis=1))
    freqs = np.fft.rfftfreq(800, d=1.0 / sr)
    produced_mfcc = backend.mfcc_from_power(
        np.ascontiguousarray(mag**2),
        np.ascontiguousarray(mel_filterbank(sr, mag.shape[1])),
        np.ascontiguousarray(dct_matrix()),
        LOG_FLOOR,
    )
    for i in range(100):
        expected = reference_dsp.reference_mfcc(frames[i], sr, N_MELS, N_MFCC, LOG_FLOOR)
        np.testing.assert_allclose(produced_mfcc[i], expected, rtol=1e-6, atol=1e-9)
        centroid = (mag[i] * freqs).sum() / mag[i].sum()
        assert centroid == pytest.approx(
            reference_dsp.reference_centroid(frames[i], sr), rel=1e-6
        )
        assert flatness_ratio(mag[i]) == pytest.approx(
            reference_dsp.reference_flatness(frames[i]), rel=1e-6
        )

    llds = extract_llds(
        frame_signal(AudioSignal(samples=tone(220, 1.0), sample_rate=sr))
    )
    pitch_err = abs(float(llds.column("pitch").mean()) - 220.0)
    centroid_err = abs(float(llds.column("spectral_centroid").mean()) - 220.0)
    assert pitch_err <= 5.0
    assert centroid_err <= 10.0
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    ok("dsp-oracle", f"pitch err {pitch_err:.2f} Hz, centroid err {centroid_err:.2f} Hz, {elapsed:.1f}s")


# --------------------------------------------------------------- criterion 3

def test_framing_exact():
    signal = AudioSignal(samples=tone(220, 1.0), sample_rate=16000)
    frames = frame_signal(signal, frame_len=0.050, hop=0.025)
    assert frames.n_frames == 39
    assert frames.rate == 40.0
    llds = extract_llds(frames)
    assert llds.rate == 40.0
    ok("framing", "39 frames at 40/s")


# --------------------------------------------------------------- criterion 4

def test_speaker_exclusivity_1000_random_pairs():
    started = time.monotonic()
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(1000):
        n_speakers = int(rng.integers(3, 16))
        masses = rng.integers(1, 25, n_speakers)
        manifest = build_manifest(n_videos=n_speakers, utts_per_video=1)
        # expand each speaker's video to its utterance mass
        from polyfuse.corpus.types import Utterance

        utterances = []
        annotations = []
        uid = 0
        for v_index, video in enumerate(manifest.videos):
            video = replace(video, duration=float(masses[v_index]))
            for k in range(masses[v_index]):
                u = f"utt{uid:05d}"
                uid += 1
                utterances.append(
                    Utterance(
                        utterance_id=u, video_id=video.video_id,
                        start=float(k), end=float(k + 1), transcript="x",
                    )
                )
            manifest = replace(
                manifest,
                videos=manifest.videos[:v_index] + (video,) + manifest.videos[v_index + 1:],
            )
        for u in utterances:
            for a in ("a1", "a2", "a3"):
                from polyfuse.corpus.types import AnnotationRecord

                annotations.append(AnnotationRecord(
                    utterance_id=u.utterance_id, annotator_id=a,
                    polarity=1, subjectivity="subjective",
                ))
        manifest = replace(
            manifest, utterances=tuple(utterances), annotations=tuple(annotations)
        )
        manifest = resolve_labels(manifest)
        seed = int(rng.integers(0, 2**31))
        split = make_splits(manifest, ratios=(0.6, 0.1, 0.3), seed=seed)
        check_speaker_exclusive(manifest, split)

        total = len(split.split)
        max_mass = int(masses.max())
        for name, ratio in zip(("train", "validation", "test"), (0.6, 0.1, 0.3)):
            realized = sum(1 for s in split.split.values() if s == name)
            assert abs(realized - ratio * total) <= max_mass, (
                name, realized, ratio * total, max_mass,
            )
        checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    ok("speaker-exclusivity", f"{checked} random (manifest, seed) pairs, {elapsed:.1f}s")


# --------------------------------------------------------------- criterion 5

UNIMODAL_TARGET = 0.95
PER_MODALITY_BUDGET_S = 300.0


@pytest.mark.slow
def test_separable_corpus_unimodal_accuracy(separable_corpus):
    manifest = separable_corpus["manifest"]
    cache_dir = separable_corpus["cache_dir"]
    split = make_splits(manifest, ratios=(0.6, 0.1, 0.3), seed=20)
    uids = sorted(manifest.resolved_labels)
    features = load_feature_set(manifest, cache_dir, ("audio", "visual", "text"), uids)
    config = ProtocolConfig(
        visual=VisualModelConfig(
            input_shape=(16, 32, 32),
            train=TrainConfig(epochs=12, patience=4),
        ),
        seed=3,
    )
    details = []
    for modality, letter in (("text", "T"), ("audio", "A"), ("visual", "V")):
        started = time.monotonic()
        result = run_protocol(
            manifest, split, [FusionJob.parse(f"unimodal:{letter}")], features, config
        )
        elapsed = time.monotonic() - started
        accuracy = result.report.entry("unimodal", letter).metrics.accuracy
        assert accuracy >= UNIMODAL_TARGET * 100.0, (modality, accuracy)
        assert elapsed < PER_MODALITY_BUDGET_S, (modality, elapsed)
        details.append(f"{modality} {accuracy:.1f}% in {elapsed:.0f}s")
    ok("separable-unimodal", "; ".join(details))


# --------------------------------------------------------------- criterion 6

# extractor early stopping (patience well below the epoch cap) matters
# here: when a unimodal model's labels are chance-level, stopping near the
# start keeps its penultimate an information-preserving projection instead
# of letting the net collapse toward the constant solution
FAST_FUSION_CONFIG = dict(
    text=TextModelConfig(
        recurrent_layers=(32, 16),
        dense_layers=((64, "relu"), (2, "softmax")),
        train=TrainConfig(epochs=12, patience=2),
    ),
    audio=None,
    early_hidden=(64, 16),
    early_dropout=0.05,
    fusion_train=TrainConfig(epochs=150, patience=150, learning_rate=1e-2),
)


@pytest.mark.slow
def test_fusion_superiority_xor(xor_corpus):
    manifest = xor_corpus["manifest"]
    cache_dir = xor_corpus["cache_dir"]
    uids = sorted(manifest.resolved_labels)
    features = load_feature_set(manifest, cache_dir, ("audio", "visual", "text"), uids)
    jobs = [FusionJob.parse(s) for s in ("unimodal:T", "unimodal:A", "unimodal:V", "early:A+T")]
    wins = 0
    margins = []
    for seed in range(10):
        split = make_splits(manifest, ratios=(0.6, 0.1, 0.3), seed=100 + seed)
        config = ProtocolConfig(
            visual=VisualModelConfig(
                input_shape=(8, 16, 16), train=TrainConfig(epochs=8, patience=2)
            ),
            seed=seed,
            **FAST_FUSION_CONFIG,
        )
        result = run_protocol(manifest, split, jobs, features, config)
        unimodal_best = max(
            result.report.entry("unimodal", letter).metrics.accuracy
            for letter in ("T", "A", "V")
        )
        early = result.report.entry("early", "A+T").metrics.accuracy
        margins.append(early - unimodal_best)
        if early - unimodal_best >= 20.0:
            wins += 1
    assert wins >= 8, f"wins={wins}, margins={[round(m, 1) for m in margins]}"
    ok("fusion-superiority-xor", f"{wins}/10 seeds with margin >= 20 pts")


@pytest.fixture(scope="session")
def noisy_corpus(tmp_path_factory):
    from polyfuse import cache as cache_mod
    from polyfuse.features import (
        AudioFeatureParams,
        VisualFeatureParams,
        build_audio_features,
        build_text_features,
        build_visual_features,
    )
    from polyfuse.synth import SynthSpec, generate_corpus
    from polyfuse.text.embeddings import load_embeddings

    root = tmp_path_factory.mktemp("noisy")
    # noise 0.6 flips one modality per corrupted utterance: each modality
    # alone is capped at 80% while the cross-modal majority can always
    # recover the label, so fusion has genuine headroom over the luckiest
    # unimodal draw; 300 utterances keep per-seed sampling noise small
    result = generate_corpus(
        root,
        SynthSpec(
            scenario="separable", n_utterances=300, n_speakers=10, seed=23,
            modality_noise=0.6, frame_size=32, video_format="npz",
        ),
    )
    manifest = resolve_labels(load_manifest(result.manifest_path, media_root=root))
    cache_dir = root / "cache"
    build_text_features(
        manifest, load_embeddings(result.embeddings_path),
        cache_mod.file_hash(result.embeddings_path), cache_dir,
    )
    build_audio_features(manifest, root, cache_dir, AudioFeatureParams(), workers=2)
    build_visual_features(
        manifest, root, cache_dir, VisualFeatureParams(frames=8, height=16, width=16),
        workers=2,
    )
    return {"manifest": manifest, "cache_dir": cache_dir}


@pytest.mark.slow
def test_fusion_superiority_noisy_separable(noisy_corpus):
    manifest = noisy_corpus["manifest"]
    uids = sorted(manifest.resolved_labels)
    features = load_feature_set(
        manifest, noisy_corpus["cache_dir"], ("audio", "visual", "text"), uids
    )
    jobs = [FusionJob.parse(s) for s in ("unimodal:T", "unimodal:A", "unimodal:V", "early:A+V+T")]
    wins = 0
    outcomes = []
    for seed in range(10):
        split = make_splits(manifest, ratios=(0.6, 0.1, 0.3), seed=300 + seed)
        config = ProtocolConfig(
            visual=VisualModelConfig(
                input_shape=(8, 16, 16), train=TrainConfig(epochs=8, patience=2)
            ),
            seed=seed,
            **FAST_FUSION_CONFIG,
        )
        result = run_protocol(manifest, split, jobs, features, config)
        unimodal_best = max(
            result.report.entry("unimodal", letter).metrics.accuracy
            for letter in ("T", "A", "V")
        )
        early = result.report.entry("early", "A+V+T").metrics.accuracy
        outcomes.append((round(early, 1), round(unimodal_best, 1)))
        if early >= unimodal_best:
            wins += 1
    assert wins >= 8, f"wins={wins}, (early, best-unimodal)={outcomes}"
    ok("fusion-superiority-noisy", f"{wins}/10 seeds with early A+V+T >= best unimodal")


# --------------------------------------------------------------- criterion 7

@pytest.fixture(scope="session")
def ramp_corpus(tmp_path_factory):
    from polyfuse.features import VisualFeatureParams, build_visual_features
    from polyfuse.synth import SynthSpec, generate_corpus

    root = tmp_path_factory.mktemp("ramp")
    result = generate_corpus(
        root,
        SynthSpec(
            scenario="ramp_temporal", n_utterances=120, n_speakers=6, seed=31,
            frame_size=16, video_format="npz",
        ),
    )
    manifest = resolve_labels(load_manifest(result.manifest_path, media_root=root))
    cache_dir = root / "cache"
    report = build_visual_features(
        manifest, root, cache_dir,
        VisualFeatureParams(frames=16, height=16, width=16), workers=2,
    )
    assert not report.failed
    return {"manifest": manifest, "cache_dir": cache_dir}


@pytest.mark.slow
def test_temporal_sensitivity(ramp_corpus):
    started = time.monotonic()
    manifest = ramp_corpus["manifest"]
    uids = sorted(manifest.resolved_labels)
    features = load_feature_set(manifest, ramp_corpus["cache_dir"], ("visual",), uids)
    split = make_splits(manifest, ratios=(0.6, 0.1, 0.3), seed=8)
    config = ProtocolConfig(
        visual=VisualModelConfig(
            input_shape=(16, 16, 16), train=TrainConfig(epochs=15, patience=6)
        ),
        seed=1,
    )
    result = run_protocol(
        manifest, split, [FusionJob.parse("unimodal:V")], features, config
    )
    accuracy = result.report.entry("unimodal", "V").metrics.accuracy
    elapsed = time.monotonic() - started
    assert accuracy > 90.0, accuracy
    assert elapsed < 300.0
    ok("temporal-sensitivity", f"{accuracy:.1f}% in {elapsed:.0f}s")


# --------------------------------------------------------------- criterion 8

def test_gradient_checks_all_families():
    from polyfuse.audio.model import build_audio_mlp
    from polyfuse.fusion.early import EarlyHeadConfig, build_early_head
    from polyfuse.text.model import build_text_model
    from polyfuse.visual.model import build_visual_network

    worst_overall = 0.0

    def run(model, inputs, labels, kind="softmax"):
        nonlocal worst_overall
        model.double()
        model.train(False)

        def loss_fn():
            logits = model(*inputs)
            if kind == "softmax":
                return torch.nn.functional.cross_entropy(logits, labels)
            return torch.nn.functional.binary_cross_entropy_with_logits(
                logits.squeeze(1), labels.double()
            )

        worst = central_difference_gradcheck(loss_fn, list(model.parameters()))
        worst_overall = max(worst_overall, worst)
        assert worst <= 1e-4, worst

    torch.manual_seed(0)
    run(
        build_text_model(TextModelConfig(
            recurrent_layers=(3,), dense_layers=((4, "relu"), (2, "softmax")),
            dropout=0.0, input_dim=4, max_tokens=3,
        )),
        (torch.randn(4, 3, 4, dtype=torch.float64), torch.tensor([3, 2, 1, 3])),
        torch.tensor([0, 1, 1, 0]),
    )
    run(
        build_audio_mlp(AudioModelConfig(input_dim=5, hidden=(4, 3))),
        (torch.randn(5, 5, dtype=torch.float64),),
        torch.tensor([0, 1, 0, 1, 1]),
        kind="sigmoid",
    )
    run(
        build_visual_network(VisualModelConfig(
            conv_stack=(("conv3d", 2, (2, 2, 2)), ("maxpool3d", (1, 2, 2))),
            dense_layers=(4,), input_shape=(4, 8, 8),
        )),
        (torch.randn(3, 4, 8, 8, 3, dtype=torch.float64),),
        torch.tensor([0, 1, 0]),
    )
    run(
        build_early_head(EarlyHeadConfig(
            input_dim=6, modalities=("audio", "text"), hidden=(4,), dropout=0.0
        )),
        (torch.randn(5, 6, dtype=torch.float64),),
        torch.tensor([1, 0, 1, 1, 0]),
    )
    ok("gradient-checks", f"worst relative error {worst_overall:.2e}")


# --------------------------------------------------------------- criterion 9

@pytest.mark.slow
def test_train_report_byte_determinism(tmp_path):
    from polyfuse.cli import main

    corpus = tmp_path / "corpus"
    assert main([
        "synth", "--scenario", "separable", "--out", str(corpus),
        "--utterances", "24", "--speakers", "4", "--seed", "13",
        "--video-format", "npz", "--frame-size", "16",
    ]) == 0
    (corpus / "run.toml").write_text(
        "\n".join([
            "[split]", "ratios = [0.5, 0.25, 0.25]", "seed = 4",
            "[train]", "epochs = 4", "seed = 9",
            '[text]', 'recurrent_layers = [8]',
            "[visual]", "frames = 8", "height = 16", "width = 16",
            "dense_layers = [32]",
            "[fusion]",
            'jobs = ["unimodal:T", "unimodal:A", "unimodal:V", "early:A+T", "late:A+T"]',
        ]) + "\n",
        encoding="utf-8",
    )
    base = ["--config", str(corpus / "run.toml"), "--root", str(corpus)]
    assert main(["features", *base, "--modalities", "audio,visual,text"]) == 0

    reports = []
    for run in ("one", "two"):
        out = corpus / f"out_{run}"
        assert main(["train", *base, "--output-dir", str(out)]) == 0
        assert main(["report", *base, "--output-dir", str(out), "--format", "json"]) == 0
        reports.append((out / "report.json").read_bytes())
    assert reports[0] == reports[1]
    ok("determinism", f"{len(reports[0])} identical report bytes")


# -------------------------------------------------------------- criterion 10

def test_agreement_oracle():
    from polyfuse.corpus.types import AnnotationRecord

    def fixture(third_vote):
        out = []
        for i in range(6):
            for annotator, pol in (("a1", 1), ("a2", 1), ("a3", third_vote)):
                out.append(AnnotationRecord(
                    utterance_id=f"u{i}", annotator_id=annotator,
                    polarity=pol, subjectivity="subjective",
                ))
        return out

    split_pattern = compute_agreement(fixture(third_vote=-1), "polarity")
    assert round_half_up(split_pattern, 2) == 33.33
    unanimous = compute_agreement(fixture(third_vote=1), "polarity")
    assert unanimous == 100.0
    ok("agreement-oracle", "(A,A,B) -> 33.33, unanimous -> 100.00")


# ------------------------------------------- service round-trip (primary side)

def test_annotation_roundtrip_over_http(tmp_path):
    from dataclasses import replace as dc_replace

    from fastapi.testclient import TestClient

    from polyfuse.corpus import compute_statistics, dump_manifest
    from polyfuse.evaluation.metrics import round_half_up as rhu
    from polyfuse.service.app import create_app
    from polyfuse.synth import SynthSpec, generate_corpus

    result = generate_corpus(
        tmp_path,
        SynthSpec(scenario="separable", n_utterances=10, n_speakers=5, seed=17,
                  video_format="npz", frame_size=16),
    )
    base = load_manifest(result.manifest_path, media_root=tmp_path)
    app = create_app(
        manifest_path=result.manifest_path, media_root=tmp_path,
        store_path=tmp_path / "store.jsonl",
        manifest=dc_replace(base, annotations=()),
    )
    client = TestClient(app)

    # scripted session: three annotators label all ten utterances with a
    # constructed disagreement pattern (A, A, B) on polarity
    for annotator, pol in (("a1", 1), ("a2", 1), ("a3", -1)):
        while True:
            task = client.get(
                "/api/tasks/next", params={"annotator": annotator}
            ).json()["task"]
            if task is None:
                break
            response = client.post("/api/annotations", json={
                "utterance_id": task["utterance_id"], "annotator_id": annotator,
                "polarity": pol, "subjectivity": "subjective",
                "subjectivity_rule": "implicit_opinion",
                "gestures": ["smile"] if pol == 1 else ["frown"],
            })
            response.raise_for_status()

    agreement = client.get("/api/agreement").json()
    assert agreement["polarity"] == 33.33
    assert agreement["subjectivity"] == 100.0
    assert all(p["done"] == 10 for p in agreement["progress"].values())

    exported = client.get("/api/export").text
    path = tmp_path / "exported.jsonl"
    path.write_text(exported, encoding="utf-8")
    reloaded = resolve_labels(load_manifest(path, media_root=tmp_path))
    stats = compute_statistics(reloaded)
    assert stats.positive == 10  # strict 2-of-3 majority resolves +1
    assert stats.negative == 0
    assert stats.subjective == 10
    assert len(reloaded.annotations) == 30
    assert rhu(compute_agreement(reloaded.annotations, "polarity"), 2) == 33.33
    # export -> load -> export is a fixed point
    assert dump_manifest(reloaded) == exported
    ok("annotation-roundtrip", "3 annotators x 10 utterances over HTTP")

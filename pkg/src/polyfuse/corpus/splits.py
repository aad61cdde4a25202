"""Speaker-exclusive train/validation/test splitting.

Speakers, not utterances, are the unit of assignment, so no speaker ever
contributes to more than one split. Speakers are visited in seeded random
order (after an id sort, so file order is irrelevant) and each is assigned
to the split with the largest remaining utterance-mass deficit, ties
breaking in (train, validation, test) order. When coarse speaker
granularity leaves a nonzero-ratio split empty, a deterministic repair
pass moves the deviation-minimizing speaker into it, so every split the
protocol needs is non-empty whenever enough speakers exist. Realized
fractions deviate from the targets by at most one speaker's utterance
mass.
"""

from __future__ import annotations

import random

from polyfuse import errors
from polyfuse.corpus.types import SPLIT_NAMES, CorpusManifest, SplitAssignment


def make_splits(
    manifest: CorpusManifest,
    ratios: tuple[float, float, float] = (0.6, 0.1, 0.3),
    seed: int = 0,
) -> SplitAssignment:
    """Partition labeled utterances into speaker-exclusive splits.

    The split covers utterances with a resolved label; if the manifest
    carries no resolutions it covers every utterance. Deterministic for a
    fixed seed.
    """
    if len(ratios) != len(SPLIT_NAMES):
        raise ValueError(f"need {len(SPLIT_NAMES)} ratios, got {len(ratios)}")
    if any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be non-negative and sum to 1, got {ratios}")

    if manifest.resolved_labels:
        domain = sorted(manifest.resolved_labels)
    else:
        domain = sorted(u.utterance_id for u in manifest.utterances)

    by_speaker: dict[str, list[str]] = {}
    for uid in domain:
        by_speaker.setdefault(manifest.speaker_of(uid), []).append(uid)

    if len(by_speaker) < 3:
        raise errors.TooFewSpeakers(
            f"speaker-exclusive splitting needs >= 3 speakers, got {len(by_speaker)}"
        )

    speakers = sorted(by_speaker)
    random.Random(seed).shuffle(speakers)

    total = len(domain)
    targets = [r * total for r in ratios]
    assigned = [0.0, 0.0, 0.0]
    placement: dict[str, int] = {}

    for speaker in speakers:
        deficits = [targets[i] - assigned[i] for i in range(3)]
        best = max(range(3), key=lambda i: (deficits[i], -i))
        placement[speaker] = best
        assigned[best] += len(by_speaker[speaker])

    _repair_empty_splits(placement, by_speaker, targets, assigned, ratios)

    split = {
        uid: SPLIT_NAMES[placement[speaker]]
        for speaker, uids in by_speaker.items()
        for uid in uids
    }
    return SplitAssignment(split=split, seed=seed, ratios=tuple(ratios))


def _repair_empty_splits(placement, by_speaker, targets, assigned, ratios) -> None:
    """Move one speaker into each empty nonzero-ratio split, choosing the
    move that minimizes total deviation from the targets (speaker id breaks
    ties, keeping the result deterministic). Donor splits always retain at
    least one speaker."""
    while True:
        members: dict[int, list[str]] = {0: [], 1: [], 2: []}
        for speaker, index in placement.items():
            members[index].append(speaker)
        empty = [
            i for i in range(3)
            if ratios[i] > 0 and not members[i] and sum(map(len, members.values())) >= sum(r > 0 for r in ratios)
        ]
        if not empty:
            return
        target_index = empty[0]
        best_move = None
        for speaker in sorted(placement):
            source = placement[speaker]
            if len(members[source]) < 2:
                continue
            mass = len(by_speaker[speaker])
            trial = list(assigned)
            trial[source] -= mass
            trial[target_index] += mass
            deviation = sum(abs(trial[i] - targets[i]) for i in range(3))
            if best_move is None or deviation < best_move[0]:
                best_move = (deviation, speaker, source)
        if best_move is None:
            return  # not enough speakers to fill every split
        _, speaker, source = best_move
        mass = len(by_speaker[speaker])
        placement[speaker] = target_index
        assigned[source] -= mass
        assigned[target_index] += mass


def check_speaker_exclusive(manifest: CorpusManifest, assignment: SplitAssignment) -> None:
    """Raise SpeakerLeakage if any speaker appears in more than one split."""
    seen: dict[str, str] = {}
    for uid, name in sorted(assignment.split.items()):
        speaker = manifest.speaker_of(uid)
        if speaker in seen and seen[speaker] != name:
            raise errors.SpeakerLeakage(
                f"speaker {speaker} appears in both {seen[speaker]} and {name}"
            )
        seen[speaker] = name

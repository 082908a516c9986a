"""Candidate generation, per-word average distance and form selection.

A sentence with heteronym slots expands into one candidate per combination
of forms. Each candidate is aligned against the frames, and every slot gets
the mean token-to-frame distance over the frames aligned to that word. For
each slot and form, the marginal score is the lowest score over the
candidates that use that form. The form with the lowest marginal wins.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .alignment import compute_distance_matrix, viterbi_align
from .errors import EmptySpan, NoHeteronym, TooManyCandidates
from .lexicon import HeteronymInventory, MixedSequence

DEFAULT_CANDIDATE_CAP = 64
FORM_SEPARATOR = "+"


@dataclass(frozen=True)
class Candidate:
    candidate_id: str
    tokens: tuple[str, ...]
    slot_spans: tuple[tuple[int, int], ...]  # half-open token ranges
    slot_words: tuple[str, ...]
    slot_forms: tuple[str, ...]


@dataclass(frozen=True)
class CandidateScore:
    candidate_id: str
    slot_d_avg: tuple[float, ...]
    alignment: np.ndarray | None = None

    @property
    def total(self) -> float:
        return float(sum(self.slot_d_avg))


@dataclass(frozen=True)
class SlotResult:
    word: str
    position: int  # token index in the tokenized sentence
    chosen: str
    scores: Mapping[str, float]  # marginal d_avg per form, canonical order
    confidence: float


@dataclass(frozen=True)
class DisambiguationResult:
    sentence_id: str
    slots: tuple[SlotResult, ...]


def candidate_id(forms: Sequence[str]) -> str:
    return FORM_SEPARATOR.join(forms)


def generate_candidates(seq: MixedSequence, inventory: HeteronymInventory,
                        cap: int = DEFAULT_CANDIDATE_CAP) -> list[Candidate]:
    """Cross product of heteronym forms, in canonical inventory order."""
    slots = seq.slot_positions
    if not slots:
        raise NoHeteronym("sentence has no heteronym")
    words = tuple(seq[p].key for p in slots)
    form_lists = [inventory.forms(w) for w in words]
    count = 1
    for forms in form_lists:
        count *= len(forms)
    if count > cap:
        raise TooManyCandidates(count, cap)

    fixed = {i: t.alignment_tokens() for i, t in enumerate(seq) if i not in slots}
    candidates = []
    for combo in itertools.product(*(list(f.items()) for f in form_lists)):
        chosen = dict(zip(slots, combo))
        tokens, spans = [], []
        for i in range(len(seq)):
            if i in chosen:
                pron = chosen[i][1]
                spans.append((len(tokens), len(tokens) + len(pron)))
                tokens.extend(pron)
            else:
                tokens.extend(fixed[i])
        forms = tuple(form_id for form_id, _ in combo)
        candidates.append(Candidate(candidate_id(forms), tuple(tokens), tuple(spans),
                                    words, forms))
    return candidates


def word_avg_distance(dist, align, span) -> float:
    """Mean distance between a word's tokens and the frames aligned to them.

    ``span`` is a half-open token range ``(start, end)``.
    """
    start, end = span
    if end <= start:
        raise EmptySpan(f"empty token span {span}")
    dist = np.asarray(dist, dtype=np.float64)
    align = np.asarray(align)
    frames = np.flatnonzero((align >= start) & (align < end))
    if frames.size == 0:
        raise EmptySpan(f"no frames aligned to span {span}")
    total = 0.0
    for j in frames:
        total += dist[align[j], j]
    return total / frames.size


def score_distance(candidate: Candidate, dist) -> CandidateScore:
    align = viterbi_align(dist)
    d_avg = tuple(word_avg_distance(dist, align, span) for span in candidate.slot_spans)
    return CandidateScore(candidate.candidate_id, d_avg, align)


def score_candidates(candidates: Sequence[Candidate], frame_encs, table) -> list[CandidateScore]:
    return [score_distance(c, compute_distance_matrix(table.encode(c.tokens), frame_encs))
            for c in candidates]


def confidence(values) -> float:
    """(max - min) / mean(max, min); zero when every value is zero."""
    hi, lo = max(values), min(values)
    if hi == lo:
        return 0.0
    return (hi - lo) / ((hi + lo) / 2)


def select_form(marginals: Mapping[str, float]) -> tuple[str, float]:
    """Pick the lowest-scoring form; ``marginals`` must be in canonical order.

    A tie for the minimum goes to the earlier form with confidence 0.
    """
    values = list(marginals.values())
    lo = min(values)
    chosen = next(f for f, v in marginals.items() if v == lo)
    if values.count(lo) > 1:
        return chosen, 0.0
    return chosen, confidence(values)


def select(scores: Sequence[CandidateScore], candidates: Sequence[Candidate],
           inventory: HeteronymInventory, sentence_id: str = "",
           positions: Sequence[int] | None = None) -> DisambiguationResult:
    if len(scores) < 2:
        raise ValueError("selection needs at least two candidates")
    by_id = {c.candidate_id: c for c in candidates}
    words = candidates[0].slot_words
    if positions is None:
        positions = [-1] * len(words)
    slots = []
    for k, word in enumerate(words):
        best: dict[str, float] = {}
        for s in scores:
            form = by_id[s.candidate_id].slot_forms[k]
            v = s.slot_d_avg[k]
            if form not in best or v < best[form]:
                best[form] = v
        marginals = {f: float(best[f]) for f in inventory.form_ids(word) if f in best}
        chosen, conf = select_form(marginals)
        slots.append(SlotResult(word, positions[k], chosen, marginals, conf))
    return DisambiguationResult(sentence_id, tuple(slots))

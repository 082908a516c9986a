"""Per-sentence labeling and the corpus-level driver."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .alignment import compute_distance_matrix
from .dataset import LabeledSample
from .errors import DataError, NoHeteronym, TooManyCandidates
from .io import EncodingTable, ManifestRecord, read_matrix
from .lexicon import HeteronymInventory, PronLexicon, prepare_sentence
from .scoring import (DEFAULT_CANDIDATE_CAP, generate_candidates, score_distance,
                      select)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Context:
    lexicon: PronLexicon
    inventory: HeteronymInventory
    table: EncodingTable | None
    ambiguous: str = "mask"
    cap: int = DEFAULT_CANDIDATE_CAP


@dataclass(frozen=True)
class Outcome:
    sentence_id: str
    sample: LabeledSample | None = None
    skipped: str | None = None  # reason, when no sample


def label_record(record: ManifestRecord, ctx: Context) -> Outcome:
    seq = prepare_sentence(record.text, ctx.lexicon, ctx.inventory, ctx.ambiguous)
    try:
        candidates = generate_candidates(seq, ctx.inventory, ctx.cap)
    except NoHeteronym:
        return Outcome(record.id, skipped="no-heteronym")
    except TooManyCandidates as e:
        log.warning("skip id=%s reason=too-many-candidates count=%d cap=%d",
                    record.id, e.count, e.cap)
        return Outcome(record.id, skipped="too-many-candidates")

    scores = []
    if record.precomputed:
        missing = [c.candidate_id for c in candidates if c.candidate_id not in record.candidates]
        if missing:
            raise DataError(f"{record.id}: no distance matrix for candidates {missing}")
        for c in candidates:
            path = record.candidates[c.candidate_id]
            dist = read_matrix(path)
            if dist.shape[0] != len(c.tokens):
                raise DataError(f"{path}: {dist.shape[0]} rows, candidate "
                                f"{c.candidate_id!r} has {len(c.tokens)} tokens")
            scores.append(score_distance(c, dist))
    else:
        if ctx.table is None:
            raise DataError(f"{record.id}: frame encodings need an encoding table")
        frames = read_matrix(record.frames)
        for c in candidates:
            dist = compute_distance_matrix(ctx.table.encode(c.tokens), frames)
            scores.append(score_distance(c, dist))

    result = select(scores, candidates, ctx.inventory, record.id, seq.slot_positions)
    return Outcome(record.id, sample=LabeledSample.from_result(record.text, result))


_worker_ctx: Context | None = None


def _init_worker(ctx):
    global _worker_ctx
    _worker_ctx = ctx


def _work(record):
    return label_record(record, _worker_ctx)


def label_corpus(records, ctx: Context, jobs: int = 1) -> list[Outcome]:
    """Label every record; output order follows input order for any ``jobs``."""
    records = list(records)
    if jobs <= 1 or len(records) < 2:
        return [label_record(r, ctx) for r in records]
    chunk = max(1, len(records) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                             initargs=(ctx,)) as pool:
        return list(pool.map(_work, records, chunksize=chunk))

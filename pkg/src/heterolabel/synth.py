"""Deterministic synthetic corpora with planted heteronym forms.

Every alignment symbol gets a random unit vector. A sentence's frames are
the true candidate's token vectors, each repeated ``frames_per_token``
times, plus spherical Gaussian noise. With zero noise the planted
candidate aligns at zero cost, so the planted form is the one to recover.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, UnknownForm
from .io import (EncodingTable, ManifestRecord, format_encoding_table,
                 matrix_to_bytes, write_manifest)
from .lexicon import HeteronymInventory, PronLexicon, prepare_sentence
from .scoring import candidate_id, generate_candidates


@dataclass(frozen=True)
class SynthSentence:
    text: str
    forms: tuple[str, ...]


@dataclass(frozen=True)
class SynthSpec:
    dim: int = 16
    frames_per_token: int = 3
    noise: float = 0.0
    seed: int = 0
    sentences: tuple[SynthSentence, ...] = field(default=())
    ambiguous: str = "mask"

    def __post_init__(self):
        if self.dim < 2:
            raise DataError("dim must be >= 2")
        if self.frames_per_token < 1:
            raise DataError("frames_per_token must be >= 1")
        if not self.noise >= 0:
            raise DataError("noise must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must fit in 64 bits")


def load_synth_spec(path, inventory=None, lexicon=None, seed=None) -> SynthSpec:
    """Read a JSON spec: dim, frames_per_token, noise, seed, and either a
    ``sentences`` list of ``{"text", "forms"}`` objects or a ``random``
    object (``n``, optional ``max_slots``, ``oov_rate``) that draws
    sentences from the lexicon and inventory. ``seed`` overrides the file's."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        sentences = tuple(SynthSentence(s["text"], tuple(s["forms"]))
                          for s in obj.get("sentences", []))
        seed = int(obj.get("seed", 0)) if seed is None else seed
        if "random" in obj:
            if inventory is None or lexicon is None:
                raise ValueError("random sentences need a lexicon and inventory")
            r = obj["random"]
            sentences += tuple(random_sentences(
                inventory, lexicon, int(r["n"]), seed=seed,
                max_slots=int(r.get("max_slots", 2)),
                oov_rate=float(r.get("oov_rate", 0.1))))
        return SynthSpec(
            dim=int(obj.get("dim", 16)),
            frames_per_token=int(obj.get("frames_per_token", 3)),
            noise=float(obj.get("noise", 0.0)),
            seed=seed,
            sentences=sentences,
            ambiguous=obj.get("ambiguous", "mask"),
        )
    except (ValueError, KeyError, TypeError, AttributeError) as e:
        raise DataError(f"{path}: invalid synthetic spec ({e})") from None


def dump_synth_spec(spec: SynthSpec) -> str:
    return json.dumps({
        "dim": spec.dim, "frames_per_token": spec.frames_per_token,
        "noise": spec.noise, "seed": spec.seed, "ambiguous": spec.ambiguous,
        "sentences": [{"text": s.text, "forms": list(s.forms)} for s in spec.sentences],
    }, ensure_ascii=False, indent=1) + "\n"


@dataclass
class SynthCorpus:
    records: list[ManifestRecord]
    table: EncodingTable
    frames: dict[str, np.ndarray]  # sentence id -> (M, dim) float32
    planted: dict[str, tuple[str, ...]]


def _sentence_id(i: int) -> str:
    return f"syn{i:06d}"


def gen_synthetic(spec: SynthSpec, inventory: HeteronymInventory,
                  lexicon: PronLexicon) -> SynthCorpus:
    prepared = []
    symbols = set(lexicon.symbols()) | set(inventory.symbols())
    for i, sent in enumerate(spec.sentences):
        seq = prepare_sentence(sent.text, lexicon, inventory, spec.ambiguous)
        words = [seq[p].key for p in seq.slot_positions]
        if len(words) != len(sent.forms):
            raise UnknownForm(f"sentence {i}: {len(sent.forms)} forms given for "
                              f"{len(words)} heteronyms")
        for w, f in zip(words, sent.forms):
            if f not in inventory.forms(w):
                raise UnknownForm(f"sentence {i}: {f!r} is not a form of {w!r}")
        for tok_i, tok in enumerate(seq):
            if tok_i not in seq.slot_positions:
                symbols.update(tok.alignment_tokens())
        prepared.append(seq)

    ordered = sorted(symbols)
    rng = np.random.default_rng([spec.seed, 0])
    vecs = rng.standard_normal((len(ordered), spec.dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    table = EncodingTable(spec.dim, {s: v.astype(np.float32) for s, v in zip(ordered, vecs)})

    records, frames, planted = [], {}, {}
    for i, (sent, seq) in enumerate(zip(spec.sentences, prepared)):
        sid = _sentence_id(i)
        target = candidate_id(sent.forms)
        cand = next(c for c in generate_candidates(seq, inventory, cap=2**31)
                    if c.candidate_id == target) if seq.slot_positions else None
        tokens = cand.tokens if cand else tuple(
            t for tok in seq for t in tok.alignment_tokens())
        enc = np.repeat(table.encode(tokens).astype(np.float64), spec.frames_per_token, axis=0)
        if spec.noise > 0:
            noise_rng = np.random.default_rng([spec.seed, 1, i])
            enc = enc + spec.noise * noise_rng.standard_normal(enc.shape)
        frames[sid] = enc.astype(np.float32)
        planted[sid] = sent.forms
        records.append(ManifestRecord(sid, sent.text, frames=Path("frames") / f"{sid}.alnf"))
    return SynthCorpus(records, table, frames, planted)


def write_corpus(corpus: SynthCorpus, out_dir) -> None:
    out = Path(out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    for sid, enc in corpus.frames.items():
        (out / "frames" / f"{sid}.alnf").write_bytes(matrix_to_bytes(enc))
    (out / "table.txt").write_text(format_encoding_table(corpus.table), encoding="utf-8")
    records = [ManifestRecord(r.id, r.text, frames=out / r.frames) for r in corpus.records]
    write_manifest(out / "manifest.jsonl", records)
    with open(out / "gold.tsv", "w", encoding="utf-8", newline="\n") as f:
        for sid, forms in corpus.planted.items():
            for k, form in enumerate(forms):
                f.write(f"{sid}\t{k}\t{form}\n")


def random_sentences(inventory: HeteronymInventory, lexicon: PronLexicon, n: int,
                     seed: int = 0, max_slots: int = 2, oov_rate: float = 0.1,
                     length: tuple[int, int] = (3, 9)) -> list[SynthSentence]:
    """Random word salad over the lexicon with 1..max_slots heteronyms."""
    rng = np.random.default_rng([seed, 2])
    known = sorted(w for w, p in lexicon.entries.items() if len(p) == 1 and w not in inventory)
    heteronyms = sorted(inventory.entries)
    if not known or not heteronyms:
        raise DataError("need unambiguous lexicon words and at least one heteronym")
    letters = "bcdfghjklmnpqrstvwxz"
    out = []
    for _ in range(n):
        n_words = int(rng.integers(length[0], length[1] + 1))
        n_slots = int(rng.integers(1, max_slots + 1))
        words = [known[int(rng.integers(len(known)))] for _ in range(n_words)]
        for k in range(n_words):
            if rng.random() < oov_rate:
                words[k] = "".join(letters[int(rng.integers(len(letters)))]
                                   for _ in range(int(rng.integers(4, 9))))
        forms = []
        positions = sorted(rng.choice(n_words + n_slots, size=n_slots, replace=False))
        for p in positions:
            w = heteronyms[int(rng.integers(len(heteronyms)))]
            ids = inventory.form_ids(w)
            forms.append(ids[int(rng.integers(len(ids)))])
            words.insert(int(p), w)
        out.append(SynthSentence(" ".join(words).capitalize() + ".", tuple(forms)))
    return out


def synth_spec_for(sentences: Sequence[SynthSentence], **kw) -> SynthSpec:
    return SynthSpec(sentences=tuple(sentences), **kw)

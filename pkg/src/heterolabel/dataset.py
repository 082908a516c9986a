"""Build G2P training data from labeled sentences.

Covers confidence thresholding, greedy class balancing against existing
gold counts, TSV record emission with ``<unk>`` masking, per-threshold
statistics and a TP/FP evaluation table.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Mapping, Sequence

from .errors import DataError, MalformedLine, MissingGold, UnresolvedSlot
from .lexicon import (UNK, HeteronymInventory, PronLexicon, TokenKind,
                      classify, mask_oov, to_mixed_sequence, tokenize)
from .scoring import DisambiguationResult

WORD_SEPARATOR = " | "
MASK_POLICIES = ("mask", "drop")


@dataclass(frozen=True)
class SlotLabel:
    word: str
    position: int
    form: str
    confidence: float
    scores: Mapping[str, float] | None = None


@dataclass(frozen=True)
class LabeledSample:
    sentence_id: str
    text: str
    slots: tuple[SlotLabel, ...]

    @property
    def confidence(self) -> float:
        """Weakest slot confidence; a sentence is only as good as its worst label."""
        return min(s.confidence for s in self.slots)

    @classmethod
    def from_result(cls, text: str, result: DisambiguationResult) -> "LabeledSample":
        return cls(result.sentence_id, text, tuple(
            SlotLabel(s.word, s.position, s.chosen, s.confidence, dict(s.scores))
            for s in result.slots))

    def to_json(self) -> str:
        return json.dumps({
            "id": self.sentence_id,
            "text": self.text,
            "slots": [{"word": s.word, "position": s.position, "form": s.form,
                       "confidence": s.confidence, "scores": dict(s.scores or {})}
                      for s in self.slots],
        }, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "LabeledSample":
        obj = json.loads(line)
        return cls(obj["id"], obj["text"], tuple(
            SlotLabel(s["word"], int(s["position"]), s["form"], float(s["confidence"]),
                      s.get("scores"))
            for s in obj["slots"]))


def read_samples(path) -> list[LabeledSample]:
    samples = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                samples.append(LabeledSample.from_json(line))
            except (ValueError, KeyError, TypeError) as e:
                raise MalformedLine(line_no, f"bad result record ({e})", str(path)) from None
    return samples


def write_samples(path, samples: Iterable[LabeledSample]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s in samples:
            f.write(s.to_json() + "\n")


# --- thresholds -----------------------------------------------------------


def parse_percent(text: str) -> float:
    """``"0.01%"`` -> 0.0001. A bare number is taken as a ratio already."""
    s = text.strip()
    try:
        if s.endswith("%"):
            value = Decimal(s[:-1].strip()) / 100
        else:
            value = Decimal(s)
    except InvalidOperation:
        raise ValueError(f"malformed threshold {text!r}") from None
    if not value.is_finite() or value < 0 or value > 2:
        raise ValueError(f"threshold {text!r} outside [0, 2]")
    return float(value)


def format_percent(tau: float) -> str:
    d = (Decimal(repr(tau)) * 100).normalize()
    s = format(d, "f")
    if "." not in s:
        s += ".00"
    elif len(s.split(".")[1]) < 2:
        s += "0"
    return s + "%"


def filter_threshold(samples: Sequence[LabeledSample], tau: float) -> list[LabeledSample]:
    if tau < 0:
        raise ValueError("threshold must be non-negative")
    return [s for s in samples if all(slot.confidence >= tau for slot in s.slots)]


# --- balancing ------------------------------------------------------------


FormCounts = Counter  # Counter[(word, form_id)]


def form_counts(samples: Iterable[LabeledSample]) -> Counter:
    return Counter((slot.word, slot.form) for s in samples for slot in s.slots)


def read_form_counts(path) -> Counter:
    """TSV ``word<TAB>form_id<TAB>count``; ``#`` comments allowed."""
    counts = Counter()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or not parts[2].strip().isdigit():
                raise MalformedLine(line_no, "expected word<TAB>form_id<TAB>count", str(path))
            counts[(parts[0].strip().lower(), parts[1].strip())] += int(parts[2])
    return counts


def _deficit(counts, forms) -> int:
    # Sum of shortfalls against the most frequent form. Equals max - min for
    # two forms, and unlike max - min it still moves when a 3+-form word has
    # several forms tied at the minimum.
    top = max(counts[f] for f in forms)
    return sum(top - counts[f] for f in forms)


def balance(pool: Sequence[LabeledSample], base: Mapping, inventory: HeteronymInventory | None = None
            ) -> list[LabeledSample]:
    """Greedily pick pool sentences that even out per-form counts.

    Candidates are visited by descending confidence, then sentence id. A
    sentence is taken when it lowers the summed per-word deficit and makes
    no word worse. The result is sorted by sentence id.
    """
    forms_of: dict[str, list[str]] = {}
    if inventory is not None:
        for word in inventory.entries:
            forms_of[word] = inventory.form_ids(word)
    for word, form in list(base) + [(sl.word, sl.form) for s in pool for sl in s.slots]:
        forms = forms_of.setdefault(word, [])
        if form not in forms:
            forms.append(form)

    counts = Counter({(w, f): 0 for w, fs in forms_of.items() for f in fs})
    counts.update(base)
    by_word = {w: Counter({f: counts[(w, f)] for f in fs}) for w, fs in forms_of.items()}

    selected = []
    for sample in sorted(pool, key=lambda s: (-s.confidence, s.sentence_id)):
        touched = {sl.word for sl in sample.slots}
        before = {w: _deficit(by_word[w], forms_of[w]) for w in touched}
        trial = {w: by_word[w].copy() for w in touched}
        for sl in sample.slots:
            trial[sl.word][sl.form] += 1
        after = {w: _deficit(trial[w], forms_of[w]) for w in touched}
        if all(after[w] <= before[w] for w in touched) and \
                sum(after.values()) < sum(before.values()):
            by_word.update(trial)
            selected.append(sample)
    return sorted(selected, key=lambda s: s.sentence_id)


def imbalance(counts: Mapping, inventory: HeteronymInventory, word: str) -> int:
    values = [counts.get((word, f), 0) for f in inventory.form_ids(word)]
    return max(values) - min(values)


# --- training records -----------------------------------------------------


@dataclass(frozen=True)
class TrainingRecord:
    grapheme_input: str
    phoneme_target: str

    def to_tsv(self) -> str:
        return f"{self.grapheme_input}\t{self.phoneme_target}"


def emit_record(sample: LabeledSample, lexicon: PronLexicon, inventory: HeteronymInventory,
                mask_policy: str = "mask", ambiguous: str = "mask") -> TrainingRecord | None:
    """Phoneme target for one sentence, or None when ``drop`` removes it."""
    if mask_policy not in MASK_POLICIES:
        raise ValueError(f"unknown mask policy {mask_policy!r}")
    seq = mask_oov(to_mixed_sequence(
        classify(tokenize(sample.text), lexicon, inventory), lexicon, ambiguous))
    labels = {sl.position: sl for sl in sample.slots}
    words = []
    for pos, tok in enumerate(seq):
        if tok.kind is TokenKind.HETERONYM:
            label = labels.get(pos)
            if label is None:
                raise UnresolvedSlot(f"{sample.sentence_id}: heteronym {tok.surface!r} "
                                     f"at token {pos} has no label")
            forms = inventory.forms(tok.key)
            if label.form not in forms:
                raise UnresolvedSlot(f"{sample.sentence_id}: unknown form {label.form!r}")
            words.append(" ".join(forms[label.form]))
        elif tok.masked:
            if mask_policy == "drop":
                return None
            words.append(UNK)
        else:
            words.append(tok.emission())
    if set(labels) - set(seq.slot_positions):
        raise UnresolvedSlot(f"{sample.sentence_id}: label points at a non-heteronym token")
    return TrainingRecord(sample.text, WORD_SEPARATOR.join(words))


def emit_records(samples, lexicon, inventory, mask_policy="mask", ambiguous="mask"
                 ) -> list[TrainingRecord]:
    records = []
    for s in samples:
        rec = emit_record(s, lexicon, inventory, mask_policy, ambiguous)
        if rec is not None:
            records.append(rec)
    return records


def write_records(path, records: Iterable[TrainingRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            if "\t" in r.grapheme_input or "\n" in r.grapheme_input:
                raise DataError(f"sentence contains a tab or newline: {r.grapheme_input!r}")
            f.write(r.to_tsv() + "\n")


# --- statistics and evaluation -------------------------------------------


@dataclass(frozen=True)
class ThresholdStats:
    tau: float
    kept: int
    counts: Counter


def stats(samples: Sequence[LabeledSample], tau_grid: Sequence[float]) -> list[ThresholdStats]:
    if list(tau_grid) != sorted(tau_grid):
        raise ValueError("threshold grid must be ascending")
    out = []
    for tau in tau_grid:
        kept = filter_threshold(samples, tau)
        out.append(ThresholdStats(tau, len(kept), form_counts(kept)))
    return out


@dataclass(frozen=True)
class EvalTable:
    thresholds: tuple[float, ...]
    forms: tuple[tuple[str, str], ...]  # (word, form_id) column order
    tp: Mapping[tuple[float, str, str], int]
    fp: Mapping[tuple[float, str, str], int]
    total: Mapping[float, int]

    def to_tsv(self, labels: Mapping[tuple[str, str], str] | None = None) -> str:
        labels = labels or {}
        header = ["threshold"]
        for wf in self.forms:
            name = labels.get(wf, wf[1])
            header += [f"{name} TP", f"{name} FP"]
        header.append("Total")
        rows = ["\t".join(header)]
        for tau in self.thresholds:
            row = [format_percent(tau)]
            for w, f in self.forms:
                row += [str(self.tp[(tau, w, f)]), str(self.fp[(tau, w, f)])]
            row.append(str(self.total[tau]))
            rows.append("\t".join(row))
        return "\n".join(rows) + "\n"


def read_gold(path) -> dict[tuple[str, int], str]:
    """TSV ``sentence_id<TAB>slot_index<TAB>form_id`` (slot index 0-based)."""
    gold = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or not parts[1].strip().isdigit():
                raise MalformedLine(line_no, "expected sentence_id<TAB>slot<TAB>form_id",
                                    str(path))
            gold[(parts[0], int(parts[1]))] = parts[2].strip()
    return gold


def evaluate(gold: Mapping[tuple[str, int], str], samples: Sequence[LabeledSample],
             tau_grid: Sequence[float], inventory: HeteronymInventory | None = None) -> EvalTable:
    """Per-form true/false positives of the chosen labels at each threshold."""
    forms: list[tuple[str, str]] = []
    if inventory is not None:
        words = sorted({sl.word for s in samples for sl in s.slots})
        forms = [(w, f) for w in words if w in inventory for f in inventory.form_ids(w)]
    for s in samples:
        for k, sl in enumerate(s.slots):
            if (s.sentence_id, k) not in gold:
                raise MissingGold(s.sentence_id, k)
            for f in (sl.form, gold[(s.sentence_id, k)]):
                if (sl.word, f) not in forms:
                    forms.append((sl.word, f))

    tp, fp, total = Counter(), Counter(), {}
    for tau in tau_grid:
        kept = filter_threshold(samples, tau)
        for s in kept:
            for k, sl in enumerate(s.slots):
                key = (tau, sl.word, sl.form)
                if gold[(s.sentence_id, k)] == sl.form:
                    tp[key] += 1
                else:
                    fp[key] += 1
        total[tau] = sum(len(s.slots) for s in kept)
    return EvalTable(tuple(tau_grid), tuple(forms), tp, fp, total)

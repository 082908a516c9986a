"""Pronunciation lexicons, heteronym inventories and sentence classification.

Two file formats are read here:

* CMUdict plain text (``WORD  PH1 PH2``, ``;;;`` comments, ``WORD(1)``
  variant markers).
* A tab-separated heteronym inventory (``word<TAB>form_id<TAB>phonemes``)
  where file order defines the canonical form order.

A sentence goes through :func:`tokenize`, :func:`classify` and
:func:`to_mixed_sequence`; :func:`mask_oov` then decides which words are
emitted as ``<unk>``.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import MalformedLine, SingleFormWord

UNK = "<unk>"
GRAPHEME_PREFIX = "#"

Pronunciation = tuple  # tuple[str, ...], non-empty

_VARIANT_RE = re.compile(r"^(?P<word>.+)\((?P<n>\d+)\)$")


def _fold(word: str) -> str:
    return word.lower()


@dataclass(frozen=True)
class PronLexicon:
    entries: Mapping[str, tuple[Pronunciation, ...]]

    def __contains__(self, word):
        return _fold(word) in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, word) -> tuple[Pronunciation, ...]:
        return self.entries.get(_fold(word), ())

    def symbols(self) -> set[str]:
        return {ph for prons in self.entries.values() for pron in prons for ph in pron}

    def format(self) -> str:
        """Serialize to canonical CMUdict-style text."""
        lines = []
        for word in sorted(self.entries):
            for k, pron in enumerate(self.entries[word]):
                head = word if k == 0 else f"{word}({k})"
                lines.append(f"{head}  {' '.join(pron)}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class HeteronymInventory:
    entries: Mapping[str, Mapping[str, Pronunciation]]

    def __contains__(self, word):
        return _fold(word) in self.entries

    def __len__(self):
        return len(self.entries)

    def forms(self, word) -> Mapping[str, Pronunciation]:
        return self.entries[_fold(word)]

    def form_ids(self, word) -> list[str]:
        return list(self.entries[_fold(word)])

    def symbols(self) -> set[str]:
        return {ph for forms in self.entries.values() for pron in forms.values() for ph in pron}


def _lines(text: str) -> Iterable[tuple[int, str]]:
    for line_no, line in enumerate(text.splitlines(), start=1):
        yield line_no, line.rstrip("\r\n")


def parse_pron_lexicon(text: str, path=None) -> PronLexicon:
    """Parse CMUdict-format text.

    Variant entries (``READ(1)``) are appended to the base word's list in
    file order. Exact duplicate pronunciations of a word are dropped.
    """
    entries: dict[str, list[Pronunciation]] = {}
    for line_no, line in _lines(text):
        if not line.strip() or line.startswith(";;;"):
            continue
        parts = line.split()
        head, phonemes = parts[0], tuple(parts[1:])
        if not phonemes:
            raise MalformedLine(line_no, "entry has no phonemes", path)
        if "(" in head or ")" in head:
            m = _VARIANT_RE.match(head)
            if m is None or "(" in m["word"] or ")" in m["word"]:
                raise MalformedLine(line_no, f"bad variant marker in {head!r}", path)
            head = m["word"]
        prons = entries.setdefault(_fold(head), [])
        if phonemes not in prons:
            prons.append(phonemes)
    return PronLexicon({w: tuple(p) for w, p in entries.items()})


def parse_heteronym_inventory(text: str, path=None) -> HeteronymInventory:
    entries: dict[str, dict[str, Pronunciation]] = {}
    for line_no, line in _lines(text):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedLine(line_no, "expected word<TAB>form_id<TAB>phonemes", path)
        word, form_id, phonemes = (f.strip() for f in fields)
        pron = tuple(phonemes.split())
        if not word or not form_id or not pron:
            raise MalformedLine(line_no, "empty field", path)
        forms = entries.setdefault(_fold(word), {})
        if form_id in forms:
            raise MalformedLine(line_no, f"duplicate form {form_id!r} for {word!r}", path)
        forms[form_id] = pron
    for word, forms in entries.items():
        if len(forms) < 2:
            raise SingleFormWord(word)
    return HeteronymInventory(entries)


def format_heteronym_inventory(inventory: HeteronymInventory) -> str:
    return "".join(
        f"{word}\t{form_id}\t{' '.join(pron)}\n"
        for word, forms in inventory.entries.items()
        for form_id, pron in forms.items()
    )


def load_pron_lexicon(path) -> PronLexicon:
    with open(path, encoding="utf-8") as f:
        return parse_pron_lexicon(f.read(), path=str(path))


def load_heteronym_inventory(path) -> HeteronymInventory:
    with open(path, encoding="utf-8") as f:
        return parse_heteronym_inventory(f.read(), path=str(path))


# --- tokenization and classification -------------------------------------


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class Token:
    surface: str
    is_punct: bool = False

    @property
    def key(self) -> str:
        return _fold(self.surface)


def tokenize(sentence: str) -> list[Token]:
    """Split on whitespace, then peel leading/trailing punctuation runs.

    A run of punctuation becomes one token (``"..."`` stays whole); word
    internal punctuation such as the apostrophe in ``don't`` is kept.
    """
    tokens = []
    for chunk in sentence.split():
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            end -= 1
        if start == end:
            tokens.append(Token(chunk, True))
            continue
        if start:
            tokens.append(Token(chunk[:start], True))
        tokens.append(Token(chunk[start:end]))
        if end < len(chunk):
            tokens.append(Token(chunk[end:], True))
    return tokens


class TokenKind(enum.Enum):
    KNOWN = "known"
    HETERONYM = "heteronym"
    AMBIGUOUS = "ambiguous"
    OOV = "oov"
    PUNCT = "punct"


@dataclass(frozen=True)
class ClassifiedToken:
    surface: str
    kind: TokenKind
    pronunciation: Pronunciation | None = None
    masked: bool = False

    @property
    def key(self) -> str:
        return _fold(self.surface)

    def graphemes(self) -> tuple[str, ...]:
        return tuple(GRAPHEME_PREFIX + ch for ch in self.key)

    def alignment_tokens(self) -> tuple[str, ...]:
        """Symbols fed to the aligner: phonemes if substituted, else graphemes.

        Heteronym slots have no fixed tokens; candidates fill them in.
        """
        if self.kind is TokenKind.PUNCT:
            return ()
        if self.kind is TokenKind.HETERONYM:
            raise ValueError("heteronym slot has no fixed alignment tokens")
        if self.pronunciation is not None:
            return tuple(self.pronunciation)
        return self.graphemes()

    def emission(self) -> str:
        if self.masked:
            return UNK
        if self.kind is TokenKind.PUNCT:
            return self.surface
        if self.pronunciation is None:
            raise ValueError(f"{self.surface!r} has no phoneme form to emit")
        return " ".join(self.pronunciation)


def classify(tokens: Sequence[Token], lexicon: PronLexicon,
             inventory: HeteronymInventory) -> list[ClassifiedToken]:
    out = []
    for tok in tokens:
        if tok.is_punct:
            out.append(ClassifiedToken(tok.surface, TokenKind.PUNCT))
        elif tok.key in inventory:
            out.append(ClassifiedToken(tok.surface, TokenKind.HETERONYM))
        else:
            prons = lexicon.get(tok.key)
            if len(prons) == 1:
                out.append(ClassifiedToken(tok.surface, TokenKind.KNOWN, prons[0]))
            elif prons:
                out.append(ClassifiedToken(tok.surface, TokenKind.AMBIGUOUS))
            else:
                out.append(ClassifiedToken(tok.surface, TokenKind.OOV))
    return out


@dataclass(frozen=True)
class MixedSequence:
    items: tuple[ClassifiedToken, ...]
    slot_positions: tuple[int, ...] = field(default=())

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]


AMBIGUOUS_POLICIES = ("mask", "first")


def to_mixed_sequence(classified: Sequence[ClassifiedToken], lexicon: PronLexicon,
                      ambiguous: str = "mask") -> MixedSequence:
    """Apply dictionary substitutions.

    With ``ambiguous="first"`` multi-pronunciation non-heteronym words take
    their first lexicon pronunciation; otherwise they stay graphemes.
    """
    if ambiguous not in AMBIGUOUS_POLICIES:
        raise ValueError(f"unknown ambiguous policy {ambiguous!r}")
    items = []
    for tok in classified:
        if tok.kind is TokenKind.AMBIGUOUS and ambiguous == "first":
            tok = replace(tok, pronunciation=lexicon.get(tok.key)[0])
        items.append(tok)
    slots = tuple(i for i, t in enumerate(items) if t.kind is TokenKind.HETERONYM)
    return MixedSequence(tuple(items), slots)


def mask_oov(seq: MixedSequence) -> MixedSequence:
    """Mark every word still lacking a phoneme form (OOV, unresolved
    ambiguous) for ``<unk>`` emission. Token count and order are unchanged."""
    items = tuple(
        replace(t, masked=True)
        if t.kind in (TokenKind.OOV, TokenKind.AMBIGUOUS) and t.pronunciation is None
        else t
        for t in seq.items
    )
    return MixedSequence(items, seq.slot_positions)


def prepare_sentence(text: str, lexicon: PronLexicon, inventory: HeteronymInventory,
                     ambiguous: str = "mask") -> MixedSequence:
    return to_mixed_sequence(classify(tokenize(text), lexicon, inventory), lexicon, ambiguous)

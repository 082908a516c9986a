"""Exception hierarchy.

Everything raised on bad input derives from :class:`DataError` so the CLI
can map it to exit code 1 in one place.
"""


class DataError(Exception):
    """Malformed or inconsistent input data."""


class MalformedLine(DataError):
    def __init__(self, line_no, message="malformed line", path=None):
        self.line_no = line_no
        self.path = path
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {message}")


class SingleFormWord(DataError):
    def __init__(self, word):
        self.word = word
        super().__init__(f"heteronym {word!r} has only one form")


class DimMismatch(DataError):
    def __init__(self, message, line_no=None):
        self.line_no = line_no
        super().__init__(message if line_no is None else f"line {line_no}: {message}")


class DuplicateSymbol(DataError):
    def __init__(self, symbol, line_no=None):
        self.symbol = symbol
        self.line_no = line_no
        super().__init__(f"line {line_no}: duplicate symbol {symbol!r}")


class MissingSymbol(DataError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(f"no encoding for symbol {symbol!r}")


class TooFewFrames(DataError):
    def __init__(self, n_tokens, n_frames):
        self.n_tokens = n_tokens
        self.n_frames = n_frames
        super().__init__(f"{n_frames} frames cannot cover {n_tokens} tokens")


class NoHeteronym(DataError):
    pass


class TooManyCandidates(DataError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} candidates exceeds cap of {cap}")


class EmptySpan(DataError):
    pass


class UnresolvedSlot(DataError):
    pass


class MissingGold(DataError):
    def __init__(self, sentence_id, slot=None):
        self.sentence_id = sentence_id
        self.slot = slot
        super().__init__(f"no gold label for sentence {sentence_id!r} slot {slot}")


class UnknownForm(DataError):
    pass


class MatrixFormatError(DataError):
    """Base for binary matrix file problems."""


class BadMagic(MatrixFormatError):
    pass


class BadVersion(MatrixFormatError):
    pass


class TruncatedPayload(MatrixFormatError):
    pass


class NonFiniteValue(MatrixFormatError):
    pass


class ManifestError(DataError):
    pass

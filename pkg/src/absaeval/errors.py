"""Exception types shared across the harness."""


class HarnessError(Exception):
    """Base class for all harness-specific errors."""


class MalformedXml(HarnessError):
    """Input bytes are not parseable XML."""


class SchemaViolation(HarnessError):
    """XML parsed but does not follow a supported corpus schema."""


class OffsetMismatch(HarnessError):
    """An aspect's from/to offsets do not slice to its term."""

    def __init__(self, message: str, sentence_id: str | None = None):
        super().__init__(message)
        self.sentence_id = sentence_id


class BackendUnavailable(HarnessError):
    """A model backend failed, after retries for remote backends.

    Callers attach context as it becomes known: the sentence and stage the
    failure happened in, and how many sentences finished before it.
    """

    def __init__(
        self,
        message: str,
        *,
        sentence_id: str | None = None,
        stage: str | None = None,
        completed: int | None = None,
    ):
        super().__init__(message)
        self.sentence_id = sentence_id
        self.stage = stage
        self.completed = completed


class ProtocolError(HarnessError):
    """The remote service answered outside the wire protocol (4xx, bad body)."""


class TermNotFound(HarnessError):
    """The lexicon classifier was asked about a term absent from the text."""


class FixtureCorrupt(HarnessError):
    """A replay fixture file contains an unreadable or invalid record."""


class DuplicateKey(HarnessError):
    """A replay fixture file records the same key twice."""


class MissingFixture(HarnessError):
    """A replay lookup hit a key that was never recorded.

    Deliberately fatal: falling back to a default would make replayed
    evaluation runs unreproducible without anyone noticing.
    """


class IdMismatch(HarnessError):
    """Pipeline outputs do not cover exactly the corpus sentence ids."""


class SizeExceeded(HarnessError):
    """Input too large for the exhaustive matching oracle."""


class UnknownDataset(HarnessError):
    """No shipped baseline matches the requested dataset."""

"""Exception types shared across the package.

Plain I/O problems (unreadable directories, unwritable output paths) are
reported with the builtin ``OSError``; everything domain-specific derives
from :class:`TrialRankError` so callers can catch one base class.
"""


class TrialRankError(Exception):
    """Base class for all trialrank errors."""


class MalformedXml(TrialRankError):
    """Input XML could not be parsed."""


class MissingId(TrialRankError):
    """A trial document carries no usable identifier."""


class DuplicateTopicId(TrialRankError):
    """Two topics in one file share the same id."""


class EmptyCorpus(TrialRankError):
    """An operation that needs documents received none."""


class VocabTooSmall(TrialRankError):
    """No tokens survived vocabulary construction."""


class DimMismatch(TrialRankError):
    """Two vectors (or a vector and a config) disagree on dimensionality."""


class RemoteUnavailable(TrialRankError):
    """The remote embedding service failed after all retries."""


class MalformedResponse(TrialRankError):
    """The remote embedding service returned an unusable payload."""


class ModelConfigMismatch(TrialRankError):
    """A persisted model was trained under a different configuration."""


class MalformedRunLine(TrialRankError):
    """A run file line violates the 6-column format or run invariants."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateDoc(TrialRankError):
    """The same document appears twice under one topic in a run file."""


class MalformedQrelLine(TrialRankError):
    """A qrels line violates the 4-column format."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateJudgment(TrialRankError):
    """The same (topic, doc) pair is judged twice."""


class GradeOutOfRange(TrialRankError):
    """A qrels grade lies outside {0, 1, 2}."""


class NoOverlap(TrialRankError):
    """A run and a qrels file share no topic ids."""


class ConfigError(TrialRankError):
    """A pipeline or embedder configuration is invalid."""

"""Exception hierarchy.

``FormatError`` subclasses describe a model reply that could not be turned
into a valid artifact. The gateway treats every ``FormatError`` as retryable
and records it in the failure log.
"""

from __future__ import annotations


class ScreenwrightError(Exception):
    """Base class for all package errors."""


class FormatError(ScreenwrightError):
    """A reply (or checkpoint) violates the expected structure."""

    kind = "FormatError"

    def __init__(self, message: str, *, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class MissingTag(FormatError):
    kind = "MissingTag"

    def __init__(self, name: str, *, offset: int | None = None):
        super().__init__(f"missing <{name}>", offset=offset)
        self.name = name


class UnbalancedTag(FormatError):
    kind = "UnbalancedTag"

    def __init__(self, name: str, *, offset: int | None = None):
        super().__init__(f"<{name}> is never closed", offset=offset)
        self.name = name


class ArityViolation(FormatError):
    kind = "ArityViolation"

    def __init__(self, name: str, count: int, lo: int, hi: int | None, *, offset: int | None = None):
        bound = f"{lo}..{'*' if hi is None else hi}"
        super().__init__(f"<{name}> occurs {count} times, expected {bound}", offset=offset)
        self.name = name
        self.count = count


class ComponentCount(FormatError):
    kind = "ComponentCount"


class CardinalityOutOfRange(FormatError):
    kind = "CardinalityOutOfRange"


class DuplicateName(FormatError):
    kind = "DuplicateName"


class LabelGap(FormatError):
    kind = "LabelGap"


class OrphanSubplot(FormatError):
    kind = "OrphanSubplot"


class EmptyTopPlot(FormatError):
    kind = "EmptyTopPlot"


class MissingMarker(FormatError):
    kind = "MissingMarker"


class UnknownCharacterName(FormatError):
    kind = "UnknownCharacterName"


class MissingSceneHeading(FormatError):
    kind = "MissingSceneHeading"


class ForeignCharacter(FormatError):
    kind = "ForeignCharacter"

    def __init__(self, name: str):
        super().__init__(f"character {name!r} is not involved in this scene")
        self.name = name


class ConstraintViolation(FormatError):
    kind = "ConstraintViolation"


class RoleMismatch(FormatError):
    kind = "RoleMismatch"


class MalformedVerdict(FormatError):
    kind = "MalformedVerdict"


class InvalidArtifact(FormatError):
    """Catch-all for value-level invariant violations (empty text and so on)."""

    kind = "InvalidArtifact"


class GatewayError(ScreenwrightError):
    pass


class TransportError(GatewayError):
    pass


class RateLimited(GatewayError):
    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class ReplayMiss(GatewayError):
    def __init__(self, digest: str):
        super().__init__(f"no cassette record for request {digest[:12]}")
        self.digest = digest


class StructuredOutputFailure(ScreenwrightError):
    """Every attempt at a structured call produced an unusable reply."""

    def __init__(self, stage: str, attempts: int, last_error: FormatError):
        super().__init__(f"{stage}: no valid output after {attempts} attempts ({last_error})")
        self.stage = stage
        self.attempts = attempts
        self.last_error = last_error


class StageFailure(ScreenwrightError):
    def __init__(self, stage: str, story_id: str, cause: BaseException | None = None):
        super().__init__(f"{stage} failed for story {story_id!r}: {cause}")
        self.stage = stage
        self.story_id = story_id
        self.cause = cause


class ConfigError(ScreenwrightError):
    pass


class StageOrderError(ScreenwrightError):
    pass


class UnknownLabel(ScreenwrightError):
    pass


class OutOfOrderExpansion(ScreenwrightError):
    pass


class MissingEpisode(ScreenwrightError):
    pass


class DuplicateEpisode(ScreenwrightError):
    pass


class CoverageGap(ScreenwrightError):
    pass


class EmptyResults(ScreenwrightError):
    pass

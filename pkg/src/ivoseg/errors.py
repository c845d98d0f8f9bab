"""Exception types shared across the engine.

Plain ``ValueError`` is used for generic invalid arguments; the classes here
cover conditions callers are expected to branch on.
"""


class EmptyMemoryError(RuntimeError):
    """A decode was attempted against a memory with no entries."""


class EmptyEvidenceError(RuntimeError):
    """Interaction inference was requested with no scribbles and no previous masks."""


class CapacityError(ValueError):
    """An object count or memory size exceeded a configured hard cap."""


class FormatError(ValueError):
    """A file, manifest, or payload did not match the expected schema."""


class ConflictError(RuntimeError):
    """A session mutation targeted a stale round or repeated a one-shot step."""


class PreconditionError(RuntimeError):
    """A lifecycle step was invoked before its prerequisite step completed."""

"""Exception hierarchy shared across the toolkit.

Every domain error derives from SkelespectorError so callers (CLI, service)
can map "expected" failures to exit codes / HTTP statuses in one place.
"""


class SkelespectorError(Exception):
    """Base class for all domain errors raised by this package."""


class ShapeError(SkelespectorError, ValueError):
    """An array/sequence has the wrong shape or length for the operation."""


class RangeError(SkelespectorError, IndexError):
    """A frame/transition index or index range is out of bounds."""


class StateError(SkelespectorError, RuntimeError):
    """The session lacks the data required by the requested view."""


class NonDifferentiableModel(SkelespectorError, TypeError):
    """Gradient requested from a model component without gradient support."""


class InvalidConfig(SkelespectorError, ValueError):
    """A configuration value violates its contract (e.g. epsilon < 0)."""


class AdapterError(SkelespectorError, RuntimeError):
    """Base class for external pose-adapter failures."""


class AdapterUnavailable(AdapterError):
    """The adapter process could not be spawned or its I/O failed."""


class AdapterProtocolError(AdapterError):
    """The adapter produced output violating the exchange schema."""


class AdapterTimeout(AdapterError):
    """The adapter exceeded its wall-clock limit."""


class IngestError(SkelespectorError, ValueError):
    """Base class for frame-directory ingestion failures."""


class EmptyDirectory(IngestError):
    """No frame files found in the ingest directory."""


class InconsistentDimensions(IngestError):
    """Frames in one directory disagree on size or channel count."""


class UnreadableImage(IngestError):
    """A frame file exists but cannot be decoded; message names the file."""


class StoreError(SkelespectorError, ValueError):
    """Base class for session persistence failures."""


class SchemaMismatch(StoreError):
    """session.json was written by an unsupported schema version."""


class CorruptSession(StoreError):
    """session.json is unparseable or fails its checksum."""


class UnknownClip(SkelespectorError, KeyError):
    """No session exists for the requested clip id."""


class JobNotFound(SkelespectorError, KeyError):
    """No attack job exists with the requested id."""


class AttackInProgress(SkelespectorError, RuntimeError):
    """An attack job is already queued or running for this clip."""

"""Exception types shared across the package."""


class BeaconNavError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(BeaconNavError):
    """Numeric input was non-finite or otherwise malformed."""


class FrameMismatchError(BeaconNavError):
    """An operation mixed poses tagged with different coordinate frames."""


class ConstraintViolationError(BeaconNavError):
    """A value broke a structural constraint (e.g. non-yaw-only rotation)."""


class UnknownBeaconError(BeaconNavError):
    """A pointer event referenced a beacon id that does not exist."""


class DuplicateIdError(BeaconNavError):
    """A record with the same id already exists in the database."""


class NotFoundError(BeaconNavError):
    """The requested record id is not in the database."""


class LoadError(BeaconNavError):
    """The database file could not be parsed.

    ``line`` is the 1-based line number of the offending record.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class SaveError(BeaconNavError):
    """Persisting the database failed; in-memory state was not changed."""


class FrameSizeError(BeaconNavError):
    """Outgoing frame exceeds the topic or payload size limit."""


class ProtocolError(BeaconNavError):
    """Incoming bytes violate the wire protocol; drop the connection."""


class EventSequenceError(BeaconNavError):
    """Trial events are out of order or structurally illegal."""


class IncompleteStageError(BeaconNavError):
    """A stage's event sequence does not end with a successful navigation."""


class InvalidResponseError(BeaconNavError):
    """A questionnaire response is malformed or out of range."""


class SampleTooSmallError(BeaconNavError):
    """Too few observations for the requested statistical test."""


class DegenerateSampleError(BeaconNavError):
    """The sample carries no information (zero variance / all-zero diffs)."""


class PairingError(BeaconNavError):
    """A participant is missing data for one of the two systems."""


class ConfigError(BeaconNavError):
    """Server configuration is invalid or refers to unreadable files."""

"""Exception hierarchy shared by all pipeline stages."""


class ClipforgeError(Exception):
    """Base class for all clipforge errors."""


class ValidationError(ClipforgeError):
    """Invalid configuration, manifest content, or operation arguments."""


class ManifestError(ValidationError):
    """Malformed or invariant-violating manifest data.

    ``line`` is the 1-based line number in the source file when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    """Bad pipeline configuration value or unknown config key."""


class FileAccessError(ClipforgeError):
    """Filesystem-level failure (missing file, unwritable destination)."""


class MediaError(ClipforgeError):
    """Unreadable, missing, or undecodable media."""


class DetectorError(ClipforgeError):
    """Detector backend failure (spawn, protocol, crash, timeout)."""


class ProtocolError(DetectorError):
    """Detector backend violated the wire protocol."""


class DeadSessionError(DetectorError):
    """Request issued on a session whose backend already died."""


class SourceError(ClipforgeError):
    """Source API failure that survived retries."""


class TransientSourceError(SourceError):
    """Retryable source API failure (5xx, timeouts, connection resets)."""


class AuthError(SourceError):
    """Source API rejected the client's credentials."""

"""Error types shared across the package."""


class PdmNasError(Exception):
    """Base class for errors raised by this package."""


class FormatError(PdmNasError, ValueError):
    """Malformed input data (file headers, encodings, record layout)."""


class ConfigError(PdmNasError, ValueError):
    """Invalid or unknown configuration keys/values."""


class AerIoError(PdmNasError, OSError):
    """AER sink/source I/O failure; carries the byte offset reached."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (at byte offset {byte_offset})")
        self.byte_offset = byte_offset

"""Exception types shared across the package."""


class ConvSearchError(Exception):
    """Base class for all package-specific errors."""


class CorpusFormatError(ConvSearchError):
    """Malformed corpus input; carries the offending record position."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateDocIdError(ConvSearchError):
    """Same doc_id seen twice with differing text."""


class EmptyCorpusError(ConvSearchError):
    """Every document was dropped during indexing and empty indexes are not allowed."""


class IndexFormatError(ConvSearchError):
    """Index file has wrong magic bytes or an unsupported format version."""


class IndexChecksumError(IndexFormatError):
    """Index file payload does not match its trailing checksum (truncation/corruption)."""


class EmptyQueryError(ConvSearchError):
    """Query contained no usable terms after processing."""


class ParameterError(ConvSearchError):
    """Out-of-range retrieval or rerank parameter."""


class RulesParseError(ConvSearchError):
    """Malformed classifier rules or cue lexicon file; carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class QrelsParseError(ConvSearchError):
    """Malformed qrels line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RunParseError(ConvSearchError):
    """Malformed or inconsistent run file line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigMismatchError(ConvSearchError):
    """Requested text-processing config differs from the one the index was built with."""


class UnknownSessionError(ConvSearchError):
    """Session id not present in the session store."""

"""Window-labeled extractive summarization of long documents."""

__version__ = "0.1.0"


class DataError(Exception):
    """Raised for malformed or missing input data (CLI exit code 2)."""

"""Exception hierarchy shared by every stage of the toolkit."""


class CastanetError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CastanetError, ValueError):
    """A JSONL line could not be decoded."""

    def __init__(self, message, path=None, lineno=None):
        where = ""
        if path is not None:
            where = f"{path}"
        if lineno is not None:
            where = f"{where}:{lineno}" if where else f"line {lineno}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.lineno = lineno


class ValidationError(CastanetError, ValueError):
    """A record violates a domain-type invariant."""

    def __init__(self, message, video_id=None, field=None):
        parts = []
        if video_id is not None:
            parts.append(f"video {video_id!r}")
        if field is not None:
            parts.append(f"field {field!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.video_id = video_id
        self.field = field


class DomainError(CastanetError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(CastanetError, ValueError):
    """Array shapes do not agree."""


class ConfigurationError(CastanetError, ValueError):
    """Inconsistent configuration (thresholds, head counts, empty model lists)."""


class DataError(CastanetError, KeyError):
    """Inputs refer to data that is not present, e.g. a video without annotations."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class TrainingError(CastanetError, RuntimeError):
    """Optimisation diverged."""

    def __init__(self, message, step=None):
        super().__init__(f"step {step}: {message}" if step is not None else message)
        self.step = step

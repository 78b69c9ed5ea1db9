"""Error types raised by the deviant learning library."""


class DeviantLearningError(ValueError):
    """Algorithm-level failure (bad shapes, empty inputs, missing winners)."""


class DatasetError(DeviantLearningError):
    """A benchmark file could not be read or does not match its schema."""

    def __init__(self, message, path=None, row=None, column=None):
        self.path = path
        self.row = row
        self.column = column
        location = []
        if path is not None:
            location.append(str(path))
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)

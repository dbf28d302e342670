class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class EmptyTailWarning(UserWarning):
    """No synthetic income reached the Pareto threshold."""

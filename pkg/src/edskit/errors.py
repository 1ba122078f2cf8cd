"""Exception hierarchy.  The CLI maps ParseError to exit code 2 and
AnalysisError to exit code 1."""


class EdsError(Exception):
    pass


class ParseError(EdsError):
    """Malformed input text.  Carries 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None,
                 source: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        where = ""
        if line is not None:
            where = f"{source + ':' if source else ''}{line}:{col}: "
        super().__init__(where + message)


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, line=None, col=None, source=None):
        self.name = name
        super().__init__(f"unknown identifier '{name}'", line, col, source)


class AnalysisError(EdsError):
    """An analysis could not be carried out (bad preconditions, degenerate data)."""


class DegeneratePoint(AnalysisError):
    pass


class EvaluationError(AnalysisError):
    pass

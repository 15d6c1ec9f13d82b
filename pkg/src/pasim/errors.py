"""Exceptions raised by the shapers and code loaders."""


class ShapingError(ValueError):
    """A received sequence cannot be inverted by the distribution matcher."""


class OutsideSphereError(ShapingError):
    pass


class UnaddressedSequenceError(ShapingError):
    pass


class CompositionViolationError(ShapingError):
    pass


class ParityCheckParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)

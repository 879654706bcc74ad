class SkewLatticeError(Exception):
    """Base class for errors raised by skewlat."""


class ParseError(SkewLatticeError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class CarrierTooLarge(SkewLatticeError):
    pass


class NotACongruence(SkewLatticeError):
    def __init__(self, message, witness):
        self.witness = witness
        super().__init__(message)


class InternalError(SkewLatticeError):
    """A theorem-backed invariant failed; the input or the library is corrupt."""

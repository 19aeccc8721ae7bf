"""Exception hierarchy shared by all solver modules."""


class TbrkError(Exception):
    pass


class DimensionMismatch(TbrkError, ValueError):
    pass


class SingularMatrix(TbrkError, ArithmeticError):
    """A pivot fell below the relative threshold (typically a pole hit the spectrum)."""


class NonConvergence(TbrkError, ArithmeticError):
    pass


class DeflationError(TbrkError):
    """The new Krylov block is numerically contained in the current span."""


class DeflationExhausted(TbrkError):
    pass


class SizeOverflow(TbrkError, MemoryError):
    pass


class EmptySurrogate(TbrkError):
    pass


class SingularOperator(TbrkError, ArithmeticError):
    """The projected Sylvester operator has an (almost) zero eigenvalue sum."""


class IllConditioned(TbrkError, ArithmeticError):
    pass


class PreconditionViolation(TbrkError):
    pass


class UnsupportedExpression(TbrkError, ValueError):
    pass

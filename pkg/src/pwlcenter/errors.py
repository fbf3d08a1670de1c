"""Exception types raised by the analysis pipeline."""


class PwlError(Exception):
    """Base class for all errors raised by pwlcenter."""


class IdenticallyZero(PwlError):
    pass


class AllConstant(PwlError):
    pass


class NotInA(PwlError):
    """Laurent polynomial lacks the conjugate symmetry w[-k] = conj(w[k])."""


class ConstantInner(PwlError):
    pass


class NoSolution(PwlError):
    def __init__(self, message, residual=float("inf")):
        super().__init__(message)
        self.residual = residual


class BothZero(PwlError):
    pass


class TangencyAmbiguous(PwlError):
    """Solution touches x = 0 where b and b' both vanish."""


class NonSimpleB(PwlError):
    pass


class InconsistentBand(PwlError):
    pass


class NoTwoZeroBand(PwlError):
    pass

"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by renyigan_lab."""


# measures / distributions
class InvalidDistribution(LabError, ValueError):
    pass


class SupportMismatch(LabError, ValueError):
    pass


class AbsoluteContinuityViolation(LabError, ValueError):
    pass


class OrderOutOfRange(LabError, ValueError):
    pass


class DivisionByZeroSupport(LabError, ValueError):
    pass


class IntegralDiverges(LabError, ArithmeticError):
    pass


class LogOfZero(LabError, ArithmeticError):
    pass


class NegativeFunctionValue(LabError, ValueError):
    pass


class QuadratureNonConvergence(LabError, ArithmeticError):
    pass


class UnsupportedDistribution(LabError, NotImplementedError):
    pass


# autodiff / nn
class ShapeMismatch(LabError, ValueError):
    pass


class NonScalarOutput(LabError, ValueError):
    pass


class SaturatedDiscriminator(LabError, ArithmeticError):
    pass


class CheckpointError(LabError, ValueError):
    pass


# losses
class EmptyBatch(LabError, ValueError):
    pass


class BatchLengthMismatch(LabError, ValueError):
    pass


class InvalidInterval(LabError, ValueError):
    pass


# theorem oracle
class ZeroDensitySum(LabError, ArithmeticError):
    pass


class ConstraintViolated(LabError, ValueError):
    pass


class DegenerateDenominator(LabError, ArithmeticError):
    pass


# trainer / fid / cli
class ConfigInvalid(LabError, ValueError):
    pass


class NumericalDivergence(LabError, ArithmeticError):
    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint


class WrongDatasetKind(LabError, ValueError):
    pass


class InsufficientSamples(LabError, ValueError):
    pass


class DimensionMismatch(LabError, ValueError):
    pass


class MatrixSqrtNonConvergence(LabError, ArithmeticError):
    pass


class SpecParseError(LabError, ValueError):
    pass

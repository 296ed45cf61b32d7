"""Exception hierarchy shared by all modules."""


class TorspinError(Exception):
    """Base class for every engine error."""


class ExprSyntaxError(TorspinError, ValueError):
    def __init__(self, message: str, line: int, col: int, expected: str):
        super().__init__(f"{message} at line {line}, col {col} (expected {expected})")
        self.line = line
        self.col = col
        self.expected = expected


class UnknownIdentifier(TorspinError, ValueError):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(f"unknown identifier {name!r} at line {line}, col {col}")
        self.name = name
        self.line = line
        self.col = col


class DomainError(TorspinError, ArithmeticError):
    pass


class IncompatibleSlots(TorspinError, ValueError):
    pass


class NotAntisymmetric(TorspinError, ValueError):
    pass


class InsufficientSamples(TorspinError, ValueError):
    pass


class SingularMetric(TorspinError, ArithmeticError):
    pass


class NonLorentzianSignature(TorspinError, ValueError):
    pass


class InconsistentTrace(TorspinError, ArithmeticError):
    pass


class ConstraintViolated(TorspinError, ValueError):
    pass


class UnregisteredObject(TorspinError, KeyError):
    pass


class ScenarioParseError(TorspinError, ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class ValidationError(TorspinError, ValueError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason

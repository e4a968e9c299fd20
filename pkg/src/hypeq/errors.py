"""Exception hierarchy shared by every hypeq module."""


class HypeqError(Exception):
    """Base class for all library errors."""


class ParseError(HypeqError):
    def __init__(self, message, position, text=""):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.text = text


class UnknownIdentifier(ParseError):
    pass


class EvaluationError(HypeqError):
    pass


class PoleEncountered(EvaluationError):
    pass


class DomainViolation(EvaluationError):
    """Real-valued evaluation left the function's domain (ln of a negative, ...)."""


class UnboundVariable(EvaluationError):
    pass


class DivisionByZero(HypeqError, ZeroDivisionError):
    pass


class JetOrderError(HypeqError):
    pass


class NotAffine(HypeqError):
    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class Indeterminate(HypeqError):
    def __init__(self, message, statuses=()):
        super().__init__(message)
        self.statuses = dict(statuses) if isinstance(statuses, dict) else tuple(statuses)


class IntegrationFailure(HypeqError):
    def __init__(self, message, numeric=None):
        super().__init__(message)
        self.numeric = numeric


class DegenerateTransform(HypeqError):
    pass


class DegenerateDatum(HypeqError):
    pass


class DomainMismatch(HypeqError):
    pass


class NotInCatalog(HypeqError, LookupError):
    pass


class ContactConditionViolated(HypeqError):
    pass


class BranchUndetermined(HypeqError):
    pass


class NotInHxy(HypeqError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InverseMismatch(HypeqError):
    pass


class SingularPushforward(EvaluationError):
    pass


class ContactInconsistency(EvaluationError):
    pass


class UnknownName(HypeqError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown name"

"""Exception hierarchy shared by the engine, the guard language and the loader."""


class RPNError(Exception):
    pass


class GuardSyntaxError(RPNError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class GuardTypeError(RPNError):
    def __init__(self, message, node=None):
        super().__init__(message if node is None else f"{message}: {node}")
        self.node = node


class ConditionTypeError(RPNError):
    """A guard evaluated to something other than a boolean."""


class MissingHostFunction(RPNError):
    pass


class GuardDivisionByZero(RPNError):
    pass


class NotEnabled(RPNError):
    pass


class NotCoEnabled(RPNError):
    pass


class NetParseError(RPNError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownIdentifier(NetParseError):
    pass


class ValidationFailed(RPNError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class InvalidTopology(RPNError):
    pass


class DimensionMismatch(RPNError, ValueError):
    pass

"""Exception types raised across the compiler and simulator."""


class QConnectError(Exception):
    """Base class for all package errors."""


class RegisterTooLarge(QConnectError, ValueError):
    pass


class DimensionMismatch(QConnectError, ValueError):
    pass


class NotExactlyExpressible(QConnectError, ValueError):
    """A gate has no exact rendering in the requested gate library."""


class PlacementArityMismatch(QConnectError, ValueError):
    pass


class UnroutableGate(QConnectError, ValueError):
    """Two qubits have no connecting path in the coupling graph."""


class SearchSpaceTooLarge(QConnectError, ValueError):
    pass


class EmptyMeasurement(QConnectError, ValueError):
    pass


class UnsupportedLibraryForSystematic(QConnectError, ValueError):
    """Over-rotation noise needs continuous gate parameters."""


class InvalidConfig(QConnectError, ValueError):
    pass

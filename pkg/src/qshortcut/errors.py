"""Exception types raised by the toolkit."""


class QShortcutError(Exception):
    """Base class for all errors raised by :mod:`qshortcut`."""


class DegenerateHamiltonian(QShortcutError, ValueError):
    """The traceless part of a qubit Hamiltonian vanishes, so its eigenframe is undefined."""


class ZeroCoupling(QShortcutError, ValueError):
    pass


class OutOfRange(QShortcutError, ValueError):
    pass


class WrongProtocolKind(QShortcutError, TypeError):
    pass


class AntipodalTarget(QShortcutError, ValueError):
    """The rotating-frame target sits at the antipode of the initial state.

    Every great circle through the two points is a geodesic, so the
    minimal-energy drive has no unique direction.
    """

    def __init__(self, msg, t_f=None):
        super().__init__(msg)
        self.t_f = t_f


class ZeroWaveform(QShortcutError, ValueError):
    pass


class NotNormalized(QShortcutError, ValueError):
    pass


class ConfigError(QShortcutError, ValueError):
    pass

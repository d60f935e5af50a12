"""Exception types shared across the toolkit."""


class QKDRBError(Exception):
    """Base class for all toolkit errors."""


class DomainError(QKDRBError, ValueError):
    """A numeric argument lies outside the domain of a function."""


class InputError(QKDRBError, ValueError):
    """Malformed or inconsistent input (bad hop count, bad table, ...)."""


class InfeasibleScheduleError(QKDRBError):
    """Reconfiguration overhead consumes the whole period."""

    def __init__(self, overhead_s, period_s):
        self.overhead_s = overhead_s
        self.period_s = period_s
        super().__init__(
            f"infeasible schedule: reconfiguration overhead {float(overhead_s):g} s "
            f">= period {float(period_s):g} s"
        )


class OutOfBudgetError(QKDRBError):
    """A k-hop chord link generates no key (beyond the link budget)."""

    def __init__(self, hop, attenuation_db):
        self.hop = hop
        self.attenuation_db = attenuation_db
        super().__init__(
            f"hop k={hop} is out of budget: zero key rate at {attenuation_db:.4g} dB"
        )

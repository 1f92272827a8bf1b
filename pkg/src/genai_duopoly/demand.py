"""Per-task demand curves.

Two families are supported: the exponential curve ``a * exp(-b p)`` with a
sensitivity ``b`` shared by all tasks, and :class:`GeneralDemand`, any
non-negative, non-increasing curve given by a table or a callable. All
evaluators accept scalars or numpy arrays of prices.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import EmptyTaskSet, InvalidDemand, NegativePrice

VALIDATION_POINTS = 256


def _check_price(price):
    if np.ndim(price) == 0:
        p = float(price)
        if not p >= 0.0:
            raise NegativePrice(f"price must be >= 0, got {price!r}")
        return p
    p = np.asarray(price, dtype=float)
    if not np.all(p >= 0.0):
        raise NegativePrice("prices must be >= 0")
    return p


@dataclass(frozen=True)
class ExponentialDemand:
    base_a: float
    sensitivity_b: float

    def __post_init__(self):
        if not (math.isfinite(self.base_a) and self.base_a > 0):
            raise InvalidDemand(f"base_a must be > 0, got {self.base_a!r}")
        if not (math.isfinite(self.sensitivity_b) and self.sensitivity_b > 0):
            raise InvalidDemand(f"sensitivity_b must be > 0, got {self.sensitivity_b!r}")

    def __call__(self, price):
        if isinstance(price, float):
            return self.base_a * math.exp(-self.sensitivity_b * price)
        return self.base_a * np.exp(-self.sensitivity_b * price)

    @property
    def peak_price(self):
        """Price maximising ``p * D(p)``."""
        return 1.0 / self.sensitivity_b


@dataclass(frozen=True, eq=False)
class GeneralDemand:
    """Arbitrary non-increasing demand.

    Build with :meth:`tabulated` or :meth:`from_callable`; both check
    monotonicity on a validation grid and raise :class:`InvalidDemand` if
    the curve increases or goes negative anywhere on it.
    """

    func: object
    p_max: float
    prices: tuple = field(default=None)
    quantities: tuple = field(default=None)

    @classmethod
    def tabulated(cls, prices, quantities):
        """Piecewise-linear interpolation through ``(price, quantity)`` points.

        Left of the first point the first quantity is held; right of the
        last point demand is zero.
        """
        xs = np.asarray(prices, dtype=float)
        ys = np.asarray(quantities, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 1:
            raise InvalidDemand("tabulated demand needs matching 1-d price/quantity lists")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidDemand("tabulated demand points must be finite")
        if np.any(xs < 0):
            raise InvalidDemand("tabulated prices must be >= 0")
        if np.any(np.diff(xs) <= 0):
            raise InvalidDemand("tabulated prices must be strictly increasing")
        if np.any(ys < 0) or np.any(np.diff(ys) > 0):
            raise InvalidDemand("tabulated quantities must be non-negative and non-increasing")

        def interp(p):
            return np.interp(p, xs, ys, left=ys[0], right=0.0)

        out = cls(interp, float(xs[-1]), tuple(xs.tolist()), tuple(ys.tolist()))
        out._validate()
        return out

    @classmethod
    def from_callable(cls, func, p_max):
        out = cls(func, float(p_max))
        out._validate()
        return out

    def __call__(self, price):
        val = self.func(price)
        if np.ndim(price) == 0:
            return float(val)
        return np.asarray(val, dtype=float)

    def _validate(self):
        if not (self.p_max > 0 and math.isfinite(self.p_max)):
            raise InvalidDemand(f"p_max must be a positive finite price, got {self.p_max!r}")
        grid = np.linspace(0.0, self.p_max, VALIDATION_POINTS)
        vals = np.array([float(self.func(float(p))) for p in grid])
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise InvalidDemand("demand must be finite and non-negative on [0, p_max]")
        if np.any(np.diff(vals) > 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))):
            raise InvalidDemand("demand increases with price somewhere on [0, p_max]")

    @property
    def base_a(self):
        return float(self.func(0.0))

    @property
    def is_tabulated(self):
        return self.prices is not None

    def __eq__(self, other):
        if not isinstance(other, GeneralDemand):
            return NotImplemented
        if self.is_tabulated and other.is_tabulated:
            return self.prices == other.prices and self.quantities == other.quantities
        return self is other

    def __hash__(self):
        if self.is_tabulated:
            return hash((self.prices, self.quantities))
        return id(self)


def evaluate(demand, price):
    """Demand at ``price`` (scalar or array)."""
    return demand(_check_price(price))


def pooled_revenue(demands, price):
    """Revenue ``p * sum_t D_t(p)`` from serving every demand in the list."""
    demands = list(demands)
    if not demands:
        raise EmptyTaskSet("pooled_revenue needs at least one demand")
    p = _check_price(price)
    total = demands[0](p)
    for d in demands[1:]:
        total = total + d(p)
    return p * total

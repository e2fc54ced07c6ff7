"""Exponent bookkeeping for the curvature-weighted inequalities.

The whole package revolves around a parameter triple/quadruple ``(n, p, r, q)``:
``n`` the ambient dimension, ``p`` the integrability exponent of the weighted
gradient term, ``r`` the power of the level-set mean curvature entering the
weight, and ``q`` the target Lebesgue exponent.  The critical exponent

    1/q_crit = 1/p - (1 + r)/n

separates three regimes: a Morrey-type sup-norm regime (``n < p(1+r)``), a
Sobolev regime with finite critical exponent (``n > p(1+r)``), and a critical
regime where only exponential integrability survives (``n = p(1+r)``).

``q = infinity`` is encoded as the distinguished sentinel :data:`INF`, never as
a float, so regime decisions stay exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .errors import MissingExponent


class _Infinity(enum.Enum):
    """Singleton marker for an infinite exponent."""

    INF = "inf"

    def __repr__(self):  # pragma: no cover - cosmetic
        return "INF"


INF = _Infinity.INF

Exponent = Union[float, _Infinity]

# relative slack for deciding n = p(1+r) in floating point
_REGIME_RTOL = 1e-12


def is_inf(q) -> bool:
    return q is INF


def as_exponent(q) -> Exponent:
    """Normalize user input: floats/ints pass through, inf-like values map to INF."""
    if q is INF:
        return INF
    if isinstance(q, str):
        if q.lower() in ("inf", "infinity", "oo"):
            return INF
        q = float(q)
    if isinstance(q, (int, float)):
        if math.isinf(q):
            return INF
        return float(q)
    raise TypeError(f"cannot interpret exponent {q!r}")


class ExponentRegime(enum.Enum):
    SOBOLEV = "SOBOLEV"                          # n > p(1+r), finite critical exponent
    CRITICAL = "CRITICAL"                        # n = p(1+r)
    SUPERCRITICAL_MORREY = "SUPERCRITICAL_MORREY"  # n < p(1+r)


class RegimeVerdict(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    HOLDS_STRICT_SUBCRITICAL = "HOLDS_STRICT_SUBCRITICAL"


@dataclass(frozen=True)
class InequalityParams:
    """Parameter bundle (n, p, r, q).

    ``r`` must be 0 or >= 1 unless ``explore=True``, which admits the
    exploratory band r in (0,1) where no validity claim is made.
    """

    n: int
    p: float
    r: float
    q: Optional[Exponent] = None
    explore: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "r", float(self.r))
        if self.p < 1:
            raise ValueError(f"p must satisfy p >= 1, got {self.p}")
        if self.r < 0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if 0 < self.r < 1 and not self.explore:
            raise ValueError(
                f"r={self.r} lies in (0,1); pass explore=True to study this band"
            )
        if self.q is not None:
            q = as_exponent(self.q)
            if not is_inf(q) and q < 1:
                raise ValueError(f"finite q must satisfy q >= 1, got {q}")
            object.__setattr__(self, "q", q)

    @property
    def weight_order(self) -> float:
        """p(1+r), the total derivative order measured against n."""
        return self.p * (1.0 + self.r)

    def require_q(self) -> Exponent:
        if self.q is None:
            raise MissingExponent("regime classification needs a target exponent q")
        return self.q


def _compare_to_critical(n: float, weight_order: float) -> int:
    """Sign of n - p(1+r) with a tiny relative tolerance for the tie."""
    scale = max(abs(n), abs(weight_order), 1.0)
    d = n - weight_order
    if abs(d) <= _REGIME_RTOL * scale:
        return 0
    return 1 if d > 0 else -1


class CriticalExponent(NamedTuple):
    value: Exponent
    regime: ExponentRegime


def critical_exponent(params: InequalityParams) -> CriticalExponent:
    """Critical target exponent for (n, p, r).

    Returns ``np/(n - p(1+r))`` in the Sobolev regime and :data:`INF`
    (tagged CRITICAL or SUPERCRITICAL_MORREY) otherwise.
    """
    n, p = params.n, params.p
    side = _compare_to_critical(n, params.weight_order)
    if side > 0:
        return CriticalExponent(n * p / (n - params.weight_order), ExponentRegime.SOBOLEV)
    if side == 0:
        return CriticalExponent(INF, ExponentRegime.CRITICAL)
    return CriticalExponent(INF, ExponentRegime.SUPERCRITICAL_MORREY)


def regime_classify(params: InequalityParams) -> RegimeVerdict:
    """Validity map of the one-dimensional weighted inequality for (n, p, r, q).

    The inequality holds iff either n < p(1+r) (any q up to infinity), or
    n > p(1+r) and q <= critical exponent, or n = p(1+r) and q is finite.
    The last case is reported as HOLDS_STRICT_SUBCRITICAL since every finite
    q works but q = infinity fails.
    """
    q = params.require_q()
    crit = critical_exponent(params)
    if crit.regime is ExponentRegime.SUPERCRITICAL_MORREY:
        return RegimeVerdict.HOLDS
    if crit.regime is ExponentRegime.CRITICAL:
        if is_inf(q):
            return RegimeVerdict.FAILS
        return RegimeVerdict.HOLDS_STRICT_SUBCRITICAL
    # Sobolev regime: finite critical exponent
    if is_inf(q):
        return RegimeVerdict.FAILS
    return RegimeVerdict.HOLDS if q <= crit.value * (1 + 1e-12) else RegimeVerdict.FAILS


def sharp_radial_exponents(n: int):
    """Sharp integrability thresholds (q0, q1) for radial semi-stable profiles.

    For n <= 9 radial semi-stable solutions are bounded and both thresholds
    are infinite.  For n >= 10:

        q1 = 2n / (n - 2*sqrt(n-1) - 2)   (gradient exponent threshold)
        q0 = 2n / (n - 2*sqrt(n-1) - 4)   (Lebesgue exponent threshold)

    with q0 = INF when its denominator is <= 0 (this happens exactly at n=10).
    """
    if int(n) != n or n < 2:
        raise ValueError(f"dimension n must be an integer >= 2, got {n}")
    n = int(n)
    if n <= 9:
        return (INF, INF)
    root = 2.0 * math.sqrt(n - 1.0)
    den1 = n - root - 2.0
    den0 = n - root - 4.0
    q1 = 2.0 * n / den1 if den1 > 0 else INF
    q0 = 2.0 * n / den0 if den0 > 0 else INF
    return (q0, q1)

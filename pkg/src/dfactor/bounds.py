"""Per-stratum bound parameters: closed forms and exact enumeration extrema.

``m_bar`` bounds forward counts from above, ``m_low`` bounds inverse counts
from below and ``m_hat`` bounds gadget completions from below.  The analytic
provider evaluates the closed forms exactly (integers or ``Fraction``); the
oracle provider replaces them with the true extrema over every graph of every
stratum, which is only feasible on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BoundGuard, NotRegularComplement
from .graph_core import HostInstance

UPPER_TYPES = ("I", "IIa", "IIb", "IIc", "III")
LOWER_CLASSES = ("A", "B1", "B2", "C")
GADGET_TYPES = ("IIb", "IIc")


def _key(name: str) -> str:
    return name.rstrip("+-")


def i1_easy(instance: HostInstance) -> int:
    return (2 * instance.m_red_total * instance.d) // instance.n


def i1_uniform(instance: HostInstance) -> int:
    if not instance.regular_complement:
        raise NotRegularComplement("the forbidden graph must be regular")
    return (2 * instance.d * instance.delta) // 3


def easy_bounds(instance: HostInstance, i: int) -> tuple[int, int]:
    n, d, delta, m = instance.n, instance.d, instance.delta, instance.m_red_total
    upper = 2 * i * (d * n) ** 2
    lower = ((2 * m - 2 * i) * d * d * (d * n - 2 * i - 8 * d)
             - 4 * m * d ** 3 * (d + delta) - 4 * i * delta * d * d * n)
    return upper, lower


def uniform_upper(instance: HostInstance, tau: str, i: int):
    n, d, delta = instance.n, instance.d, instance.delta
    t = _key(tau)
    if t == "I":
        dn = d * n
        growth = 1 + 28 * (Fraction((delta + d) ** 2, n * n) + Fraction(1, n))
        val = (2 * i * dn ** 3 * growth - 8 * i * (d - 1) ** 2 * d * d * n * n
               - 4 * i * delta * d ** 3 * n * n - 4 * i * i * dn * dn)
        return val.numerator if val.denominator == 1 else val
    if t == "IIa":
        return 2 * i * delta ** 2 * d ** 3 * n
    if t == "IIb":
        return delta ** 2 * d ** 9 * n ** 5
    if t == "IIc":
        return delta ** 3 * d ** 11 * n ** 6
    if t == "III":
        return delta ** 3 * d ** 3 * n ** 2
    raise ValueError(f"unknown type {tau!r}")


def _exact(val):
    val = Fraction(val)
    return val.numerator if val.denominator == 1 else val


def uniform_lower(instance: HostInstance, alpha: str, i: int):
    n, d, delta = instance.n, instance.d, instance.delta
    a = _key(alpha)
    dn = d * n
    if a == "A":
        return _exact((delta * n - 2 * i) * d * d * dn * dn * (1 - Fraction(30, n))
                      - 3 * d ** 5 * delta * n * n - 8 * i * delta * d ** 3 * n * n
                      - 3 * delta ** 2 * d ** 4 * n * n)
    if a == "B1":
        return (2 * i * (delta - 1) * (d - 1) * (dn - 2 * i - 10 * d) ** 2
                - 6 * i * (delta - 1) * d ** 3 * n * (d + delta))
    if a == "B2":
        return ((delta * n - 2 * i) * delta * d ** 4 * n - 8 * i * delta ** 2 * d ** 3 * n
                - 2 * i * delta * d ** 4 * n - 2 * delta ** 2 * d ** 5 * n
                - 12 * delta ** 2 * d ** 4 * n)
    if a == "C":
        return _exact(d ** 3 * delta ** 3 * n * n * (1 - Fraction(8 * (d + delta), n)))
    raise ValueError(f"unknown class {alpha!r}")


def gadget_lower(instance: HostInstance, tau: str, i: int) -> int:
    n, d, delta = instance.n, instance.d, instance.delta
    dn = d * n
    t = _key(tau)
    if t == "IIb":
        return (dn - 2 * i - 12) ** 4 - 6 * dn ** 3 * d * d - 6 * dn ** 3 * delta * d
    if t == "IIc":
        return (dn - 2 * i - 14) ** 6 - 9 * dn ** 5 * d * d - 9 * dn ** 5 * delta * d
    raise ValueError(f"gadget bounds exist only for IIb and IIc, not {tau!r}")


def epsilon(instance: HostInstance) -> Fraction:
    return 5 * Fraction(instance.delta + instance.d, instance.n) ** 2


@dataclass(frozen=True)
class BoundTable:
    """Every bound the samplers need, for strata ``0..i1``.

    ``gadget[(t, i)]`` is ``None`` when no octagon of that variant admits any
    gadget completion, which disables the booster type.  ``reachable_b1``
    says that inverse B1 counts should skip octagons no forward move can make.
    """

    instance: HostInstance
    provider: str
    i1: int
    i1_easy: int
    eps: Fraction
    upper: dict = field(repr=False)
    lower: dict = field(repr=False)
    gadget: dict = field(repr=False)
    easy_upper: dict = field(repr=False)
    easy_lower: dict = field(repr=False)
    reachable_b1: bool = False

    def m_bar(self, tau: str, i: int):
        if i < 0:
            return 0
        return self.upper.get((_key(tau), i), 0)

    def m_low(self, alpha: str, i: int):
        if i < 0:
            return 0
        return self.lower.get((_key(alpha), i), 0)

    def m_hat(self, tau: str, i: int):
        return self.gadget.get((_key(tau), i))

    def easy(self, i: int):
        return self.easy_upper.get(i, 0), self.easy_lower.get(i, 0)

    def literal(self, tau: str, i: int) -> bool:
        """True when ``m_bar`` is exactly the size of the proposal slot space."""
        from .counting import tuple_space_size
        if tau == "3edge":
            return self.easy_upper.get(i) == tuple_space_size(self.instance, "3edge", i)
        t = _key(tau)
        if t == "I":
            return False
        return self.m_bar(t, i) == tuple_space_size(self.instance, t, i)

    def to_json(self) -> dict:
        def enc(v):
            return None if v is None else str(v)
        return {
            "provider": self.provider, "i1": self.i1, "i1_easy": self.i1_easy, "epsilon": str(self.eps),
            "upper": {f"{t}:{i}": enc(v) for (t, i), v in sorted(self.upper.items())},
            "lower": {f"{a}:{i}": enc(v) for (a, i), v in sorted(self.lower.items())},
            "gadget": {f"{t}:{i}": enc(v) for (t, i), v in sorted(self.gadget.items())},
            "easy": {str(i): [enc(self.easy_upper[i]), enc(self.easy_lower[i])] for i in sorted(self.easy_upper)},
        }


def analytic_table(instance: HostInstance) -> BoundTable:
    ie = i1_easy(instance)
    i1 = i1_uniform(instance) if instance.regular_complement else 0
    upper, lower, gadget = {}, {}, {}
    for i in range(i1 + 1):
        for t in UPPER_TYPES:
            upper[(t, i)] = uniform_upper(instance, t, i)
        for a in LOWER_CLASSES:
            lower[(a, i)] = uniform_lower(instance, a, i)
        for t in GADGET_TYPES:
            gadget[(t, i)] = gadget_lower(instance, t, i)
    easy_upper, easy_lower = {}, {}
    for i in range(ie + 1):
        easy_upper[i], easy_lower[i] = easy_bounds(instance, i)
    return BoundTable(instance, "analytic", i1, ie, epsilon(instance), upper, lower, gadget,
                      easy_upper, easy_lower)


def check_positive(value, what: str) -> None:
    """Analytic-provider guard: a lower bound used as a numerator must be positive."""
    if value is None or value <= 0:
        raise BoundGuard(f"{what} = {value} is not positive; instance is outside the "
                         "regime of the closed-form bounds; rerun with --bound-provider oracle")


def oracle_extrema(instance: HostInstance, budget: int = 200_000, eps=None) -> BoundTable:
    """Exact extrema over enumerated strata (see :mod:`dfactor.oracle`)."""
    from .oracle import strata_extrema
    return strata_extrema(instance, budget=budget, eps=eps)


def make_table(instance: HostInstance, provider: str = "analytic", **kw) -> BoundTable:
    if provider == "analytic":
        return analytic_table(instance)
    if provider == "oracle":
        return oracle_extrema(instance, **kw)
    raise ValueError(f"unknown bound provider {provider!r}")

"""Exact truncated Puiseux series in q = e^{2 pi i z} over the rationals.

This is the proof-grade engine of the package: every coefficient is a
`fractions.Fraction`, so identity checks between eta-quotients are exact
equality of rationals rather than floating-point comparisons.

Conventions baked into the representation:

* A series stands for  (2 pi i)^pi_power * 2^two_power * sum_e c_e q^e.
  Factors of 2*pi*i (from d/dz = 2*pi*i * q d/dq and from normalisations
  like 16*pi*i = 8 * (2*pi*i)) are tracked symbolically in `pi_power`,
  never numerically, so the coefficient ring stays rational.
* `two_power` holds an exact rational exponent of 2.  It is only ever
  nonzero transiently (fractional powers of leading coefficients such as
  16^{2/3} = 2^{8/3}); in every verified identity these factors cancel.
* Exponents are rationals whose denominator divides 48; anything coarser
  signals a composition bug and raises immediately.
* `truncation` marks the first unknown exponent: all stored exponents are
  strictly below it, and arithmetic propagates truncation honestly (a
  product is only known up to min(Ta + lb, Tb + la)).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Callable, Iterable, Mapping

QExponent = Fraction  # exponent of q; denominator divides MAX_EXPONENT_DENOMINATOR
MAX_EXPONENT_DENOMINATOR = 48

_ZERO = Fraction(0)
_ONE = Fraction(1)
_TWO_PI_I = 2j * cmath.pi


class QSeriesError(ValueError):
    """Violation of a series precondition (truncation, pi_power, exponents...)."""


def _check_exponent(e: Fraction) -> Fraction:
    if e.denominator > MAX_EXPONENT_DENOMINATOR or MAX_EXPONENT_DENOMINATOR % e.denominator:
        raise QSeriesError(
            f"exponent {e} has denominator {e.denominator}; only divisors of "
            f"{MAX_EXPONENT_DENOMINATOR} are allowed"
        )
    return e


class PuiseuxSeries:
    """Truncated formal Puiseux series with exact rational coefficients."""

    __slots__ = ("terms", "truncation", "pi_power", "two_power")

    def __init__(
        self,
        terms: Mapping[Fraction, Fraction] | Iterable[tuple[Fraction, Fraction]],
        truncation: Fraction,
        pi_power: int = 0,
        two_power: Fraction = _ZERO,
    ):
        trunc = _check_exponent(Fraction(truncation))
        clean: dict[Fraction, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = Fraction(e)
            c = Fraction(c)
            if not c:
                continue
            if e >= trunc:
                continue
            _check_exponent(e)
            clean[e] = c
        self.terms = clean
        self.truncation = trunc
        self.pi_power = int(pi_power)
        self.two_power = Fraction(two_power)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value, truncation: Fraction) -> "PuiseuxSeries":
        return cls({_ZERO: Fraction(value)}, truncation)

    @classmethod
    def monomial(cls, exponent, coeff, truncation: Fraction) -> "PuiseuxSeries":
        return cls({Fraction(exponent): Fraction(coeff)}, truncation)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_exponent(self) -> Fraction:
        """Smallest stored exponent; the truncation order for a zero series."""
        return min(self.terms) if self.terms else self.truncation

    @property
    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            raise QSeriesError("zero series has no leading coefficient")
        return self.terms[self.leading_exponent]

    def coefficient(self, exponent) -> Fraction:
        e = Fraction(exponent)
        if e >= self.truncation:
            raise QSeriesError(f"coefficient at q^{e} is beyond truncation q^{self.truncation}")
        return self.terms.get(e, _ZERO)

    def sorted_terms(self) -> list[tuple[Fraction, Fraction]]:
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        parts = []
        if self.pi_power:
            parts.append(f"(2*pi*i)^{self.pi_power} *")
        if self.two_power:
            parts.append(f"2^({self.two_power}) *")
        body = " + ".join(
            f"{c}*q^({e})" if e else f"{c}" for e, c in self.sorted_terms()[:8]
        )
        if len(self.terms) > 8:
            body += " + ..."
        if not body:
            body = "0"
        parts.append(f"({body} + O(q^({self.truncation})))")
        return " ".join(parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return (
            self.terms == other.terms
            and self.truncation == other.truncation
            and self.pi_power == other.pi_power
            and self.two_power == other.two_power
        )

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.truncation, self.pi_power, self.two_power))

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """Exact coefficient agreement below the common truncation order."""
        return first_difference(self, other) is None

    # -- ring operations ---------------------------------------------------

    def _require_same_prefactors(self, other: "PuiseuxSeries", op: str) -> None:
        if self.pi_power != other.pi_power:
            raise QSeriesError(
                f"{op} requires equal pi_power (got {self.pi_power} and {other.pi_power})"
            )

    def _align_two_power(self, other: "PuiseuxSeries") -> tuple["PuiseuxSeries", "PuiseuxSeries"]:
        if self.two_power == other.two_power:
            return self, other
        delta = other.two_power - self.two_power
        if delta.denominator == 1:
            scaled = {e: c * (_ONE * 2) ** delta for e, c in other.terms.items()}
            return self, PuiseuxSeries(scaled, other.truncation, other.pi_power, self.two_power)
        raise QSeriesError(
            f"cannot add series with incompatible 2-power prefactors "
            f"{self.two_power} and {other.two_power}"
        )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PuiseuxSeries.constant(other, self.truncation)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._require_same_prefactors(other, "add/sub")
        a, b = self._align_two_power(other)
        trunc = min(a.truncation, b.truncation)
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, _ZERO) + c
        return PuiseuxSeries(out, trunc, a.pi_power, a.two_power)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return PuiseuxSeries(
            {e: -c for e, c in self.terms.items()}, self.truncation, self.pi_power, self.two_power
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PuiseuxSeries.constant(other, self.truncation)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        la, lb = self.leading_exponent, other.leading_exponent
        trunc = min(self.truncation + lb, other.truncation + la)
        out: dict[Fraction, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                if e >= trunc:
                    continue
                out[e] = out.get(e, _ZERO) + ca * cb
        return PuiseuxSeries(
            out, trunc, self.pi_power + other.pi_power, self.two_power + other.two_power
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, value) -> "PuiseuxSeries":
        value = Fraction(value)
        return PuiseuxSeries(
            {e: c * value for e, c in self.terms.items()},
            self.truncation,
            self.pi_power,
            self.two_power,
        )

    def scale_two_power(self, delta) -> "PuiseuxSeries":
        """Multiply by an exact (possibly fractional) power of 2."""
        tp = self.two_power + Fraction(delta)
        if tp.denominator == 1:
            scaled = {e: c * Fraction(2) ** tp for e, c in self.terms.items()}
            return PuiseuxSeries(scaled, self.truncation, self.pi_power, _ZERO)
        return PuiseuxSeries(self.terms, self.truncation, self.pi_power, tp)

    def shift_pi_power(self, delta: int) -> "PuiseuxSeries":
        return PuiseuxSeries(self.terms, self.truncation, self.pi_power + delta, self.two_power)

    def inverse(self) -> "PuiseuxSeries":
        if not self.terms:
            raise QSeriesError("division by a series with zero leading term")
        lead = self.leading_exponent
        c0 = self.terms[lead]
        # unit part: self / (c0 q^lead), then invert the unit, then shift back
        unit_trunc = self.truncation - lead
        unit = {e - lead: c / c0 for e, c in self.terms.items()}
        inv = _invert_unit(unit, unit_trunc)
        out = {e - lead: c / c0 for e, c in inv.items()}
        return PuiseuxSeries(
            out, unit_trunc - lead, -self.pi_power, -self.two_power
        )

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1, 1) / Fraction(other))
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self.__mul__(other.inverse())

    def pow_int(self, n: int) -> "PuiseuxSeries":
        if n < 0:
            return self.inverse().pow_int(-n)
        # preserve truncation semantics of repeated multiplication
        result = PuiseuxSeries.constant(1, self.truncation - self.leading_exponent * max(n - 1, 0))
        if n == 0:
            return PuiseuxSeries.constant(1, self.truncation)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def truncate(self, order) -> "PuiseuxSeries":
        order = Fraction(order)
        if order > self.truncation:
            raise QSeriesError(
                f"cannot extend truncation from q^{self.truncation} to q^{order}"
            )
        return PuiseuxSeries(
            {e: c for e, c in self.terms.items() if e < order},
            order,
            self.pi_power,
            self.two_power,
        )

    # -- calculus ----------------------------------------------------------

    def q_derivative(self) -> "PuiseuxSeries":
        """d/dz as (2 pi i) * q d/dq: multiplies c_e by e and bumps pi_power."""
        return PuiseuxSeries(
            {e: c * e for e, c in self.terms.items()},
            self.truncation,
            self.pi_power + 1,
            self.two_power,
        )

    # -- numeric evaluation (for engine cross-agreement) --------------------

    def eval_at(self, z: complex) -> complex:
        """Evaluate at a half-plane point via q^e := e^{2 pi i e z} (unambiguous)."""
        total = 0j
        for e, c in self.terms.items():
            total += float(c) * cmath.exp(_TWO_PI_I * float(e) * z)
        total *= _TWO_PI_I ** self.pi_power
        if self.two_power:
            total *= 2.0 ** float(self.two_power)
        return total

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.two_power:
            if self.two_power.denominator != 1:
                raise QSeriesError("cannot serialize a series with fractional 2-power prefactor")
            return self.scale_two_power(0).to_json_dict()
        return {
            "pi_power": self.pi_power,
            "terms": [
                [e.numerator, e.denominator, c.numerator, c.denominator]
                for e, c in self.sorted_terms()
            ],
            "truncation": [self.truncation.numerator, self.truncation.denominator],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PuiseuxSeries":
        terms = {
            Fraction(en, ed): Fraction(cn, cd) for en, ed, cn, cd in data["terms"]
        }
        tn, td = data["truncation"]
        return cls(terms, Fraction(tn, td), data.get("pi_power", 0))


def _invert_unit(unit: dict[Fraction, Fraction], trunc: Fraction) -> dict[Fraction, Fraction]:
    """Invert a series with constant term 1, exponents >= 0, modulo q^trunc."""
    assert unit.get(_ZERO) == 1
    pos = sorted(e for e in unit if e > 0)
    inv: dict[Fraction, Fraction] = {_ZERO: _ONE}
    # exponents of the inverse live in the additive semigroup of `pos`
    frontier = sorted(inv)
    known: list[Fraction] = [_ZERO]
    # iterative coefficient extraction in increasing exponent order
    candidates = {_ZERO}
    done: set[Fraction] = set()
    while True:
        todo = sorted(e for e in candidates if e not in done and e < trunc)
        if not todo:
            break
        e = todo[0]
        done.add(e)
        if e > 0:
            s = _ZERO
            for f in pos:
                if f > e:
                    break
                prev = inv.get(e - f)
                if prev:
                    s += unit[f] * prev
            if s:
                inv[e] = -s
        base = e
        for f in pos:
            nxt = base + f
            if nxt < trunc:
                candidates.add(nxt)
    return {e: c for e, c in inv.items() if c}


def first_difference(a: PuiseuxSeries, b: PuiseuxSeries) -> tuple[Fraction, Fraction, Fraction] | None:
    """First (exponent, coeff_a, coeff_b) where the series disagree, or None.

    Comparison runs below the common truncation order; pi/2-power prefactors
    must match (a genuine mismatch there is reported at exponent of the
    leading term).
    """
    if a.pi_power != b.pi_power or a.two_power != b.two_power:
        e = min(a.leading_exponent, b.leading_exponent)
        return (e, a.terms.get(e, _ZERO), b.terms.get(e, _ZERO))
    trunc = min(a.truncation, b.truncation)
    exps = sorted(
        {e for e in a.terms if e < trunc} | {e for e in b.terms if e < trunc}
    )
    for e in exps:
        ca = a.terms.get(e, _ZERO)
        cb = b.terms.get(e, _ZERO)
        if ca != cb:
            return (e, ca, cb)
    return None


def series_arith(a: PuiseuxSeries, b: PuiseuxSeries, op: str) -> PuiseuxSeries:
    """Dispatching wrapper over +, -, *, / for the CLI and tests."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise QSeriesError(f"unknown op {op!r}; expected add/sub/mul/div")


def q_derivative(a: PuiseuxSeries) -> PuiseuxSeries:
    return a.q_derivative()


def series_fractional_power(
    a: PuiseuxSeries, p, leading_root: Fraction | None = None
) -> PuiseuxSeries:
    """Raise a series with nonzero leading term to a rational power p.

    The leading coefficient c must have an exact p-th power: either the
    caller supplies `leading_root` = c^p as a rational, or c is an exact
    integer power of 2 (then c^p is tracked as a symbolic 2-power).
    """
    p = Fraction(p)
    if a.is_zero():
        raise QSeriesError("fractional power of the zero series")
    if a.pi_power and p.denominator != 1:
        raise QSeriesError("fractional power of a series with a (2 pi i) prefactor")
    if p.denominator == 1 and leading_root is None:
        n = int(p)
        return a.pow_int(n)
    lead = a.leading_exponent
    _check_exponent(lead * p)
    c0 = a.terms[lead]
    two_delta = a.two_power * p
    if leading_root is not None:
        lead_factor = Fraction(leading_root)
    else:
        k = _exact_log2(c0)
        if k is None:
            raise QSeriesError(
                f"leading coefficient {c0} is not an exact power of 2; "
                "pass leading_root explicitly"
            )
        lead_factor = _ONE
        two_delta += k * p
    # unit part (1 + u)^p via the binomial series
    unit_trunc = a.truncation - lead
    u = PuiseuxSeries(
        {e - lead: c / c0 for e, c in a.terms.items() if e != lead}, unit_trunc
    )
    result = PuiseuxSeries.constant(1, unit_trunc)
    if not u.is_zero():
        n_terms = int(ceil(unit_trunc / u.leading_exponent)) + 1
        binom = _ONE
        power = PuiseuxSeries.constant(1, unit_trunc)
        for n in range(1, n_terms):
            binom *= (p - (n - 1)) / n
            power = power * u
            if power.is_zero():
                break
            result = result + power.scale(binom)
    shifted = PuiseuxSeries(
        {e + lead * p: c * lead_factor for e, c in result.terms.items()},
        result.truncation + lead * p,
        a.pi_power * int(p) if p.denominator == 1 else 0,
        two_delta,
    )
    return shifted


def _exact_log2(c: Fraction) -> int | None:
    if c <= 0:
        return None
    num, den = c.numerator, c.denominator
    if den == 1:
        k = num.bit_length() - 1
        return k if num == 1 << k else None
    if num == 1:
        k = den.bit_length() - 1
        return -k if den == 1 << k else None
    return None


# --------------------------------------------------------------------------
# Eta quotients
# --------------------------------------------------------------------------

_ALLOWED_SCALES = (Fraction(1, 2), Fraction(1), Fraction(2))


class EtaQuotient:
    """Symbolic product  scalar * (2 pi i)^pi_power * prod_j eta(scale_j z)^{e_j}."""

    __slots__ = ("factors", "scalar", "pi_power")

    def __init__(self, factors, scalar=1, pi_power: int = 0):
        fs = []
        for scale, power in factors:
            scale = Fraction(scale)
            if scale not in _ALLOWED_SCALES:
                raise QSeriesError(f"eta scale {scale} not in {{1/2, 1, 2}}")
            fs.append((scale, int(power)))
        self.factors = tuple(fs)
        self.scalar = Fraction(scalar)
        self.pi_power = int(pi_power)

    @property
    def leading_exponent(self) -> Fraction:
        return sum((s * p for s, p in self.factors), _ZERO) / 24

    def qexp(self, order) -> PuiseuxSeries:
        order = Fraction(order)
        total_lead = self.leading_exponent
        if order <= total_lead:
            raise QSeriesError(
                f"truncation order {order} does not reach the leading exponent {total_lead}"
            )
        result = PuiseuxSeries.constant(self.scalar, order - total_lead)
        for scale, power in self.factors:
            lead_i = scale * power / 24
            piece = eta_power_qexp(scale, power, order - (total_lead - lead_i))
            result = result * piece
        if result.truncation != order:  # can only be deeper, trim for predictability
            result = result.truncate(order)
        return PuiseuxSeries(result.terms, order, self.pi_power, result.two_power)

    def evaluate(self, z: complex, eta_fn: Callable[[complex], complex]) -> complex:
        val = complex(self.scalar)
        for scale, power in self.factors:
            val *= eta_fn(complex(scale) * z) ** power
        return val * _TWO_PI_I ** self.pi_power

    def __repr__(self):
        body = " ".join(f"eta({s}z)^{p}" for s, p in self.factors)
        pre = f"{self.scalar}"
        if self.pi_power:
            pre += f" (2 pi i)^{self.pi_power}"
        return f"EtaQuotient({pre} {body})"


@lru_cache(maxsize=None)
def _euler_product_qexp(scale: Fraction, order: Fraction) -> PuiseuxSeries:
    """prod_{n>=1} (1 - q^{scale n}) truncated at `order`, via the pentagonal sparse form."""
    terms = {_ZERO: _ONE}
    k = 1
    while True:
        e1 = scale * Fraction(k * (3 * k - 1), 2)
        e2 = scale * Fraction(k * (3 * k + 1), 2)
        sign = _ONE if k % 2 == 0 else -_ONE
        hit = False
        for e in (e1, e2):
            if e < order:
                terms[e] = terms.get(e, _ZERO) + sign
                hit = True
        if not hit:
            break
        k += 1
    return PuiseuxSeries(terms, order)


@lru_cache(maxsize=None)
def eta_power_qexp(scale, power: int, order) -> PuiseuxSeries:
    """q-expansion of eta(scale*z)^power = q^{scale*power/24} prod (1-q^{scale n})^power.

    `scale` must be 1/2, 1 or 2; `order` must exceed the leading exponent.
    Negative powers are series-inverted exactly.
    """
    scale = Fraction(scale)
    order = Fraction(order)
    if scale not in _ALLOWED_SCALES:
        raise QSeriesError(f"eta scale {scale} not in {{1/2, 1, 2}}")
    lead = scale * power / 24
    _check_exponent(lead)
    if order <= lead:
        raise QSeriesError(
            f"order {order} must exceed the leading exponent {lead} "
            "(an empty series would be meaningless)"
        )
    unit_order = order - lead
    if power == 0:
        return PuiseuxSeries.constant(1, order)
    base = _euler_product_qexp(scale, unit_order)
    unit = _pow_trunc(base, power, unit_order)
    return PuiseuxSeries(
        {e + lead: c for e, c in unit.terms.items()}, order
    )


def _pow_trunc(series: PuiseuxSeries, n: int, trunc: Fraction) -> PuiseuxSeries:
    if n < 0:
        inv = series.inverse()
        inv = PuiseuxSeries(inv.terms, trunc, inv.pi_power, inv.two_power)
        return _pow_trunc(inv, -n, trunc)
    result = PuiseuxSeries.constant(1, trunc)
    acc = series
    while n:
        if n & 1:
            result = result * acc
            result = PuiseuxSeries(result.terms, trunc, result.pi_power, result.two_power)
        n >>= 1
        if n:
            acc = acc * acc
            acc = PuiseuxSeries(acc.terms, trunc, acc.pi_power, acc.two_power)
    return result


# --------------------------------------------------------------------------
# The specific quotients of this artifact
# --------------------------------------------------------------------------

# weight-0 Hauptmodul of the level-2 congruence group, q-expansion 16 q^{1/2} - 128 q + ...
LAMBDA_QUOTIENT = EtaQuotient([(Fraction(1, 2), 8), (2, 16), (1, -24)], scalar=16)
# the complementary quotient: 1 - lambda, with leading term 1
LAMBDA_COMPLEMENT_QUOTIENT = EtaQuotient([(Fraction(1, 2), 16), (2, 8), (1, -24)])
# z-derivative of lambda: 16 pi i = 8 * (2 pi i) is kept as scalar 8, pi_power 1
LAMBDA_PRIME_QUOTIENT = EtaQuotient(
    [(Fraction(1, 2), 16), (2, 16), (1, -28)], scalar=8, pi_power=1
)
# cube root device g with g^3 = lambda(1-lambda)/16, leading q^{1/6}
G_QUOTIENT = EtaQuotient([(Fraction(1, 2), 8), (2, 8), (1, -16)])
# eta^4, the weight-2 form whose multiplier system drives all the checks
ETA4_QUOTIENT = EtaQuotient([(1, 4)])
# weight-2 quotient with leading q^{1/3}; its termwise primitive defines phi
F3_QUOTIENT = EtaQuotient([(Fraction(1, 2), 8), (2, 8), (1, -12)])


@lru_cache(maxsize=None)
def lambda_qexp(order) -> PuiseuxSeries:
    """q-expansion of the modular lambda function: 16 q^{1/2} - 128 q + 704 q^{3/2} - ..."""
    return LAMBDA_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def one_minus_lambda_qexp(order) -> PuiseuxSeries:
    return LAMBDA_COMPLEMENT_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def lambdaprime_qexp(order) -> PuiseuxSeries:
    """q-expansion of lambda' = d lambda / dz, as an eta quotient (pi_power 1).

    Exact agreement with q_derivative(lambda_qexp) is one of the package's
    acceptance identities.
    """
    return LAMBDA_PRIME_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def g_qexp(order) -> PuiseuxSeries:
    return G_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def eta4_qexp(order) -> PuiseuxSeries:
    return ETA4_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def f3_qexp(order) -> PuiseuxSeries:
    return F3_QUOTIENT.qexp(Fraction(order))


@lru_cache(maxsize=None)
def phi_qexp(order) -> PuiseuxSeries:
    """Termwise primitive of f3, normalised so that phi = (1/3) sum c_a/a q^a.

    The 2 pi i produced by differentiating e^{2 pi i a z} cancels the
    prefactor of the defining integral, so the result is a plain rational
    series (pi_power 0) with leading term q^{1/3}.
    """
    order = Fraction(order)
    if order <= Fraction(1, 3):
        raise QSeriesError("phi needs truncation order > 1/3 to contain its leading term")
    f3 = f3_qexp(order)
    terms = {}
    for e, c in f3.terms.items():
        if e <= 0:
            raise QSeriesError("termwise integration requires strictly positive exponents")
        terms[e] = c / (3 * e)
    return PuiseuxSeries(terms, order)


@lru_cache(maxsize=None)
def f2_qexp(order) -> PuiseuxSeries:
    """q-expansion of the weight-2 second-order form phi * eta^4 (leading q^{1/2})."""
    order = Fraction(order)
    phi = phi_qexp(order - Fraction(1, 6))
    eta4 = eta4_qexp(order - Fraction(1, 3))
    prod = phi * eta4
    return prod.truncate(order) if prod.truncation > order else prod


def hypergeom_compose(a, b, c, inner: PuiseuxSeries, order) -> PuiseuxSeries:
    """Formal composition of the Gauss series sum (a)_n (b)_n / ((c)_n n!) x^n with `inner`.

    `inner` must have strictly positive leading exponent (otherwise the
    composition is not a formal series operation), and c must not be a
    nonpositive integer.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    order = Fraction(order)
    if c <= 0 and c.denominator == 1:
        raise QSeriesError(f"hypergeometric parameter c={c} is a nonpositive integer")
    if inner.pi_power or inner.two_power:
        raise QSeriesError("composition requires a plain rational inner series")
    trunc = min(order, inner.truncation)
    result = PuiseuxSeries.constant(1, trunc)
    if inner.is_zero():
        return result
    lead = inner.leading_exponent
    if lead <= 0:
        raise QSeriesError(
            f"inner series has leading exponent {lead}; composition needs it positive"
        )
    coeff = _ONE
    power = PuiseuxSeries.constant(1, trunc)
    n = 0
    while True:
        power = power * inner
        power = PuiseuxSeries(power.terms, min(power.truncation, trunc))
        if power.is_zero() or power.leading_exponent >= trunc:
            break
        coeff = coeff * (a + n) * (b + n) / ((c + n) * (n + 1))
        result = result + power.scale(coeff)
        n += 1
    return result

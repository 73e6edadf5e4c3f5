"""Complex-numeric evaluation on the upper half-plane.

Provides the Dedekind eta function (with fundamental-domain reduction so
points with tiny imaginary part stay accurate), the eta-quotient functions
built on it, a Gauss 2F1 evaluator with the classical argument
transformations, and the integrated second-order object phi together with
its derived forms.

Evaluation of phi off the imaginary axis is done through its globally
convergent Fourier series combined with exact functional equations
(translation by 2 and the inversion S), never by picking a branch of the
hypergeometric closed form: the closed form with principal branches equals
the analytic continuation only in a neighbourhood of the imaginary axis.
`phi_closed_form` exposes the principal-branch formula separately so the
two can be compared where they must agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import qseries

TWO_PI_I = 2j * math.pi


class PrecisionError(RuntimeError):
    """Requested tolerance not reached; carries the achieved bound."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved bound {achieved:.3e})")
        self.achieved = achieved


class BranchCutError(ValueError):
    """Evaluation requested on the [1, oo) branch cut."""


class AnalyticDomainError(ValueError):
    """Evaluation at a pole or outside a function's domain."""


@dataclass(frozen=True)
class EvalConfig:
    target_abs_tol: float = 1e-12
    min_im_for_direct_series: float = 0.3
    max_terms: int = 100_000


DEFAULT_CFG = EvalConfig()


def _compute_c_constant() -> float:
    return 2.0 ** (1.0 / 3.0) * math.pi ** 2 / (3.0 * math.gamma(1.0 / 3.0) ** 3)


@dataclass(frozen=True)
class Constants:
    """The normalisation constant of the crossing formulas and derived values."""

    C: float
    chi_T2: complex          # multiplier of eta^4 under z -> z + 2
    d_g1: complex            # cocycle constant of the generator z -> z + 2
    d_g2: complex            # cocycle constant of the generator z -> z/(2z+1)


C_CONSTANT = _compute_c_constant()
CHI_T2 = cmath.exp(TWO_PI_I / 3)
CHI_G2 = cmath.exp(-TWO_PI_I / 3)
# multiplier and cocycle constant of the inversion z -> -1/z (used for reduction)
CHI_S = -1.0 + 0.0j
D_S = complex(-C_CONSTANT)
D_G1 = 0j
D_G2 = C_CONSTANT * (cmath.exp(-TWO_PI_I / 3) - 1)

CONSTANTS = Constants(C=C_CONSTANT, chi_T2=CHI_T2, d_g1=D_G1, d_g2=D_G2)


# --------------------------------------------------------------------------
# Dedekind eta
# --------------------------------------------------------------------------

def _require_upper_half(z: complex) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise AnalyticDomainError(f"point {z} is not in the upper half-plane")
    return z


def _eta_series(z: complex, cfg: EvalConfig) -> complex:
    """Raw pentagonal-number product; accurate when im(z) is not small."""
    q = cmath.exp(TWO_PI_I * z)
    aq = abs(q)
    total = 1 + 0j
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        term = q ** e1 + q ** e2
        if k % 2:
            total -= term
        else:
            total += term
        tail = 2 * aq ** ((k + 1) * (3 * k + 2) // 2) / (1 - aq)
        if tail < cfg.target_abs_tol / 256:
            break
        if 2 * k > cfg.max_terms:
            raise PrecisionError("eta series did not converge", tail)
        k += 1
    return cmath.exp(TWO_PI_I * z / 24) * total


def dedekind_eta(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """eta(z) = q^{1/24} prod (1 - q^n), q = e^{2 pi i z}.

    Points with im(z) below `cfg.min_im_for_direct_series` are first moved
    toward the fundamental domain with the classical transformations
    eta(z+1) = e^{i pi/12} eta(z) and eta(-1/z) = sqrt(-i z) eta(z).
    """
    w = _require_upper_half(z)
    mult = 1 + 0j
    if w.imag < cfg.min_im_for_direct_series:
        for _ in range(256):
            n = round(w.real)
            if n:
                w = w - n
                mult *= cmath.exp(1j * math.pi * n / 12)
            if abs(w) < 1 - 1e-12:
                mult /= cmath.sqrt(-1j * w)
                w = -1 / w
            else:
                break
        else:
            raise PrecisionError("eta reduction did not terminate", math.inf)
    return mult * _eta_series(w, cfg)


def _eta_fn(cfg: EvalConfig):
    return lambda w: dedekind_eta(w, cfg)


def lambda_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """The level-2 Hauptmodul; 16 eta(z/2)^8 eta(2z)^16 / eta(z)^24."""
    return qseries.LAMBDA_QUOTIENT.evaluate(_require_upper_half(z), _eta_fn(cfg))


def one_minus_lambda_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """1 - lambda computed by its own eta quotient (no cancellation near lambda = 1)."""
    return qseries.LAMBDA_COMPLEMENT_QUOTIENT.evaluate(_require_upper_half(z), _eta_fn(cfg))


def lambdaprime_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """d lambda / dz as an eta quotient (cross-checkable by finite differences)."""
    return qseries.LAMBDA_PRIME_QUOTIENT.evaluate(_require_upper_half(z), _eta_fn(cfg))


def g_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """The cube-root device g, always evaluated as an eta quotient so that
    no choice of cube root of lambda(1-lambda)/16 is ever made numerically."""
    return qseries.G_QUOTIENT.evaluate(_require_upper_half(z), _eta_fn(cfg))


def eta4_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    return dedekind_eta(z, cfg) ** 4


def f3_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    return qseries.F3_QUOTIENT.evaluate(_require_upper_half(z), _eta_fn(cfg))


# --------------------------------------------------------------------------
# Gauss hypergeometric function
# --------------------------------------------------------------------------

def _g2f1_series(a: float, b: float, c: float, x: complex, cfg: EvalConfig) -> complex:
    total = 1 + 0j
    term = 1 + 0j
    ax = abs(x)
    n = 0
    while True:
        term = term * ((a + n) * (b + n)) / ((c + n) * (n + 1)) * x
        total += term
        n += 1
        if ax < 1:
            # eventual geometric decay at ratio ~ |x|
            rho = ax * (1 + (abs(a) + abs(b) + 2) / n)
            if rho < 1 and abs(term) * rho / (1 - rho) < cfg.target_abs_tol / 2:
                break
        if n > cfg.max_terms:
            raise PrecisionError("2F1 series did not converge", abs(term))
    return total


def _gamma_ratio(*, num: tuple[float, ...], den: tuple[float, ...]) -> float:
    for v in num + den:
        if v <= 0 and float(v).is_integer():
            raise AnalyticDomainError(f"gamma pole at {v} in connection formula")
    val = 1.0
    for v in num:
        val *= math.gamma(v)
    for v in den:
        val /= math.gamma(v)
    return val


def _g2f1_one_minus_x(a, b, c, x, cfg) -> complex:
    s = c - a - b
    if abs(s - round(s)) < 1e-9:
        raise AnalyticDomainError(
            f"connection formula at 1-x needs non-integer c-a-b (got {s})"
        )
    u = 1 - x
    A = _gamma_ratio(num=(c, s), den=(c - a, c - b))
    B = _gamma_ratio(num=(c, -s), den=(a, b))
    return (
        A * _g2f1_series(a, b, a + b - c + 1, u, cfg)
        + B * u ** s * _g2f1_series(c - a, c - b, s + 1, u, cfg)
    )


def gauss_2f1(
    a: float,
    b: float,
    c: float,
    x: complex,
    cfg: EvalConfig = DEFAULT_CFG,
    limit_from_below: bool = False,
) -> complex:
    """2F1(a, b; c; x) for real parameters and complex argument.

    Power series for |x| <= 0.7; otherwise the classical x -> x/(x-1) and
    x -> 1-x transformations, chosen by smallest resulting modulus.  Real
    arguments on [1, oo) raise BranchCutError unless `limit_from_below`
    selects the continuation from below the cut.
    """
    if c <= 0 and float(c).is_integer():
        raise AnalyticDomainError(f"2F1 parameter c={c} is a nonpositive integer")
    x = complex(x)
    if x.imag == 0 and x.real >= 1:
        if x.real == 1 and c - a - b <= 0:
            raise AnalyticDomainError(
                f"2F1 diverges at x=1 for c-a-b = {c - a - b} <= 0"
            )
        if not limit_from_below:
            raise BranchCutError(
                f"argument {x} lies on the branch cut [1, oo); "
                "set limit_from_below=True for the limiting value"
            )
        x = complex(x.real, -0.0)

    if abs(x) <= 0.7:
        return _g2f1_series(a, b, c, x, cfg)
    if abs(1 - x) <= 0.7:
        return _g2f1_one_minus_x(a, b, c, x, cfg)
    y = x / (x - 1)
    pfaff = (1 - x) ** (-a)
    if abs(y) <= 0.7:
        return pfaff * _g2f1_series(a, c - b, c, y, cfg)
    if abs(1 - y) <= 0.7:
        return pfaff * _g2f1_one_minus_x(a, c - b, c, y, cfg)
    # remaining sliver around |x| = |1-x| = 1: direct series still converges
    # (slowly) strictly inside the unit disc
    if abs(x) < 0.995:
        return _g2f1_series(a, b, c, x, cfg)
    if abs(y) < 0.995:
        return pfaff * _g2f1_series(a, c - b, c, y, cfg)
    raise PrecisionError(f"no convergent 2F1 route for argument {x}", math.inf)


# --------------------------------------------------------------------------
# phi and its derived forms
# --------------------------------------------------------------------------

_F2_TABLE_ORDERS = (48, 96, 144)


@lru_cache(maxsize=None)
def _f2_float_table(order: int):
    """Fourier coefficients of phi * eta^4 on the half-integer grid, as floats.

    Returns (coeffs, max_tail) with coeffs[j] the coefficient of q^{j/2}
    (j >= 1) and max_tail a bound used for adaptive order selection.  The
    coefficients of this series stay O(1) in magnitude (the function is
    holomorphic at every cusp), so summation is numerically benign on the
    whole half-plane.
    """
    series = qseries.f2_qexp(Fraction(order))
    jmax = 0
    pairs = []
    for e, coeff in series.sorted_terms():
        j = e * 2
        if j.denominator != 1:
            raise AssertionError("phi*eta^4 series left the half-integer grid")
        pairs.append((int(j), float(coeff)))
        jmax = max(jmax, int(j))
    coeffs = [0.0] * (jmax + 1)
    for j, fc in pairs:
        coeffs[j] = fc
    tail = max(abs(fc) for j, fc in pairs[-12:])
    return coeffs, tail


def _f2_series_value(w: complex, cfg: EvalConfig) -> complex:
    """phi(w) * eta(w)^4 by direct Fourier summation (globally convergent)."""
    v = cmath.exp(1j * math.pi * w)  # q^{1/2}
    av = abs(v)
    if av >= 0.999:
        raise PrecisionError("point too close to the real axis for the Fourier route", math.inf)
    for order in _F2_TABLE_ORDERS:
        coeffs, tailc = _f2_float_table(order)
        # crude tail bound: coefficients of this series stay O(10^2)
        bound = 50 * max(tailc, 1.0) * av ** (2 * order) / (1 - av)
        if bound < cfg.target_abs_tol / 4 or order == _F2_TABLE_ORDERS[-1]:
            if bound > cfg.target_abs_tol / 4:
                raise PrecisionError("phi Fourier series tail too large", bound)
            total = 0j
            for j in range(len(coeffs) - 1, 0, -1):
                total = (total + coeffs[j]) * v
            return total
    raise AssertionError("unreachable")


def _reduce_theta_group(z: complex):
    """Move z into {|Re| <= 1, |z| >= 1} by z -> z+-2 and z -> -1/z.

    Returns (w, A, B) with phi(z) = A * phi(w) + B, using the exact
    functional equations phi(w+2) = e^{-2 pi i/3} phi(w) and
    phi(-1/w) = C - phi(w).
    """
    w = complex(z)
    A = 1 + 0j
    B = 0j
    for _ in range(256):
        n = round(w.real / 2)
        if n:
            w = w - 2 * n
            A *= cmath.exp(-TWO_PI_I * n / 3)
        if abs(w) < 1 - 1e-12:
            B = B + A * C_CONSTANT
            A = -A
            w = -1 / w
        else:
            return w, A, B
    raise PrecisionError("group reduction did not terminate", math.inf)


def phi_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """The single-valued function on H whose Fourier expansion starts q^{1/3}.

    On the imaginary axis (and in a neighbourhood of it) this agrees with
    the principal-branch closed form 2^{-8/3} lambda^{2/3}
    2F1(1/3, 2/3; 5/3; lambda); elsewhere it is the analytic continuation
    of that formula, computed via the Fourier series after group reduction.
    """
    z = _require_upper_half(z)
    w, A, B = _reduce_theta_group(z)
    val = _f2_series_value(w, cfg) / eta4_num(w, cfg)
    return A * val + B


def phi_closed_form(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Principal-branch closed form; valid near the imaginary axis only."""
    lam = lambda_num(z, cfg)
    if lam.imag == 0 and lam.real >= 1:
        raise BranchCutError(f"lambda(z) = {lam} lies on the cut [1, oo)")
    return 2 ** (-8 / 3) * lam ** (2 / 3) * gauss_2f1(1 / 3, 2 / 3, 5 / 3, lam, cfg)


def f2_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """The weight-2 second-order form: phi(z) * eta(z)^4."""
    z = _require_upper_half(z)
    w, A, B = _reduce_theta_group(z)
    if w == z and A == 1 and B == 0:
        return _f2_series_value(z, cfg)
    return (A * (_f2_series_value(w, cfg) / eta4_num(w, cfg)) + B) * eta4_num(z, cfg)


def f2_series_direct(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Cross-check path: truncated Fourier series summed at z without reduction."""
    return _f2_series_value(_require_upper_half(z), cfg)


def G_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Weight-0, character-twisted form: eta^4 (1+lambda) / (3 lambda' (1-lambda))."""
    z = _require_upper_half(z)
    oml = one_minus_lambda_num(z, cfg)
    if oml == 0:
        raise AnalyticDomainError("pole: lambda(z) = 1")
    lam = 1 - oml
    return eta4_num(z, cfg) * (1 + lam) / (3 * lambdaprime_num(z, cfg) * oml)


def F_num(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Weight-4 cusp form: lambda' eta^4 (1+lambda) / (3 lambda (1-lambda)).

    Near the cusp at 0 the factor 1-lambda is evaluated through its own eta
    quotient, so the exponentially small denominator is formed without
    cancellation.
    """
    z = _require_upper_half(z)
    oml = one_minus_lambda_num(z, cfg)
    if oml == 0:
        raise AnalyticDomainError("pole: lambda(z) = 1")
    lam = lambda_num(z, cfg)
    return lambdaprime_num(z, cfg) * eta4_num(z, cfg) * (1 + lam) / (3 * lam * oml)

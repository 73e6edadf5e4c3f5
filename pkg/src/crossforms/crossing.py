"""Crossing probabilities and densities for critical percolation on a rectangle.

Three layers:

* the two-point anchored densities on the real line (closed hypergeometric
  forms in an anchor pair 0 < alpha < 1 < beta);
* their half-plane avatars p_bbar, p_b, n obtained by substituting the
  level-2 Hauptmodul, evaluated through closed forms that avoid derivatives
  (linear in the integrated form phi, rational in lambda);
* the rectangle quantities: horizontal crossing probability, horizontal-but-
  not-vertical probability, and expected number of horizontally crossing
  clusters, built by integrating the exact derivative formulas over the
  aspect ratio, with analytic Fourier tails.

`verify_double_integrals` and `verify_theorem21` are the numerical witnesses
tying the layers together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import quad
from scipy.optimize import brentq

from . import analytic, qseries
from .analytic import DEFAULT_CFG, EvalConfig

SQRT3 = math.sqrt(3.0)
_NORM = 4 * SQRT3 * math.pi         # common denominator 4 sqrt(3) pi
TAIL_CUTOFF = 12.0                  # integrate [r, 12] numerically, series beyond


class DivergenceError(ValueError):
    """Closed form evaluated where it diverges (anchor ratio at 1)."""


@dataclass(frozen=True)
class AnchorPair:
    """Anchor points on the real line: 0 < alpha < 1 < beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 < self.alpha < 1 < self.beta):
            raise ValueError(f"need 0 < alpha < 1 < beta, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class AspectRatio:
    """Rectangle width/height; the half-plane point is z = i*r."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"aspect ratio must be positive, got {self.r}")


@dataclass(frozen=True)
class CrossingValue:
    value: float | complex
    abs_err: float
    engine: str  # closed_form | quadrature | ode | series

    def __post_init__(self):
        if self.abs_err < 0:
            raise ValueError("abs_err must be nonnegative")


# --------------------------------------------------------------------------
# Anchored densities (closed forms)
# --------------------------------------------------------------------------

def _hyp(x, cfg: EvalConfig):
    return analytic.gauss_2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, x, cfg)


# reflection constant: 2F1(1,4/3;5/3;x) = -2F1(1,4/3;5/3;1-x) + B [x(1-x)]^{-2/3}
_REFLECT_B = 2 * math.gamma(2.0 / 3.0) ** 2 / math.gamma(1.0 / 3.0)


def _hyp_at_one_minus(u: float, cfg: EvalConfig) -> float:
    """2F1(1, 4/3; 5/3; 1-u) for small positive u, via the reflection identity.

    Keeps the beta -> infinity tail of the anchored integrals away from the
    hypergeometric branch point at argument 1.
    """
    if u > 0.5:
        return _hyp(1 - u, cfg).real
    return -_hyp(u, cfg).real + _REFLECT_B * u ** (-2.0 / 3.0) * (1 - u) ** (-2.0 / 3.0)


def _pi_h_b_raw(alpha: float, beta: float, cfg: EvalConfig) -> float:
    f = _hyp_at_one_minus(alpha / beta, cfg)
    return ((beta + alpha) * f - 2 * beta) / (_NORM * beta ** 2 * (beta - alpha))


def _pi_h_bbar_raw(alpha: float, beta: float, cfg: EvalConfig) -> float:
    f = _hyp(alpha / beta, cfg).real
    return ((beta + alpha) * f + 2 * beta) / (_NORM * beta ** 2 * (beta - alpha))


def _nu_h_raw(alpha: float, beta: float, cfg: EvalConfig) -> float:
    f = _hyp(alpha / beta, cfg).real
    return (beta ** 2 + 2 * alpha * beta - (beta ** 2 - alpha ** 2) * f) / (
        _NORM * beta ** 2 * (beta - alpha) ** 2
    )


def _closed_value(val: float, cfg: EvalConfig) -> CrossingValue:
    err = cfg.target_abs_tol + 1e-14 * abs(val)
    return CrossingValue(val, err, "closed_form")


def pi_h_b(a: AnchorPair, cfg: EvalConfig = DEFAULT_CFG, margin: float = 1e-8) -> CrossingValue:
    """Density of clusters crossing to the anchor but not enclosing it.

    Diverges as alpha/beta -> 1; arguments closer than `margin` are refused
    rather than regularised.
    """
    if 1 - a.alpha / a.beta < margin:
        raise DivergenceError(
            f"alpha/beta = {a.alpha / a.beta} within {margin} of the divergence at 1"
        )
    return _closed_value(_pi_h_b_raw(a.alpha, a.beta, cfg), cfg)


def pi_h_bbar(a: AnchorPair, cfg: EvalConfig = DEFAULT_CFG) -> CrossingValue:
    return _closed_value(_pi_h_bbar_raw(a.alpha, a.beta, cfg), cfg)


def nu_h(a: AnchorPair, cfg: EvalConfig = DEFAULT_CFG) -> CrossingValue:
    return _closed_value(_nu_h_raw(a.alpha, a.beta, cfg), cfg)


# --------------------------------------------------------------------------
# Half-plane avatars (substitute lambda(z) for the anchor, second at 1)
# --------------------------------------------------------------------------

def _prop_ingredients(z: complex, cfg: EvalConfig):
    lam = analytic.lambda_num(z, cfg)
    oml = analytic.one_minus_lambda_num(z, cfg)
    if oml == 0:
        raise analytic.AnalyticDomainError("pole: lambda(z) = 1")
    g2 = analytic.g_num(z, cfg) ** 2
    phi = analytic.phi_num(z, cfg)
    return lam, oml, g2, phi


def p_bbar(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """phi-linear closed form: phi (1+lam) / (4 sqrt3 pi g^2 (1-lam)) + 1/(2 sqrt3 pi (1-lam))."""
    lam, oml, g2, phi = _prop_ingredients(z, cfg)
    return phi * (1 + lam) / (_NORM * g2 * oml) + 1 / (2 * SQRT3 * math.pi * oml)


def p_b(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Same rational prefactors with phi replaced by C - phi and the tail negated."""
    lam, oml, g2, phi = _prop_ingredients(z, cfg)
    return (analytic.C_CONSTANT - phi) * (1 + lam) / (_NORM * g2 * oml) - 1 / (
        2 * SQRT3 * math.pi * oml
    )


def n_func(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Cluster-count density avatar: -phi-term plus (1+2 lam)/(4 sqrt3 pi (1-lam)^2)."""
    lam, oml, g2, phi = _prop_ingredients(z, cfg)
    return -phi * (1 + lam) / (_NORM * g2 * oml) + (1 + 2 * lam) / (_NORM * oml ** 2)


def p_bbar_density_route(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    """Direct substitution into the anchored closed form (cross-check path)."""
    lam = analytic.lambda_num(z, cfg)
    f = analytic.gauss_2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, lam, cfg)
    return ((1 + lam) * f + 2) / (_NORM * (1 - lam))


def p_b_density_route(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    lam = analytic.lambda_num(z, cfg)
    f = analytic.gauss_2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, 1 - lam, cfg)
    return ((1 + lam) * f - 2) / (_NORM * (1 - lam))


def n_density_route(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> complex:
    lam = analytic.lambda_num(z, cfg)
    f = analytic.gauss_2f1(1.0, 4.0 / 3.0, 5.0 / 3.0, lam, cfg)
    return (1 + 2 * lam - (1 - lam ** 2) * f) / (_NORM * (1 - lam) ** 2)


# --------------------------------------------------------------------------
# Rectangle quantities by integrating the exact derivatives in r
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _eta4_tail_coeffs() -> tuple[tuple[float, float], ...]:
    series = qseries.eta4_qexp(Fraction(4))
    return tuple((float(e), float(c)) for e, c in series.sorted_terms())


@lru_cache(maxsize=None)
def _f2_tail_coeffs() -> tuple[tuple[float, float], ...]:
    series = qseries.f2_qexp(Fraction(4))
    return tuple((float(e), float(c)) for e, c in series.sorted_terms())


def _series_tail_integral(coeffs, t0: float) -> tuple[float, float]:
    """integral_t0^inf of sum c_a e^{-2 pi a t} dt, with a crude error bound."""
    total = 0.0
    last = 0.0
    for a, c in coeffs:
        last = c * math.exp(-2 * math.pi * a * t0) / (2 * math.pi * a)
        total += last
    return total, abs(last)


def pi_h(r: AspectRatio | float, cfg: EvalConfig = DEFAULT_CFG) -> CrossingValue:
    """Horizontal crossing probability, as 4 sqrt3 C * integral_r^inf eta(it)^4 dt."""
    rv = r.r if isinstance(r, AspectRatio) else AspectRatio(float(r)).r
    scale = 4 * SQRT3 * analytic.C_CONSTANT
    tail, tail_err = _series_tail_integral(_eta4_tail_coeffs(), max(rv, TAIL_CUTOFF))
    if rv >= TAIL_CUTOFF:
        return CrossingValue(scale * tail, scale * tail_err + 1e-16, "quadrature")
    val, err = quad(
        lambda t: analytic.eta4_num(1j * t, cfg).real,
        rv,
        TAIL_CUTOFF,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return CrossingValue(scale * (val + tail), scale * (err + tail_err), "quadrature")


def pi_hbarv(r: AspectRatio | float, cfg: EvalConfig = DEFAULT_CFG) -> CrossingValue:
    """Horizontal-but-not-vertical probability, 8 sqrt3 * integral_r^inf of the
    weight-2 second-order form along the imaginary axis."""
    rv = r.r if isinstance(r, AspectRatio) else AspectRatio(float(r)).r
    scale = 8 * SQRT3
    tail, tail_err = _series_tail_integral(_f2_tail_coeffs(), max(rv, TAIL_CUTOFF))
    if rv >= TAIL_CUTOFF:
        return CrossingValue(scale * tail, scale * tail_err + 1e-16, "quadrature")
    val, err = quad(
        lambda t: analytic.f2_num(1j * t, cfg).real,
        rv,
        TAIL_CUTOFF,
        epsabs=1e-13,
        epsrel=1e-12,
        limit=200,
    )
    return CrossingValue(scale * (val + tail), scale * (err + tail_err), "quadrature")


def n_h(r: AspectRatio | float, cfg: EvalConfig = DEFAULT_CFG) -> CrossingValue:
    """Expected number of horizontally crossing clusters."""
    rv = r.r if isinstance(r, AspectRatio) else AspectRatio(float(r)).r
    ph = pi_h(rv, cfg)
    phbv = pi_hbarv(rv, cfg)
    oml = analytic.one_minus_lambda_num(1j * rv, cfg).real
    log_term = (SQRT3 / (4 * math.pi)) * math.log(1.0 / oml)
    return CrossingValue(
        ph.value - 0.5 * phbv.value + log_term,
        ph.abs_err + 0.5 * phbv.abs_err + 1e-15,
        "quadrature",
    )


def r_from_lambda(lambda_target: float, cfg: EvalConfig = DEFAULT_CFG) -> float:
    """Invert lambda(i r) = lambda_target by bisection (strictly monotone in r).

    The bracket [0.05, 40] covers lambda in (1e-53, 1 - 1e-26); beyond r = 40
    the eta quotient underflows double precision.
    """
    if not 0 < lambda_target < 1:
        raise ValueError("lambda_target must lie in (0, 1)")
    f = lambda rr: analytic.lambda_num(1j * rr, cfg).real - lambda_target
    return float(brentq(f, 0.05, 40.0, xtol=1e-13, rtol=8.9e-16, maxiter=200))


# --------------------------------------------------------------------------
# Verification reports
# --------------------------------------------------------------------------

def _inner_bbar(alpha: float, cfg: EvalConfig) -> float:
    val, _ = quad(
        lambda t: _pi_h_bbar_raw(alpha, 1.0 / t, cfg) / t ** 2,
        0.0,
        1.0,
        epsabs=1e-11,
        epsrel=1e-11,
        limit=200,
    )
    return val


def _inner_nu(alpha: float, cfg: EvalConfig) -> float:
    val, _ = quad(
        lambda t: _nu_h_raw(alpha, 1.0 / t, cfg) / t ** 2,
        0.0,
        1.0,
        epsabs=1e-11,
        epsrel=1e-11,
        limit=200,
    )
    return val


def _inner_b(alpha: float, cfg: EvalConfig) -> float:
    # beta = 1/s^3: the s^{-4} Jacobian cancels the beta^{-4/3} decay, so the
    # integrand stays bounded at the s -> 0 endpoint
    val, _ = quad(
        lambda s: 3.0 * _pi_h_b_raw(alpha, 1.0 / s ** 3, cfg) / s ** 4,
        0.0,
        1.0,
        epsabs=1e-11,
        epsrel=1e-11,
        limit=200,
    )
    return val


def verify_double_integrals(lambda_target: float, cfg: EvalConfig = DEFAULT_CFG) -> dict:
    """Check the three double-integration identities at a physical lambda.

    The left-hand sides come from the quadrature engine (exact-derivative
    integrals in the aspect ratio); the right-hand sides are double
    quadratures of the anchored densities over (0, lambda] x [1, oo).
    """
    if not 0 < lambda_target < 1:
        raise ValueError("lambda_target must lie in (0, 1)")
    rstar = r_from_lambda(lambda_target, cfg)
    half_hbarv = 0.5 * pi_hbarv(rstar, cfg).value
    ph = pi_h(rstar, cfg).value
    log_term = (SQRT3 / (4 * math.pi)) * math.log(1.0 / (1.0 - lambda_target))

    rhs_bbar, _ = quad(lambda a: _inner_bbar(a, cfg), 0.0, lambda_target,
                       epsabs=1e-9, epsrel=1e-9, limit=200)
    # alpha = u^3 absorbs the alpha^{-2/3} endpoint of the b-density
    rhs_b, _ = quad(lambda u: 3.0 * u ** 2 * _inner_b(u ** 3, cfg), 0.0,
                    lambda_target ** (1.0 / 3.0), epsabs=1e-9, epsrel=1e-9, limit=200)
    rhs_nu, _ = quad(lambda a: _inner_nu(a, cfg), 0.0, lambda_target,
                     epsabs=1e-9, epsrel=1e-9, limit=200)

    checks = []
    for name, lhs, rhs in (
        ("half_pi_hbarv", half_hbarv, rhs_bbar),
        ("pi_h_minus_half_pi_hbarv", ph - half_hbarv, rhs_b),
        ("log_term_minus_half_pi_hbarv", -half_hbarv + log_term, rhs_nu),
    ):
        resid = abs(lhs - rhs)
        checks.append(
            {"identity": name, "lhs": lhs, "rhs": rhs, "residual": resid, "pass": resid < 1e-5}
        )
    return {
        "lambda": lambda_target,
        "r": rstar,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }


def _fd(fn, z: complex, h: float) -> complex:
    return (fn(z + h) - fn(z - h)) / (2 * h)


def verify_theorem21(z: complex, cfg: EvalConfig = DEFAULT_CFG) -> dict:
    """Finite-difference check of the three derivative identities at z.

    Each identity equates lambda'(z) times a density avatar with a
    z-derivative of an algebraic combination of lambda, eta^4 and the
    integrated form; derivatives are central differences with step
    1e-4 * min(1, im z).
    """
    z = complex(z)
    oml = analytic.one_minus_lambda_num(z, cfg)
    if abs(oml) < 1e-8:
        raise analytic.AnalyticDomainError("z too close to the lambda = 1 locus")
    h = 1e-4 * min(1.0, z.imag)
    lp = analytic.lambdaprime_num(z, cfg)

    lam_f2_over_lp = lambda w: (
        analytic.lambda_num(w, cfg) * analytic.f2_num(w, cfg) / analytic.lambdaprime_num(w, cfg)
    )
    lam_eta4_over_lp = lambda w: (
        analytic.lambda_num(w, cfg) * analytic.eta4_num(w, cfg) / analytic.lambdaprime_num(w, cfg)
    )
    lam_ratio = lambda w: (
        analytic.lambda_num(w, cfg) / analytic.one_minus_lambda_num(w, cfg)
    )

    d_f2term = _fd(lam_f2_over_lp, z, h)
    d_eta4term = _fd(lam_eta4_over_lp, z, h)
    d_ratio = _fd(lam_ratio, z, h)

    results = {}
    pairs = (
        ("p_bbar", lp * p_bbar(z, cfg), 4 * SQRT3 * 1j * d_f2term),
        (
            "p_b",
            lp * p_b(z, cfg),
            4 * SQRT3 * analytic.C_CONSTANT * 1j * d_eta4term - 4 * SQRT3 * 1j * d_f2term,
        ),
        ("n", lp * n_func(z, cfg), (SQRT3 / (4 * math.pi)) * d_ratio - 4 * SQRT3 * 1j * d_f2term),
    )
    for name, lhs, rhs in pairs:
        scale = max(abs(lhs), abs(rhs), 1e-30)
        results[name] = abs(lhs - rhs) / scale
    return {
        "z": [z.real, z.imag],
        "relative_residuals": results,
        "pass": all(v < 1e-6 for v in results.values()),
    }

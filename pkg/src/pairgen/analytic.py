"""Closed-form weak-pump results for the dissipatively coupled pair source.

All rates (``U``, ``gamma``, ``Gamma``, ``v``) and times share one arbitrary
unit.  Every function accepts scalar or array ``t`` and returns the same
shape.  The formulas are controlled by ``lam = U |alpha_+(0)|^2 / Gamma``
and are meant for ``lam << 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "PairGenParams",
    "WeakPumpWarning",
    "NoMaximumError",
    "OperationalWindow",
    "NoonProbabilities",
    "pump_photon_number",
    "p2_lossless",
    "p2_with_loss",
    "p1_with_loss",
    "t_max",
    "t_max_exact",
    "operational_window",
    "n_plus_perturbative",
    "n_minus_perturbative",
    "second_order_coefficients",
    "noon_probabilities",
    "noon_pump_amplitude",
]

WEAK_PUMP_LIMIT = 0.1


class WeakPumpWarning(UserWarning):
    """Formula evaluated outside its ``lam << 1`` validity range."""


class NoMaximumError(ValueError):
    """The pair probability saturates monotonically; there is no finite maximum."""


@dataclass(frozen=True)
class PairGenParams:
    """Dimensionless parameter set of the pair source.

    ``alpha0_sq`` is the initial pump photon number in the symmetric mode;
    ``v`` is the inter-half coupling of the NOON generator (0 otherwise).
    """

    U: float
    gamma: float
    Gamma: float
    alpha0_sq: float
    v: float = 0.0

    def __post_init__(self):
        for name in ("U", "gamma", "Gamma", "alpha0_sq"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {val}")
        if not np.isfinite(self.v):
            raise ValueError("v must be finite")

    @property
    def lam(self) -> float:
        """Weak-pump expansion parameter ``U |alpha_+(0)|^2 / Gamma``."""
        if self.Gamma == 0:
            return math.inf if self.U * self.alpha0_sq > 0 else 0.0
        return self.U * self.alpha0_sq / self.Gamma

    @property
    def weak_pump(self) -> bool:
        return self.lam <= WEAK_PUMP_LIMIT

    @property
    def alpha0(self) -> float:
        return math.sqrt(self.alpha0_sq)


def _need_gamma(p: PairGenParams):
    if p.Gamma <= 0:
        raise ValueError("Gamma must be > 0 for this formula")


def _warn_weak(p: PairGenParams):
    if not p.weak_pump:
        warnings.warn(f"lam = {p.lam:.3g} is outside the weak-pump regime", WeakPumpWarning,
                      stacklevel=3)


def _t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return t


def _out(x, t):
    return float(x) if np.ndim(t) == 0 else x


def _pair_scale(p: PairGenParams) -> float:
    # U^2 |alpha|^4 / Gamma^2
    return (p.U * p.alpha0_sq / p.Gamma) ** 2


# ------------------------------------------------------- semiclassical pump

def pump_photon_number(t, p: PairGenParams):
    """Residual pump photons ``|alpha_+(0)|^2 exp(-(Gamma + gamma) t)``."""
    t = _t(t)
    return _out(p.alpha0_sq * np.exp(-(p.Gamma + p.gamma) * t), t)


def p2_lossless(t, p: PairGenParams):
    """Pair probability without linear loss, ``(1/8) lam^2 (1 - e^{-Gamma t})^2``."""
    _need_gamma(p)
    t = _t(t)
    return _out(0.125 * _pair_scale(p) * np.expm1(-p.Gamma * t) ** 2, t)


def p2_with_loss(t, p: PairGenParams):
    """Pair probability including the ``exp(-2 gamma t)`` loss envelope."""
    _need_gamma(p)
    t = _t(t)
    return _out(0.125 * _pair_scale(p) * np.exp(-2 * p.gamma * t)
                * np.expm1(-p.Gamma * t) ** 2, t)


def p1_with_loss(t, p: PairGenParams):
    """Single-photon probability from pairs broken by linear loss.

    The expression carries the ``gamma << Gamma`` simplification and dips
    below zero by ``O(gamma^2 t^2)`` for ``t`` of order ``gamma / Gamma^2``;
    values are clipped at zero there.
    """
    _need_gamma(p)
    t = _t(t)
    g, G = p.gamma, p.Gamma
    bracket = (-np.expm1(-g * t) + (2 * g / G) * np.expm1(-G * t)
               - (g / (2 * G)) * np.expm1(-2 * G * t))
    val = 0.25 * _pair_scale(p) * np.exp(-g * t) * bracket
    return _out(np.maximum(val, 0.0), t)


def t_max(p: PairGenParams) -> float:
    """Leading-log estimate ``-(1/Gamma) ln(gamma/Gamma)`` of the pair maximum."""
    if p.gamma <= 0:
        raise NoMaximumError("without linear loss the pair probability saturates")
    if not p.gamma < p.Gamma:
        raise ValueError("t_max requires 0 < gamma < Gamma")
    return -math.log(p.gamma / p.Gamma) / p.Gamma


def t_max_exact(p: PairGenParams) -> float:
    """Exact argmax ``(1/Gamma) ln(1 + Gamma/gamma)`` of :func:`p2_with_loss`."""
    if p.gamma <= 0:
        raise NoMaximumError("without linear loss the pair probability saturates")
    _need_gamma(p)
    return math.log1p(p.Gamma / p.gamma) / p.Gamma


class OperationalWindow(NamedTuple):
    T_min: float
    T_max_bound: float
    feasible: bool


def operational_window(p: PairGenParams, delta: float) -> OperationalWindow:
    """Interaction-time window giving pump-to-pair ratio ``delta``.

    ``T_min = (1/Gamma) ln(4 Gamma^2 / (U^2 |alpha|^2 delta))`` (clamped at 0);
    the upper bound ``1/gamma`` is soft.  An empty window is reported through
    ``feasible``, not raised.
    """
    _need_gamma(p)
    if not delta > 0:
        raise ValueError("delta must be > 0")
    drive = p.U ** 2 * p.alpha0_sq * delta
    if drive == 0:
        t_min = math.inf
    else:
        t_min = max(0.0, math.log(4 * p.Gamma ** 2 / drive) / p.Gamma)
    upper = math.inf if p.gamma == 0 else 1.0 / p.gamma
    return OperationalWindow(t_min, upper, t_min < upper)


# --------------------------------------------------- quantum perturbation

def _expm1_ratio(x: float, t):
    """``expm1(x t) / x`` with the ``x -> 0`` limit ``t``."""
    if x == 0:
        return np.asarray(t, dtype=float)
    return np.expm1(x * t) / x


def n_plus_perturbative(t, p: PairGenParams):
    """Pump-mode photon number through second order in the nonlinearity."""
    _need_gamma(p)
    _warn_weak(p)
    t = _t(t)
    G, g = p.Gamma, p.gamma
    # the printed bracket over gamma, rearranged so gamma -> 0 is regular
    # and the exponentials cannot overflow
    decay = np.exp(-(G + 2 * g) * t)
    corr = (np.exp(-2 * (G + g) * t) - decay) + G * decay * _expm1_ratio(g, t)
    corr *= -(p.U ** 2) * p.alpha0_sq ** 2 / (2 * G * (G + g))
    return _out(p.alpha0_sq * np.exp(-(G + g) * t) + corr, t)


def n_minus_perturbative(t, p: PairGenParams):
    """Antisymmetric-mode photon number at second order in the nonlinearity."""
    _need_gamma(p)
    _warn_weak(p)
    t = _t(t)
    G, g = p.Gamma, p.gamma
    Gp = G + g
    # e^{-2 Gp t} eta(t) and e^{-2 Gp t} zeta(t) without overflow
    eta = np.exp(-g * t) * np.expm1(-Gp * t) ** 2 - np.exp(-2 * Gp * t) * np.expm1(-g * t)
    zeta = np.exp(-(G + 2 * g) * t) * np.expm1(-G * t)
    pref = p.U ** 2 * p.alpha0_sq ** 2 / (2 * G * (2 * G + g) * Gp)
    return _out(pref * (eta * G + g * zeta), t)


def _f_raw(t, U, G, g, sign):
    Gs = G + g if sign > 0 else g       # Gamma_{+-}
    Go = g if sign > 0 else G + g       # Gamma_{-+}
    s = float(sign)
    u2 = U * U
    env = np.exp(-(G + 2 * g) * t)
    f1 = s * u2 * env / (2 * G * Go * (s * G + Go)) * (
        Go * (1 - np.exp(-s * G * t)) + s * G * (1 - np.exp(Go * t)))
    f2 = -s * u2 * env / (2 * G * Go * (3 * Go - 2 * g - G)) * (
        (2 * g + G) * (1 - np.exp(Go * t)) + Go * (2 * np.exp(Go * t) + np.exp(s * G * t) - 3))
    f3 = -u2 * np.exp(-(2 * Gs + Go) * t) / (g * (G + g) * (G + 2 * g)) * (
        Go + Gs * np.exp((G + 2 * g) * t) - (G + 2 * g) * np.exp(Gs * t))
    f4 = u2 * np.exp(-(2 * Go + Gs) * t) / (2 * Go ** 2) * np.expm1(Go * t) ** 2
    return np.array([f1, f2, f3, f4])


def _denominators(G, g, sign):
    Go = g if sign > 0 else G + g
    return (G, Go, sign * G + Go, 3 * Go - 2 * g - G, g, G + g, G + 2 * g)


# direction along which degenerate (Gamma, gamma) points are approached; it is
# not parallel to any of the singular lines of the coefficient formulas
_LIMIT_DIRECTION = (0.6180339887498949, 1.0)


def _regularized(fn: Callable[[float, float], np.ndarray], G: float, g: float,
                 denominators: Callable[[float, float], tuple], t_scale: float) -> np.ndarray:
    scale = max(abs(G), abs(g))
    if scale == 0:
        scale = 1.0 / t_scale if t_scale > 0 else 1.0
    if all(abs(d) > 1e-6 * scale for d in denominators(G, g)):
        return fn(G, g)
    # symmetric Richardson extrapolation onto the removable point
    h = 1e-3 * min(scale, 1.0 / t_scale) if t_scale > 0 else 1e-3 * scale
    dG, dg = _LIMIT_DIRECTION

    def avg(step):
        return 0.5 * (fn(G + dG * step, g + dg * step) + fn(G - dG * step, g - dg * step))

    return (4 * avg(h) - avg(2 * h)) / 3


def second_order_coefficients(t, p: PairGenParams, branch: str = "+"):
    """Second-order Heisenberg coefficients ``(f1, f2, f3, f4)`` for ``n_+`` or ``n_-``.

    The second-order part of the number operator of mode ``s`` (``s`` = branch,
    ``o`` = the other collective mode) is

        f1 (a_s^dag)^2 a_s^2 + f2 (a_o^dag)^2 a_o^2
        + f3 (a_s^dag)^2 a_s^2 n_o + f4 n_s (a_o^dag)^2 a_o^2,

    with decay rates ``Gamma_+ = Gamma + gamma`` and ``Gamma_- = gamma``.
    Degenerate rate combinations (``gamma = 0``, ``gamma = Gamma``, ...)
    are removable singularities and are evaluated as limits.

    Returns
    -------
    tuple of four floats (scalar ``t``) or arrays.
    """
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    sign = 1 if branch == "+" else -1
    t = _t(t)
    t_scale = float(np.max(t)) if t.size else 0.0
    vals = _regularized(lambda G, g: _f_raw(t, p.U, G, g, sign), p.Gamma, p.gamma,
                        lambda G, g: _denominators(G, g, sign), t_scale)
    if np.ndim(t) == 0:
        return tuple(float(v) for v in vals)
    return tuple(vals)


# ------------------------------------------------------------ NOON source

class NoonProbabilities(NamedTuple):
    P11: float | np.ndarray
    P20: float | np.ndarray
    ratio: float | np.ndarray


def noon_probabilities(T, p: PairGenParams, with_loss: bool = True) -> NoonProbabilities:
    """Pair-location probabilities of the six-waveguide NOON source for ``T >> 1/Gamma``.

    ``P11``: one photon in each antisymmetric mode.  ``P20``: both photons in
    the same antisymmetric mode (either one).  The common prefactor is
    ``(1/4) U^2 |alpha|^4 / Gamma^2``, i.e. twice the single-device pair
    probability, so that at ``v = 0`` ``P20`` is the sum of two independent
    devices.  ``with_loss`` applies the ``exp(-2 gamma T)`` envelope.
    """
    _need_gamma(p)
    _warn_weak(p)
    T = _t(T)
    c = 0.25 * _pair_scale(p)
    if with_loss:
        c = c * np.exp(-2 * p.gamma * T)
    s2 = np.sin(2 * p.v * T) ** 2
    c2 = np.cos(2 * p.v * T) ** 2
    p11 = c * s2
    p20 = c * c2
    ratio = s2 if np.ndim(T) else float(s2)
    return NoonProbabilities(_out(p11, T), _out(p20, T), ratio)


def noon_pump_amplitude(t, p: PairGenParams, alpha0: complex | None = None):
    """Pump amplitude ``alpha(0) exp(-(Gamma + gamma) t / 2 - i v t)`` of each half."""
    t = _t(t)
    a0 = p.alpha0 if alpha0 is None else alpha0
    amp = a0 * np.exp(-0.5 * (p.Gamma + p.gamma) * t - 1j * p.v * t)
    return complex(amp) if np.ndim(t) == 0 else amp

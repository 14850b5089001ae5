"""Design rules for real waveguide platforms.

Every rate here is per metre of propagation.  The simulation engine treats
"time" and propagation length interchangeably, so a dimensionless time
``t`` (in units of a rate ``r``) corresponds to a length ``t / r`` metres;
the speed of light only reappears in the pair rate, which converts a
per-length probability into counts per second.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

__all__ = [
    "MaterialPlatform",
    "DesignReport",
    "MinLength",
    "AsymmetryReport",
    "AdiabaticityWarning",
    "PlatformNotFoundError",
    "builtin_platforms",
    "lookup",
    "load_platforms",
    "collective_loss_rate",
    "pump_decay_rate_exact",
    "typical_pump",
    "min_length",
    "pair_rate",
    "power_for_rate",
    "rejection_db",
    "asymmetry_check",
    "design",
]

DB_PER_NEPER = 10 * math.log10(math.e)
# reference weak pump: 1e10 photons with U^2 = 1e-20 gamma^2
TYPICAL_PUMP_PHOTONS = 1e10
TYPICAL_KERR_OVER_LOSS = 1e-10


class AdiabaticityWarning(UserWarning):
    """Central-waveguide loss too weak for the 8 g^2 / gamma3 elimination."""


class PlatformNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class MaterialPlatform:
    name: str
    n2: float
    wavelength: float
    modal_area: float
    g: float
    gamma3: float
    gamma_linear: float
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        for k in ("n2", "wavelength", "modal_area", "g", "gamma3", "gamma_linear"):
            v = getattr(self, k)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"platform {self.name!r}: {k} must be > 0, got {v!r}")

    @property
    def Gamma(self) -> float:
        return collective_loss_rate(self.g, self.gamma3)

    @property
    def kerr_coefficient(self) -> float:
        """``2 pi n2 / (lambda S)`` in 1/(W m): nonlinear phase per metre per watt."""
        return 2 * math.pi * self.n2 / (self.wavelength * self.modal_area)

    @classmethod
    def from_dict(cls, d: dict) -> "MaterialPlatform":
        known = {f for f in cls.__dataclass_fields__}
        missing = {"name", "n2", "wavelength", "modal_area", "g", "gamma3",
                   "gamma_linear"} - set(d)
        if missing:
            raise ValueError(f"platform entry missing fields: {sorted(missing)}")
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_platform_doc(doc) -> list[MaterialPlatform]:
    if isinstance(doc, dict) and "platforms" in doc:
        entries = doc["platforms"]
    elif isinstance(doc, dict):
        entries = [doc]
    else:
        entries = list(doc)
    return [MaterialPlatform.from_dict(e) for e in entries]


def builtin_platforms() -> list[MaterialPlatform]:
    text = resources.files("pairgen").joinpath("data/platforms.json").read_text()
    return _parse_platform_doc(json.loads(text))


def load_platforms(path: str | Path) -> list[MaterialPlatform]:
    """Read platforms from a JSON file using the built-in preset schema."""
    return _parse_platform_doc(json.loads(Path(path).read_text()))


def lookup(name: str, platforms: list[MaterialPlatform] | None = None) -> MaterialPlatform:
    for p in platforms if platforms is not None else builtin_platforms():
        if p.name == name:
            return p
    raise PlatformNotFoundError(name)


def collective_loss_rate(g: float, gamma3: float) -> float:
    """Adiabatic collective loss ``8 g^2 / gamma3`` of the symmetric mode."""
    if not gamma3 > 0:
        raise ValueError("gamma3 must be > 0")
    if g < 0:
        raise ValueError("g must be >= 0")
    if gamma3 < 4 * g:
        warnings.warn(f"gamma3 = {gamma3:g} < 4 g = {4 * g:g}: adiabatic elimination is "
                      "not justified", AdiabaticityWarning, stacklevel=2)
    return 8 * g * g / gamma3


def pump_decay_rate_exact(g: float, gamma3: float, gamma: float = 0.0) -> float:
    """Slowest photon-number decay rate of the linear three-waveguide system.

    Exact counterpart of ``8 g^2/gamma3 + gamma`` (which it approaches for
    ``gamma3 >> g``); below ``gamma3 = 4 sqrt(2) g`` the modes are
    underdamped and the rate saturates at ``gamma3/2 + gamma``.
    """
    m = np.array([[-0.5 * gamma, -1j * math.sqrt(2) * g],
                  [-1j * math.sqrt(2) * g, -0.5 * gamma3]])
    return float(-2 * np.max(np.linalg.eigvals(m).real))


def typical_pump(platform: MaterialPlatform) -> tuple[float, float]:
    """Weak-pump defaults ``(photons, U)`` with ``U = 1e-10 gamma_linear``."""
    return TYPICAL_PUMP_PHOTONS, TYPICAL_KERR_OVER_LOSS * platform.gamma_linear


class MinLength(NamedTuple):
    L_min: float
    Gamma: float
    feasible: bool
    margin: float        # (1/gamma_linear) / L_min


def min_length(platform: MaterialPlatform, pump_photons: float, U_spatial: float,
               delta: float) -> MinLength:
    """Shortest device giving pump/pair ratio ``delta``, in metres.

    Infeasible designs (``L_min >= 1/gamma_linear``) are flagged, not raised.
    """
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if pump_photons < 0 or U_spatial < 0:
        raise ValueError("pump_photons and U_spatial must be >= 0")
    G = platform.Gamma
    drive = U_spatial ** 2 * pump_photons * delta
    L = math.inf if drive == 0 else max(0.0, math.log(4 * G * G / drive) / G)
    budget = 1.0 / platform.gamma_linear
    margin = math.inf if L == 0 else budget / L
    return MinLength(L, G, L < budget, margin)


def pair_rate(platform: MaterialPlatform, power: float, Gamma: float, eta: float = 1.0) -> float:
    """Pair generation rate ``(2 pi n2 P / (lambda S))^2 c / (8 Gamma) eta`` in 1/s."""
    if not power > 0:
        raise ValueError("power must be > 0")
    if not Gamma > 0:
        raise ValueError("Gamma must be > 0")
    return (platform.kerr_coefficient * power) ** 2 * SPEED_OF_LIGHT / (8 * Gamma) * eta


def power_for_rate(platform: MaterialPlatform, rate: float, Gamma: float,
                   eta: float = 1.0) -> float:
    """Input power (W) at which :func:`pair_rate` equals ``rate``."""
    return math.sqrt(rate * 8 * Gamma / (SPEED_OF_LIGHT * eta)) / platform.kerr_coefficient


def rejection_db(L, Gamma: float, gamma_linear: float):
    """Pump suppression ``10 log10(e) (Gamma + gamma) L`` in dB."""
    L = np.asarray(L, dtype=float)
    if np.any(L < 0):
        raise ValueError("L must be >= 0")
    out = DB_PER_NEPER * (Gamma + gamma_linear) * L
    return float(out) if out.ndim == 0 else out


class AsymmetryReport(NamedTuple):
    ratio: float
    passed: bool
    threshold: float


def asymmetry_check(g: float, delta_g: float, threshold: float = 10.0) -> AsymmetryReport:
    """Check that coupling asymmetry ``g +- delta_g`` is negligible (``g >> 4|delta_g|``)."""
    if not g > abs(delta_g):
        raise ValueError("both couplings g +- delta_g must be positive")
    ratio = math.inf if delta_g == 0 else g / (4 * abs(delta_g))
    return AsymmetryReport(ratio, ratio >= threshold, threshold)


@dataclass(frozen=True)
class DesignReport:
    platform: str
    power: float
    delta: float
    Gamma: float
    L_min: float
    rejection_db_at_L_min: float
    pair_rate: float
    pair_rate_lossless: float
    eta: float
    power_for_1khz: float
    reaches_1khz: bool
    pump_photons: float
    U_spatial: float
    feasible: bool
    length_margin: float
    adiabatic_ok: bool
    rejection_db: Callable[[float], float] = field(repr=False, compare=False, default=None)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("rejection_db")
        d["notes"] = list(self.notes)
        return d


def design(platform: MaterialPlatform, power: float, delta: float,
           pump_photons: float | None = None, U_spatial: float | None = None) -> DesignReport:
    """Evaluate all design rules for one platform and pump power.

    Without explicit ``pump_photons``/``U_spatial`` the reference weak pump
    from :func:`typical_pump` sets the minimal length.
    """
    default_n, default_u = typical_pump(platform)
    n = default_n if pump_photons is None else pump_photons
    u = default_u if U_spatial is None else U_spatial
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdiabaticityWarning)
        G = platform.Gamma
    ml = min_length(platform, n, u, delta)
    L = ml.L_min if math.isfinite(ml.L_min) else 0.0
    eta = math.exp(-2 * platform.gamma_linear * L)
    rate = pair_rate(platform, power, G, eta)
    notes = []
    if platform.name == "fused_silica":
        notes.append("a 1 kHz pair rate at 180 W is ~20x below the rate formula "
                     "evaluated with S = 5e-11 m^2")
    if not ml.feasible:
        notes.append("L_min exceeds the linear-loss length 1/gamma_linear")
    return DesignReport(
        platform=platform.name, power=power, delta=delta, Gamma=G, L_min=ml.L_min,
        rejection_db_at_L_min=rejection_db(L, G, platform.gamma_linear),
        pair_rate=rate, pair_rate_lossless=pair_rate(platform, power, G), eta=eta,
        power_for_1khz=power_for_rate(platform, 1e3, G, eta), reaches_1khz=rate >= 1e3,
        pump_photons=n, U_spatial=u, feasible=ml.feasible, length_margin=ml.margin,
        adiabatic_ok=platform.gamma3 >= 4 * platform.g,
        rejection_db=lambda length: rejection_db(length, G, platform.gamma_linear),
        notes=tuple(notes),
    )

"""Physical configurations of the pair source as Lindblad models.

Each ``build_*`` function returns a :class:`BuiltScenario` holding the model,
the initial state and a dictionary of named observables.  Every scenario
exposes at least ``n_minus`` and ``p0``/``p1``/``p2`` (photon-number
distribution of the pair-carrying antisymmetric mode(s)); most also expose
``n_plus``.

Mode orders
-----------
two_mode_collective         [a+, a-]
two_mode_physical           [a1, a2]
single_mode_semiclassical   [a-]
three_waveguide             [a1, a2, a3]    (a3 is the lossy central guide)
noon_collective             [a+, a-, b+, b-]
noon_reduced                [a-, b-]        (interaction picture w.r.t. W)
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from . import analytic
from .analytic import PairGenParams
from .design import AdiabaticityWarning, collective_loss_rate
from .fock import (FockOperator, QuantumState, beamsplitter_map, beamsplitter_unitary,
                   coherent_state, destroy, embed, identity, tensor, vacuum)
from .lindblad import LindbladModel, TimeSeries, evolve

__all__ = [
    "KINDS",
    "ScenarioConfig",
    "BuiltScenario",
    "Deviation",
    "ComparisonReport",
    "SpatialFilterReport",
    "ScenarioError",
    "build_two_mode",
    "build_physical_two_mode",
    "build_semiclassical",
    "build_three_waveguide",
    "build_asymmetric",
    "build_noon",
    "build",
    "run",
    "run_and_compare",
    "analytic_curves",
    "noon_physical_probabilities",
    "spatial_filter_report",
    "fit_decay_rate",
]

KINDS = (
    "two_mode_collective",
    "two_mode_physical",
    "single_mode_semiclassical",
    "three_waveguide",
    "asymmetric_three_waveguide",
    "noon_collective",
    "noon_reduced",
)

MAX_NOON_SPACE = 4096


class ScenarioError(ValueError):
    pass


class BuiltScenario(NamedTuple):
    model: LindbladModel
    initial: QuantumState
    observables: dict[str, FockOperator]
    meta: dict


# ------------------------------------------------------------------ helpers

def _lowering(dims):
    return [embed(destroy(d), k, dims) for k, d in enumerate(dims)]


def _n(a: FockOperator) -> FockOperator:
    return a.dag() @ a


def _pair(a: FockOperator) -> FockOperator:
    """``(a^dag)^2 a^2``."""
    ad = a.dag()
    return ad @ ad @ a @ a


def _level_projectors(number_op: FockOperator, levels=(0, 1, 2)) -> dict[str, FockOperator]:
    """Projectors onto eigenvalues of a diagonal number operator."""
    diag = np.real(np.diag(number_op.data))
    return {f"p{k}": FockOperator(np.diag((np.abs(diag - k) < 1e-9).astype(float)),
                                  number_op.dims) for k in levels}


def _rotated_projectors(d: int, extra_dims=()) -> dict[str, FockOperator]:
    """Projectors onto a_- = (a1 - a2)/sqrt(2) Fock levels in the physical basis."""
    u = beamsplitter_unitary(d).data
    out = {}
    for k in (0, 1, 2):
        proj = np.zeros((d, d))
        proj[k, k] = 1.0
        rot = u.conj().T @ np.kron(np.eye(d), proj) @ u
        for e in extra_dims:
            rot = np.kron(rot, np.eye(e))
        out[f"p{k}"] = FockOperator(rot, (d, d) + tuple(extra_dims))
    return out


def _check_truncation(dims, expected_len, label):
    dims = tuple(int(d) for d in dims)
    if len(dims) != expected_len:
        raise ScenarioError(f"{label} needs {expected_len} mode dimensions, got {dims}")
    return dims


def _coherent(alpha, dim, label):
    try:
        return coherent_state(alpha, dim)
    except ValueError as exc:
        raise ScenarioError(f"{label}: {exc}") from exc


def _kerr_collective(ap, am, U):
    np_, nm = _n(ap), _n(am)
    h = (U / 4) * (np_ @ np_ + nm @ nm + 4 * (np_ @ nm) - np_ - nm)
    ad_p = ap.dag()
    exch = ad_p @ ad_p @ am @ am
    return h + (U / 4) * (exch + exch.dag())


# ------------------------------------------------------------------ builders

def build_two_mode(params: PairGenParams, truncation=(14, 6)) -> BuiltScenario:
    """Collective-mode model: Kerr + two-photon exchange, losses ``(Gamma+gamma)`` on a+ and ``gamma`` on a-."""
    dims = _check_truncation(truncation, 2, "two_mode_collective")
    ap, am = _lowering(dims)
    h = _kerr_collective(ap, am, params.U)
    terms = ((ap, params.Gamma + params.gamma), (am, params.gamma))
    init = tensor([_coherent(params.alpha0, dims[0], "pump mode"), vacuum(dims[1])])
    nm = _n(am)
    obs = {"n_plus": _n(ap), "n_minus": nm, **_level_projectors(nm)}
    return BuiltScenario(LindbladModel(h, terms, dims), init, obs,
                         {"kind": "two_mode_collective", "Gamma_eff": params.Gamma})


def build_physical_two_mode(params: PairGenParams, truncation=(12, 12),
                            antisymmetric_pump: bool = False) -> BuiltScenario:
    """Two waveguides with self-Kerr, common loss ``(Gamma/2) L(a1 + a2)`` and loss ``gamma`` each.

    The pump enters as equal coherent amplitudes ``alpha/sqrt(2)`` in both
    guides (in phase, so only a+ is excited) or in antiphase when
    ``antisymmetric_pump`` is set.
    """
    dims = _check_truncation(truncation, 2, "two_mode_physical")
    if dims[0] != dims[1]:
        raise ScenarioError("two_mode_physical needs equal truncation in both guides")
    a1, a2 = _lowering(dims)
    U = params.U
    h = (U / 2) * (_pair(a1) + _pair(a2))
    terms = ((a1 + a2, params.Gamma / 2), (a1, params.gamma), (a2, params.gamma))
    amp = params.alpha0 / math.sqrt(2)
    init = tensor([_coherent(amp, dims[0], "guide 1"),
                   _coherent(-amp if antisymmetric_pump else amp, dims[1], "guide 2")])
    ap = (a1 + a2) / math.sqrt(2)
    am = (a1 - a2) / math.sqrt(2)
    obs = {"n_plus": _n(ap), "n_minus": _n(am), "n1": _n(a1), "n2": _n(a2),
           **_rotated_projectors(dims[0])}
    return BuiltScenario(LindbladModel(h, terms, dims), init, obs,
                         {"kind": "two_mode_physical", "Gamma_eff": params.Gamma})


def build_semiclassical(params: PairGenParams, truncation=8) -> BuiltScenario:
    """Antisymmetric mode driven by the decaying classical pump.

    ``H(t) = (U/4)(n^2 - n) + U |alpha(t)|^2 n + (U/4)(alpha(t)^2 (a^dag)^2 + h.c.)``
    with ``alpha(t) = alpha(0) exp(-(Gamma + gamma) t / 2)``.
    """
    d = int(truncation[0] if np.ndim(truncation) else truncation)
    dims = (d,)
    a = destroy(d)
    n = _n(a)
    U = params.U
    static = ((U / 4) * (n @ n - n)).data
    ndat = n.data
    adag2 = (a.dag() @ a.dag()).data
    a2 = adag2.conj().T
    rate = params.Gamma + params.gamma
    a0sq = params.alpha0_sq

    def hamiltonian(t):
        amp2 = a0sq * math.exp(-rate * t)        # alpha(t)^2, alpha(0) real
        return static + (U * amp2) * ndat + (U / 4) * amp2 * (adag2 + a2)

    odd = FockOperator(np.diag([float(k % 2) for k in range(d)]), dims)
    obs = {"n_minus": n, "parity_odd": odd, **_level_projectors(n)}
    return BuiltScenario(LindbladModel(hamiltonian, ((a, params.gamma),), dims), vacuum(d),
                         obs, {"kind": "single_mode_semiclassical", "Gamma_eff": params.Gamma})


def build_three_waveguide(g: float, gamma3: float, params: PairGenParams,
                          truncation=(10, 10, 4), delta: float = 0.0) -> BuiltScenario:
    """Two Kerr guides coupled (rates ``g + delta``, ``g - delta``) to a lossy central guide.

    ``params.Gamma`` is not used; the collective loss follows from ``g`` and
    ``gamma3`` and is reported as ``meta['Gamma_eff'] = 8 g^2 / gamma3``.
    """
    dims = _check_truncation(truncation, 3, "three_waveguide")
    if dims[0] != dims[1]:
        raise ScenarioError("three_waveguide needs equal truncation in guides 1 and 2")
    if not g - abs(delta) > 0 and g != 0:
        raise ScenarioError("couplings g +- delta must both be positive")
    a1, a2, a3 = _lowering(dims)
    U = params.U
    h = (U / 2) * (_pair(a1) + _pair(a2))
    hop = (g + delta) * (a1.dag() @ a3) + (g - delta) * (a2.dag() @ a3)
    h = h + hop + hop.dag()
    terms = ((a1, params.gamma), (a2, params.gamma), (a3, gamma3))
    amp = params.alpha0 / math.sqrt(2)
    init = tensor([_coherent(amp, dims[0], "guide 1"), _coherent(amp, dims[1], "guide 2"),
                   vacuum(dims[2])])
    ap = (a1 + a2) / math.sqrt(2)
    am = (a1 - a2) / math.sqrt(2)
    obs = {"n_plus": _n(ap), "n_minus": _n(am), "n3": _n(a3),
           **_rotated_projectors(dims[0], extra_dims=(dims[2],))}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdiabaticityWarning)
        G = collective_loss_rate(g, gamma3) if g else 0.0
    kind = "asymmetric_three_waveguide" if delta else "three_waveguide"
    return BuiltScenario(LindbladModel(h, terms, dims), init, obs,
                         {"kind": kind, "Gamma_eff": G, "g": g, "gamma3": gamma3,
                          "delta": delta})


def build_asymmetric(g: float, delta: float, gamma3: float, params: PairGenParams,
                     truncation=(10, 10, 4)) -> BuiltScenario:
    return build_three_waveguide(g, gamma3, params, truncation, delta=delta)


def _noon_reduced(params: PairGenParams, dims) -> BuiltScenario:
    a, b = _lowering(dims)
    na, nb = _n(a), _n(b)
    U, v = params.U, params.v
    rate = params.Gamma + params.gamma
    a0sq = params.alpha0_sq
    kerr = ((U / 4) * (na @ na - na + nb @ nb - nb)).data
    ntot = (na + nb).data
    self_pair = (a.dag() @ a.dag() + b.dag() @ b.dag()).data
    cross_pair = (a.dag() @ b.dag()).data

    def hamiltonian(t):
        decay = math.exp(-rate * t)
        amp2 = a0sq * decay * complex(math.cos(2 * v * t), -math.sin(2 * v * t))
        src = amp2 * (math.cos(2 * v * t) * self_pair + 2j * math.sin(2 * v * t) * cross_pair)
        return kerr + (U * a0sq * decay) * ntot + (U / 4) * (src + src.conj().T)

    total = na + nb
    obs = {"n_minus": total, **_level_projectors(total)}
    w = (v * (a.dag() @ b + b.dag() @ a)).data
    return BuiltScenario(
        LindbladModel(hamiltonian, ((a, params.gamma), (b, params.gamma)), dims),
        vacuum(dims), obs,
        {"kind": "noon_reduced", "Gamma_eff": params.Gamma, "exchange": w})


def _noon_collective(params: PairGenParams, dims) -> BuiltScenario:
    if math.prod(dims) > MAX_NOON_SPACE:
        raise ScenarioError(f"noon_collective space {math.prod(dims)} exceeds {MAX_NOON_SPACE}")
    ap, am, bp, bm = _lowering(dims)
    U, v = params.U, params.v
    h = _kerr_collective(ap, am, U) + _kerr_collective(bp, bm, U)
    w = ap.dag() @ bp + am.dag() @ bm
    h = h + v * (w + w.dag())
    up, dn = params.Gamma + params.gamma, params.gamma
    terms = ((ap, up), (am, dn), (bp, up), (bm, dn))
    init = tensor([_coherent(params.alpha0, dims[0], "a+"), vacuum(dims[1]),
                   _coherent(params.alpha0, dims[2], "b+"), vacuum(dims[3])])
    na, nb = _n(am), _n(bm)
    total = na + nb
    obs = {"n_plus": _n(ap) + _n(bp), "n_minus": total, "n_a_minus": na, "n_b_minus": nb,
           **_level_projectors(total)}
    da, db = dims[1], dims[3]
    for label, (ka, kb) in {"p11": (1, 1), "p20": (2, 0), "p02": (0, 2)}.items():
        pa = np.zeros((da, da))
        pa[ka, ka] = 1
        pb = np.zeros((db, db))
        pb[kb, kb] = 1
        obs[label] = tensor([identity(dims[0]), FockOperator(pa, (da,)),
                             identity(dims[2]), FockOperator(pb, (db,))])
    return BuiltScenario(LindbladModel(h, terms, dims), init, obs,
                         {"kind": "noon_collective", "Gamma_eff": params.Gamma})


def build_noon(params: PairGenParams, truncation, reduced: bool = True) -> BuiltScenario:
    """Six-waveguide NOON source, as 4 collective modes or the reduced driven 2-mode model."""
    if reduced:
        return _noon_reduced(params, _check_truncation(truncation, 2, "noon_reduced"))
    return _noon_collective(params, _check_truncation(truncation, 4, "noon_collective"))


def noon_physical_probabilities(series: TimeSeries, exchange: np.ndarray):
    """P(1,1), P(2,0), P(0,2) of (a-, b-) after undoing the interaction picture.

    ``series`` must come from a reduced NOON run with ``store_states=True``;
    ``exchange`` is the matrix of ``W`` from ``meta['exchange']``.
    """
    if series.states is None:
        raise ValueError("reduced NOON probabilities need store_states=True")
    dims = series.states[0].dims
    idx = {k: np.ravel_multi_index(k, dims) for k in ((1, 1), (2, 0), (0, 2))}
    out = {"p11": [], "p20": [], "p02": []}
    for t, st in zip(series.times, series.states):
        u = expm(-1j * exchange * t)
        rho = u @ st.rho @ u.conj().T
        for name, key in zip(out, ((1, 1), (2, 0), (0, 2))):
            out[name].append(rho[idx[key], idx[key]].real)
    return {k: np.array(v) for k, v in out.items()}


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class ScenarioConfig:
    """A runnable scenario: kind, parameters, truncation, time grid, tolerances."""

    kind: str
    params: PairGenParams
    truncation: tuple[int, ...]
    times: np.ndarray
    physical: dict = field(default_factory=dict)
    observables: tuple[str, ...] = ()
    tolerance_factor: float = 5.0
    rtol: float = 1e-8
    atol: float = 1e-10

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
            raise ScenarioError("times must be a non-empty, strictly increasing grid starting >= 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "truncation", tuple(int(d) for d in np.atleast_1d(self.truncation)))
        object.__setattr__(self, "physical", dict(self.physical or {}))
        object.__setattr__(self, "observables", tuple(self.observables))
        if self.kind in ("three_waveguide", "asymmetric_three_waveguide"):
            for key in ("g", "gamma3"):
                if key not in self.physical:
                    raise ScenarioError(f"{self.kind} requires physical.{key}")
        if self.kind == "asymmetric_three_waveguide" and "delta" not in self.physical:
            raise ScenarioError("asymmetric_three_waveguide requires physical.delta")
        if self.tolerance_factor <= 0:
            raise ScenarioError("tolerance_factor must be > 0")

    def to_dict(self) -> dict:
        p = self.params
        return {
            "kind": self.kind,
            "params": {"U": p.U, "gamma": p.gamma, "Gamma": p.Gamma,
                       "alpha0_sq": p.alpha0_sq, "v": p.v},
            "truncation": list(self.truncation),
            "times": [float(t) for t in self.times],
            "physical": dict(self.physical),
            "observables": list(self.observables),
            "tolerance_factor": self.tolerance_factor,
            "rtol": self.rtol,
            "atol": self.atol,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        times = d["times"]
        if isinstance(times, dict):
            times = np.linspace(float(times["start"]), float(times["stop"]), int(times["num"]))
        return cls(
            kind=d["kind"],
            params=PairGenParams(**d["params"]),
            truncation=tuple(d["truncation"]),
            times=np.asarray(times, dtype=float),
            physical=d.get("physical") or {},
            observables=tuple(d.get("observables") or ()),
            tolerance_factor=float(d.get("tolerance_factor", 5.0)),
            rtol=float(d.get("rtol", 1e-8)),
            atol=float(d.get("atol", 1e-10)),
        )


def build(config: ScenarioConfig) -> BuiltScenario:
    p, tr, ph = config.params, config.truncation, config.physical
    kind = config.kind
    if kind == "two_mode_collective":
        return build_two_mode(p, tr)
    if kind == "two_mode_physical":
        return build_physical_two_mode(p, tr, bool(ph.get("antisymmetric_pump", False)))
    if kind == "single_mode_semiclassical":
        return build_semiclassical(p, tr[0])
    if kind in ("three_waveguide", "asymmetric_three_waveguide"):
        return build_three_waveguide(float(ph["g"]), float(ph["gamma3"]), p, tr,
                                     delta=float(ph.get("delta", 0.0)))
    if kind == "noon_collective":
        return build_noon(p, tr, reduced=False)
    return build_noon(p, tr, reduced=True)


def run(config: ScenarioConfig) -> tuple[TimeSeries, BuiltScenario]:
    """Build and integrate a scenario; NOON pair-location probabilities are added."""
    built = build(config)
    obs = built.observables
    if config.observables:
        missing = set(config.observables) - set(obs) - {"p11", "p20", "p02", "ratio"}
        if missing:
            raise ScenarioError(f"unknown observables for {config.kind}: {sorted(missing)}")
    reduced = config.kind == "noon_reduced"
    series = evolve(built.model, built.initial, config.times, obs,
                    rtol=config.rtol, atol=config.atol, store_states=reduced)
    values = dict(series.observables)
    if reduced:
        values.update(noon_physical_probabilities(series, built.meta["exchange"]))
    if config.kind.startswith("noon"):
        both = values["p20"] + values["p02"]
        denom = values["p11"] + both
        values["ratio"] = np.divide(values["p11"], denom, out=np.zeros_like(denom),
                                    where=denom > 0)
    if config.kind == "single_mode_semiclassical":
        values["n_plus"] = np.asarray(analytic.pump_photon_number(config.times, config.params))
    series = replace(series, observables=values, states=None)
    return series, built


# ------------------------------------------------------------------ compare

class Deviation(NamedTuple):
    value: float
    tolerance: float
    metric: str          # "relative" or "absolute"
    gated: bool

    @property
    def passed(self) -> bool:
        return self.value <= self.tolerance


@dataclass(frozen=True)
class ComparisonReport:
    lam: float
    analytic_valid: bool
    deviations: dict[str, Deviation]
    tolerance_factor: float
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        if not self.analytic_valid:
            return False
        return all(d.passed for d in self.deviations.values() if d.gated)

    def max_deviation(self, name: str) -> float:
        return self.deviations[name].value


def analytic_curves(config: ScenarioConfig, Gamma_eff: float | None = None) -> dict[str, np.ndarray]:
    """Closed-form predictions on the config grid, keyed like the quantum observables."""
    p = config.params
    if Gamma_eff is not None and Gamma_eff != p.Gamma:
        p = replace(p, Gamma=Gamma_eff)
    t = config.times
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", analytic.WeakPumpWarning)
        if config.kind.startswith("noon"):
            noon = analytic.noon_probabilities(t, p)
            return {"p11": np.asarray(noon.P11), "ratio": np.asarray(noon.ratio),
                    "n_plus": 2 * np.abs(analytic.noon_pump_amplitude(t, p)) ** 2}
        curves = {
            "n_plus": np.asarray(analytic.n_plus_perturbative(t, p)),
            "n_minus": np.asarray(analytic.n_minus_perturbative(t, p)),
            "p1": np.asarray(analytic.p1_with_loss(t, p)),
            "p2": np.asarray(analytic.p2_with_loss(t, p)),
        }
    if config.kind == "single_mode_semiclassical":
        curves["n_plus"] = np.asarray(analytic.pump_photon_number(t, p))
    return curves


# quantities whose closed forms are exact at leading order take part in the
# pass/fail decision; p1 carries a gamma << Gamma simplification and is only reported
_GATED = {
    "two_mode_collective": ("n_plus", "n_minus", "p2"),
    "two_mode_physical": ("n_plus", "n_minus", "p2"),
    "single_mode_semiclassical": ("n_minus", "p2"),
    "three_waveguide": ("n_plus", "n_minus"),
    "asymmetric_three_waveguide": ("n_plus", "n_minus"),
    "noon_collective": ("ratio",),
    "noon_reduced": ("ratio",),
}
NOON_RATIO_TOLERANCE = 0.1


def _relative_deviation(q, a, floor):
    return float(np.max(np.abs(q - a) / np.maximum(np.abs(a), floor)))


def compare(config: ScenarioConfig, series: TimeSeries, Gamma_eff: float | None = None,
            ) -> tuple[ComparisonReport, dict[str, np.ndarray]]:
    p = config.params if Gamma_eff is None else replace(config.params, Gamma=Gamma_eff)
    lam = p.lam
    curves = analytic_curves(config, Gamma_eff)
    k = config.tolerance_factor
    gated = _GATED[config.kind]
    floor = 100 * config.atol
    devs = {}
    notes = []
    if config.kind.startswith("noon"):
        # the ratio formula holds for T >> 1/Gamma; compare where Gamma T >= 3
        late = config.times * p.Gamma >= 3
        if np.any(late):
            val = float(np.max(np.abs(series["ratio"][late] - curves["ratio"][late])))
            devs["ratio"] = Deviation(val, NOON_RATIO_TOLERANCE, "absolute", True)
        else:
            notes.append("no samples with Gamma T >= 3; ratio not compared")
    else:
        for name in ("n_plus", "n_minus", "p1", "p2"):
            if name in series and name in curves:
                val = _relative_deviation(series[name], curves[name], floor)
                devs[name] = Deviation(val, k * lam, "relative", name in gated)
    valid = lam <= analytic.WEAK_PUMP_LIMIT
    if not valid:
        notes.append(f"lam = {lam:.3g} exceeds {analytic.WEAK_PUMP_LIMIT}: closed forms invalid")
    report = ComparisonReport(lam, valid, devs, k, tuple(notes))
    return report, curves


def run_and_compare(config: ScenarioConfig) -> tuple[TimeSeries, ComparisonReport]:
    """Run the quantum model and measure its distance to the closed-form curves.

    Deviations are ``max_t |quantum - analytic| / max(|analytic|, 100 atol)``;
    the report passes when every gated deviation is below
    ``tolerance_factor * lam`` (NOON ratios: absolute 0.1) and ``lam <= 0.1``.
    """
    series, built = run(config)
    G = built.meta.get("Gamma_eff")
    report, curves = compare(config, series, G if G != config.params.Gamma else None)
    series = replace(series, diagnostics={**series.diagnostics, "analytic": curves})
    return series, report


# --------------------------------------------------------- post-processing

@dataclass(frozen=True)
class SpatialFilterReport:
    pump_photons: float
    pair_photons: float
    port1_photons: float
    port2_photons: float

    @property
    def pump_to_port1(self) -> float:
        if self.pump_photons == 0:
            return 1.0
        return min(self.port1_photons, self.pump_photons) / self.pump_photons

    @property
    def pair_to_port2(self) -> float:
        if self.pair_photons == 0:
            return 1.0
        return min(self.port2_photons, self.pair_photons) / self.pair_photons


def spatial_filter_report(state: QuantumState, modes: tuple[int, int] = (0, 1)) -> SpatialFilterReport:
    """Route a physical-basis two-guide state through a 50/50 beamsplitter.

    Residual pump lives in a+ = (a1 + a2)/sqrt(2) and exits port 1; pairs in
    a- exit port 2.
    """
    dims = state.dims
    ops = _lowering(dims)
    a1, a2 = ops[modes[0]], ops[modes[1]]
    ap = (a1 + a2) / math.sqrt(2)
    am = (a1 - a2) / math.sqrt(2)
    pump = _n(ap).expect(state).real
    pair = _n(am).expect(state).real
    out = beamsplitter_map(state, modes, math.pi / 4)
    return SpatialFilterReport(pump, pair, _n(a1).expect(out).real, _n(a2).expect(out).real)


def fit_decay_rate(times, values, window: tuple[float, float]) -> float:
    """Least-squares slope of ``-log(values)`` over ``window``."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sel = (times >= window[0]) & (times <= window[1]) & (values > 0)
    if sel.sum() < 2:
        raise ValueError("fewer than two samples in the fit window")
    slope = np.polyfit(times[sel], np.log(values[sel]), 1)[0]
    return float(-slope)

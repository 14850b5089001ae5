"""Lindblad master-equation integration.

    drho/dt = -i[H(t), rho] + sum_k r_k (c_k rho c_k^dag - 1/2 {c_k^dag c_k, rho})

The density matrix is integrated directly with an adaptive embedded
Runge-Kutta scheme (``scipy.integrate.solve_ivp``).  Rates and times are
dimensionless multiples of a caller-chosen reference rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp

from .fock import FockOperator, QuantumState

__all__ = [
    "LindbladModel",
    "TimeSeries",
    "IntegrationError",
    "AccuracyError",
    "evolve",
    "evolve_driven",
    "liouvillian_apply",
    "heisenberg_expectations",
]

HamiltonianLike = Union[FockOperator, np.ndarray, Callable[[float], Union[FockOperator, np.ndarray]]]

TRACE_DRIFT_LIMIT = 1e-6


class IntegrationError(RuntimeError):
    """The integrator gave up (typically step-size underflow)."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached


class AccuracyError(RuntimeError):
    """Trace drift exceeded the accuracy budget."""


def _array(op) -> np.ndarray:
    if isinstance(op, FockOperator):
        return op.data
    return np.asarray(op, dtype=complex)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian (static or ``t -> H(t)``) plus rated collapse operators."""

    hamiltonian: HamiltonianLike
    collapse_terms: tuple[tuple[FockOperator, float], ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        terms = tuple((op, float(rate)) for op, rate in self.collapse_terms)
        for op, rate in terms:
            if rate < 0:
                raise ValueError(f"collapse rate must be >= 0, got {rate}")
            if op.dims != dims:
                raise ValueError(f"collapse operator dims {op.dims} != model dims {dims}")
        if isinstance(self.hamiltonian, FockOperator) and self.hamiltonian.dims != dims:
            raise ValueError(f"hamiltonian dims {self.hamiltonian.dims} != model dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "collapse_terms", terms)

    @property
    def time_dependent(self) -> bool:
        return callable(self.hamiltonian)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def hamiltonian_at(self, t: float) -> np.ndarray:
        h = self.hamiltonian(t) if self.time_dependent else self.hamiltonian
        return _array(h)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled observables ``tr(O rho(t))`` on a strictly increasing grid."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    final_state: QuantumState | None = None
    states: list[QuantumState] | None = None
    errors: dict[str, np.ndarray] | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("times must be a strictly increasing 1-D grid")
        for name, vals in self.observables.items():
            if len(vals) != len(t):
                raise ValueError(f"observable {name!r} has {len(vals)} samples, expected {len(t)}")
        object.__setattr__(self, "times", t)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.observables[name]

    def __contains__(self, name: str) -> bool:
        return name in self.observables


def liouvillian_apply(model: LindbladModel, rho, t: float = 0.0) -> np.ndarray:
    """Right-hand side of the master equation evaluated on ``rho``."""
    rho = _array(rho)
    h = model.hamiltonian_at(t)
    out = -1j * (h @ rho - rho @ h)
    for op, rate in model.collapse_terms:
        c = op.data
        cd = c.conj().T
        cdc = cd @ c
        out += rate * (c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc))
    return out


class _Generator:
    """Vectorized RHS built from the non-hermitian effective Hamiltonian.

    -i(Heff rho - rho Heff^dag) + sum_k C_k rho C_k^dag with C_k = sqrt(r_k) c_k.
    Static operators are held in CSR form; this is only a speed detail.
    """

    def __init__(self, model: LindbladModel):
        self.n = model.size
        self.model = model
        self.t_ok = -math.inf     # latest time with a finite right-hand side
        jumps = [(math.sqrt(rate), op.data) for op, rate in model.collapse_terms if rate > 0]
        self.jumps = [sparse.csr_matrix(s * c) for s, c in jumps]
        self.jumps_h = [j.conj().T.tocsr() for j in self.jumps]
        damp = np.zeros((self.n, self.n), dtype=complex)
        for s, c in jumps:
            damp += (s * s) * (c.conj().T @ c)
        self.damp = -0.5j * damp
        if model.time_dependent:
            self.heff = None
        else:
            self.heff = sparse.csr_matrix(model.hamiltonian_at(0.0) + self.damp)
            self.heff_h = self.heff.conj().T.tocsr()

    def __call__(self, t, y):
        rho = y.reshape(self.n, self.n)
        if self.heff is None:
            heff = self.model.hamiltonian_at(t) + self.damp
            a = heff @ rho
            b = rho @ heff.conj().T
        else:
            a = self.heff @ rho
            b = (self.heff_h.T @ rho.T).T
        out = -1j * (a - b)
        for j, jh in zip(self.jumps, self.jumps_h):
            cr = j @ rho
            out += (jh.T @ cr.T).T
        out = out.ravel()
        if t > self.t_ok and np.isfinite(out).all():
            self.t_ok = t
        return out


def _initial_rho(model: LindbladModel, initial: QuantumState) -> np.ndarray:
    if tuple(initial.dims) != model.dims:
        raise ValueError(f"initial state dims {initial.dims} != model dims {model.dims}")
    return np.array(initial.rho, dtype=complex)


def _integrate(model, rho0, times, rtol, atol, method):
    gen = _Generator(model)
    t0 = float(times[0])
    tf = float(times[-1])
    if tf == t0:
        return rho0.reshape(1, -1), 0
    sol = solve_ivp(gen, (t0, tf), rho0.ravel(), method=method, t_eval=times,
                    rtol=rtol, atol=atol)
    if sol.status < 0:
        t_reached = max(float(sol.t[-1]) if sol.t.size else t0, min(gen.t_ok, tf))
        raise IntegrationError(f"integration failed at t={t_reached:.6g}: {sol.message}",
                               t_reached)
    return sol.y.T, sol.nfev


def _observable_arrays(observables) -> dict[str, tuple[np.ndarray, bool]]:
    out = {}
    for name, op in (observables or {}).items():
        arr = _array(op)
        out[name] = (arr, bool(np.allclose(arr, arr.conj().T, rtol=0, atol=1e-12)))
    return out


def _evaluate(ys, n, obs):
    values = {name: np.empty(len(ys), dtype=float if herm else complex)
              for name, (arr, herm) in obs.items()}
    traces = np.empty(len(ys))
    herm_resid = 0.0
    for k, y in enumerate(ys):
        rho = y.reshape(n, n)
        traces[k] = np.trace(rho).real
        herm_resid = max(herm_resid, float(np.max(np.abs(rho - rho.conj().T))))
        for name, (arr, herm) in obs.items():
            v = np.einsum("ij,ji->", arr, rho)
            values[name][k] = v.real if herm else v
    return values, traces, herm_resid


def evolve(model: LindbladModel, initial: QuantumState, times: Sequence[float],
           observables: Mapping[str, FockOperator | np.ndarray] | None = None, *,
           rtol: float = 1e-8, atol: float = 1e-10, method: str = "RK45",
           store_states: bool = False, error_estimate: bool = False) -> TimeSeries:
    """Propagate ``initial`` through ``times`` and sample ``tr(O rho)``.

    Parameters
    ----------
    model, initial
        Model and starting state; dims must agree.  ``initial`` is taken to be
        the state at ``times[0]``.
    times
        Strictly increasing sample grid with ``times[0] >= 0``.
    observables
        Named operators.  Hermitian ones give real series.
    rtol, atol
        Integrator tolerances on the density-matrix entries.
    method
        ``solve_ivp`` explicit Runge-Kutta method.
    store_states
        Keep the density matrix at every sample (memory ~ samples x dim^2).
    error_estimate
        Re-run with tolerances tightened tenfold and report, per observable,
        ``2|difference| + 10 atol (1 + |value|)`` as the error bar.

    Raises
    ------
    IntegrationError
        The step size underflowed before the end of the grid.
    AccuracyError
        ``|tr rho - 1|`` exceeded 1e-6 at some sample.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D grid")
    if times[0] < 0:
        raise ValueError("times[0] must be >= 0")
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    rho0 = _initial_rho(model, initial)
    n = model.size
    obs = _observable_arrays(observables)

    ys, nfev = _integrate(model, rho0, times, rtol, atol, method)
    values, traces, herm_resid = _evaluate(ys, n, obs)
    drift = float(np.max(np.abs(traces - 1.0)))
    if drift > TRACE_DRIFT_LIMIT:
        raise AccuracyError(f"trace drift {drift:.3g} exceeds {TRACE_DRIFT_LIMIT:g}")

    final_rho = ys[-1].reshape(n, n)
    final_rho = 0.5 * (final_rho + final_rho.conj().T)
    final = QuantumState(final_rho, model.dims, leakage=initial.leakage, validate=False)
    states = None
    if store_states:
        states = [QuantumState(0.5 * (y.reshape(n, n) + y.reshape(n, n).conj().T),
                               model.dims, leakage=initial.leakage, validate=False)
                  for y in ys]

    errors = None
    if error_estimate:
        fine, _ = _integrate(model, rho0, times, rtol / 10, atol / 10, method)
        fine_vals, _, _ = _evaluate(fine, n, obs)
        errors = {name: 2 * np.abs(values[name] - fine_vals[name])
                  + 10 * atol * (1 + np.abs(values[name])) for name in values}

    diagnostics = {
        "nfev": int(nfev),
        "max_trace_drift": drift,
        "max_hermiticity_residual": herm_resid,
        "min_eigenvalue_final": final.min_eigenvalue(),
        "rtol": rtol,
        "atol": atol,
        "method": method,
    }
    return TimeSeries(times, values, final, states, errors, diagnostics)


def evolve_driven(model: LindbladModel, initial: QuantumState, times: Sequence[float],
                  observables=None, **kwargs) -> TimeSeries:
    """:func:`evolve` for a model whose Hamiltonian is a function of time.

    The builder is called at every internal Runge-Kutta stage time.
    """
    if not model.time_dependent:
        raise ValueError("evolve_driven expects a model with a time-dependent Hamiltonian")
    return evolve(model, initial, times, observables, **kwargs)


def heisenberg_expectations(model: LindbladModel, initial: QuantumState,
                            operator: FockOperator | np.ndarray, times: Sequence[float],
                            **kwargs) -> TimeSeries:
    """``<A(t)>`` of a single operator.

    Heisenberg-picture expectations coincide with ``tr(A rho(t))``, which is
    what is computed here.
    """
    return evolve(model, initial, times, {"value": operator}, **kwargs)

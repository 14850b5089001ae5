import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pairgen.analytic import PairGenParams, n_minus_perturbative, p2_with_loss, t_max
from pairgen.fock import (FockOperator, QuantumState, coherent_state, destroy, embed,
                          fock_state, identity, number, tensor, vacuum)
from pairgen.lindblad import (AccuracyError, IntegrationError, LindbladModel, TimeSeries,
                              evolve, evolve_driven, heisenberg_expectations,
                              liouvillian_apply)
from pairgen.scenarios import build_semiclassical, build_two_mode


def _decay_model(dim=16, rate=1.0):
    return LindbladModel(FockOperator(np.zeros((dim, dim)), (dim,)), ((destroy(dim), rate),),
                         (dim,))


def test_model_validation():
    a = destroy(3)
    with pytest.raises(ValueError):
        LindbladModel(number(3), ((a, -1.0),), (3,))
    with pytest.raises(ValueError):
        LindbladModel(number(3), ((destroy(4), 1.0),), (3,))
    with pytest.raises(ValueError):
        LindbladModel(number(4), ((a, 1.0),), (3,))


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 0.0]), {})
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 1.0]), {"x": np.zeros(3)})


def test_linear_decay_of_coherent_state():
    t = np.linspace(0, 3, 31)
    s = evolve(_decay_model(), coherent_state(2.0, 16), t, {"n": number(16)})
    expected = number(16).expect(coherent_state(2.0, 16)).real * np.exp(-t)
    np.testing.assert_allclose(s["n"], expected, rtol=1e-6)
    assert s.final_state.dims == (16,)
    assert s.diagnostics["max_trace_drift"] < 1e-7


def test_two_mode_without_kerr_is_pure_pump_decay():
    p = PairGenParams(U=0.0, gamma=1.0, Gamma=20.0, alpha0_sq=2.0)
    b = build_two_mode(p, (14, 4))
    t = np.linspace(0, 0.5, 11)
    s = evolve(b.model, b.initial, t, b.observables, atol=1e-12)
    n0 = b.observables["n_plus"].expect(b.initial).real
    np.testing.assert_allclose(s["n_plus"], n0 * np.exp(-21 * t), rtol=1e-6)
    assert np.max(np.abs(s["n_minus"])) < 1e-14


def test_two_mode_tracks_perturbative_pair_number():
    p = PairGenParams(U=0.05, gamma=1.0, Gamma=20.0, alpha0_sq=2.0)
    b = build_two_mode(p, (14, 6))
    t = np.linspace(0.5, 10, 40) / p.Gamma
    s = evolve(b.model, b.initial, np.concatenate([[0.0], t]), b.observables, atol=1e-13)
    rel = np.abs(s["n_minus"][1:] / n_minus_perturbative(t, p) - 1)
    assert np.max(rel) < 3 * p.lam


def test_liouvillian_examples():
    d = 3
    a = destroy(d)
    model = LindbladModel(FockOperator(np.zeros((d, d)), (d,)), ((a, 0.7),), (d,))
    out = liouvillian_apply(model, fock_state(1, d).rho)
    np.testing.assert_allclose(out, 0.7 * np.diag([1, -1, 0]), atol=1e-15)
    np.testing.assert_allclose(liouvillian_apply(model, vacuum(d).rho), 0, atol=1e-15)


@given(st.integers(0, 2**31 - 1))
def test_liouvillian_trace_free_and_hermitian(seed):
    rng = np.random.default_rng(seed)
    d = 4
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    c = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    model = LindbladModel(FockOperator(h + h.conj().T, (d,)), ((FockOperator(c, (d,)), 0.3),), (d,))
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m + m.conj().T
    out = liouvillian_apply(model, rho)
    assert abs(np.trace(out)) < 1e-12
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_generator_matches_textbook_rhs():
    # the sparse effective-Hamiltonian RHS must equal the dense Lindblad form
    from pairgen.lindblad import _Generator
    p = PairGenParams(U=0.3, gamma=0.5, Gamma=4.0, alpha0_sq=1.0)
    b = build_two_mode(p, (5, 3))
    rng = np.random.default_rng(3)
    m = rng.normal(size=(15, 15)) + 1j * rng.normal(size=(15, 15))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    fast = _Generator(b.model)(0.0, rho.ravel()).reshape(15, 15)
    np.testing.assert_allclose(fast, liouvillian_apply(b.model, rho), atol=1e-12)


def test_driven_model_without_kerr_stays_vacuum():
    p = PairGenParams(U=0.0, gamma=1.0, Gamma=20.0, alpha0_sq=2.0)
    b = build_semiclassical(p, 6)
    s = evolve_driven(b.model, b.initial, np.linspace(0, 1, 5), b.observables)
    assert np.max(np.abs(s["n_minus"])) < 1e-15


def test_driven_model_conserves_parity_without_loss():
    p = PairGenParams(U=0.5, gamma=0.0, Gamma=5.0, alpha0_sq=2.0)
    b = build_semiclassical(p, 8)
    s = evolve_driven(b.model, b.initial, np.linspace(0, 2, 21), b.observables)
    assert np.max(s["parity_odd"]) < 1e-10
    assert np.max(s["p2"]) > 1e-3


def test_driven_pair_probability_at_peak():
    p = PairGenParams(U=0.05, gamma=1.0, Gamma=20.0, alpha0_sq=2.0)
    b = build_semiclassical(p, 6)
    tm = t_max(p)
    s = evolve_driven(b.model, b.initial, [0.0, tm], b.observables, atol=1e-14)
    assert s["p2"][-1] == pytest.approx(p2_with_loss(tm, p), rel=0.05)


def test_evolve_driven_rejects_static_model():
    with pytest.raises(ValueError):
        evolve_driven(_decay_model(), vacuum(16), [0, 1])


def test_heisenberg_examples():
    p = PairGenParams(U=0.0, gamma=1.0, Gamma=9.0, alpha0_sq=1.0)
    b = build_two_mode(p, (10, 3))
    t = np.linspace(0, 0.4, 9)
    s = heisenberg_expectations(b.model, b.initial, b.observables["n_plus"], t, atol=1e-12)
    n0 = s["value"][0]
    np.testing.assert_allclose(s["value"], n0 * np.exp(-10 * t), rtol=1e-7)
    one = heisenberg_expectations(b.model, b.initial, identity(30), t)
    np.testing.assert_allclose(one["value"], 1.0, atol=1e-9)
    p = PairGenParams(U=0.05, gamma=1.0, Gamma=20.0, alpha0_sq=2.0)
    b = build_two_mode(p, (14, 6))
    s = heisenberg_expectations(b.model, b.initial, b.observables["n_minus"], [0, 0.3],
                                atol=1e-13)
    assert s["value"][-1] == pytest.approx(n_minus_perturbative(0.3, p), rel=p.lam)


def test_input_validation():
    m = _decay_model(4)
    with pytest.raises(ValueError):
        evolve(m, vacuum(5), [0, 1])
    with pytest.raises(ValueError):
        evolve(m, vacuum(4), [-1, 1])
    with pytest.raises(ValueError):
        evolve(m, vacuum(4), [0, 2, 1])
    with pytest.raises(ValueError):
        evolve(m, vacuum(4), [])


def test_single_sample_grid_returns_initial():
    s = evolve(_decay_model(4), fock_state(2, 4), [0.5], {"n": number(4)})
    assert s["n"][0] == 2.0


def test_integration_failure_reports_time():
    # a Hamiltonian that breaks down at t = 0.5 forces step-size underflow there
    d = 3
    model = LindbladModel(lambda t: number(d).data * (np.nan if t > 0.5 else 1.0), (), (d,))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises(IntegrationError) as info:
            evolve(model, coherent_state(0.5, d), [0.0, 0.25, 1.0])
    assert 0.25 <= info.value.t_reached <= 0.5 + 1e-9


def test_accuracy_error_on_trace_drift():
    d = 3
    # non-hermitian "hamiltonian" leaks probability
    model = LindbladModel(FockOperator(-1j * np.eye(d), (d,)), (), (d,))
    with pytest.raises(AccuracyError):
        evolve(model, vacuum(d), [0.0, 1.0])


def test_store_states_and_error_estimate():
    p = PairGenParams(U=0.2, gamma=1.0, Gamma=10.0, alpha0_sq=1.0)
    b = build_two_mode(p, (8, 4))
    t = np.linspace(0, 0.5, 6)
    s = evolve(b.model, b.initial, t, b.observables, store_states=True, error_estimate=True)
    assert len(s.states) == 6
    # halving the tolerances moves every observable by less than its error bar
    half = evolve(b.model, b.initial, t, b.observables, rtol=0.5e-8, atol=0.5e-10)
    for name in ("n_plus", "n_minus", "p2"):
        assert np.all(np.abs(half[name] - s[name]) < s.errors[name])


def _random_params(draw_seed):
    rng = np.random.default_rng(draw_seed)
    return PairGenParams(U=rng.uniform(0, 0.5), gamma=rng.uniform(0, 1),
                         Gamma=rng.uniform(1, 10), alpha0_sq=rng.uniform(0, 1.5))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_run_invariants_on_random_models(seed):
    p = _random_params(seed)
    b = build_two_mode(p, (8, 4))
    s = evolve(b.model, b.initial, np.linspace(0, 1, 5), b.observables)
    d = s.diagnostics
    assert d["max_trace_drift"] < 1e-7
    assert d["max_hermiticity_residual"] < 1e-9
    assert d["min_eigenvalue_final"] > -1e-7


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_evolution_is_linear(seed):
    p = _random_params(seed)
    b = build_two_mode(p, (6, 3))
    other = tensor([fock_state(1, 6), fock_state(2, 3)])
    mix = QuantumState(0.5 * (b.initial.rho + other.rho), (6, 3))
    t = [0.0, 0.7]
    obs = {"n_plus": b.observables["n_plus"], "p2": b.observables["p2"]}
    kw = dict(rtol=1e-10, atol=1e-12)
    r1 = evolve(b.model, b.initial, t, obs, **kw)
    r2 = evolve(b.model, other, t, obs, **kw)
    rm = evolve(b.model, mix, t, obs, **kw)
    np.testing.assert_allclose(rm.final_state.rho,
                               0.5 * (r1.final_state.rho + r2.final_state.rho), atol=1e-8)

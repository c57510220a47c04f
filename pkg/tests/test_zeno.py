"""Measurement-driven eigenpath traversal and its overlap bounds."""

import math

import numpy as np
import pytest

from eigenfilter.harness import gen_instance
from eigenfilter.zeno import (
    ZenoParams,
    ZenoTrace,
    query_envelope,
    solve_zeno,
    validate_zeno_bounds,
    zeno_params,
    zeno_schedule,
)


def test_params_reference_values():
    params = zeno_params(10.0, 1e-6)
    assert params.M == 27
    assert params.eps_p == pytest.approx(1.0 / (162.0 * 27 ** 2))
    assert params.final_eps == 2.5e-7
    assert params.f_grid.shape == (28,)
    assert params.f_grid[0] == 0.0 and params.f_grid[-1] == 1.0


def test_params_m_floor_near_one():
    # ln(kappa)/(1-1/kappa) -> 1 from above, so the ceil lands just past 4
    params = zeno_params(1.01, 0.1)
    assert params.M == 5
    # eps_p stays comfortably small for every M >= 4
    assert params.eps_p <= 1.0 / 128.0
    with pytest.raises(ValueError):
        ZenoParams(3, 1e-4, 1e-4, np.linspace(0.0, 1.0, 4))


def test_schedule_closed_form_value():
    # f(s) = (1 - kappa^{-s}) / (1 - 1/kappa)
    got = zeno_schedule(0.5, 10.0)
    want = (1.0 - 10.0 ** -0.5) / 0.9
    assert got == pytest.approx(want, abs=1e-15)
    assert got == pytest.approx(0.7597469266479577, abs=1e-15)
    assert zeno_schedule(0.0, 10.0) == 0.0
    assert zeno_schedule(1.0, 10.0) == pytest.approx(1.0)


def test_grid_is_strictly_increasing():
    params = zeno_params(50.0, 1e-4)
    assert np.all(np.diff(params.f_grid) > 0.0)


def test_postselect_walk_reaches_eps():
    inst = gen_instance(3, 10.0, 0)
    report, trace = solve_zeno(inst, 1e-6)
    assert report.final_fidelity >= 1.0 - 1e-6
    assert trace.final_fidelity == report.final_fidelity
    assert len(trace.per_step_success) == report.params["M"]
    assert report.attempts == 1
    trace.check_product()


def test_total_success_exceeds_analytic_floor():
    for seed in range(5):
        inst = gen_instance(3, 10.0, seed)
        _, trace = solve_zeno(inst, 1e-6)
        assert trace.total_success >= 1.0 / 400.0
        # empirically far above the loose bound
        assert trace.total_success >= 0.5


def test_idealized_projection_quarter_bound():
    inst = gen_instance(3, 10.0, 1)
    report, trace = solve_zeno(inst, 1e-3, ideal_projection=True)
    # M >= 4 ln^2(kappa)/(1-1/kappa)^2 holds by construction, so >= 1/4
    assert trace.total_success >= 0.25
    assert report.query_ledger["U_Hf_filter"] == 0


def test_overlap_bounds_hold_each_step():
    inst = gen_instance(3, 10.0, 2)
    _, trace = solve_zeno(inst, 1e-6)
    params = zeno_params(inst.kappa, 1e-6)
    bounds = validate_zeno_bounds(trace, params, inst)
    assert bounds.all_hold
    assert all(m >= 0.0 for m in bounds.idealized_path_margin)
    assert len(bounds.path_overlap_margin) == params.M
    assert len(bounds.projection_margin) == params.M
    assert len(bounds.step_overlap_margin) == params.M - 1


def test_product_inequality_on_trace_values():
    # prod(a_j - b_j) >= prod(a_j) - sum(b_j) for 0 < a_j < 1, b_j >= 0
    inst = gen_instance(3, 10.0, 3)
    _, trace = solve_zeno(inst, 1e-4)
    a = np.clip(np.asarray(trace.per_step_overlap), 1e-9, 1.0 - 1e-12)
    b = np.full_like(a, 4.0 * zeno_params(inst.kappa, 1e-4).eps_p)
    lhs = float(np.prod(a - b))
    rhs = float(np.prod(a) - np.sum(b))
    assert lhs >= rhs - 1e-15


def test_query_envelope_constant_under_two():
    inst = gen_instance(4, 10.0, 4)
    report, _ = solve_zeno(inst, 1e-6)
    envelope = report.formula_derived_costs["query_envelope"]
    measured = report.query_ledger["U_Hf_filter"]
    assert measured <= 2.0 * envelope


def test_sample_mode_aborts_and_restarts():
    inst = gen_instance(3, 10.0, 5)
    report, trace = solve_zeno(inst, 1e-6, mode="sample", seed=13)
    assert report.final_fidelity >= 1.0 - 1e-6
    assert report.attempts >= 1
    assert report.query_ledger["O_B"] == report.attempts
    # same seed, same trajectory
    report2, _ = solve_zeno(inst, 1e-6, mode="sample", seed=13)
    assert report2.attempts == report.attempts
    assert report2.query_ledger == report.query_ledger


def test_rejects_non_positive_definite():
    indef = gen_instance(3, 10.0, 6, form="hermitian-indefinite")
    with pytest.raises(ValueError):
        solve_zeno(indef, 1e-4)


def test_check_product_detects_mismatch():
    trace = ZenoTrace(per_step_success=[0.9, 0.8], total_success=0.5)
    with pytest.raises(AssertionError):
        trace.check_product()


def test_envelope_formula_shape():
    params = zeno_params(10.0, 1e-6)
    val = query_envelope(10.0, 3, params)
    r = 0.9
    shape = (30.0 - 1.0) / math.log(10.0) - 2.0 / r
    assert val == pytest.approx(math.log(1.0 / params.eps_p) * 27 * shape)

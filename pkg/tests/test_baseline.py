"""Odd inversion polynomial and the direct-application baseline solver."""

import numpy as np
import pytest

from eigenfilter.baseline import (
    InversionPolySpec,
    build_inversion_poly,
    solve_qsp_direct,
)
from eigenfilter.chebpoly import ChebSeries
from eigenfilter.harness import gen_instance
from eigenfilter.numerics import DenseOperator, StateRegister
from eigenfilter.qlsp import QlspInstance


def test_spec_rejects_even_series():
    with pytest.raises(ValueError):
        InversionPolySpec(ChebSeries(np.array([0.5, 0.0, 0.5]), parity="even"),
                          c=2.0, eps_prime=1e-3, delta=0.5, degree_budget=10)


def test_build_input_validation():
    with pytest.raises(ValueError):
        build_inversion_poly(1.0, 1e-3)
    with pytest.raises(ValueError):
        build_inversion_poly(4.0, 0.0)
    with pytest.raises(ValueError):
        build_inversion_poly(4.0, 1.0)


@pytest.mark.parametrize("alpha_kappa,eps", [(4.0, 1e-3), (12.0, 1e-4)])
def test_poly_accuracy_boundedness_and_budget(alpha_kappa, eps):
    spec = build_inversion_poly(alpha_kappa, eps)
    assert spec.degree % 2 == 1
    assert spec.degree <= spec.degree_budget

    xs = np.linspace(spec.delta, 1.0, 20001)
    err = np.max(np.abs(spec(xs) - 1.0 / (spec.c * xs)))
    assert err <= spec.eps_prime * (1.0 + 1e-9)

    grid = np.linspace(-1.0, 1.0, 40001)
    assert np.max(np.abs(spec(grid))) <= 1.0 + 1e-9
    # odd parity is structural, not just approximate
    assert np.max(np.abs(spec(grid) + spec(-grid))) == 0.0


def test_scaled_targets():
    kappa = 5.0
    spec = build_inversion_poly(3.0 * kappa, 1e-3, kappa=kappa)
    assert spec.c == pytest.approx(4.0 * 3.0 * kappa / 3.0)
    assert spec.eps_prime == pytest.approx(3.0 * 1e-3 / (4.0 * kappa))
    assert spec.delta == pytest.approx(1.0 / (3.0 * kappa))


def test_eigenvector_rhs_gives_formula_success():
    # b is the top eigenvector, so the outcome is b itself with amplitude
    # P(1/alpha) = P(1) for alpha = d = 1; success is (1/c)^2 up to eps'
    A = DenseOperator(np.diag([1.0, 0.8, 0.5, 0.25]), hermitian=True)
    b = StateRegister(np.array([1.0, 0.0, 0.0, 0.0]), ancilla=0, system=2)
    inst = QlspInstance(A, b, kappa=4.0, d=1, form="positive-definite")
    report = solve_qsp_direct(inst, 1e-4)
    c = 4.0 * 4.0 / 3.0
    eps_prime = 3.0 * 1e-4 / (4.0 * 4.0)
    p = report.success_probabilities[0]
    assert abs(np.sqrt(p) - 1.0 / c) <= eps_prime * (1.0 + 1e-9)
    assert report.final_fidelity >= 1.0 - 1e-12


def test_solve_reaches_accuracy_and_success_floor():
    inst = gen_instance(3, 6.0, 1)
    eps = 1e-3
    report = solve_qsp_direct(inst, eps)
    assert report.final_fidelity >= 1.0 - eps
    # ||A^{-1} b|| >= 1, so the amplitude is at least alpha/c = 3/(4 kappa)
    floor = (3.0 / (4.0 * inst.kappa)) ** 2
    assert report.success_probabilities[0] >= floor * 0.99
    assert report.query_ledger["U_A"] == report.params["degree"]
    assert report.query_ledger["O_B"] == 1
    assert report.formula_derived_costs["expected_queries"] == pytest.approx(
        report.params["degree"] / report.success_probabilities[0])


def test_sample_mode_retries_are_ledgered_and_seeded():
    inst = gen_instance(3, 6.0, 2)
    a = solve_qsp_direct(inst, 1e-3, mode="sample", seed=11)
    b = solve_qsp_direct(inst, 1e-3, mode="sample", seed=11)
    assert a.attempts == b.attempts
    assert a.attempts >= 1
    assert a.query_ledger["U_A"] == a.params["degree"] * a.attempts
    assert a.query_ledger["O_B"] == a.attempts
    assert a.final_fidelity == b.final_fidelity


def test_general_form_routes_through_hermitian_extension():
    inst = gen_instance(2, 4.0, 0, form="general")
    eps = 1e-3
    report = solve_qsp_direct(inst, eps)
    assert report.params["form"] == "general"
    assert report.final_fidelity >= 1.0 - eps

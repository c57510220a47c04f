"""Eigenstate filtering, reflection, and phase-reflection transforms.

The polynomial transforms act on a block-encoded Hermitian operator H through
the shifted contraction H̃ = (H - λI)/(alpha + |λ|). Applying the even filter
polynomial and measuring the encoding ancillas in |0..0⟩ projects a trial
state toward the λ-eigenspace; the reflection variants realize 2P_λ - I and
P_λ + e^{iθ}(I - P_λ) without any measurement.

Phase factors of the signal-processing circuit are never computed: the
polynomial is applied directly with a Clenshaw recurrence, which acts
identically on the encoded block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding
from .chebpoly import (
    BOUND_GAP_CAP,
    FilterSpec,
    filter_cheb_coeffs,
    filter_eval,
    reflection_cheb_coeffs,
)
from .numerics import StateRegister, clenshaw_apply, eig_hermitian

# Eigenvalues within this distance of λ count as the target eigenspace.
EIGENSPACE_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementOutcome:
    """Projection result: success probability plus the renormalized state.

    In postselect mode the projection is deterministic and the probability is
    recorded; in sample mode a seeded coin decides sampled_success, and on
    failure the caller is expected to restart (the failure branch state is
    not modeled).
    """

    success_probability: float
    post_state: StateRegister
    mode: str = "postselect"
    sampled_success: bool | None = None
    ancilla_budget: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.success_probability <= 1.0 + 1e-12:
            raise ValueError("success probability outside [0, 1]")
        if self.mode not in ("postselect", "sample"):
            raise ValueError(f"unknown mode {self.mode!r}")


def _shifted_contraction(enc: BlockEncoding, lam: float):
    h = enc.payload
    if not h.hermitian:
        raise ValueError("filtering needs a Hermitian payload")
    denom = enc.alpha + abs(lam)
    htilde = (h.mat - lam * np.eye(h.dim)) / denom
    return htilde, denom


def _measured_gap(enc: BlockEncoding, lam: float) -> float:
    dec = eig_hermitian(enc.payload)
    dist = np.abs(dec.eigenvalues - lam)
    if dist.min() > EIGENSPACE_TOL:
        raise ValueError(f"{lam} is not an eigenvalue of the payload")
    rest = dist[dist > EIGENSPACE_TOL]
    if rest.size == 0:
        raise ValueError("payload has no spectrum outside the target eigenspace")
    return float(rest.min())


def transformed_gap(enc: BlockEncoding, lam: float, gap: float | None = None) -> float:
    """Gap of H̃ around 0, from the measured spectrum or a supplied bound.

    Capped at 1/sqrt(12), the largest gap for which the exponential filter
    bound is valid.
    """
    g = _measured_gap(enc, lam) if gap is None else float(gap)
    if g <= 0.0:
        raise ValueError("gap must be positive")
    return min(g / (enc.alpha + abs(lam)), BOUND_GAP_CAP)


def apply_filter(enc: BlockEncoding, lam: float, ell: int, psi: StateRegister,
                 mode: str = "postselect", rng: np.random.Generator | None = None,
                 gap: float | None = None) -> MeasurementOutcome:
    """Filter psi toward the λ-eigenspace with the degree-2ell polynomial.

    The optional gap argument is a user-supplied lower bound on the spectral
    gap of the payload around λ (the algorithm-as-specified path); by default
    the gap is measured from the eigendecomposition.
    """
    htilde, _ = _shifted_contraction(enc, lam)
    gap_t = transformed_gap(enc, lam, gap)
    series = filter_cheb_coeffs(FilterSpec(ell, gap_t))
    out = clenshaw_apply(series, htilde, psi)
    p = float(out.norm() ** 2)
    budget = enc.ancilla + 2
    if mode == "postselect":
        if p <= 1e-300:
            raise ValueError("state filtered to zero: no overlap with eigenspace")
        return MeasurementOutcome(min(p, 1.0), out.normalized(), mode,
                                  ancilla_budget=budget)
    if rng is None:
        raise ValueError("sample mode needs a generator")
    success = bool(rng.random() < p)
    post = out.normalized() if success else psi
    return MeasurementOutcome(min(p, 1.0), post, mode, sampled_success=success,
                              ancilla_budget=budget)


def projector_error(enc: BlockEncoding, lam: float, ell: int,
                    gap: float | None = None) -> float:
    """‖R_ell(H̃; gap̃) - P_λ‖ computed through the spectral oracle."""
    gap_t = transformed_gap(enc, lam, gap)
    spec = FilterSpec(ell, gap_t)
    denom = enc.alpha + abs(lam)
    dec = eig_hermitian(enc.payload)
    shifted = (dec.eigenvalues - lam) / denom
    inside = np.abs(dec.eigenvalues - lam) <= EIGENSPACE_TOL
    vals = np.array([filter_eval(spec, x) for x in shifted])
    return float(np.abs(vals - inside.astype(float)).max())


def reflection_apply(enc: BlockEncoding, lam: float, ell: int,
                     psi: StateRegister,
                     gap: float | None = None) -> MeasurementOutcome:
    """Apply the normalized reflection polynomial about the λ-eigenspace."""
    htilde, _ = _shifted_contraction(enc, lam)
    gap_t = transformed_gap(enc, lam, gap)
    series = reflection_cheb_coeffs(FilterSpec(ell, gap_t, "reflection"))
    out = clenshaw_apply(series, htilde, psi)
    p = min(float(out.norm() ** 2), 1.0)
    return MeasurementOutcome(p, out.normalized(), ancilla_budget=enc.ancilla + 2)


def theta_reflection_apply(enc: BlockEncoding, lam: float, ell: int, theta: float,
                           psi: StateRegister,
                           gap: float | None = None) -> MeasurementOutcome:
    """Apply P_λ + e^{iθ}(I - P_λ) via one-bit phase estimation semantics.

    The circuit interferes the identity with the reflection:
    e^{iθ/2}(cos(θ/2)·I - i·sin(θ/2)·S) fixes the +1 sector of S and phases
    the -1 sector by e^{iθ}.
    """
    refl = reflection_apply(enc, lam, ell, psi, gap=gap)
    s_psi = refl.post_state.amps * math.sqrt(refl.success_probability)
    amps = np.exp(1j * theta / 2.0) * (
        math.cos(theta / 2.0) * psi.amps - 1j * math.sin(theta / 2.0) * s_psi
    )
    out = psi.with_amps(amps)
    p = min(float(out.norm() ** 2), 1.0)
    return MeasurementOutcome(p, out.normalized(), ancilla_budget=enc.ancilla + 3)


def measure_ancilla(state: StateRegister, mode: str = "postselect",
                    rng: np.random.Generator | None = None) -> MeasurementOutcome:
    """Measure all ancilla qubits, keeping the all-zero outcome.

    The all-zero block is the leading 2**system amplitudes (ancillas occupy
    the most significant positions).
    """
    if state.ancilla < 1:
        raise ValueError("state has no ancilla qubits")
    nsys = 1 << state.system
    block = state.amps[:nsys]
    p = float(np.linalg.norm(block) ** 2 / state.norm() ** 2)
    projected = np.zeros_like(state.amps)
    projected[:nsys] = block
    if mode == "postselect":
        if p <= 1e-300:
            raise ValueError("all-zero ancilla outcome has zero probability")
        return MeasurementOutcome(min(p, 1.0),
                                  state.with_amps(projected).normalized(), mode)
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("sample mode needs a generator")
    success = bool(rng.random() < p)
    post = state.with_amps(projected).normalized() if success else state
    return MeasurementOutcome(min(p, 1.0), post, mode, sampled_success=success)

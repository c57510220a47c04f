"""Linear-system problem representation and its interpolating Hamiltonians.

A QLSP instance is a coefficient matrix with singular values in [1/kappa, 1]
and a unit right-hand state. The solvers never invert anything: they follow
the null space of H(f) = (1-f)·H0 + f·H1 from |0⟩|b⟩ at f=0 to |0⟩|x⟩ at
f=1. This module builds those Hamiltonians (including the dilated forms for
indefinite and non-Hermitian input), bounds their spectral gap, and exposes
the exact eigenpath with its length and derivative diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding, encode, linear_combine, make_qb, multiply
from .numerics import (
    DenseOperator,
    StateRegister,
    eig_hermitian,
    hermitian_part,
    linsolve,
)

FORMS = ("positive-definite", "hermitian-indefinite", "general")

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
_SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # sigma_+ = |0><1|
_SM = _SP.T


@dataclass(frozen=True)
class QlspInstance:
    """Coefficient matrix, right-hand state, condition bound, sparsity, form."""

    A: DenseOperator
    b: StateRegister
    kappa: float
    d: int
    form: str = "positive-definite"
    seed: int | None = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if self.kappa <= 1.0:
            raise ValueError("kappa must exceed 1")
        if self.d < 1:
            raise ValueError("sparsity must be positive")
        if self.A.dim != self.b.dim:
            raise ValueError("matrix and right-hand side dimensions differ")
        if abs(self.b.norm() - 1.0) > 1e-12:
            raise ValueError("right-hand state must be normalized")
        sv = np.linalg.svd(self.A.mat, compute_uv=False)
        if sv[0] > 1.0 + 1e-10:
            raise ValueError(f"||A|| = {sv[0]:.6g} exceeds 1")
        if sv[-1] < 1.0 / self.kappa - 1e-10:
            raise ValueError(
                f"smallest singular value {sv[-1]:.6g} below 1/kappa"
            )

    @property
    def n(self) -> int:
        """System qubit count (dim = 2^n)."""
        n = max(self.A.dim - 1, 0).bit_length()
        return n

    @property
    def dim(self) -> int:
        return self.A.dim


def solution_state(inst: QlspInstance) -> StateRegister:
    """Classical oracle for the normalized solution A⁻¹b."""
    return linsolve(inst.A, inst.b).normalized()


def make_h0(b: StateRegister) -> DenseOperator:
    """H0 = sigma_x ⊗ Q_b; null space spans |0⟩|b⟩ and |1⟩|b⟩."""
    qb = make_qb(b).payload.mat
    return DenseOperator(np.kron(_SX, qb), hermitian=True)


def make_h1(A: DenseOperator, b: StateRegister) -> DenseOperator:
    """H1 = |0⟩⟨1| ⊗ AQ_b + |1⟩⟨0| ⊗ Q_bA; null space |0⟩|x⟩, |1⟩|b⟩."""
    qb = make_qb(b).payload.mat
    a = A.mat
    top = a @ qb
    return DenseOperator(np.kron(_SP, top) + np.kron(_SM, qb @ a),
                         hermitian=True)


def make_h1_encoding(inst: QlspInstance) -> BlockEncoding:
    """(d, n+4, 0)-encoding of H1 as a product of three encodings."""
    n = inst.n
    qb = make_qb(inst.b).payload.mat
    wall = DenseOperator(
        np.block([[np.eye(inst.dim), np.zeros((inst.dim, inst.dim))],
                  [np.zeros((inst.dim, inst.dim)), qb]]),
        hermitian=True,
    )
    w_enc = encode(wall, 1.0, ancilla=1)
    mid = encode(DenseOperator(np.kron(_SX, inst.A.mat), hermitian=True),
                 float(inst.d), ancilla=n + 2)
    prod = multiply(multiply(w_enc, mid), w_enc)
    payload = DenseOperator(hermitian_part(prod.payload.mat), hermitian=True)
    return BlockEncoding(payload, prod.alpha, prod.ancilla, prod.err_bound)


def make_h0_encoding(inst: QlspInstance) -> BlockEncoding:
    """(1, 1, 0)-encoding of H0 (the Q_b ancilla; the Pauli factor is free)."""
    return BlockEncoding(make_h0(inst.b), 1.0, 1)


def make_hf(inst: QlspInstance, f: float) -> BlockEncoding:
    """(1-f+f·d, n+6, 0)-encoding of H(f) = (1-f)·H0 + f·H1."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0, 1]")
    return linear_combine([make_h0_encoding(inst), make_h1_encoding(inst)],
                          [1.0 - f, f])


def gap_lower_bound(inst: QlspInstance, f: float) -> float:
    """Lower bound on the spectral gap of H(f) around 0.

    1-f+f/kappa for the positive-definite construction; the dilated forms
    carry an extra 1/sqrt(2).
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0, 1]")
    base = 1.0 - f + f / inst.kappa
    if inst.form == "positive-definite":
        return base
    return base / math.sqrt(2.0)


def dilate_indefinite(A: DenseOperator, b: StateRegister):
    """4N-dimensional (H0, H1) pair for Hermitian indefinite A.

    H0 = sigma_+ ⊗ [(sigma_z⊗I)·Q] + h.c. and
    H1 = sigma_+ ⊗ [(sigma_x⊗A)·Q] + h.c. with Q = I - |+,b⟩⟨+,b|.
    The adiabatic run starts from |0⟩|-⟩|b⟩ and targets |0⟩|+⟩|x⟩.
    """
    dim = A.dim
    plus_b = np.kron(np.array([1.0, 1.0]) / math.sqrt(2.0), b.amps)
    q = np.eye(2 * dim) - np.outer(plus_b, plus_b.conj())
    sz_i = np.kron(_SZ, np.eye(dim))
    sx_a = np.kron(_SX, A.mat)
    h0 = np.kron(_SP, sz_i @ q) + np.kron(_SM, q @ sz_i)
    h1 = np.kron(_SP, sx_a @ q) + np.kron(_SM, q @ sx_a)
    minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    init = np.kron(np.array([1.0, 0.0]), np.kron(minus, b.amps))
    state = StateRegister(init, ancilla=2, system=b.system)
    return (DenseOperator(h0, hermitian=True),
            DenseOperator(h1, hermitian=True), state)


def extend_general(A: DenseOperator, b: StateRegister,
                   kappa: float, d: int | None = None) -> QlspInstance:
    """Extended Hermitian system for arbitrary A: solution sits in |1⟩|x⟩.

    The coefficient matrix sigma_+⊗A + sigma_-⊗A† has eigenvalues ± the
    singular values of A, so the condition number is unchanged.
    """
    ext = np.kron(_SP, A.mat) + np.kron(_SM, A.mat.conj().T)
    rhs = np.kron(np.array([1.0, 0.0]), b.amps)
    d_ext = d if d is not None else A.dim
    return QlspInstance(
        DenseOperator(ext, hermitian=True),
        StateRegister(rhs, ancilla=b.ancilla, system=b.system + 1),
        kappa, d_ext, form="hermitian-indefinite",
    )


@dataclass(frozen=True)
class EigenpathPoint:
    """One point of the null-space curve f ↦ |x(f)⟩."""

    f: float
    state: StateRegister
    derivative_norm: float


def path_vector(inst: QlspInstance, f: float) -> np.ndarray:
    shifted = (1.0 - f) * np.eye(inst.dim) + f * inst.A.mat
    smin = float(np.linalg.svd(shifted, compute_uv=False)[-1])
    if smin <= 1e-12:
        raise ValueError(f"(1-f)I + fA is numerically singular at f={f}")
    y = np.linalg.solve(shifted, inst.b.amps)
    return y / np.linalg.norm(y)


def _transported(ref: np.ndarray, v: np.ndarray) -> np.ndarray:
    # discrete parallel transport: re-phase v so <ref|v> is real non-negative
    ov = np.vdot(ref, v)
    if abs(ov) == 0.0:
        return v
    return v * (ov.conjugate() / abs(ov))


def eigenpath_state(inst: QlspInstance, f: float,
                    fd_step: float = 1e-5) -> EigenpathPoint:
    """Exact eigenpath point with a finite-difference derivative norm.

    The central stencil is shifted inward near the endpoints; neighbor states
    are parallel-transported before differencing so the geometric phase does
    not pollute the derivative.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0, 1]")
    x = path_vector(inst, f)
    lo = max(f - fd_step, 0.0)
    hi = min(f + fd_step, 1.0)
    xlo = _transported(x, path_vector(inst, lo))
    xhi = _transported(x, path_vector(inst, hi))
    deriv = float(np.linalg.norm((xhi - xlo) / (hi - lo)))
    return EigenpathPoint(f, inst.b.with_amps(x), deriv)


def lstar(kappa: float, a: float, b: float) -> float:
    """Eigenpath-length upper bound for the segment [a, b] of f."""
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError("need 0 <= a <= b <= 1")
    r = 1.0 - 1.0 / kappa
    return (2.0 / r) * math.log((1.0 - r * a) / (1.0 - r * b))


def eigenpath_length(inst: QlspInstance, samples: int = 256,
                     a: float = 0.0, b: float = 1.0) -> float:
    """Trapezoidal quadrature of ‖∂_f x(f)‖ over [a, b]."""
    if samples < 64:
        raise ValueError("need at least 64 quadrature samples")
    fs = np.linspace(a, b, samples)
    derivs = [eigenpath_state(inst, float(f)).derivative_norm for f in fs]
    return float(np.trapezoid(derivs, fs))

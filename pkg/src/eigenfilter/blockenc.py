"""Block-encoding algebra: (alpha, m, eps) bookkeeping plus explicit dilations.

Two modes. Abstract mode carries the encoded matrix together with its
subnormalization, ancilla count, and error bound; this is the production path
and scales to the full desk-scale dimensions. Explicit mode completes
payload/alpha to an actual unitary with one extra ancilla and exists so the
bookkeeping can be verified against a real top-left block on tiny dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import DenseOperator, StateRegister, eig_hermitian, hermitian_part

UNITARY_TOL = 1e-10
DILATION_DIM_CAP = 2 ** 14


@dataclass(frozen=True)
class BlockEncoding:
    """Operator payload with subnormalization alpha, m ancillas, error bound."""

    payload: DenseOperator
    alpha: float
    ancilla: int
    err_bound: float = 0.0
    unitary: DenseOperator | None = None
    phase: float = 0.0  # global-phase metadata from shifts; never applied

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.ancilla < 0:
            raise ValueError("ancilla count must be non-negative")
        if self.err_bound < 0.0:
            raise ValueError("error bound must be non-negative")
        nrm = self.payload.norm()
        if nrm > self.alpha * (1.0 + 1e-10) + self.err_bound:
            raise ValueError(
                f"payload norm {nrm:.6g} exceeds alpha {self.alpha:.6g}: "
                "no unitary dilation exists"
            )
        if self.unitary is not None:
            u = self.unitary.mat
            d = self.payload.dim
            if u.shape[0] != d * 2 ** self.ancilla:
                raise ValueError("explicit unitary dimension != 2^ancilla * dim")
            if np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2) > UNITARY_TOL:
                raise ValueError("explicit unitary is not unitary within tolerance")
            err = np.linalg.norm(self.payload.mat - self.alpha * u[:d, :d], 2)
            if err > self.err_bound + UNITARY_TOL:
                raise ValueError(
                    f"top-left block error {err:.3e} exceeds declared bound"
                )

    @property
    def dim(self) -> int:
        return self.payload.dim


def _num_qubits(dim: int) -> int:
    n = max(int(dim) - 1, 0).bit_length()
    if 2 ** n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def encode(A: DenseOperator, alpha: float, ancilla: int | None = None,
           err_bound: float = 0.0) -> BlockEncoding:
    """Abstract encoding of A with subnormalization alpha.

    When the ancilla count is not supplied, the sparse-access convention
    m = n + 2 is recorded (n system qubits).
    """
    nrm = A.norm()
    if nrm > alpha * (1.0 + 1e-10):
        raise ValueError(f"alpha {alpha} < ||A|| = {nrm:.6g}")
    if ancilla is None:
        ancilla = _num_qubits(A.dim) + 2
    return BlockEncoding(A, float(alpha), ancilla, err_bound)


def shift_add_identity(enc: BlockEncoding, c: complex) -> BlockEncoding:
    """Encoding of A + cI with factor alpha + |c| and one more ancilla.

    The underlying circuit produces a global phase for complex c; it is kept
    as metadata since the payload stores A + cI directly.
    """
    c = complex(c)
    shifted = DenseOperator(
        enc.payload.mat + c * np.eye(enc.dim),
        hermitian=enc.payload.hermitian and c.imag == 0.0,
    )
    return BlockEncoding(shifted, enc.alpha + abs(c), enc.ancilla + 1,
                         enc.err_bound, phase=float(np.angle(c) if c != 0 else 0.0))


def multiply(e1: BlockEncoding, e2: BlockEncoding) -> BlockEncoding:
    """Encoding of A1·A2 from encodings of the factors."""
    if e1.dim != e2.dim:
        raise ValueError("dimension mismatch")
    prod = DenseOperator(e1.payload.mat @ e2.payload.mat)
    err = e1.alpha * e2.err_bound + e2.alpha * e1.err_bound
    return BlockEncoding(prod, e1.alpha * e2.alpha, e1.ancilla + e2.ancilla, err)


def linear_combine(encs, weights) -> BlockEncoding:
    """Encoding of Σ w_j A_j via a state-preparation pair (one extra ancilla)."""
    encs = list(encs)
    w = [float(x) for x in weights]
    if len(encs) != len(w) or not encs:
        raise ValueError("need equally many encodings and weights")
    if any(x < 0.0 for x in w):
        raise ValueError("weights must be non-negative; fold signs into payloads")
    dim = encs[0].dim
    if any(e.dim != dim for e in encs):
        raise ValueError("dimension mismatch")
    total = sum(wi * e.payload.mat for wi, e in zip(w, encs))
    herm = all(e.payload.hermitian for e in encs)
    alpha = sum(wi * e.alpha for wi, e in zip(w, encs))
    anc = sum(e.ancilla for e in encs) + 1
    err = sum(wi * e.err_bound for wi, e in zip(w, encs))
    return BlockEncoding(DenseOperator(total, hermitian=herm), alpha, anc, err)


def make_qb(b: StateRegister) -> BlockEncoding:
    """Encoding of the projector Q_b = I - |b⟩⟨b| (one ancilla)."""
    if abs(b.norm() - 1.0) > 1e-12:
        raise ValueError("b must be a unit vector")
    v = b.amps
    qb = np.eye(v.size) - np.outer(v, v.conj())
    return BlockEncoding(DenseOperator(qb, hermitian=True), 1.0, 1)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    dec = eig_hermitian(hermitian_part(m))
    lam = np.clip(dec.eigenvalues, 0.0, None)
    return dec.function_of(lambda _: np.sqrt(lam))


def dilate_to_unitary(enc: BlockEncoding) -> DenseOperator:
    """Complete payload/alpha to a unitary with one ancilla qubit.

    U = [[X, sqrt(I-XX†)], [sqrt(I-X†X), -X†]] with X = payload/alpha.
    """
    if enc.dim * 2 ** (enc.ancilla + 1) > DILATION_DIM_CAP:
        raise ValueError(
            "dilation size guard exceeded; use abstract mode for bookkeeping"
        )
    x = enc.payload.mat / enc.alpha
    d = enc.dim
    top = _psd_sqrt(np.eye(d) - x @ x.conj().T)
    bot = _psd_sqrt(np.eye(d) - x.conj().T @ x)
    u = np.block([[x, top], [bot, -x.conj().T]])
    return DenseOperator(u)


def attach_unitary(enc: BlockEncoding) -> BlockEncoding:
    """Explicit-mode copy of an abstract encoding (verification path).

    The returned encoding declares the single dilation ancilla so the
    explicit-unitary invariants are checkable; the circuit-count ancilla
    bookkeeping stays on the abstract object.
    """
    u = dilate_to_unitary(enc)
    return BlockEncoding(enc.payload, enc.alpha, 1, enc.err_bound, unitary=u,
                         phase=enc.phase)


def verify(enc: BlockEncoding) -> float:
    """Measured encoding error ‖A - alpha·(top-left block)‖ (explicit mode)."""
    if enc.unitary is None:
        raise ValueError("verify needs an explicit unitary")
    d = enc.dim
    block = enc.unitary.mat[:d, :d]
    return float(np.linalg.norm(enc.payload.mat - enc.alpha * block, 2))

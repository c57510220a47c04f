"""Dense complex linear-algebra kernel.

Everything downstream (filtering, solvers, experiments) runs on two small
value types: a dense operator and a state register with an (ancilla | system)
qubit split. Operators are applied either through their eigendecomposition
(the oracle path) or through a Clenshaw recurrence on Chebyshev coefficients
(the production path, which mirrors a quantum circuit in never diagonalizing).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DenseOperator:
    """Square complex matrix with an optional Hermitian tag."""

    mat: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "mat", _readonly(m))
        if self.hermitian:
            scale = max(1.0, float(np.abs(m).max(initial=0.0)))
            dev = float(np.abs(m - m.conj().T).max(initial=0.0))
            if dev > HERMITIAN_TOL * scale:
                raise ValueError(
                    f"hermitian flag set but max asymmetry {dev:.3e} exceeds "
                    f"{HERMITIAN_TOL:.0e} (relative)"
                )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.mat, 2))


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


@dataclass(frozen=True)
class StateRegister:
    """Complex amplitude vector over ancilla ⊗ system qubits.

    The ancilla qubits occupy the most significant bit positions, so the
    all-zero-ancilla block is the leading 2**system amplitudes.
    """

    amps: np.ndarray
    ancilla: int = 0
    system: int = 0

    def __post_init__(self):
        v = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.ancilla < 0 or self.system < 0:
            raise ValueError("qubit counts must be non-negative")
        expect = 1 << (self.ancilla + self.system)
        if v.size != expect:
            raise ValueError(
                f"amplitude length {v.size} != 2^({self.ancilla}+{self.system})"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite amplitudes")
        object.__setattr__(self, "amps", _readonly(v))

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateRegister":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return StateRegister(self.amps / n, self.ancilla, self.system)

    def with_amps(self, amps: np.ndarray) -> "StateRegister":
        return StateRegister(amps, self.ancilla, self.system)


def fidelity(a: StateRegister | np.ndarray, b: StateRegister | np.ndarray) -> float:
    """|⟨a|b⟩| for unit vectors (unsquared convention)."""
    va = a.amps if isinstance(a, StateRegister) else np.asarray(a, dtype=complex)
    vb = b.amps if isinstance(b, StateRegister) else np.asarray(b, dtype=complex)
    return float(abs(np.vdot(va, vb)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the matching unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _readonly(np.asarray(self.eigenvalues, dtype=float)))
        object.__setattr__(self, "eigenvectors", _readonly(np.asarray(self.eigenvectors, dtype=complex)))

    def apply_function(self, fn, v: np.ndarray) -> np.ndarray:
        """Compute f(H) v through the decomposition (oracle path)."""
        lam, vec = self.eigenvalues, self.eigenvectors
        return vec @ (np.asarray(fn(lam)) * (vec.conj().T @ v))

    def function_of(self, fn) -> np.ndarray:
        """Dense f(H) (oracle path)."""
        lam, vec = self.eigenvalues, self.eigenvectors
        return (vec * np.asarray(fn(lam))) @ vec.conj().T


def eig_hermitian(H: DenseOperator | np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    The input is symmetrized before the solve to strip roundoff drift from
    repeated constructions; inputs that are not Hermitian within tolerance
    are rejected outright.
    """
    m = H.mat if isinstance(H, DenseOperator) else np.asarray(H, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError("eig_hermitian needs a square matrix of dim >= 1")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    dev = float(np.abs(m - m.conj().T).max(initial=0.0))
    if dev > HERMITIAN_TOL * scale:
        raise ValueError(
            f"matrix is not Hermitian: max|H - H†| = {dev:.3e} (tol {HERMITIAN_TOL:.0e} rel)"
        )
    try:
        lam, vec = np.linalg.eigh(hermitian_part(m))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigendecomposition did not converge: {exc}") from exc
    return SpectralDecomposition(lam, vec)


def _coefficients(coeffs) -> np.ndarray:
    c = getattr(coeffs, "coefficients", coeffs)
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ValueError("invalid Chebyshev coefficients")
    return c


def clenshaw_apply(coeffs, Hn: DenseOperator | np.ndarray,
                   v: StateRegister | np.ndarray):
    """Apply Σ_k c_k T_k(Hn) to v by the backward Clenshaw recurrence.

    Hn must be a contraction in spectral norm (the Chebyshev recurrence is
    unstable outside [-1, 1]); a small tolerance absorbs roundoff from the
    callers' normalizations.
    """
    c = _coefficients(coeffs)
    m = Hn.mat if isinstance(Hn, DenseOperator) else np.asarray(Hn, dtype=complex)
    nrm = float(np.linalg.norm(m, 2))
    if nrm > 1.0 + 1e-8:
        raise ValueError(f"clenshaw_apply needs ||Hn|| <= 1, got {nrm:.6f}")
    vec = v.amps if isinstance(v, StateRegister) else np.asarray(v, dtype=complex)
    if vec.shape[0] != m.shape[0]:
        raise ValueError("dimension mismatch between operator and state")

    bk1 = np.zeros_like(vec)
    bk2 = np.zeros_like(vec)
    for k in range(c.size - 1, 0, -1):
        bk1, bk2 = c[k] * vec + 2.0 * (m @ bk1) - bk2, bk1
    out = c[0] * vec + m @ bk1 - bk2
    if isinstance(v, StateRegister):
        return v.with_amps(out)
    return out


def linsolve(A: DenseOperator | np.ndarray, b: StateRegister | np.ndarray):
    """Solve A x = b for invertible A (classical oracle for A⁻¹b)."""
    m = A.mat if isinstance(A, DenseOperator) else np.asarray(A, dtype=complex)
    rhs = b.amps if isinstance(b, StateRegister) else np.asarray(b, dtype=complex)
    smin = float(np.linalg.svd(m, compute_uv=False)[-1])
    if smin <= 1e-12:
        raise ValueError(f"matrix is numerically singular (σ_min = {smin:.3e})")
    x = np.linalg.solve(m, rhs)
    if isinstance(b, StateRegister):
        return b.with_amps(x)
    return x

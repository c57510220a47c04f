"""Zeno-style traversal: a scheduled sequence of filtering projections.

Instead of evolving in time, the solver walks the interpolation parameter
through a grid chosen so that consecutive null states overlap by 1 - O(1/M);
projecting onto the instantaneous null space at each grid point then succeeds
with probability bounded away from zero for the whole walk. Projections are
polynomial filters at accuracy eps_P, except the last one, which switches to
eps/4 to set the output precision.

The walk stays in the |0⟩-block of the two-block picture (the filter
polynomial is even, hence block-diagonal in the first qubit), so the final
first-qubit measurement succeeds with probability 1 up to roundoff; it is
still performed, and its probability is recorded in the last step entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chebpoly import degree_for_accuracy
from .filtering import apply_filter, measure_ancilla
from .numerics import StateRegister, fidelity
from .qlsp import QlspInstance, gap_lower_bound, make_hf, solution_state, path_vector
from .report import SolverReport

M_FLOOR = 4  # the overlap analysis needs M >= 4


def zeno_schedule(s: float, kappa: float) -> float:
    """Schedule with equal length-bound segments: f(s) = (1-κ^{-s})/(1-1/κ)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if kappa <= 1.0:
        raise ValueError("kappa must exceed 1")
    return (1.0 - kappa ** (-s)) / (1.0 - 1.0 / kappa)


@dataclass(frozen=True)
class ZenoParams:
    """Step count M, projection accuracy eps_P, final accuracy, and the grid."""

    M: int
    eps_p: float
    final_eps: float
    f_grid: np.ndarray

    def __post_init__(self):
        if self.M < M_FLOOR:
            raise ValueError(f"M must be at least {M_FLOOR}")
        g = np.asarray(self.f_grid, dtype=float)
        if g.size != self.M + 1 or g[0] != 0.0 or abs(g[-1] - 1.0) > 1e-15:
            raise ValueError("f grid must run from 0 to 1 with M+1 points")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("f grid must be strictly increasing")
        g = np.array(g, copy=True)
        g.setflags(write=False)
        object.__setattr__(self, "f_grid", g)


def zeno_params(kappa: float, eps: float) -> ZenoParams:
    """M = ⌈4·ln²κ/(1-1/κ)²⌉ (floored at 4), eps_P = 1/(162·M²)."""
    if kappa <= 1.0:
        raise ValueError("kappa must exceed 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    r = 1.0 - 1.0 / kappa
    m = max(M_FLOOR, int(math.ceil(4.0 * math.log(kappa) ** 2 / r ** 2)))
    grid = np.array([zeno_schedule(j / m, kappa) for j in range(m + 1)])
    grid[-1] = 1.0
    return ZenoParams(m, 1.0 / (162.0 * m ** 2), eps / 4.0, grid)


@dataclass
class ZenoTrace:
    """Per-step record of one walk (postselect semantics)."""

    per_step_success: list[float] = field(default_factory=list)
    per_step_overlap: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)  # |0>-block, normalized
    total_success: float = 1.0
    final_fidelity: float = 0.0

    def check_product(self, tol: float = 1e-12) -> None:
        prod = float(np.prod(self.per_step_success)) if self.per_step_success else 1.0
        if abs(prod - self.total_success) > tol * max(1.0, abs(prod)):
            raise AssertionError("total success != product of step successes")


def _step_degrees(inst: QlspInstance, params: ZenoParams) -> list[int]:
    degs = []
    for j in range(1, params.M + 1):
        f = float(params.f_grid[j])
        alpha = 1.0 - f + f * inst.d
        gap_t = gap_lower_bound(inst, f) / alpha
        target = params.eps_p if j < params.M else params.final_eps
        degs.append(degree_for_accuracy(gap_t, target))
    return degs


def _exact_projector_step(inst: QlspInstance, f: float,
                          psi: StateRegister) -> tuple[StateRegister, float]:
    # idealized eps_P = 0 projection onto span{|0,x(f)>, |1,b>}
    x = path_vector(inst, f)
    dim = inst.dim
    c0 = np.vdot(x, psi.amps[:dim])
    c1 = np.vdot(inst.b.amps, psi.amps[dim:])
    proj = np.concatenate([c0 * x, c1 * inst.b.amps])
    p = float(np.linalg.norm(proj) ** 2 / psi.norm() ** 2)
    if p <= 1e-300:
        raise ValueError("exact projection annihilated the state")
    return psi.with_amps(proj / np.linalg.norm(proj)), p


def solve_zeno(inst: QlspInstance, eps: float, mode: str = "postselect",
               seed: int | None = None, ideal_projection: bool = False,
               max_attempts: int = 10_000) -> tuple[SolverReport, ZenoTrace]:
    """Walk the schedule grid with filtering projections; final step at eps/4.

    In sample mode any failed measurement aborts the attempt and restarts the
    whole walk from |0⟩|b⟩; the ledger accumulates the queries of aborted
    attempts too (they were spent).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if mode not in ("postselect", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    if inst.form != "positive-definite":
        # the interpolation path x(f) needs (1-f)I + fA invertible for all f
        raise ValueError("traversal solver requires a positive-definite instance")
    rng = np.random.default_rng(seed)
    params = zeno_params(inst.kappa, eps)
    degs = _step_degrees(inst, params)
    encs = [make_hf(inst, float(f)) for f in params.f_grid[1:]]
    gaps = [gap_lower_bound(inst, float(f)) for f in params.f_grid[1:]]
    oracle = solution_state(inst)
    dim = inst.dim
    init = StateRegister(np.concatenate([inst.b.amps, np.zeros(dim)]),
                         ancilla=1, system=inst.n)

    queries = 0
    attempts = 0
    while True:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(f"no success within {max_attempts} attempts")
        trace = ZenoTrace()
        psi = init
        aborted = False
        for j in range(1, params.M + 1):
            f = float(params.f_grid[j])
            nxt = path_vector(inst, f)
            trace.per_step_overlap.append(
                float(abs(np.vdot(psi.amps[:dim], nxt))))
            if ideal_projection:
                psi, p = _exact_projector_step(inst, f, psi)
            else:
                out = apply_filter(encs[j - 1], 0.0, degs[j - 1], psi,
                                   mode=mode, rng=rng, gap=gaps[j - 1])
                queries += 2 * degs[j - 1]
                p = out.success_probability
                if mode == "sample" and not out.sampled_success:
                    aborted = True
                    break
                psi = out.post_state
            if j == params.M:
                final = measure_ancilla(psi, mode=mode, rng=rng)
                p *= final.success_probability
                if mode == "sample" and not final.sampled_success:
                    aborted = True
                    break
                psi = final.post_state
            trace.per_step_success.append(p)
            trace.states.append(np.array(psi.amps[:dim]) /
                                np.linalg.norm(psi.amps[:dim]))
        if not aborted:
            break

    trace.total_success = float(np.prod(trace.per_step_success))
    trace.final_fidelity = fidelity(psi.amps[:dim], oracle.amps)
    report = SolverReport(
        method="zeno",
        params={
            "kappa": inst.kappa, "d": inst.d, "N": inst.dim, "eps": eps,
            "M": params.M, "eps_p": params.eps_p, "mode": mode, "seed": seed,
            "ideal_projection": ideal_projection, "ells": degs,
            "form": inst.form,
        },
        final_fidelity=trace.final_fidelity,
        success_probabilities=list(trace.per_step_success),
        query_ledger={"U_Hf_filter": queries, "O_B": attempts},
        formula_derived_costs={
            "query_envelope": query_envelope(inst.kappa, inst.d, params),
        },
        attempts=attempts,
    )
    return report, trace


def query_envelope(kappa: float, d: int, params: ZenoParams) -> float:
    """Closed-form envelope for the walk's intermediate-step query count."""
    r = 1.0 - 1.0 / kappa
    shape = (d * kappa - 1.0) / math.log(kappa) - (d - 1.0) / r
    return math.log(1.0 / params.eps_p) * params.M * shape


@dataclass
class ZenoBoundsReport:
    """Margins of the per-step overlap bounds (all must be non-negative)."""

    path_overlap_margin: list[float]
    projection_margin: list[float]
    step_overlap_margin: list[float]
    overlap_floor_ok: bool
    idealized_path_margin: list[float]

    @property
    def all_hold(self) -> bool:
        return (self.overlap_floor_ok
                and all(m >= 0.0 for m in self.path_overlap_margin)
                and all(m >= 0.0 for m in self.projection_margin)
                and all(m >= 0.0 for m in self.step_overlap_margin))


def validate_zeno_bounds(trace: ZenoTrace, params: ZenoParams,
                         inst: QlspInstance) -> ZenoBoundsReport:
    """Check the walk's overlap chain against the oracle path.

    (i)  consecutive exact path states overlap by >= 1 - 1/(2M)
    (ii) each projected state stays within 4·eps_P of its path state
    (iii) projected-to-next-path overlap >= 1 - 1/(2M) - 4·eps_P - 2·sqrt(2·eps_P),
          and never below 1/2.
    """
    m = params.M
    path = [path_vector(inst, float(f)) for f in params.f_grid]
    eps_p = params.eps_p

    bound_i = 1.0 - 1.0 / (2.0 * m)
    r = 1.0 - 1.0 / inst.kappa
    bound_i_tight = 1.0 - 2.0 * math.log(inst.kappa) ** 2 / (m ** 2 * r ** 2)
    path_margin = []
    ideal_margin = []
    for j in range(m):
        ov = float(abs(np.vdot(path[j], path[j + 1])))
        path_margin.append(ov - bound_i)
        ideal_margin.append(ov - bound_i_tight)

    proj_margin = []
    for j, state in enumerate(trace.states, start=1):
        ov = float(abs(np.vdot(path[j], state)))
        proj_margin.append(ov - (1.0 - 4.0 * eps_p))

    bound_iii = 1.0 - 1.0 / (2.0 * m) - 4.0 * eps_p - 2.0 * math.sqrt(2.0 * eps_p)
    step_margin = []
    floor_ok = True
    for j, state in enumerate(trace.states[:-1], start=1):
        ov = float(abs(np.vdot(state, path[j + 1])))
        step_margin.append(ov - bound_iii)
        if ov < 0.5:
            floor_ok = False

    report = ZenoBoundsReport(path_margin, proj_margin, step_margin,
                              floor_ok, ideal_margin)
    if not report.all_hold:
        bad = {
            "path": [j for j, v in enumerate(path_margin) if v < 0.0],
            "projection": [j + 1 for j, v in enumerate(proj_margin) if v < 0.0],
            "step": [j + 1 for j, v in enumerate(step_margin) if v < 0.0],
        }
        raise AssertionError(f"overlap bounds violated at steps {bad}")
    return report

"""Constant step time integrators for the tensor ODE system

    U' = sum_mu U x_mu A^u_mu + G^u(U, V),
    V' = sum_mu V x_mu A^v_mu + G^v(U, V).

Production schemes:

* ``etd2rkds``: ETD2RK with the phi-functions of the Kronecker sum replaced
  by tensor products of directional phi-functions,
* ``lawson2b``: second order Lawson scheme built on Tucker exponentials.

Reference schemes for small grids:

* ``etd2rk-dense-oracle``: unsplit ETD2RK on the assembled Kronecker sums,
* ``rk4-oracle``: classical fourth order Runge-Kutta.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .discretize import GridSpec
from .matfun import PhiFamily, cached_phi_family, phi_funcs
from .models import ModelSpec, SeededNoise, directional_operators, initial_condition
from .tensor import ORACLE_MAX_SIZE, OracleSizeError, assemble_kronecker_sum, \
    kron_action, tucker_apply, unvec, vec

__all__ = [
    "SCHEMES",
    "BlowUpError",
    "StepCountError",
    "PropagatorSet",
    "SimState",
    "Indicators",
    "precompute_propagators",
    "step_etd2rkds",
    "step_lawson2b",
    "make_stepper",
    "dense_etd2rk_oracle",
    "rk4_oracle",
    "run",
    "run_steps",
    "step_count",
    "error_norm",
    "observed_order",
    "spatial_mean",
    "time_increment",
]

SCHEMES = ("etd2rkds", "lawson2b", "etd2rk-dense-oracle", "rk4-oracle")


class BlowUpError(FloatingPointError):
    """Non-finite values appeared in the solution."""

    def __init__(self, step: int, scheme: str = ""):
        self.step = step
        self.scheme = scheme
        super().__init__(f"{scheme or 'integration'} produced non-finite values at step {step}")


class StepCountError(ValueError):
    pass


@dataclass
class SimState:
    t: float
    n: int
    U: np.ndarray
    V: np.ndarray


@dataclass
class PropagatorSet:
    """Directional matrix functions of ``tau * A_mu`` for both components.

    Families are stored unscaled (no ``(l!)^(d-1)`` factor), so ETD2RKds and
    Lawson2b can share them.
    """

    scheme: str
    tau: float
    ops_u: List[np.ndarray]
    ops_v: List[np.ndarray]
    fam_u: List[PhiFamily]
    fam_v: List[PhiFamily]

    @property
    def d(self) -> int:
        return len(self.ops_u)

    def phi(self, comp: str, ell: int) -> List[np.ndarray]:
        fams = self.fam_u if comp == "u" else self.fam_v
        return [f.phi(ell) for f in fams]

    def exp(self, comp: str) -> List[np.ndarray]:
        return self.phi(comp, 0)


@dataclass
class Indicators:
    """Recorded ``(t_n, <U_n>, ||U_n - U_{n-1}||_F)`` samples, ``n >= 1``."""

    t: List[float] = field(default_factory=list)
    mean_u: List[float] = field(default_factory=list)
    increment: List[float] = field(default_factory=list)

    def record(self, t: float, mean_u: float, increment: float) -> None:
        self.t.append(float(t))
        self.mean_u.append(float(mean_u))
        self.increment.append(float(increment))

    def __len__(self):
        return len(self.t)

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.t, self.mean_u, self.increment]) if self.t \
            else np.zeros((0, 3))


# --- propagators and steppers -----------------------------------------------

def precompute_propagators(ops_u: Sequence[np.ndarray], ops_v: Sequence[np.ndarray],
                           tau: float, scheme: str = "etd2rkds") -> PropagatorSet:
    """Exponentials and phi_1, phi_2 of ``tau * A_mu`` for every axis and component."""
    if scheme not in ("etd2rkds", "lawson2b"):
        raise ValueError(f"no directional propagators for scheme {scheme!r}")
    if not tau >= 0:
        raise ValueError(f"time step must be non-negative, got {tau}")
    if len(ops_u) != len(ops_v):
        raise ValueError("u and v need the same number of directional operators")
    ops_u = [np.asarray(A, dtype=float) for A in ops_u]
    ops_v = [np.asarray(A, dtype=float) for A in ops_v]
    fam_u = [cached_phi_family(A, tau, 2) for A in ops_u]
    fam_v = [cached_phi_family(A, tau, 2) for A in ops_v]
    return PropagatorSet(scheme, float(tau), ops_u, ops_v, fam_u, fam_v)


def _finite(*arrays: np.ndarray) -> bool:
    return all(np.isfinite(a).all() for a in arrays)


def step_etd2rkds(state: SimState, props: PropagatorSet, model: ModelSpec) -> SimState:
    """One step of the directional split ETD2RK scheme."""
    tau = props.tau
    U, V = state.U, state.V
    Gu, Gv = model.reaction(model.params, U, V)
    Un2 = U + tau * tucker_apply(kron_action(U, props.ops_u) + Gu, props.phi("u", 1))
    Vn2 = V + tau * tucker_apply(kron_action(V, props.ops_v) + Gv, props.phi("v", 1))
    Gu2, Gv2 = model.reaction(model.params, Un2, Vn2)
    # (2!)^(d-1) restores the magnitude of phi_2 after directional splitting
    c = 2.0 ** (props.d - 1) * tau
    Gu2 -= Gu
    Gv2 -= Gv
    U1 = Un2 + c * tucker_apply(Gu2, props.phi("u", 2))
    V1 = Vn2 + c * tucker_apply(Gv2, props.phi("v", 2))
    if not _finite(U1, V1):
        raise BlowUpError(state.n + 1, "etd2rkds")
    return SimState(state.t + tau, state.n + 1, U1, V1)


def step_lawson2b(state: SimState, props: PropagatorSet, model: ModelSpec) -> SimState:
    """One step of the second order Lawson scheme with Tucker exponentials."""
    tau = props.tau
    U, V = state.U, state.V
    Eu, Ev = props.exp("u"), props.exp("v")
    Gu, Gv = model.reaction(model.params, U, V)
    Un2 = tucker_apply(U + tau * Gu, Eu)
    Vn2 = tucker_apply(V + tau * Gv, Ev)
    Gu2, Gv2 = model.reaction(model.params, Un2, Vn2)
    half = 0.5 * tau
    U1 = tucker_apply(U + half * Gu, Eu) + half * Gu2
    V1 = tucker_apply(V + half * Gv, Ev) + half * Gv2
    if not _finite(U1, V1):
        raise BlowUpError(state.n + 1, "lawson2b")
    return SimState(state.t + tau, state.n + 1, U1, V1)


def _dense_etd2rk_stepper(model, grid, tau):
    ops_u, ops_v = directional_operators(model, grid)
    if grid.size > ORACLE_MAX_SIZE:
        raise OracleSizeError(
            f"dense ETD2RK oracle needs N <= {ORACLE_MAX_SIZE}, got {grid.size}")
    Ku = assemble_kronecker_sum(ops_u)
    Kv = assemble_kronecker_sum(ops_v)
    fu = phi_funcs(tau * Ku, 2, max_size=ORACLE_MAX_SIZE)
    fv = phi_funcs(tau * Kv, 2, max_size=ORACLE_MAX_SIZE)
    dims = grid.dims

    def step(state: SimState) -> SimState:
        u, v = vec(state.U), vec(state.V)
        gu, gv = (vec(g) for g in model.reaction(model.params, state.U, state.V))
        u2 = u + tau * (fu.phi(1) @ (Ku @ u + gu))
        v2 = v + tau * (fv.phi(1) @ (Kv @ v + gv))
        U2, V2 = unvec(u2, dims), unvec(v2, dims)
        gu2, gv2 = (vec(g) for g in model.reaction(model.params, U2, V2))
        u1 = u2 + tau * (fu.phi(2) @ (gu2 - gu))
        v1 = v2 + tau * (fv.phi(2) @ (gv2 - gv))
        if not _finite(u1, v1):
            raise BlowUpError(state.n + 1, "etd2rk-dense-oracle")
        return SimState(state.t + tau, state.n + 1, unvec(u1, dims), unvec(v1, dims))

    return step


def _rk4_stepper(model, grid, tau):
    ops_u, ops_v = directional_operators(model, grid)

    def rhs(U, V):
        Gu, Gv = model.reaction(model.params, U, V)
        return kron_action(U, ops_u) + Gu, kron_action(V, ops_v) + Gv

    def step(state: SimState) -> SimState:
        U, V = state.U, state.V
        k1u, k1v = rhs(U, V)
        k2u, k2v = rhs(U + 0.5 * tau * k1u, V + 0.5 * tau * k1v)
        k3u, k3v = rhs(U + 0.5 * tau * k2u, V + 0.5 * tau * k2v)
        k4u, k4v = rhs(U + tau * k3u, V + tau * k3v)
        U1 = U + tau / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        V1 = V + tau / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not _finite(U1, V1):
            raise BlowUpError(state.n + 1, "rk4-oracle")
        return SimState(state.t + tau, state.n + 1, U1, V1)

    return step


def make_stepper(model: ModelSpec, grid: GridSpec, scheme: str,
                 tau: float) -> Callable[[SimState], SimState]:
    """Precompute whatever `scheme` needs for step size `tau` and return ``step(state)``."""
    if scheme in ("etd2rkds", "lawson2b"):
        ops_u, ops_v = directional_operators(model, grid)
        props = precompute_propagators(ops_u, ops_v, tau, scheme)
        fn = step_etd2rkds if scheme == "etd2rkds" else step_lawson2b
        return lambda state: fn(state, props, model)
    if scheme == "etd2rk-dense-oracle":
        return _dense_etd2rk_stepper(model, grid, tau)
    if scheme == "rk4-oracle":
        return _rk4_stepper(model, grid, tau)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


# --- drivers ----------------------------------------------------------------

def _initial_state(model, grid, seed, initial) -> SimState:
    if initial is not None:
        U0, V0 = initial
        U0 = np.array(U0, dtype=float)
        V0 = np.array(V0, dtype=float)
        if U0.shape != grid.dims or V0.shape != grid.dims:
            raise ValueError(f"initial fields must have shape {grid.dims}")
    else:
        noise = None
        if seed is not None:
            noise = SeededNoise(int(seed), model.ic_amplitude)
        U0, V0 = initial_condition(model, grid, noise)
    return SimState(0.0, 0, U0, V0)


def step_count(tfinal: float, tau: float) -> int:
    """``round(tfinal / tau)``, refusing ratios that are not integral."""
    if tau <= 0:
        raise StepCountError(f"time step must be positive, got {tau}")
    ratio = tfinal / tau
    k = int(round(ratio))
    if abs(ratio - k) > 1e-9 * max(1.0, abs(ratio)):
        raise StepCountError(f"tfinal / tau = {ratio!r} is not an integer")
    return k


def run_steps(model: ModelSpec, grid: GridSpec, scheme: str, tfinal: float, steps: int,
              observers: Iterable[Callable[[SimState], None]] = (),
              seed: Optional[int] = None, *, stride: int = 1,
              initial: Optional[Tuple[np.ndarray, np.ndarray]] = None,
              record: bool = True, timing: Optional[dict] = None):
    """Integrate to `tfinal` with `steps` constant steps of size ``tfinal / steps``.

    Returns ``(final_state, indicators)``. Indicators are sampled every
    `stride` steps; every observer is called with the state at the same
    cadence (including the final step). When `timing` is a dict it receives
    ``setup_seconds`` and ``step_seconds`` (total time spent stepping).
    """
    if steps < 0:
        raise StepCountError(f"step count must be non-negative, got {steps}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    state = _initial_state(model, grid, seed, initial)
    ind = Indicators()
    if steps == 0:
        return state, ind
    tau = tfinal / steps
    t0 = time.perf_counter()
    step = make_stepper(model, grid, scheme, tau)
    t1 = time.perf_counter()
    observers = list(observers)
    for k in range(1, steps + 1):
        # overflow is reported as BlowUpError by the finiteness check
        with np.errstate(over="ignore", invalid="ignore"):
            new = step(state)
        new.t = k * tau
        if k % stride == 0 or k == steps:
            if record:
                ind.record(new.t, spatial_mean(new.U), time_increment(new.U, state.U))
            for obs in observers:
                obs(new)
        state = new
    if timing is not None:
        timing["setup_seconds"] = t1 - t0
        timing["step_seconds"] = time.perf_counter() - t1
    return state, ind


def run(model: ModelSpec, grid: GridSpec, scheme: str, tau: float, tfinal: float,
        observers: Iterable[Callable[[SimState], None]] = (),
        seed: Optional[int] = None, **kwargs):
    """Integrate with step size `tau` up to `tfinal` (which must be a multiple of `tau`)."""
    steps = 0 if tfinal == 0 else step_count(tfinal, tau)
    return run_steps(model, grid, scheme, tfinal, steps, observers, seed, **kwargs)


def dense_etd2rk_oracle(model: ModelSpec, grid: GridSpec, tau: float, steps: int,
                        seed: Optional[int] = None, initial=None) -> SimState:
    """Unsplit ETD2RK on the assembled Kronecker sums (small grids only)."""
    state, _ = run_steps(model, grid, "etd2rk-dense-oracle", tau * steps, steps,
                         seed=seed, initial=initial, record=False)
    return state


def rk4_oracle(model: ModelSpec, grid: GridSpec, tau: float, steps: int,
               seed: Optional[int] = None, initial=None) -> SimState:
    """Classical RK4 with fixed step `tau`; stability is the caller's concern."""
    state, _ = run_steps(model, grid, "rk4-oracle", tau * steps, steps,
                         seed=seed, initial=initial, record=False)
    return state


# --- metrics ----------------------------------------------------------------

def error_norm(U, V, U_ref, V_ref) -> float:
    """``sqrt(relF(U)^2 + relF(V)^2)`` with relative Frobenius errors per component."""
    U, V, U_ref, V_ref = (np.asarray(a, dtype=float) for a in (U, V, U_ref, V_ref))
    if U.shape != U_ref.shape or V.shape != V_ref.shape:
        raise ValueError("solution and reference shapes differ")
    nu, nv = np.linalg.norm(U_ref), np.linalg.norm(V_ref)
    if nu == 0 or nv == 0:
        raise ZeroDivisionError("reference solution has zero Frobenius norm")
    eu = np.linalg.norm(U - U_ref) / nu
    ev = np.linalg.norm(V - V_ref) / nv
    return math.hypot(eu, ev)


def observed_order(errors: Sequence[float], step_counts: Sequence[float]) -> List[float]:
    """``ln(e_{k-1}/e_k) / ln(s_k/s_{k-1})`` for consecutive pairs."""
    if len(errors) != len(step_counts) or len(errors) < 2:
        raise ValueError("need at least two (error, steps) pairs of equal length")
    if any(e <= 0 for e in errors):
        raise ValueError("errors must be positive")
    if any(b <= a for a, b in zip(step_counts, step_counts[1:])):
        raise ValueError("step counts must be increasing")
    return [math.log(errors[k - 1] / errors[k]) / math.log(step_counts[k] / step_counts[k - 1])
            for k in range(1, len(errors))]


def spatial_mean(U: np.ndarray, grid: Optional[GridSpec] = None) -> float:
    """Arithmetic mean over the grid nodes."""
    return float(np.mean(U))


def time_increment(U_next: np.ndarray, U: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(U_next) - np.asarray(U)))

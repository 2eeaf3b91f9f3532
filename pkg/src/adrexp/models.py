"""Registry of two-component advection-diffusion-reaction benchmark models.

Every model is a :class:`ModelSpec`: the box domain, per-component diffusion and
advection coefficients, the pointwise reaction terms ``g^u(u, v)`` and
``g^v(u, v)``, an equilibrium and a recipe for the initial data.

Registered names, in catalog order::

    schnakenberg2d  fhn2d  fhn3d  dib2d  adv-schnakenberg3d  adv-brusselator3d
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .discretize import GridSpec, OperatorRecipe, build_directional_operator, build_grid
from .tensor import unvec

__all__ = [
    "ModelSpec",
    "SeededNoise",
    "ModelError",
    "MODELS",
    "get_model",
    "model_names",
    "reaction_eval",
    "equilibrium",
    "initial_condition",
    "directional_operators",
    "without_reaction",
    "splitmix64",
    "uniform_open",
]

ReactionFn = Callable[[Mapping[str, float], np.ndarray, np.ndarray],
                      Tuple[np.ndarray, np.ndarray]]


class ModelError(ValueError):
    pass


# --- seeded noise -----------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset .. offset+count-1`` of the splitmix64 stream started at `seed`.

    The k-th output mixes the state ``seed + (k+1) * 0x9E3779B97F4A7C15``
    (mod 2^64), so the stream can be generated in one vectorized pass.
    """
    k = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(int(seed) & _MASK64) + k * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def uniform_open(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Uniform draws in the open interval (0, 1) from the top 53 bits."""
    z = splitmix64(seed, count, offset)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


@dataclass(frozen=True)
class SeededNoise:
    """Deterministic U(0,1) source: identical ``(seed, dims)`` give identical draws."""

    seed: int = 0
    amplitude: float = 1e-5

    def field(self, dims: Sequence[int], index: int = 0) -> np.ndarray:
        """The `index`-th whole field of draws (0 for U, 1 for V), in vec order."""
        N = int(np.prod(dims))
        return unvec(uniform_open(self.seed, N, offset=index * N), dims)


# --- model specification ----------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """A two-component reaction system on a box with Neumann boundaries.

    ``ic_kind`` is ``"equilibrium_perturbation"`` (equilibrium plus
    ``ic_amplitude`` times uniform noise) or ``"deterministic"`` (the model's
    `ic_function` of the coordinate tensors).
    """

    name: str
    d: int
    interval: Tuple[float, float]
    recipe_u: OperatorRecipe
    recipe_v: OperatorRecipe
    params: Mapping[str, float]
    reaction: ReactionFn
    equilibrium: Optional[Tuple[float, float]]
    ic_kind: str = "equilibrium_perturbation"
    ic_amplitude: float = 1e-5
    ic_function: Optional[Callable[..., Tuple[np.ndarray, np.ndarray]]] = None
    seed: int = 0
    description: str = ""
    # reference configuration of the published experiments
    setup: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        object.__setattr__(self, "setup", MappingProxyType(dict(self.setup)))
        for key, val in self.params.items():
            if not np.isfinite(val):
                raise ModelError(f"{self.name}: parameter {key} is not finite")
        if self.ic_kind not in ("equilibrium_perturbation", "deterministic"):
            raise ModelError(f"{self.name}: unknown ic_kind {self.ic_kind!r}")

    def grid(self, n: int) -> GridSpec:
        return GridSpec.uniform(self.interval, n, self.d)

    def operators(self, grid: GridSpec):
        return directional_operators(self, grid)


def directional_operators(model: ModelSpec, grid: GridSpec):
    """Per-axis matrices ``(ops_u, ops_v)`` for the model's linear terms."""
    ops_u = [build_directional_operator(iv, n, model.recipe_u)
             for iv, n in zip(grid.intervals, grid.points)]
    ops_v = [build_directional_operator(iv, n, model.recipe_v)
             for iv, n in zip(grid.intervals, grid.points)]
    return ops_u, ops_v


# --- reaction terms ---------------------------------------------------------

def _schnakenberg(p, u, v):
    u2v = u * u * v
    rho = p["rho"]
    return rho * (p["a_u"] - u + u2v), rho * (p["a_v"] - u2v)


def _fitzhugh_nagumo(p, u, v):
    rho = p["rho"]
    return rho * (-u * (u * u - 1.0) - v), (rho * p["a1_v"]) * (u - p["a2_v"] * v)


def _dib(p, u, v):
    rho = p["rho"]
    one_v = 1.0 - v
    gu = p["a1_u"] * one_v * u - p["a2_u"] * u ** 3 - p["a3_u"] * (v - p["a4_u"])
    gv = (p["a1_v"] * (1.0 + p["a2_v"] * u) * one_v * (1.0 - p["a3_v"] * one_v)
          - p["a4_v"] * v * (1.0 + p["a5_v"] * u) * (1.0 + p["a3_v"] * v))
    return rho * gu, rho * gv


def _brusselator(p, u, v):
    u2v = u * u * v
    return u2v - (p["a1_u"] + 1.0) * u + p["a2_u"], p["a1_u"] * u - u2v


def dib_a4v(a1_v: float, a3_v: float, a4_u: float) -> float:
    """The ``a_4^v`` that makes ``(0, a_4^u)`` an equilibrium of the DIB model."""
    return a1_v * (1 - a4_u) * (1 - a3_v + a3_v * a4_u) / (a4_u * (1 + a3_v * a4_u))


def _gaussian_bump_ic(p, x):
    x1, x2, x3 = x
    ue = p["a_u"] + p["a_v"]
    bump = 1e-5 * np.exp(-100.0 * ((x1 - 1 / 3) ** 2 + (x2 - 1 / 2) ** 2 + (x3 - 1 / 3) ** 2))
    u = ue + bump
    v = np.full_like(u, p["a_v"] / ue ** 2)
    return u, v


def _brusselator_ic(p, x):
    x1, x2, x3 = x
    u = 1.0 + np.sin(2 * np.pi * x1) * np.sin(2 * np.pi * x2) * np.sin(2 * np.pi * x3)
    return u, np.full_like(u, 3.0)


def _schnakenberg_eq(p):
    s = p["a_u"] + p["a_v"]
    return (s, p["a_v"] / s ** 2)


def _build_registry() -> Dict[str, ModelSpec]:
    schnak = dict(rho=1000.0, a_u=0.1, a_v=0.9)
    fhn2 = dict(rho=65.731, a1_v=11.0, a2_v=0.1)
    fhn3 = dict(rho=24.649, a1_v=11.0, a2_v=0.1)
    dib = dict(rho=25.0 / 4.0, a1_u=10.0, a2_u=1.0, a3_u=66.0, a4_u=0.5,
               a1_v=3.0, a2_v=2.5, a3_v=0.2, a5_v=1.5)
    dib["a4_v"] = dib_a4v(dib["a1_v"], dib["a3_v"], dib["a4_u"])
    advschnak = dict(rho=100.0, a_u=0.1305, a_v=0.7695)
    bruss = dict(a1_u=1.0, a2_u=2.0)

    models = [
        ModelSpec(
            name="schnakenberg2d", d=2, interval=(0.0, 1.0),
            recipe_u=OperatorRecipe(1.0), recipe_v=OperatorRecipe(10.0),
            params=schnak, reaction=_schnakenberg,
            equilibrium=_schnakenberg_eq(schnak), ic_amplitude=1e-5, seed=0,
            description="Schnakenberg spots on [0,1]^2",
            setup=dict(n=150, tfinal=0.25, steps=(3000, 4000, 5000, 6000),
                       pattern_tfinal=2.0, pattern_steps=4000)),
        ModelSpec(
            name="fhn2d", d=2, interval=(0.0, np.pi),
            recipe_u=OperatorRecipe(1.0), recipe_v=OperatorRecipe(42.1887),
            params=fhn2, reaction=_fitzhugh_nagumo, equilibrium=(0.0, 0.0),
            ic_amplitude=1e-3, seed=0,
            description="FitzHugh-Nagumo square pattern on [0,pi]^2",
            setup=dict(n=100, tfinal=10.0, steps=(20000, 22500, 25000, 27500),
                       pattern_tfinal=50.0, pattern_steps=30000)),
        ModelSpec(
            name="fhn3d", d=3, interval=(0.0, np.pi),
            recipe_u=OperatorRecipe(1.0), recipe_v=OperatorRecipe(42.1887),
            params=fhn3, reaction=_fitzhugh_nagumo, equilibrium=(0.0, 0.0),
            ic_amplitude=1e-3, seed=0,
            description="FitzHugh-Nagumo (2,2,2) pattern on [0,pi]^3",
            setup=dict(n=64, tfinal=10.0, steps=(12000, 14000, 16000, 18000),
                       pattern_tfinal=150.0, pattern_steps=25000)),
        ModelSpec(
            name="dib2d", d=2, interval=(0.0, 20.0),
            recipe_u=OperatorRecipe(1.0), recipe_v=OperatorRecipe(20.0),
            params=dib, reaction=_dib, equilibrium=(0.0, dib["a4_u"]),
            ic_amplitude=1e-5, seed=123,
            description="morpho-chemical DIB labyrinth on [0,20]^2",
            setup=dict(n=200, tfinal=2.5, steps=(1250, 1500, 1750, 2000),
                       pattern_tfinal=100.0, pattern_steps=50000)),
        ModelSpec(
            name="adv-schnakenberg3d", d=3, interval=(0.0, 1.0),
            recipe_u=OperatorRecipe(0.05, 0.01), recipe_v=OperatorRecipe(1.0, 0.01),
            params=advschnak, reaction=_schnakenberg,
            equilibrium=_schnakenberg_eq(advschnak),
            ic_kind="deterministic", ic_amplitude=0.0, ic_function=_gaussian_bump_ic,
            description="advective Schnakenberg spots on [0,1]^3",
            setup=dict(n=80, tfinal=0.4, steps=(50, 150, 250, 350),
                       pattern_tfinal=0.8, pattern_steps=100)),
        ModelSpec(
            name="adv-brusselator3d", d=3, interval=(0.0, 1.0),
            recipe_u=OperatorRecipe(0.01, 0.1), recipe_v=OperatorRecipe(0.02, 0.1),
            params=bruss, reaction=_brusselator,
            equilibrium=(bruss["a2_u"], bruss["a1_u"] / bruss["a2_u"]),
            ic_kind="deterministic", ic_amplitude=0.0, ic_function=_brusselator_ic,
            description="advective Brusselator relaxing to equilibrium on [0,1]^3",
            setup=dict(n=64, tfinal=1.0, steps=(50, 100, 150, 200),
                       pattern_tfinal=5.0, pattern_steps=100)),
    ]
    return {m.name: m for m in models}


MODELS: Mapping[str, ModelSpec] = MappingProxyType(_build_registry())


def model_names() -> list:
    return list(MODELS)


def get_model(name: str) -> ModelSpec:
    try:
        return MODELS[name]
    except KeyError:
        raise ModelError(
            f"unknown model {name!r}; choose from {', '.join(MODELS)}") from None


def _no_reaction(p, u, v):
    return np.zeros_like(u), np.zeros_like(v)


def without_reaction(model: ModelSpec) -> ModelSpec:
    """Copy of `model` with the reaction terms switched off (pure linear problem)."""
    return replace(model, name=model.name + "-linear", reaction=_no_reaction)


# --- operations -------------------------------------------------------------

def reaction_eval(model: ModelSpec, U: np.ndarray, V: np.ndarray):
    """Pointwise reaction terms ``(G^u(U, V), G^v(U, V))``."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.shape != V.shape:
        raise ModelError(f"U and V shapes differ: {U.shape} vs {V.shape}")
    return model.reaction(model.params, U, V)


def equilibrium(model: ModelSpec) -> Tuple[float, float]:
    if model.equilibrium is None:
        raise ModelError(f"{model.name} has no closed-form equilibrium")
    return model.equilibrium


def initial_condition(model: ModelSpec, grid: GridSpec,
                      noise: Optional[SeededNoise] = None):
    """Initial fields ``(U0, V0)`` on `grid`.

    For noisy models the U perturbation takes the first N draws of the
    stream and V the next N, each laid out in vec order.
    """
    if grid.d != model.d:
        raise ModelError(f"{model.name} is {model.d}-D, grid is {grid.d}-D")
    dims = grid.dims
    if model.ic_kind == "deterministic":
        x = np.meshgrid(*build_grid(grid), indexing="ij")
        U, V = model.ic_function(model.params, x)
        return np.ascontiguousarray(U, dtype=float), np.ascontiguousarray(V, dtype=float)
    if noise is None:
        noise = SeededNoise(model.seed, model.ic_amplitude)
    ue, ve = equilibrium(model)
    if noise.amplitude == 0.0:
        return np.full(dims, float(ue)), np.full(dims, float(ve))
    U = ue + noise.amplitude * noise.field(dims, 0)
    V = ve + noise.amplitude * noise.field(dims, 1)
    return U, V

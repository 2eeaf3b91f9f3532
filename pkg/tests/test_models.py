import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adrexp.discretize import GridSpec, build_grid
from adrexp.models import (MODELS, ModelError, SeededNoise, equilibrium, get_model,
                           initial_condition, model_names, reaction_eval, splitmix64,
                           uniform_open, without_reaction)

GOLDEN = json.loads((Path(__file__).parent / "data" / "model_params.json").read_text())
NAMES = ["schnakenberg2d", "fhn2d", "fhn3d", "dib2d", "adv-schnakenberg3d",
         "adv-brusselator3d"]


def test_catalog_order_is_stable():
    assert model_names() == NAMES
    assert list(MODELS) == NAMES


@pytest.mark.parametrize("name", NAMES)
def test_parameters_match_golden_file(name):
    m, ref = get_model(name), GOLDEN[name]
    assert m.d == ref["d"]
    assert m.interval == pytest.approx(tuple(ref["interval"]), rel=1e-15)
    assert m.recipe_u.delta == ref["delta_u"] and m.recipe_v.delta == ref["delta_v"]
    assert m.recipe_u.alpha == ref["alpha_u"] and m.recipe_v.alpha == ref["alpha_v"]
    for key, val in ref["params"].items():
        assert m.params[key] == val, key
    assert equilibrium(m) == pytest.approx(tuple(ref["equilibrium"]), rel=1e-15, abs=0)
    if "seed" in ref:
        assert m.seed == ref["seed"]


def test_unknown_model():
    with pytest.raises(ModelError, match="unknown model"):
        get_model("gray-scott")


def test_models_are_immutable():
    m = get_model("fhn2d")
    with pytest.raises(Exception):
        m.params["rho"] = 1.0
    with pytest.raises(Exception):
        m.d = 3


# --- reactions and equilibria ----------------------------------------------

@pytest.mark.parametrize("name", NAMES)
def test_equilibrium_zeroes_reactions(name):
    m = get_model(name)
    ue, ve = equilibrium(m)
    gu, gv = reaction_eval(m, np.full((2, 2), ue), np.full((2, 2), ve))
    assert np.abs(gu).max() <= 1e-12 and np.abs(gv).max() <= 1e-12


def test_schnakenberg_reaction_by_hand():
    m = get_model("schnakenberg2d")
    gu, gv = reaction_eval(m, np.array([1.0]), np.array([1.0]))
    assert gu[0] == pytest.approx(100.0, rel=1e-13)
    assert gv[0] == pytest.approx(1000.0 * (0.9 - 1.0), rel=1e-13)


def test_fhn_zero_state():
    gu, gv = reaction_eval(get_model("fhn2d"), np.zeros(3), np.zeros(3))
    np.testing.assert_array_equal(gu, 0)
    np.testing.assert_array_equal(gv, 0)


def test_dib_closure_value_and_residual():
    m = get_model("dib2d")
    # 3 * 0.5 * 0.9 / (0.5 * 1.1) by hand
    assert m.params["a4_v"] == pytest.approx(27.0 / 11.0, rel=1e-15)
    _, gv = reaction_eval(m, np.array([0.0]), np.array([m.params["a4_u"]]))
    assert abs(gv[0]) <= 1e-12 * m.params["rho"]


def test_brusselator_reaction_by_hand():
    gu, gv = reaction_eval(get_model("adv-brusselator3d"), np.array([1.0]), np.array([3.0]))
    # u^2 v - 2u + 2 = 3 and u - u^2 v = -2
    assert gu[0] == pytest.approx(3.0) and gv[0] == pytest.approx(-2.0)


def test_reaction_shape_mismatch():
    with pytest.raises(ModelError):
        reaction_eval(get_model("fhn2d"), np.zeros((2, 2)), np.zeros((2, 3)))


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_reactions_are_pointwise(u, v):
    m = get_model("dib2d")
    U = np.full((3, 4), u)
    V = np.full((3, 4), v)
    gu, gv = reaction_eval(m, U, V)
    su, sv = reaction_eval(m, np.array([u]), np.array([v]))
    np.testing.assert_array_equal(gu, su[0])
    np.testing.assert_array_equal(gv, sv[0])


def test_without_reaction():
    m = without_reaction(get_model("schnakenberg2d"))
    gu, gv = m.reaction(m.params, np.ones(4), np.ones(4))
    assert not gu.any() and not gv.any()
    assert m.recipe_v.delta == 10.0


# --- noise ------------------------------------------------------------------

def test_splitmix64_reference_stream():
    # published outputs of splitmix64 started from state 0
    z = splitmix64(0, 3)
    assert [int(x) for x in z] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
                                   0x06C45D188009454F]


def test_splitmix64_offset_continues_stream():
    full = splitmix64(42, 10)
    np.testing.assert_array_equal(splitmix64(42, 4, offset=6), full[6:])


@given(st.integers(0, 2 ** 64 - 1))
def test_uniform_draws_in_open_unit_interval(seed):
    x = uniform_open(seed, 500)
    assert x.min() > 0.0 and x.max() < 1.0


def test_uniform_draws_look_uniform():
    x = uniform_open(7, 100_000)
    assert abs(x.mean() - 0.5) < 5e-3
    assert abs(x.var() - 1 / 12) < 2e-3


def test_noise_fields_follow_vec_order_and_u_then_v():
    noise = SeededNoise(5, 1.0)
    dims = (3, 4)
    draws = uniform_open(5, 24)
    np.testing.assert_array_equal(noise.field(dims, 0).ravel(order="F"), draws[:12])
    np.testing.assert_array_equal(noise.field(dims, 1).ravel(order="F"), draws[12:])


# --- initial data -----------------------------------------------------------

def test_noisy_initial_condition_layout():
    m = get_model("schnakenberg2d")
    grid = m.grid(6)
    U, V = initial_condition(m, grid, SeededNoise(3, 1e-5))
    draws = uniform_open(3, 72)
    np.testing.assert_allclose(U.ravel(order="F"), 1.0 + 1e-5 * draws[:36], rtol=1e-15)
    np.testing.assert_allclose(V.ravel(order="F"), 0.9 + 1e-5 * draws[36:], rtol=1e-15)


@pytest.mark.parametrize("name", ["schnakenberg2d", "fhn3d", "dib2d"])
def test_initial_condition_is_deterministic(name):
    m = get_model(name)
    g = m.grid(5)
    a = initial_condition(m, g)
    b = initial_condition(m, g)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_different_seeds_differ():
    m = get_model("fhn2d")
    g = m.grid(5)
    a = initial_condition(m, g, SeededNoise(0, 1e-3))
    b = initial_condition(m, g, SeededNoise(1, 1e-3))
    assert not np.array_equal(a[0], b[0])


def test_zero_amplitude_gives_exact_equilibrium():
    m = get_model("dib2d")
    U, V = initial_condition(m, m.grid(4), SeededNoise(9, 0.0))
    assert (U == 0.0).all() and (V == 0.5).all()


def test_perturbation_amplitude_bounds():
    m = get_model("fhn2d")
    U, V = initial_condition(m, m.grid(10))
    assert 0 < U.min() and U.max() < 1e-3
    assert 0 < V.min() and V.max() < 1e-3


def test_advective_schnakenberg_initial_data():
    m = get_model("adv-schnakenberg3d")
    g = m.grid(7)
    U, V = initial_condition(m, g)
    np.testing.assert_allclose(V, 0.95, rtol=1e-15)
    x = np.meshgrid(*build_grid(g), indexing="ij")
    bump = 1e-5 * np.exp(-100 * ((x[0] - 1 / 3) ** 2 + (x[1] - 0.5) ** 2 + (x[2] - 1 / 3) ** 2))
    np.testing.assert_allclose(U, 0.9 + bump, rtol=1e-14)
    assert U.max() - 0.9 <= 1e-5


def test_brusselator_initial_data():
    m = get_model("adv-brusselator3d")
    g = m.grid(9)
    U, V = initial_condition(m, g)
    assert U[0, 0, 0] == 1.0 and V[0, 0, 0] == 3.0
    # node (2,2,2) sits at x = 0.25 on every axis, where each sine equals one
    assert U[2, 2, 2] == pytest.approx(2.0, rel=1e-15)
    assert (V == 3.0).all()


def test_initial_condition_dimension_mismatch():
    m = get_model("fhn3d")
    with pytest.raises(ModelError):
        initial_condition(m, GridSpec.uniform(m.interval, 5, 2))


def test_model_grid_and_operators():
    m = get_model("fhn3d")
    g = m.grid(8)
    assert g.dims == (8, 8, 8) and g.intervals[0] == (0.0, np.pi)
    ops_u, ops_v = m.operators(g)
    assert len(ops_u) == len(ops_v) == 3
    h = np.pi / 7
    assert ops_v[0][1, 1] == pytest.approx(-2 * 42.1887 / h ** 2)

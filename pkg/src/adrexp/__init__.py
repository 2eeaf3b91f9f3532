"""Exponential integrators for advection-diffusion-reaction systems on tensor grids.

The linear part of a dimension-separable discretization is a Kronecker sum of
small directional matrices. Its exponential and phi-functions act on a field
through mu-mode products, so a time step never forms the full operator.
"""
from .discretize import GridSpec, OperatorRecipe, build_directional_operator, build_grid
from .integrate import (SCHEMES, BlowUpError, Indicators, SimState, dense_etd2rk_oracle,
                        error_norm, make_stepper, observed_order, precompute_propagators,
                        rk4_oracle, run, run_steps, spatial_mean, step_etd2rkds,
                        step_lawson2b, time_increment)
from .matfun import expm_dense, phi_funcs, phi_series_oracle
from .models import (MODELS, ModelSpec, SeededNoise, equilibrium, get_model,
                     initial_condition, model_names, reaction_eval, without_reaction)
from .studies import convergence_study, splitting_study
from .tensor import assemble_kronecker_sum, kron_action, mu_mode_product, tucker_apply, \
    unvec, vec

__version__ = "0.1.0"

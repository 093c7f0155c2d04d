"""Dense quantum information toolkit for Markov-chain divergence studies.

Operators are complex numpy arrays; multipartite functions take the list of
subsystem dimensions. Optimization results are returned as dictionaries.
"""

import json

from . import _core
from ._core import (
    MarkovGapError,
    antisym_state,
    cmi,
    cmi_antisym_binomial,
    cmi_antisym_formula,
    crossover_scan,
    d0,
    d_min,
    decay_bound_check,
    fidelity,
    ghz_state,
    markov_membership,
    markov_state,
    naive_renyi_cmi,
    partial_trace,
    permutation_operator,
    permute_subsystems,
    property_suite_names,
    purified_distance,
    random_density,
    relative_entropy,
    renyi_divergence,
    renyi_entropy,
    separable_constant,
    table_csv,
    tensor,
    trace_norm,
    uhlmann_fidelity,
    uniform_antisym_state,
    von_neumann_entropy,
    werner_state,
)

__all__ = [name for name in dir(_core) if not name.startswith("_")]


def delta_upper(rho, dims, objective="relent", **kwargs):
    """Heuristic upper bound on the Markov distance; see _core.delta_upper for options."""
    return json.loads(_core.delta_upper(rho, dims, objective, **kwargs))


def delta0_antisym_lower(d, k):
    return json.loads(_core.delta0_antisym_lower(d, k))


def werner_d0_minimize(d):
    return json.loads(_core.werner_d0_minimize(d))


def smooth_delta0_lower(rho, dims, epsilon, seed=0):
    return json.loads(_core.smooth_delta0_lower(rho, dims, epsilon, seed))


def tensor_power_delta0_bounds(d, k, n, **kwargs):
    lower, upper = _core.tensor_power_delta0_bounds(d, k, n, **kwargs)
    return json.loads(lower), json.loads(upper)


def verify(suite, seed=0, tol=1e-9):
    return json.loads(_core.verify(suite, seed, tol))


def find_naive_renyi_witness(seed=0, samples=100000):
    text = _core.find_naive_renyi_witness(seed, samples)
    return None if text is None else json.loads(text)


__all__ += [
    "delta_upper",
    "delta0_antisym_lower",
    "werner_d0_minimize",
    "smooth_delta0_lower",
    "tensor_power_delta0_bounds",
    "verify",
    "find_naive_renyi_witness",
]

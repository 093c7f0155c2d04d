import math

import numpy as np
import pytest

import markovgap as mg


def test_partial_trace_of_bell_pair():
    bell = np.zeros((4, 4), dtype=complex)
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    np.testing.assert_allclose(mg.partial_trace(bell, [2, 2], [0]), np.eye(2) / 2, atol=1e-15)


def test_tensor_matches_numpy_kron():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_allclose(mg.tensor(a, b), np.kron(a, b), atol=1e-14)


def test_antisymmetric_cmi_matches_closed_form():
    rho = mg.uniform_antisym_state(4, 3)
    assert mg.cmi(rho, [4, 4, 4]) == pytest.approx(0.8109302162, abs=1e-9)
    assert mg.cmi_antisym_formula(5) == pytest.approx(math.log(2), abs=1e-12)


def test_divergences_on_commuting_states():
    rho = np.diag([0.75, 0.25]).astype(complex)
    sigma = np.eye(2, dtype=complex) / 2
    want = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert mg.relative_entropy(rho, sigma) == pytest.approx(want, abs=1e-12)
    assert mg.fidelity(rho, sigma) == pytest.approx(math.sqrt(3 / 8) + math.sqrt(1 / 8), abs=1e-12)
    pure = np.diag([1.0, 0.0]).astype(complex)
    assert math.isinf(mg.relative_entropy(sigma, pure))


def test_crossover_and_decay():
    assert mg.crossover_scan(3, 100) == 27
    assert mg.crossover_scan(3, 26) is None
    assert mg.decay_bound_check(1000)


def test_lower_bound_report():
    report = mg.delta0_antisym_lower(4, 3)
    assert report["bound_kind"] == "lower"
    assert report["value"] == pytest.approx(math.log(2), abs=1e-12)


def test_small_search_is_deterministic():
    rho = mg.random_density([2, 2, 2], 2, 7)
    a = mg.delta_upper(rho, [2, 2, 2], restarts=2, iterations=200, seed=3)
    b = mg.delta_upper(rho, [2, 2, 2], restarts=2, iterations=200, seed=3, threads=2)
    assert a == b
    assert a["bound_kind"] == "upper"
    assert a["value"] >= mg.cmi(rho, [2, 2, 2]) - 1e-8


def test_table_and_suite():
    csv = mg.table_csv([4, 27])
    assert csv.startswith("d,k,cmi_formula,cmi_dense,delta0_paper,delta0_twirl,separated\n")
    assert csv.splitlines()[2].endswith(",true")
    assert mg.verify("algebra")["properties"]


def test_errors_raise():
    with pytest.raises(mg.MarkovGapError):
        mg.cmi_antisym_formula(2)
    with pytest.raises(ValueError):
        mg.delta_upper(mg.ghz_state(), [2, 2, 2], objective="nope")

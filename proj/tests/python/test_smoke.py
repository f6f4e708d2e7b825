import math
import os
import pathlib

import numpy as np
import pytest

import popdyn

FIXTURES = pathlib.Path(
    os.environ.get("POPDYN_FIXTURE_DIR",
                   pathlib.Path(__file__).resolve().parents[2] / "data" / "synthetic"))


def test_grid_and_generator():
    g = popdyn.AgeGrid(1.0, 2)
    assert g.h == 0.5
    assert g.nodes() == [0.0, 0.5, 1.0]
    A, B = popdyn.generator_matrix(g, g, 0.0)
    expected = np.array([[-2, 0, 0, 0], [2, -2, 0, 0], [0, 0, -2, 0], [0, 0, 2, -2]])
    np.testing.assert_array_equal(A.toarray(), expected)
    assert B.shape == (2, 4)


def test_constants():
    g = popdyn.AgeGrid(1.0, 4)
    assert popdyn.omega0(g, g, 3.0) == 4.5
    assert popdyn.stability_window(1.0, 4.5) == pytest.approx(1 / 9)
    assert popdyn.stability_window(0.25, 4.5) is None


def test_survival_and_disaggregation():
    assert popdyn.survival_from_life_table([0.5, 0.5]) == [1.0, 0.5, 0.25]
    assert popdyn.disaggregate([(0, 4, 500)]) == [100.0] * 5
    with pytest.raises(popdyn.InvalidArgument):
        popdyn.disaggregate([(3, 2, 1.0)])


def test_projection_energy_nonincreasing_without_births():
    g = popdyn.AgeGrid(1.0, 20)
    u0 = np.ones(40)
    run = popdyn.project_constant(g, g, 0.0, u0, theta=1.0, tau=0.05, horizon=1.0)
    assert run["u"].shape == (21, 40)
    assert np.all(np.diff(run["energy"]) <= 1e-15)


def test_error_norms():
    e = popdyn.error_norms([11.0, 12.0], [10.0, 10.0])
    assert e["linf"] == 2.0 and e["l1"] == 3.0
    assert e["rel_l1"] == pytest.approx(3.0 / 20.0)


def test_scenario_run(tmp_path):
    result = popdyn.run_scenario(FIXTURES / "scenario.ini", tmp_path / "out")
    assert result["omega0"] == 110.0
    assert result["tau_bar"] == pytest.approx(1 / 110)
    assert len(result["years"]) == 11
    first = result["years"][0]["population"]
    census = popdyn.load_population(FIXTURES / "population.csv")
    np.testing.assert_allclose(first["m"], census["m"], rtol=1e-10)
    assert (tmp_path / "out" / "summary.csv").exists()
    with pytest.raises(popdyn.IoError):
        popdyn.run_scenario(FIXTURES / "missing.ini")


def test_verification_suite():
    checks = popdyn.verify()
    assert {c["name"] for c in checks} >= {"summation-by-parts", "dissipativity"}
    assert all(c["passed"] for c in checks)


def test_convergence():
    study = popdyn.convergence_study(2, 1.0)
    assert len(study["ratios"]) == 1 and study["ratios"][0] >= 1.8
    assert math.isfinite(study["errors_vs_exact"][-1])

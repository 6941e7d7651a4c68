"""End-to-end smoke tests of the Python bindings."""

import json
import math

import numpy as np
import pytest

import sfdlab


def test_lattice_and_numpy_round_trip():
    lat = sfdlab.Lattice(1, 16, 0.1)
    assert lat.size == 16
    assert lat.period == pytest.approx(1.6)

    vals = np.linspace(-1.0, 1.0, 16)
    f = sfdlab.GridFunction(lat, vals)
    back = f.to_numpy()
    assert back.shape == (16,)
    assert np.array_equal(back, vals)


def test_difference_identity_on_random_data():
    lat = sfdlab.Lattice(1, 32, 0.25)
    rng = np.random.default_rng(7)
    u = sfdlab.GridFunction(lat, rng.uniform(-1, 1, 32))
    e1 = sfdlab.DirectionVector([1])

    # the symmetric quotient is the mean of the one-sided ones
    sym = sfdlab.symmetric_diff(u, e1).to_numpy()
    one_sided = 0.5 * (sfdlab.forward_diff(u, e1).to_numpy() +
                       sfdlab.backward_diff(u, e1).to_numpy())
    assert np.max(np.abs(sym - one_sided)) < 1e-13


def test_scheme_consistency_and_parabolicity():
    pde = sfdlab.TargetPDE(1, 1)
    pde.set_a(1, 1, 2.0)
    pde.set_b(1, 0, 2.0)
    spec = sfdlab.from_pde_central(pde)

    residual = sfdlab.consistency_residual(spec, pde, 0.0, [[0.0], [1.0]])
    assert residual == 0.0

    rep = sfdlab.parabolicity_report(spec, 0.0, [[0.0]])
    assert rep.pass_
    assert abs(rep.min_eigenvalue) <= 1e-12


def test_worked_example_rows():
    rows = sfdlab.reproduce_example_2_4()
    assert len(rows) == 4
    for _label, _computed, _printed, abs_diff in rows:
        assert abs_diff <= 1e-8


def test_pathwise_solver_and_extrapolation():
    pde = sfdlab.TargetPDE(1, 1)
    pde.set_a(1, 1, 2.0)
    pde.set_b(1, 0, 2.0)
    spec = sfdlab.from_pde_central(pde)

    path = sfdlab.WienerPath.sample(1, 256, 1.0, 11)
    modes = [(1, 0.5 + 0.0j), (-1, 0.5 + 0.0j)]
    record = [0.0, 0.5, 1.0]

    coarse = sfdlab.fourier_exact_solve(
        spec, modes, sfdlab.Lattice(1, 8, 2 * math.pi / 8), path, record)
    fine = sfdlab.fourier_exact_solve(
        spec, modes, sfdlab.Lattice(1, 16, 2 * math.pi / 16), path, record)

    weights = sfdlab.richardson_weights(1, 2)
    assert repr(weights) == "-1/3, 4/3"
    combo = sfdlab.extrapolate([coarse, fine], weights)
    assert combo.lattice.size == 8

    # the combination should beat the coarse solution against the continuum
    ref = sfdlab.continuum_exact_solve(
        pde, modes, sfdlab.Lattice(1, 8, 2 * math.pi / 8), path, record)
    err_plain = sfdlab.sup_norm(coarse.states[-1] - ref.states[-1])
    err_combo = sfdlab.sup_norm(combo.states[-1] - ref.states[-1])
    assert err_combo < err_plain


def test_convergence_study_json():
    cfg = "\n".join([
        "[problem]",
        "preset = example-2-4",
        "[grid]",
        "levels = 3",
    ])
    doc = json.loads(sfdlab.run_convergence_json(cfg))
    assert len(doc["h_levels"]) == 3
    assert 1.7 < doc["sup_order"]["slope"] < 2.3


def test_validation_errors_surface_as_exceptions():
    with pytest.raises(sfdlab.ValidationError):
        sfdlab.parse_config("[grid]\nwibble = 1\n")

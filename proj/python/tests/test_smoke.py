import json
import math

import numpy as np
import pytest

import farfield as ff


def test_pucci_values_and_dual():
    e = ff.Ellipticity(1.0, 2.0, 2)
    plus = ff.Operator.pucci_plus(e)
    m = np.diag([3.0, -1.0])
    assert plus(m) == pytest.approx(5.0)
    assert plus.dual()(m) == pytest.approx(1.0)
    assert plus.check_ellipticity(200)["pass"]
    assert plus.check_homogeneity(200)["pass"]
    assert json.loads(plus.to_json())["kind"] == "pucci_plus"
    assert ff.Operator.from_json(plus.to_json())(m) == plus(m)


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        ff.Ellipticity(2.0, 1.0, 2)
    with pytest.raises(ValueError):
        ff.Operator.from_json('{"kind": "pucci_plus"}')


def test_exponents():
    assert ff.scaling_exponents(ff.Ellipticity(1, 2, 2)) == (-0.5, 1.0)
    assert ff.decay_case(ff.Ellipticity(1, 2, 3)) == "alpha_plus_zero"
    assert ff.rotation_invariant_exponent(ff.Operator.laplace(3)) == pytest.approx(1.0)
    est = ff.estimate_scaling_exponent(ff.Operator.laplace(3))
    assert est["alpha_hat"] == pytest.approx(1.0, abs=0.02)


def test_fundamental_solution_is_vectorized():
    fs = ff.FundamentalSolution("plus", "upward", ff.Ellipticity(1, 2, 2))
    r = np.array([1.0, 4.0, 9.0])
    np.testing.assert_allclose(fs(r), -np.sqrt(r))


def test_radial_solve_matches_closed_form():
    u, report = ff.solve_radial(ff.Operator.laplace(3), 1.0, 4.0, 301, 1.0, 0.25)
    r = u.points[:, 0]
    np.testing.assert_allclose(u.values, 1.0 / r, atol=1e-4)
    assert report["residual"] <= 1e-10


def test_polar_solve_reproduces_affine_data():
    f = ff.Operator.pucci_plus(ff.Ellipticity(1, 2, 2))
    u, _ = ff.solve_polar(f, 0.0, 4.0, 9, 16, lambda x, y: 1.0 + x - 2.0 * y)
    p = u.points
    np.testing.assert_allclose(u.values, 1.0 + p[:, 0] - 2.0 * p[:, 1], atol=1e-8)


def test_linear_extraction_and_classification():
    f = ff.Operator.pucci_plus(ff.Ellipticity(1, 2, 2))
    u = ff.GridFunction.polar(1.0, 64.0, 127, 128, lambda x, y: x - 0.5 - 2.0 * math.sqrt(math.hypot(x, y)))
    ex = ff.extract_linear_profile(u, f)
    np.testing.assert_allclose(ex["gradient"], [1.0, 0.0], atol=0.05)
    assert ex["trace"]["converged"]
    tc = ff.classify_tail(u, f, ex["gradient"], ex["constant"])
    assert tc["variant"] == "up_approx"
    assert tc["a"] == pytest.approx(2.0, rel=0.02)


def test_fit_decay_models():
    r = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
    fit = ff.fit_decay(r, [3.0 * x**0.5 for x in r])
    assert fit["model"] == "power_law"
    assert fit["exponent"] == pytest.approx(0.5)
    assert ff.fit_decay(r, [math.log(x) for x in r])["model"] == "logarithmic"


def test_harness_run_and_verify(tmp_path):
    names = [s["name"] for s in ff.list_scenarios()]
    assert "laplace_baseline" in names
    cfg = json.dumps({"scenario": "laplace_baseline"})
    assert len(ff.config_hash(cfg)) == 16
    a = ff.run(cfg, tmp_path / "a")
    b = ff.run(cfg, tmp_path / "b")
    assert a["passed"] and a["config_hash"] == b["config_hash"]
    assert ff.verify(tmp_path / "b", tmp_path / "a") == []
    with pytest.raises(FileNotFoundError):
        ff.verify(tmp_path / "b", tmp_path / "missing")

import math

import pytest

import flatcover


def paraboloid():
    return flatcover.polynomial(2, {(2, 0): 1.0, (0, 2): 1.0})


def test_evaluate_and_hessian():
    phi = paraboloid()
    assert flatcover.evaluate(phi, [0.5, -0.25]) == pytest.approx(0.3125)
    h = flatcover.hessian_det(phi)
    assert h["terms"] == [{"alpha": [0, 0], "c": 4.0}]


def test_tiling_cover_verifies():
    phi = paraboloid()
    cov = flatcover.cover(phi, 1 / 16, mode="nondegenerate", k=1.0)
    assert len(cov["pieces"]) == 64
    rep = flatcover.verify(phi, cov)
    assert rep["pass"]
    assert rep["certificate"]["worst_constant"] <= 0.5 + 1e-9


def test_hole_is_reported():
    phi = paraboloid()
    cov = flatcover.cover(phi, 1 / 16, mode="nondegenerate", k=1.0)
    del cov["pieces"][10]
    rep = flatcover.verify(phi, cov)
    assert not rep["pass"]
    assert rep["coverage"]["misses"]


def test_single_piece_ratio_is_one():
    phi = flatcover.polynomial(1, {(2,): 1.0})
    cov = flatcover.cover(phi, 1 / 64, mode="nondegenerate", k=1.0)
    cov["pieces"] = cov["pieces"][:1]
    est = flatcover.estimate(phi, cov, p=6.0, q=6.0, trials=2)
    assert math.isclose(est["ratio"], 1.0, abs_tol=1e-9)


def test_sweep_rows():
    phi = flatcover.polynomial(1, {(2,): 1.0})
    table = flatcover.sweep(phi, [2**-4, 2**-5, 2**-6], mode="nondegenerate", eps=0.5, trials=1)
    assert len(table["rows"]) == 3
    assert table["slope"] <= 0.15


def test_errors_map_to_python_exceptions():
    phi = flatcover.polynomial(3, {(1, 1, 0): 1.0, (2, 0, 1): 1.0})
    with pytest.raises(NotImplementedError):
        flatcover.cover(phi, 1 / 16, mode="uniform")
    with pytest.raises(ValueError):
        flatcover.cover({"nvars": 1}, 1 / 16)
    with pytest.raises(RuntimeError):
        flatcover.cover(flatcover.polynomial(2, {(1, 1): 1.0}), 1 / 16, mode="nondegenerate", k=0.5)

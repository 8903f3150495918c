import math
from pathlib import Path

import numpy as np
import pytest

import dnnrelax

DATA = Path(__file__).resolve().parents[2] / "data"


def example1():
    return dnnrelax.BqpInstance(
        Q=np.array([[0.0, -3.0], [-3.0, -20.0]]),
        c=np.array([-8.0, 9.0]),
        A=np.array([[10.0, -10.0]]),
        b=np.array([0.0]),
        name="example1",
    )


def test_example1_sdr1_is_tight():
    r = dnnrelax.solve_relaxation("sdr1", example1())
    assert r["status"] == "optimal"
    assert r["bound"] == pytest.approx(-28, abs=1e-6)
    assert r["certified"]
    exact, _, x = dnnrelax.rank_one_certificate(r["vector"], r["matrix"])
    assert exact
    assert list(x) == [-1.0, -1.0]


def test_plain_sdr_is_unbounded():
    r = dnnrelax.solve_relaxation("sdr", example1())
    assert r["status"] == "unbounded"
    assert r["bound"] == -math.inf
    assert r["certified"]


def test_loaded_instance_matches():
    inst = dnnrelax.load_instance(str(DATA / "example1.json"))
    assert np.array_equal(inst.Q, example1().Q)
    assert dnnrelax.brute_force_bqp(inst)[0] == pytest.approx(-28)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        dnnrelax.BqpInstance(np.array([[0.0, 1.0], [2.0, 0.0]]), np.zeros(2), np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(OSError):
        dnnrelax.load_instance(str(DATA / "missing.json"))
    with pytest.raises(ValueError):
        dnnrelax.solve_relaxation("sdr3", example1())


def test_sdr2_and_dnnp_agree():
    inst = dnnrelax.generate_instance("rdbqp", 6, 2, 3)
    rep = dnnrelax.verify_theorem3(inst, 1e-6)
    assert rep["verdict"] == "pass"
    assert rep["opt_a"] == pytest.approx(rep["opt_b"], abs=1e-5)
    assert rep["opt_a"] <= dnnrelax.brute_force_bqp(inst)[0] + 1e-6


def test_triangle_maxcut():
    g = dnnrelax.load_graph(str(DATA / "triangle.txt"))
    for tag in ("sdr", "dnnp"):
        assert dnnrelax.solve_maxcut(tag, g)["bound"] == pytest.approx(2.25, abs=1e-6)
    assert dnnrelax.brute_force_maxcut(g)[0] == pytest.approx(2)
    assert dnnrelax.verify_theorem4(g)["verdict"] == "pass"


def test_profile_two_problems():
    curves = dnnrelax.performance_profile([[1.0, 2.0], [4.0, 2.0]], ["sdr1", "sdr2"])
    tau, rho = curves["sdr1"]
    assert tau == [1.0, 2.0]
    assert rho == [0.5, 1.0]

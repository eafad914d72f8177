import numpy as np
import pytest

import setval


def test_interval_arithmetic():
    a = setval.Interval(0, 1)
    assert setval.scalar_mul(0.0, a) == setval.Interval(0, 0)
    assert setval.minkowski_add(a, setval.scalar_mul(-1.0, a)) == setval.Interval(-1, 1)
    assert a + setval.Interval(1, 2) == setval.Interval(1, 3)
    assert setval.hausdorff_distance(a, setval.Interval(0.5, 3)) == 2.0
    assert setval.hukuhara_diff(setval.Interval(0, 3), a) == setval.Interval(0, 2)
    assert setval.hukuhara_diff(a, setval.Interval(0, 3)) is None
    with pytest.raises(setval.SetvalError, match="OrderViolation"):
        setval.Interval(2, 1)


def test_convex_body():
    square = setval.ConvexBody(2, [[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]])
    assert len(square.generators()) == 4
    assert square.support([1, 1]) == 2.0
    assert setval.body_hausdorff_distance(square, square) == 0.0


def test_aumann_expectation_and_degeneracy():
    values = [setval.Interval(0, 1), setval.Interval(-1, 0)]
    assert setval.aumann_expectation([0.5, 0.5], values) == setval.Interval(-0.5, 0.5)
    assert not setval.is_degenerate_by_expectation([0.5, 0.5], values)
    points = [setval.Interval.point(1), setval.Interval.point(-1)]
    assert setval.is_degenerate_by_expectation([0.25, 0.75], points)


def test_tree_transform():
    levels = setval.tree_transform(2, setval.Interval(0, 1))
    assert levels[0] == [setval.Interval(0, 0)]
    assert levels[1] == [setval.Interval(-1, 0), setval.Interval(0, 1)]
    assert setval.tree_classification(4, setval.Interval(0, 1)) == "submartingale"
    assert setval.tree_classification(4, setval.Interval(1, 1)) == "martingale"


def test_brownian_and_martingale_test():
    b = setval.gen_brownian(1.0, 16, 4000, 7)
    assert b.shape == (4000, 17)
    assert np.all(b[:, 0] == 0)
    assert np.array_equal(b[:100], setval.gen_brownian(1.0, 16, 100, 7))
    x = setval.geometric_martingale(b, 1.0)
    assert abs(x[:, -1].mean() - 1.0) < 0.1
    assert setval.martingale_test(x, b, 1.0)["verdict"] == "pass"
    assert setval.martingale_test(b**2, b, 1.0)["verdict"] == "fail"
    integral = setval.ito_integral(np.ones_like(b), b, 1.0)
    assert np.allclose(integral, b)


def test_experiments_and_checks():
    assert "roundtrip" in setval.experiment_ids()
    report = setval.run_experiment("ex1-discrete", depth=4)
    assert report["schema"] == "1"
    assert report["verdict"] == "pass"
    assert report["statistics"]["summary"][0] == "submartingale: yes; martingale: no"
    assert setval.run_experiment("roundtrip", depth=4, trials=10)["verdict"] == "pass"
    with pytest.raises(setval.SetvalError, match="UnknownExperiment"):
        setval.run_experiment("unknown-id")
    with pytest.raises(setval.SetvalError, match="InvalidConfig"):
        setval.run_experiment("mean0", alpha=2.0)

    problem = {
        "space": {"atoms": ["up", "down"], "probabilities": [0.5, 0.5]},
        "filtration": [[["up", "down"]], [["up"], ["down"]]],
        "process": [
            {"up": {"lo": 0, "hi": 0}, "down": {"lo": 0, "hi": 0}},
            {"up": {"lo": 0, "hi": 1}, "down": {"lo": -1, "hi": 0}},
        ],
        "expect": "submartingale",
    }
    assert setval.finite_check(problem)["verdict"] == "pass"
    tree = {"depth": 1, "levels": [[{"lo": 1, "hi": 2}], [{"lo": 0.5, "hi": 1.5}, {"lo": 1.5, "hi": 2.5}]],
            "expect_representable": True}
    assert setval.represent_check(tree)["verdict"] == "pass"

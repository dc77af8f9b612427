import math

import pytest

import hadamard_lab as hl


def test_euclidean_distance_and_midpoint():
    e2 = hl.euclidean(2)
    assert e2.distance([0, 0], [3, 4]) == pytest.approx(5.0)
    assert list(e2.geodesic_point([0, 0], [2, 0], 0.5)) == pytest.approx([1.0, 0.0])


def test_hyperbolic_distance_along_axis():
    h2 = hl.hyperbolic(2)
    x = [math.cosh(1.5), math.sinh(1.5), 0.0]
    assert h2.distance(h2.base_point(), x) == pytest.approx(1.5, abs=1e-12)


def test_cn_is_an_equality_in_the_plane():
    e2 = hl.euclidean(2)
    r = hl.check_cn(e2, [1, 2], [0, 0], [4, -1])
    assert abs(r["defect"]) < 1e-9


def test_tree_barycenter_of_two_leaves_is_the_path_midpoint():
    t = hl.tree(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
    leaf1 = [0, 1.0]
    leaf2 = [1, 1.0]
    b = hl.barycenter(t, [leaf1, leaf2], [0.5, 0.5])
    assert t.distance(b, t.base_point()) == pytest.approx(0.0, abs=1e-12)


def test_circumcenter_of_a_segment():
    e2 = hl.euclidean(2)
    c, r = hl.circumcenter(e2, [[0, 0], [2, 0]])
    assert list(c) == pytest.approx([1.0, 0.0])
    assert r == pytest.approx(1.0)


def test_scenario_round_trip_and_schema_errors():
    scenario = {
        "schema_version": 1,
        "seed": 3,
        "space": {"type": "euclidean", "dim": 1},
        "task": "sqint",
        "params": {"N": 8, "g": [0, 2.5]},
    }
    report = hl.run_scenario(scenario)
    assert report["summary"]["failed"] == 0
    assert report["results"]["estimates"] == pytest.approx([0.0, 6.5])
    with pytest.raises(ValueError):
        hl.run_scenario("{not json")


def test_fuzz_is_deterministic():
    a = hl.fuzz(["euclidean2"], trials=5, seed=9)
    b = hl.fuzz(["euclidean2"], trials=5, seed=9)
    assert a == b
    assert all(r["status"] == "pass" for r in a["records"])

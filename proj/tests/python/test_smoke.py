import math

import pytest

import gfdyn


def test_examples_and_multipliers():
    ex = gfdyn.standard_examples()
    assert sorted(ex) == ["f1", "f2", "f3", "f4"]
    assert abs(ex["f1"].derivative(1.0) - 1) < 1e-12
    assert abs(ex["f4"](-2 * math.pi)) < 1e-12
    assert abs(gfdyn.sine_affine_parameter() - 1.255134) < 1e-5


def test_sine_germ():
    g = gfdyn.fit_germ(gfdyn.EntireMap.sine(), 0.0)
    assert g["p"] == 2
    assert abs(g["a"] + 1 / 6) < 1e-14
    for v in g["repelling"]:
        assert abs(abs(v) - math.sqrt(3)) < 1e-10
        assert abs(v.real) < 1e-10


def test_ramification():
    r = gfdyn.ramification_data(gfdyn.standard_examples()["f4"])
    assert (r["n_sigma"], r["s"]) == (4, 7 / 8)


def test_run_examples_report():
    rep = gfdyn.run("examples")
    assert rep["schema"] == "gfdyn.report"
    assert rep["schema_version"] == 1
    assert rep["passed"]


def test_config_error():
    with pytest.raises(gfdyn.ConfigError):
        gfdyn.run("examples", {"map": {"family": "Cosine"}})
    with pytest.raises(gfdyn.ConfigError):
        gfdyn.run("examples", {"petal": {"no_such_key": 1}})


def test_render_deterministic():
    cfg = {"map": {"family": "ExpShift"},
           "render": {"width_px": 64, "height_px": 48, "tile": 16, "max_iter": 200}}
    img1, h1 = gfdyn.render(cfg, threads=1)
    img4, h4 = gfdyn.render(cfg, threads=4)
    assert h1 == h4
    assert img1.shape == (48, 64, 3)
    assert (img1 == img4).all()

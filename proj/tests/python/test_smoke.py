import math
import subprocess
import sys

import numpy as np
import pytest

import smoothrast as sr


def make_camera(size=32):
    cam = sr.Camera()
    cam.width = cam.height = size
    return cam


def test_icosphere_counts():
    v, f = sr.icosphere(2)
    assert v.shape == (162, 3)
    assert f.shape == (320, 3)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-12)


def test_render_shape_and_range():
    v, f = sr.icosphere(1)
    img = sr.render(v, f, make_camera(48))
    assert img.shape == (48, 48)
    assert img.min() >= 0.0
    assert img.max() <= 1.0
    # the sphere darkens part of the bright background
    assert img.min() < 0.9


def test_render_is_deterministic():
    v, f = sr.icosphere(1)
    cam = make_camera()
    a = sr.render(v, f, cam)
    b = sr.render(v, f, cam)
    assert (a == b).all()


def test_render_gradient_matches_fd():
    v, f = sr.icosphere(0)
    cam = make_camera(24)
    params = sr.RenderParams()
    params.s = params.o = 15.0
    w = np.ones((24, 24))
    g = sr.render_gradient(v, f, cam, params, w)
    assert g.shape == v.shape

    h = 1e-5
    rng = np.random.default_rng(3)
    for _ in range(4):
        i = int(rng.integers(len(v)))
        k = int(rng.integers(3))
        vp, vm = v.copy(), v.copy()
        vp[i, k] += h
        vm[i, k] -= h
        fd = (sr.render(vp, f, cam, params).sum() - sr.render(vm, f, cam, params).sum()) / (2 * h)
        assert g[i, k] == pytest.approx(fd, rel=1e-3, abs=1e-6)


def test_gradcheck_binding():
    v, f = sr.icosphere(0)
    max_abs, max_rel, probes = sr.gradcheck(v, f, make_camera(24), sr.RenderParams(), probes=6)
    assert probes == 6
    assert max_rel < 1e-3


def test_obj_and_image_roundtrip(tmp_path):
    v, f = sr.icosphere(1)
    obj = str(tmp_path / "m.obj")
    sr.save_obj(v, f, obj)
    v2, f2 = sr.load_obj(obj)
    assert np.allclose(v, v2, atol=1e-8)
    assert (f == f2).all()

    img = sr.render(v, f, make_camera())
    for ext in ("pgm", "png", "f64"):
        path = str(tmp_path / f"img.{ext}")
        sr.save_image(img, path)
        back = sr.load_image(path)
        tol = 0.0 if ext == "f64" else 1.0 / 255.0
        assert np.abs(back - np.clip(img, 0.0, 1.0)).max() <= tol


def test_image_l1():
    a = np.zeros((4, 4))
    b = np.full((4, 4), 0.25)
    assert sr.image_l1(a, b) == pytest.approx(0.25)


def test_cli_roundtrip(tmp_path):
    import os

    exe = os.environ.get("SMOOTHRAST_BIN")
    if not exe:
        pytest.skip("SMOOTHRAST_BIN not set")
    cfg = tmp_path / "scene.json"
    cfg.write_text(
        '{"mesh": {"base_level": 1}, '
        '"cameras": [{"eye": [0,0,-3], "width": 32, "height": 32}]}'
    )
    out = tmp_path / "out.pgm"
    subprocess.run([exe, "render", "--config", str(cfg), "--out", str(out)], check=True)
    img = sr.load_image(str(out))
    assert img.shape == (32, 32)

    v, f = sr.icosphere(1)
    direct = sr.render(v, f, make_camera())
    assert np.abs(direct - img).max() <= 1.0 / 255.0

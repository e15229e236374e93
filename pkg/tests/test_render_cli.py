import json
import re
from fractions import Fraction as F

import numpy as np
import pytest

from coamoeba_lab.cli import main
from coamoeba_lab.coamoeba import shell
from coamoeba_lab.errors import PreconditionError
from coamoeba_lab.polyhedral import AffineSubspace
from coamoeba_lab.render import Layer, RenderSpec, render_svg
from coamoeba_lab.torus import LiftedArrangement, enumerate_in_box


def test_svg_coset_count_matches_lifts(triangle_spec):
    arr = shell(triangle_spec).arrangement()
    for domain in (1, 2):
        out = render_svg(RenderSpec(domain=domain, layers=[Layer("cosets", arr)]))
        drawn = len(re.findall(r'class="coset"', out["svg"]))
        box = tuple((F(0), F(domain)) for _ in range(2))
        assert drawn == len(enumerate_in_box(arr, box)) == out["counts"][0][1]


def test_empty_figure_is_framed():
    out = render_svg(RenderSpec(layers=[Layer("cosets", LiftedArrangement([]))]))
    assert 'class="coset"' not in out["svg"]
    assert len(re.findall(r'class="frame"', out["svg"])) == 4


def test_high_dimension_needs_a_projection():
    cloud = np.random.default_rng(0).random((10, 4))
    with pytest.raises(PreconditionError):
        render_svg(RenderSpec(layers=[Layer("cloud", cloud)]))
    mat = np.eye(2, 4)
    out = render_svg(RenderSpec(layers=[Layer("cloud", cloud)], projection_matrix=mat))
    assert out["counts"] == [("cloud", 10)]


def test_three_dimensional_planes(real_line_spec):
    arr = shell(real_line_spec).arrangement()
    out = render_svg(RenderSpec(projection="coords-3d-orthographic",
                                layers=[Layer("cosets", arr)]))
    assert out["counts"][0][1] == len(enumerate_in_box(arr, tuple((F(0), F(1)),) * 3))


def test_bad_render_spec():
    with pytest.raises(ValueError):
        RenderSpec(domain=0)
    with pytest.raises(ValueError):
        RenderSpec(projection="polar")


# ---------------------------------------------------------------------------
# command line


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_cli_shell_lift_render(tmp_path, capsys):
    sh = tmp_path / "shell.json"
    code, _ = run(capsys, ["shell", "--poly", "1 + x1 + x2", "--n", "2", "-o", str(sh)])
    assert code == 0
    data = json.loads(sh.read_text())
    assert len(data["cosets"]) == 3
    code, out = run(capsys, ["lift", "-i", str(sh), "--box", "0,2"])
    assert code == 0 and json.loads(out)["count"] == 8
    svg = tmp_path / "fig.svg"
    code, out = run(capsys, ["render", "--cosets", str(sh), "--domain", "2", "-o", str(svg)])
    assert code == 0
    assert len(re.findall(r'class="coset"', svg.read_text())) == 8


def test_cli_parse_and_tropical(capsys):
    code, out = run(capsys, ["parse", "--poly", "1 + x1 + x2", "--n", "2"])
    assert code == 0 and json.loads(out)["text"]
    code, out = run(capsys, ["tropical", "--poly", "1 + x1 + x2", "--n", "2"])
    assert code == 0 and json.loads(out)


def test_cli_sample_round_trip(tmp_path, capsys):
    path = tmp_path / "cloud.npy"
    code, out = run(capsys, ["sample", "--poly", "1 + x1 + x2", "--n", "2",
                             "--angular-steps", "60", "--radial-steps", "61", "-o", str(path)])
    assert code == 0
    pts = np.load(path)
    assert pts.shape[1] == 2 and len(pts) == json.loads(out)["samples"]


def test_cli_na_amoeba(capsys):
    code, out = run(capsys, ["na-amoeba", "--poly", "x + zeta3*y + zeta3^2*t",
                             "--poly", "i*x + z - (1+i)", "--n", "3"])
    assert code == 0
    data = json.loads(out)
    assert data["convention"] == "min"
    verts = {tuple(v) for f in data["faces"] if f["dim"] == 0 for v in f["vertices"]}
    assert len(verts) == 2


def test_cli_certify_and_oracle(tmp_path, capsys):
    sh = tmp_path / "shell.json"
    main(["shell", "--poly", "1 + x1 + x2", "--n", "2", "-o", str(sh)])
    plane = tmp_path / "plane.json"
    plane.write_text(json.dumps(AffineSubspace.make((F(1, 7), F(2, 9)), [(3, 5)]).to_json()))
    capsys.readouterr()
    code, out = run(capsys, ["certify", "--arrangement", str(sh), "--plane", str(plane),
                             "--k", "0", "--trials", "6", "--box", "0,2"])
    assert code == 0
    assert "counterexample" not in json.loads(out)["counts"]
    code, out = run(capsys, ["oracle", "--set", str(sh), "--box", "0,2", "--res", "24"])
    assert code == 0 and json.loads(out)["betti"][0] >= 2


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["shell", "--poly", "1 + + x1", "--n", "2"]) == 2
    assert main(["shell", "--poly", "x1*x2", "--n", "2"]) == 3
    assert main(["parse", "--poly", "x1 + x3", "--n", "2"]) == 2
    # a short wall in the cloud with no coset behind it: L is cut, the square is not
    sh = tmp_path / "empty.json"
    sh.write_text(json.dumps(LiftedArrangement([]).to_json()))
    wall = np.stack([np.full(400, 0.5), np.linspace(0.2, 0.5, 400)], axis=1)
    cloud = tmp_path / "wall.npy"
    np.save(cloud, wall)
    plane = tmp_path / "plane.json"
    plane.write_text(json.dumps(AffineSubspace.make((0, F(1, 3)), [(1, 0)]).to_json()))
    capsys.readouterr()
    code, out = run(capsys, ["certify", "--arrangement", str(sh), "--plane", str(plane),
                             "--k", "0", "--trials", "20", "--cloud", str(cloud), "--box", "0,1"])
    assert code == 0 and json.loads(out)["verdict"] == "unresolved"
    code, out = run(capsys, ["certify", "--arrangement", str(sh), "--plane", str(plane),
                             "--k", "0", "--trials", "20", "--cloud", str(cloud), "--box", "0,1",
                             "--oracle-res", "48"])
    assert code == 4, out
    # a wall across the whole square really separates
    full = np.stack([np.full(400, 0.5), np.linspace(0, 1, 400)], axis=1)
    np.save(cloud, full)
    code, out = run(capsys, ["certify", "--arrangement", str(sh), "--plane", str(plane),
                             "--k", "0", "--trials", "20", "--cloud", str(cloud), "--box", "0,1",
                             "--oracle-res", "48"])
    assert code == 0 and "nonzero-oracle" in json.loads(out)["counts"], out

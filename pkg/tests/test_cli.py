import csv
import io
import json

import pytest

from steklab.chromatic.maps import certificate_to_dict
from steklab.chromatic import load_fixture
from steklab.cli import main
from steklab.graphs import MetricGraph, save_graph


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def disk_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("disk")
    assert main(["make-mesh", "disk", "--h", "0.1", "--out", str(d / "m.json"), "--density-out", str(d / "d.json")]) == 0
    return d / "m.json", d / "d.json"


def test_spectrum_disk(capsys, disk_files):
    mesh, dens = disk_files
    code, out, _ = run(capsys, "spectrum", "--mesh", str(mesh), "--density", str(dens), "--k", "6")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["k"]) for r in rows] == list(range(7))
    assert [int(r["multiplicity"]) for r in rows] == [1, 2, 2, 2, 2, 2, 2]
    assert float(rows[1]["sigma"]) == pytest.approx(1.0, rel=0.02)


def test_spectrum_is_byte_identical(capsys, disk_files, tmp_path):
    mesh, _ = disk_files
    outs = []
    for i in range(2):
        path = tmp_path / f"s{i}.csv"
        assert main(["spectrum", "--mesh", str(mesh), "--k", "4", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_spectrum_refine(capsys, disk_files):
    mesh, _ = disk_files
    code, out, _ = run(capsys, "spectrum", "--mesh", str(mesh), "--k", "2", "--refine", "1")
    assert code == 0
    assert float(out.splitlines()[2].split(",")[1]) == pytest.approx(1.0, rel=0.01)


def test_strip_mesh(capsys, tmp_path):
    path = tmp_path / "strip.json"
    assert main(["make-mesh", "strip", "--h", "0.1", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "spectrum", "--mesh", str(path), "--k", "1")
    assert code == 0
    sigma1 = float(out.splitlines()[2].split(",")[1])
    assert sigma1 == pytest.approx(0.76159, rel=0.01)


def test_converge(capsys, tmp_path):
    g = tmp_path / "k3.json"
    save_graph(MetricGraph.complete(3), g)
    code, out, _ = run(capsys, "converge", "--graph", str(g), "--epsilons", "0.2,0.1", "--k", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "epsilon,k,sigma,lambda_graph,abs_error"
    assert len(lines) == 1 + 2 * 2
    rows = [l.split(",") for l in lines[1:]]
    top = max(r[1] for r in rows)
    errs = [float(r[4]) for r in rows if r[1] == top]
    assert errs[1] < errs[0]


def test_chrom(capsys):
    code, out, _ = run(capsys, "chrom", "--surface", "torus", "--p", "3")
    assert code == 0
    data = json.loads(out)
    assert data["exact"] == 7 and data["bounds"] == [6, 7] and data["chr"] == 7
    code, out, _ = run(capsys, "chrom", "--surface", "sum4P", "--p", "2")
    assert json.loads(out)["exact"] is None


def test_embed_verify_fixture(capsys):
    code, out, _ = run(capsys, "embed-verify", "--cert", "k6_klein")
    assert code == 0
    rep = json.loads(out)
    assert rep == {"chi": 0, "claims_match": True, "faces": 9, "n": 6, "orientable": False, "p": 2, "proper": True}


def test_embed_verify_tampered(capsys, tmp_path):
    data = certificate_to_dict(load_fixture("k6_klein"))
    data["removed_faces"] = [[1, 2, 5]]  # vertices 3, 4, 6 no longer on the boundary
    path = tmp_path / "t.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "embed-verify", "--cert", str(path))
    assert code == 0
    rep = json.loads(out)
    assert rep["proper"] is False and rep["claims_match"] is False


@pytest.mark.parametrize("argv", [
    ["spectrum", "--mesh", "/nonexistent.json"],
    ["converge", "--graph", "/nonexistent.json"],
    ["chrom", "--surface", "cube"],
    ["chrom", "--surface", "torus", "--p", "0"],
    ["embed-verify", "--cert", "missing_fixture"],
    ["make-mesh", "disk", "--h", "-1", "--out", "/tmp/x.json"],
])
def test_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert len(err.strip().splitlines()) == 1


def test_converge_rejects_increasing_epsilons(capsys, tmp_path):
    g = tmp_path / "p.json"
    save_graph(MetricGraph.path(2), g)
    code, _, err = run(capsys, "converge", "--graph", str(g), "--epsilons", "0.1,0.2")
    assert code == 1 and "decreasing" in err


def test_bad_k(capsys, disk_files):
    code, _, err = run(capsys, "spectrum", "--mesh", str(disk_files[0]), "--k", "0")
    assert code == 1


def test_chrom_repeatable(capsys):
    a = run(capsys, "chrom", "--surface", "klein", "--p", "2")[1]
    b = run(capsys, "chrom", "--surface", "klein", "--p", "2")[1]
    assert a == b

import json
import subprocess
import sys

import pytest

from troptree.cli import RunConfig, InputError, main
from troptree.newick import parse_newick
from troptree.segment import tropical_segment
from troptree.topology import Topology
from troptree.torus import PairVector

FIVE_TEXT = "((A:8,B:8):12,(C:10,(D:5,E:5):5):10);"


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    return {
        "five": write("five.nwk", FIVE_TEXT),
        "uneven": write("uneven.nwk", "((A:1,B:2):1,C:3);"),
        "bad": write("bad.json", {"coords": [1, 2, 3]}),
        "broken": write("broken.json", "{not json"),
        "w1": write("w1.json", {"coords": [0.4, 0.8, 2, 0.8, 2, 2]}),
        "w2": write("w2.json", {"coords": [2, 2, 2, 0.8, 0.8, 0.4]}),
        "w2b": write("w2b.json", {"coords": [0.8, 0.8, 2, 0.4, 2, 2]}),
        "three": write("three.json", {"coords": [1, 2, 2]}),
        "f1": write("f1.json", {"leaf_count": 5, "clades": [[1, 2, 3], [1, 2], [4, 5]]}),
        "f2": write("f2.json", {"leaf_count": 5, "clades": [[1, 3, 4, 5], [1, 3, 5], [1, 5]]}),
        "g1": write("g1.json", {"leaf_count": 5, "clades": [[3, 4]]}),
        "g2": write("g2.json", {"leaf_count": 5, "clades": [[1, 4], [2, 3], [1, 2, 3, 4]]}),
        "g": write("g.json", {"leaf_count": 5, "clades": [[1, 4], [1, 3, 4], [2, 5]]}),
        "c1": write("c1.json", {"leaf_count": 12, "clades": [[1, 2, 7, 8, 9, 12], [1, 7, 9], [2, 8, 12], [1, 7], [2, 8], [3, 4, 5, 6, 10, 11], [3, 5, 11], [4, 6, 10], [3, 5], [4, 6]]}),
        "c2": write("c2.json", {"leaf_count": 12, "clades": [[1, 2, 3, 4, 9, 10], [2, 3, 4, 9, 10], [2, 3, 4, 10], [3, 4, 10], [3, 10], [5, 6, 7, 8, 11, 12], [5, 7, 12], [6, 8, 11], [5, 7], [6, 8]]}),
        "c": write("c.json", {"leaf_count": 12, "clades": [[1, 2, 3, 4, 9, 10], [1, 2, 9], [3, 4, 10], [1, 9], [3, 10], [5, 6, 7, 8, 11, 12], [5, 6, 11], [7, 8, 12], [5, 11], [7, 12]]}),
    }


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys, files):
    code, out, _ = run(capsys, "validate", files["five"])
    assert code == 0 and out.startswith("ultrametric")
    code, out, _ = run(capsys, "validate", files["bad"])
    assert code == 1 and "neither, witness (1, 2, 3)" in out
    code, _, err = run(capsys, "validate", files["uneven"])
    assert code == 2 and "not equidistant" in err
    code, _, err = run(capsys, "validate", files["broken"])
    assert code == 2 and "line 1" in err
    code, _, err = run(capsys, "validate", "/nonexistent/file")
    assert code == 2 and "cannot read" in err


def test_validate_json_and_dot(capsys, files):
    code, out, _ = run(capsys, "validate", files["five"], "--format", "json")
    assert json.loads(out) == {"kind": "ultrametric", "witness": None, "tree_metric": True, "leaf_count": 5}
    code, out, _ = run(capsys, "validate", files["five"], "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_segment_normalized(capsys, files):
    code, out, _ = run(capsys, "segment", files["w1"], files["w2"], "--normalize", "--format", "json", "--verify")
    data = json.loads(out)
    assert code == 0 and data["verified"] is True
    assert data["bend_points"][3] == pytest.approx([0.8, 0.8, 2, 0.8, 2, 2])
    assert data["lambdas"] == pytest.approx([-1.6, -1.2, 0, 1.2, 1.6])


def test_segment_text_dot_and_single_point(capsys, files):
    code, out, _ = run(capsys, "segment", files["w1"], files["w1"])
    assert code == 0 and out.startswith("1 bend points")
    code, out, _ = run(capsys, "segment", files["w1"], files["w2"], "--format", "dot")
    assert out.count("subgraph") == 5
    code, _, err = run(capsys, "segment", files["w1"], files["five"])
    assert code == 2 and "leaf counts differ" in err


def test_topologies(capsys, files):
    code, out, _ = run(capsys, "topologies", files["w1"], files["w2"], "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data) == 9
    assert data[-1]["topology"]["clades"] == [[1, 2], [1, 2, 3]]


def test_compatible(capsys, files):
    code, out, _ = run(capsys, "compatible", files["f1"], files["f2"])
    assert code == 0 and out.startswith("5 members")
    code, out, _ = run(capsys, "compatible", files["f1"], files["f1"], "--format", "json")
    assert sum(r["member"] for r in json.loads(out)) == 1
    code, out, _ = run(capsys, "compatible", files["g1"], files["g2"], "--candidate", files["g"])
    assert code == 1 and "not a member" in out
    code, out, _ = run(capsys, "compatible", files["f1"], files["f2"], "--all")
    assert code == 0


def test_compatible_bound(capsys, files):
    code, _, err = run(capsys, "compatible", files["c1"], files["c2"])
    assert code == 2 and "--necessary-only" in err
    code, _, err = run(capsys, "compatible", files["c1"], files["c2"], "--candidate", files["c"])
    assert code == 2
    code, out, _ = run(
        capsys, "compatible", files["c1"], files["c2"], "--candidate", files["c"], "--necessary-only", "--format", "json"
    )
    assert code == 0 and json.loads(out)["passes_necessary"] is True


def test_distance_permute_random_enumerate(capsys, files):
    code, out, _ = run(capsys, "distance", files["w1"], files["w2"])
    assert code == 0 and float(out) == pytest.approx(3.2)
    code, out, _ = run(capsys, "permute", files["w2b"], "2,3,1,4", "--format", "json")
    assert json.loads(out)["coords"] == pytest.approx([0.4, 0.8, 2, 0.8, 2, 2])
    code, _, err = run(capsys, "permute", files["w2b"], "1,2,3")
    assert code == 2
    code, a, _ = run(capsys, "random", "6", "--seed", "3")
    _, b, _ = run(capsys, "random", "6", "--seed", "3")
    assert code == 0 and a == b and parse_newick(a).leaf_count == 6
    code, out, _ = run(capsys, "enumerate", "4")
    assert code == 0 and out.startswith("15 topologies")
    code, out, _ = run(capsys, "enumerate", "4", "--all", "--format", "json")
    assert len(json.loads(out)) == 26
    code, _, _ = run(capsys, "enumerate", "12")
    assert code == 2


def test_json_outputs_roundtrip(capsys, files):
    _, out, _ = run(capsys, "random", "5", "--seed", "1", "--format", "json")
    w = PairVector.from_json(json.loads(out))
    _, out, _ = run(capsys, "enumerate", "5", "--format", "json")
    assert all(Topology.from_json(d) for d in json.loads(out))
    _, out, _ = run(capsys, "segment", files["w1"], files["w2"], "--format", "json")
    data = json.loads(out)
    seg = tropical_segment(PairVector.from_json(data["from"]), PairVector.from_json(data["to"]))
    assert seg.lambdas.tolist() == pytest.approx(data["lambdas"])
    assert w.leaf_count == 5


def test_repro(capsys):
    code, out, _ = run(capsys, "repro")
    assert code == 0 and "FAIL" not in out


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2
    code, _, err = run(capsys, "enumerate", "4", "--tol", "0")
    assert code == 2 and "positive" in err
    with pytest.raises(InputError):
        RunConfig(output_format="xml")


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "troptree.cli", "enumerate", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("3 topologies")

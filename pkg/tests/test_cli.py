import json
import subprocess
import sys

import pytest

from polarfloer import io
from polarfloer.complexes import FreeComplex
from polarfloer.equivariant import finite_type_block
from polarfloer.generate import trn_equivariant_dataset
from polarfloer.morse_km import canonical_trn_dataset
from polarfloer.rings import GF2
from polarfloer.twisted import TrajectoryClass, TwistedDataset


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "polarfloer.cli", *args], capture_output=True, text=True
    )


def machine_section(stdout: str) -> dict:
    return json.loads(stdout.split("\n---\n", 1)[1])


def test_round_trip_canonical_files(tmp_path):
    objs = [
        canonical_trn_dataset(2),
        trn_equivariant_dataset(2),
        finite_type_block("Binfty", 3),
        TwistedDataset(
            [("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 1, 1, 0)], grading={"a": 1, "b": 0}
        ),
        FreeComplex(GF2, ["p", "q"], [[0, 0], [1, 0]], grading=[0, 1]),
    ]
    for obj in objs:
        text = io.emit_dataset(obj)
        path = tmp_path / "ds.json"
        path.write_text(text)
        kind, parsed = io.parse_dataset(str(path))
        assert io.emit_dataset(parsed) == text


def test_parse_canonical_trn_file():
    kind, ds = io.parse_dataset("datasets/trn2_km.json")
    assert kind == "km"
    assert len(ds.o_labels) == 2  # n = 2


def test_empty_generator_list_valid(tmp_path):
    doc = {"format_version": 1, "kind": "floer", "generators": [], "differential": []}
    p = tmp_path / "empty.json"
    p.write_text(json.dumps(doc))
    kind, ds = io.parse_dataset(str(p))
    assert kind == "floer" and ds.n == 0


def test_dangling_label_schema_error(tmp_path):
    doc = {
        "format_version": 1,
        "kind": "floer",
        "generators": [{"label": "a"}],
        "differential": [["a", "ghost", "1"]],
    }
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(io.SchemaError, match="ghost"):
        io.parse_dataset(str(p))


def test_cli_validate_ok():
    r = run_cli("validate", "datasets/trn2_km.json")
    assert r.returncode == 0
    assert machine_section(r.stdout)["ok"] is True


def test_cli_validate_relation_failure(tmp_path):
    doc = {
        "format_version": 1,
        "kind": "km",
        "interior": [{"label": "a"}, {"label": "b"}, {"label": "c"}],
        "stable": [],
        "unstable": [],
        "matrices": {"d_oo": [["b", "a", "1"], ["c", "b", "1"]]},
    }
    p = tmp_path / "bad_km.json"
    p.write_text(json.dumps(doc))
    r = run_cli("validate", str(p))
    assert r.returncode == 1


def test_cli_schema_error_exit_code(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    r = run_cli("validate", str(p))
    assert r.returncode == 2


def test_cli_localize_canonical():
    r = run_cli("localize", "datasets/trn2_equivariant.json")
    assert r.returncode == 0
    m = machine_section(r.stdout)
    assert m["hat_localized_zero"] is True
    assert m["check_localized_rank"] == m["bar_localized_rank"] == 1


def test_cli_blocks_emits_dataset(tmp_path):
    out = tmp_path / "binf.json"
    r = run_cli("blocks", "Binfty", "--window", "5", "--out", str(out))
    assert r.returncode == 0
    kind, ds = io.parse_dataset(str(out))
    assert kind == "z2complex" and ds.n == 11


def test_cli_reports_deterministic():
    r1 = run_cli("km", "datasets/trn2_km.json")
    r2 = run_cli("km", "datasets/trn2_km.json")
    assert r1.stdout == r2.stdout
    assert machine_section(r1.stdout) == machine_section(r2.stdout)


def test_cli_twisted_and_steenrod():
    r = run_cli("twisted", "datasets/twisted_sample.json")
    assert r.returncode == 0
    m = machine_section(r.stdout)
    assert m["t_invertible"] is True
    r2 = run_cli("steenrod", "datasets/floer_sample.json")
    assert r2.returncode == 0
    assert machine_section(r2.stdout)["iso"] is True


def test_cli_smith_and_ss_compare():
    r = run_cli("smith", "datasets/floer_sample.json")
    assert r.returncode == 0
    m = machine_section(r.stdout)
    assert m["dim_upstairs"] >= m["rank_twisted"]
    r2 = run_cli("ss-compare", "--truncate", "5", "datasets/trn2_equivariant.json")
    assert r2.returncode == 0
    assert machine_section(r2.stdout)["tower_maps_ok"] is True


def test_cli_porteous_and_kunneth():
    r = run_cli("porteous", "--sw-class", "1+t", "--n", "4", "--pairing", "1")
    assert r.returncode == 0
    m = machine_section(r.stdout)
    assert m["coefficient"] == 1
    assert m["homology"]["free_rank"] == 0
    r2 = run_cli("kunneth", "--shift", "3")
    assert r2.returncode == 0
    assert machine_section(r2.stdout)["iso"] is True


def test_cli_wrong_kind_rejected():
    r = run_cli("km", "datasets/floer_sample.json")
    assert r.returncode == 1

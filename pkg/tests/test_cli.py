import json
import re

import pytest

from zolab.cli import main
from zolab.hypercore import Hypergraph, parse_shg, write_shg


@pytest.fixture()
def shg_files(tmp_path):
    edge = tmp_path / "edge.shg"
    write_shg(str(edge), Hypergraph.make(3, range(1, 4), [(1, 2, 3)]))
    h1 = tmp_path / "h1.shg"
    write_shg(str(h1), Hypergraph.make(3, range(1, 5), [(1, 2, 3), (3, 4, 1)]))
    h2 = tmp_path / "h2.shg"
    write_shg(str(h2), Hypergraph.make(3, range(1, 7),
                                       [(1, 2, 3), (3, 4, 5), (5, 6, 1)]))
    bare = tmp_path / "bare.shg"
    write_shg(str(bare), Hypergraph.make(3, range(1, 4), []))
    vertex = tmp_path / "vertex.shg"
    vertex.write_text("s 3 n 1\n")
    return {"edge": str(edge), "h1": str(h1), "h2": str(h2),
            "bare": str(bare), "vertex": str(vertex), "dir": tmp_path}


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])


def test_density_golden(shg_files, capsys):
    code, payload = run_json(capsys, ["density", shg_files["edge"]])
    assert code == 0
    assert payload == {"num": 1, "den": 3}


def test_balance(shg_files, capsys):
    code, payload = run_json(capsys, ["balance", shg_files["h1"]])
    assert code == 0
    assert payload["strictly_balanced"] is True
    assert payload["max_density"] == {"num": 1, "den": 2}


def test_bounds_max_candidates(capsys):
    code, payload = run_json(capsys, ["bounds", "--s", "3", "--k", "5",
                                      "--max-candidates"])
    assert code == 0
    assert payload["max_candidates"] == [{"num": 25, "den": 13},
                                         {"num": 27, "den": 14}]


def test_bounds_table_and_qk(capsys):
    code, payload = run_json(capsys, ["bounds", "--s", "3", "--k", "10", "--table"])
    assert code == 0
    assert any(r["theorem"] == "theorem6" and r["value_num"] == 15
               and r["value_den"] == 8 for r in payload["rows"])
    code, payload = run_json(capsys, ["bounds", "--s", "3", "--k", "5",
                                      "--qk", "31/16"])
    assert code == 0 and payload["in_qk"] is True


def test_game_with_formula(shg_files, capsys):
    code, payload = run_json(capsys, ["game", "--left", shg_files["edge"],
                                      "--right", shg_files["bare"],
                                      "--rounds", "3", "--formula"])
    assert code == 0
    assert payload["winner"] == "spoiler"
    assert payload["formula_verified"] is True
    assert "rules" in payload
    code, payload = run_json(capsys, ["game", "--left", shg_files["h1"],
                                      "--right", shg_files["h1"], "--rounds", "2"])
    assert payload["winner"] == "duplicator"


def test_parse_depth_eval(shg_files, capsys):
    code, payload = run_json(capsys, ["parse", "exists x exists y exists z N(x,y,z)"])
    assert code == 0 and payload["depth"] == 3 and payload["free"] == []
    code, payload = run_json(capsys, ["depth", "N(x,y,z) & x = y"])
    assert payload["depth"] == 0
    code, payload = run_json(capsys, ["eval", "--formula",
                                      "exists a exists b exists c N(a,b,c)",
                                      "--host", shg_files["edge"]])
    assert payload["value"] is True
    code, payload = run_json(capsys, ["eval", "--formula", "x = y",
                                      "--host", shg_files["edge"],
                                      "--assign", "x=1", "--assign", "y=1"])
    assert payload["value"] is True


def test_distance_cmd(shg_files, capsys):
    code, payload = run_json(capsys, ["distance", shg_files["h1"], "2", "4"])
    assert payload == {"schema": 1, "distance": 2, "connected": True}


def test_copies_cmd(shg_files, capsys):
    code, payload = run_json(capsys, ["copies", "--motif", shg_files["edge"],
                                      "--host", shg_files["h2"]])
    assert payload["copies"] == 3


def test_classify_pair_cmd(shg_files, capsys):
    code, payload = run_json(capsys, [
        "classify-pair", "--outer", shg_files["edge"],
        "--inner", shg_files["vertex"], "--alpha", "7/4"])
    assert code == 0
    assert payload["class"] == "safe"
    assert payload["f_alpha"] == {"num": 1, "den": 4}


def test_cyclic_and_decompose(shg_files, capsys):
    two = shg_files["dir"] / "pair_inner.shg"
    two.write_text("s 3 n 2\n")
    code, payload = run_json(capsys, ["cyclic", "--outer", shg_files["edge"],
                                      "--inner", str(two), "--m", "2"])
    assert payload["match"]["kind"] == "second_type_edge"
    code, payload = run_json(capsys, ["decompose", shg_files["h2"],
                                      "--m", "3", "--root", "1"])
    assert payload["decomposition"] is not None
    assert len(payload["decomposition"]) == 2


def test_construct_commands(shg_files, capsys, tmp_path):
    out = tmp_path / "w.shg"
    code, payload = run_json(capsys, ["construct", "theorem8", "--s", "3",
                                      "--k", "4", "--out", str(out)])
    assert code == 0
    assert payload["alpha"] == {"num": 9, "den": 5}
    g = parse_shg(out.read_text())
    assert g.num_vertices == 9 and g.num_edges == 5
    code, payload = run_json(capsys, ["construct", "theorem6", "--s", "3",
                                      "--l", "1", "--m", "2"])
    assert payload["alpha"] == {"num": 7, "den": 4}
    assert payload["h"]["density"] == {"num": 4, "den": 7}


def test_sample_scan_probe(shg_files, capsys, tmp_path):
    code, payload = run_json(capsys, ["sample", "--s", "3", "--n", "10",
                                      "--p", "0.2", "--seed", "4",
                                      "--out", str(tmp_path / "g.shg")])
    assert code == 0
    g = parse_shg((tmp_path / "g.shg").read_text())
    assert g.num_vertices == 10 and g.num_edges == payload["edges"]

    code, payload = run_json(capsys, ["scan", "--s", "3", "--n", "20",
                                      "--p", "0.3", "--trials", "10",
                                      "--seed", "3", "--motif", shg_files["edge"]])
    assert code == 0
    assert payload["estimates"]["probability"] == 1.0

    csv_path = tmp_path / "probe.csv"
    code, payload = run_json(capsys, ["probe", "--s", "3",
                                      "--alpha-grid", "3/2,5/2", "--n-grid", "20,30",
                                      "--trials", "5", "--seed", "2",
                                      "--motif", shg_files["h1"],
                                      "--csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "alpha,n,estimate,lo,hi,flagged"
    assert len(lines) == 5


def test_poisson_prop1_cmds(shg_files, capsys, tmp_path):
    code, payload = run_json(capsys, ["poisson", "--s", "3", "--n", "30",
                                      "--trials", "20", "--seed", "6",
                                      "--motif", shg_files["edge"]])
    assert code == 0
    assert payload["tv_distance"] is not None

    from zolab.constructions import theorem6_pair
    w = theorem6_pair(3, 1, 2)
    outer = tmp_path / "outer.shg"
    inner = tmp_path / "inner.shg"
    write_shg(str(outer), w.g)
    write_shg(str(inner), w.h)
    code, payload = run_json(capsys, ["prop1", "--outer", str(outer),
                                      "--inner", str(inner), "--s", "3",
                                      "--n", "40", "--alpha", "7/4",
                                      "--trials", "10", "--seed", "6"])
    assert code == 0
    assert payload["extra"]["a"] == 48


def test_exit_codes(shg_files, capsys, tmp_path):
    big = tmp_path / "big.shg"
    write_shg(str(big), Hypergraph.make(3, range(1, 31), []))
    assert main(["balance", str(big)]) == 3          # capacity
    assert main(["density", str(tmp_path / "nope.shg")]) == 2  # usage
    assert main(["eval", "--formula", "x = ", "--host", shg_files["edge"]]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["balance"])  # argparse usage error
    assert exc.value.code == 2


def test_env_var_default_seed(shg_files, capsys, monkeypatch):
    monkeypatch.setenv("ZOLAB_SEED", "77")
    code, payload = run_json(capsys, ["scan", "--s", "3", "--n", "12",
                                      "--p", "0.1", "--trials", "4",
                                      "--motif", shg_files["edge"]])
    assert code == 0 and payload["config"]["seed"] == 77
    code, payload = run_json(capsys, ["scan", "--s", "3", "--n", "12",
                                      "--p", "0.1", "--trials", "4", "--seed", "5",
                                      "--motif", shg_files["edge"]])
    assert payload["config"]["seed"] == 5
    assert payload["config"]["property"].startswith("motif:")


def test_determinism_of_reports(shg_files, capsys):
    argv = ["scan", "--s", "3", "--n", "15", "--p", "0.1", "--trials", "8",
            "--seed", "11", "--motif", shg_files["edge"]]
    main(argv)
    out1 = capsys.readouterr().out
    main(argv)
    out2 = capsys.readouterr().out
    strip = lambda t: re.sub(r'"wall_time_s": [0-9.e-]+', '"wall_time_s": 0', t)
    assert strip(out1) == strip(out2)

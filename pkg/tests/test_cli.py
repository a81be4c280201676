import json

import pytest

from immersionkit import serialize as ser
from immersionkit.cli import main
from immersionkit.multigraph import Multigraph, complete_graph, gen_P


def run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main(["--no-timing", "--out", str(out), *args])
    text = out.read_text()
    return code, (json.loads(text) if text.lstrip().startswith("{") else text), out


def write_graph(tmp_path, g, name):
    p = tmp_path / name
    p.write_text(ser.emit_graph(g))
    return str(p)


def verified(tmp_path, report_path):
    code, rep, _ = run(tmp_path, "verify", "--cert", str(report_path), name="verify.json")
    return code == 0 and rep["verdict"] == "accepted"


def test_gen_outputs(tmp_path):
    code, doc, _ = run(tmp_path, "gen", "P", "3", "4")
    assert code == 0
    g = ser.doc_to_graph(doc)
    assert (g.vertex_count, g.edge_count) == (4, 9)
    code, dot, _ = run(tmp_path, "gen", "S", "3", "3", "--dot")
    assert dot.startswith('graph "S_3,3"') and dot.count("--") == 9
    code, doc, _ = run(tmp_path, "gen", "random", "5", "6", "8", "2")
    assert ser.doc_to_graph(doc).edge_count == 8


def test_round_trip_of_graph_document():
    g = Multigraph(3, ((2, 0), (0, 1), (1, 0)), "tri")
    back = ser.parse_graph(ser.emit_graph(g))
    assert back == ser.canonical(g)
    assert back.name == "tri"


def test_loop_is_reported_with_position(tmp_path):
    text = '{\n  "format": "immersionkit-graph",\n  "version": 1,\n  "vertex_count": 2,\n  "edges": [[0, 1], [1, 1]]\n}\n'
    with pytest.raises(ser.DocumentError) as info:
        ser.parse_graph(text)
    assert info.value.line == 5 and info.value.column == 21
    p = tmp_path / "loop.json"
    p.write_text(text)
    code, rep, _ = run(tmp_path, "tcw", "--graph", str(p))
    assert code == 2 and "line 5" in rep["result"]["error"]


def test_bad_json_and_missing_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ nope")
    assert run(tmp_path, "tcw", "--graph", str(p))[0] == 2
    assert run(tmp_path, "tcw", "--graph", str(tmp_path / "missing.json"))[0] == 2


def test_immerse_yes_no_and_budget(tmp_path):
    host = write_graph(tmp_path, gen_P(2, 3), "host.json")
    pat = write_graph(tmp_path, complete_graph(3), "k3.json")
    code, rep, out = run(tmp_path, "immerse", "--host", host, "--pattern", pat)
    assert code == 0 and rep["verdict"] == "yes" and verified(tmp_path, out)
    code, rep, _ = run(tmp_path, "immerse", "--host", host, "--pattern", pat, "--mode", "strong")
    assert code == 1 and rep["certificate"] is None
    big = write_graph(tmp_path, gen_P(3, 6), "p36.json")
    k4 = write_graph(tmp_path, complete_graph(4), "k4.json")
    code, rep, _ = run(tmp_path, "immerse", "--host", big, "--pattern", k4, "--budget", "3")
    assert code == 3 and rep["verdict"] == "budget_exceeded"


def test_spider_and_obstruction(tmp_path):
    g = write_graph(tmp_path, gen_P(3, 4), "g.json")
    code, rep, out = run(tmp_path, "spider", "--graph", g, "--x", "0", "--k", "3")
    assert code == 0 and rep["result"]["body"] == 1 and verified(tmp_path, out)
    code, rep, out = run(tmp_path, "spider", "--graph", g, "--x", "0", "--k", "4", "--certify")
    assert code == 1 and rep["certificate"]["kind"] == "spider_obstruction" and verified(tmp_path, out)


def test_pack(tmp_path):
    g = write_graph(tmp_path, gen_P(3, 4), "g.json")
    code, rep, out = run(tmp_path, "pack", "--graph", g, "--x", "0", "--k", "3", "--t", "2")
    assert code == 0 and rep["verdict"] == "hitting_set" and verified(tmp_path, out)


def test_tcw_and_hopwidth(tmp_path):
    g = write_graph(tmp_path, gen_P(3, 5), "g.json")
    code, rep, out = run(tmp_path, "tcw", "--graph", g)
    assert rep["result"] == {"lower": 3, "upper": 3, "exact": True} and verified(tmp_path, out)
    code, rep, out = run(tmp_path, "hopwidth", "--graph", g)
    assert rep["result"] == {"width": 0, "minimum": True} and verified(tmp_path, out)
    code, rep, out = run(tmp_path, "hopwidth", "--graph", g, "--order", "0,2,1,3,4")
    assert rep["result"]["width"] == 3 and verified(tmp_path, out)
    code, rep, _ = run(tmp_path, "hopwidth", "--graph", g, "--order", "0,1")
    assert code == 2


def test_tangle_commands(tmp_path):
    g = write_graph(tmp_path, complete_graph(5), "k5.json")
    code, rep, tangle = run(tmp_path, "tangle", "induce", "--graph", g, "--model", "0;1;2;3;4", "--k", "3", name="t.json")
    assert code == 0 and verified(tmp_path, tangle)
    code, rep, _ = run(tmp_path, "tangle", "check", "--cert", str(tangle))
    assert code == 0 and rep["verdict"] == "yes"
    code, rep, out = run(tmp_path, "tangle", "minus", "--cert", str(tangle), "--z", "4")
    assert code == 0 and rep["result"]["order"] == 2 and verified(tmp_path, out)
    code, rep, out = run(tmp_path, "tangle", "free", "--cert", str(tangle), "--x", "0,1")
    assert code == 0 and rep["result"]["free"] and verified(tmp_path, out)
    code, rep, _ = run(tmp_path, "tangle", "--edge-cap", "5", "induce", "--graph", g, "--model", "0;1;2;3;4", "--k", "3")
    assert code == 3


def test_tangle_free_negative(tmp_path):
    # K_4 with a pendant vertex: {4, 3} sits on the small side of the order-1 cut at 3
    g = Multigraph(5, tuple(complete_graph(4).edges) + ((3, 4),))
    path = write_graph(tmp_path, g, "g.json")
    code, _, tangle = run(tmp_path, "tangle", "induce", "--graph", path, "--model", "0;1;2;3", "--k", "2", name="t.json")
    assert code == 0
    code, rep, out = run(tmp_path, "tangle", "free", "--cert", str(tangle), "--x", "3,4")
    assert code == 1 and not rep["result"]["free"] and verified(tmp_path, out)


def test_structure_commands(tmp_path):
    g = write_graph(tmp_path, gen_P(3, 8), "g.json")
    code, rep, out = run(tmp_path, "structure", "search", "--graph", g, "--threshold", "3", "--bounds", "1,1,1,0", name="cert.json")
    assert code == 0 and verified(tmp_path, out)
    code, rep, _ = run(tmp_path, "structure", "verify", "--cert", str(out))
    assert code == 0 and rep["result"]["first_violation"] is None
    doc = json.loads(out.read_text())["certificate"]
    doc["bounds"]["hop_max"] = -1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, rep, _ = run(tmp_path, "structure", "verify", "--cert", str(bad))
    assert code == 1 and rep["result"]["first_violation"] == "4"
    assert run(tmp_path, "structure", "search", "--graph", g, "--threshold", "3", "--bounds", "1,1")[0] == 2


def test_verify_rejects_tampered_and_mismatched(tmp_path):
    g = write_graph(tmp_path, gen_P(3, 4), "g.json")
    _, rep, out = run(tmp_path, "spider", "--graph", g, "--x", "0", "--k", "3")
    cert = rep["certificate"]
    cert["spider"]["legs"][1] = cert["spider"]["legs"][0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    code, rep, _ = run(tmp_path, "verify", "--cert", str(bad))
    assert code == 1 and rep["verdict"] == "rejected"
    other = write_graph(tmp_path, gen_P(3, 5), "other.json")
    assert run(tmp_path, "verify", "--cert", str(out), "--graph", other)[0] == 2


def test_reports_are_byte_identical(tmp_path):
    args = ["gen", "random", "11", "7", "12", "2"]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["--out", str(a), *args])
    main(["--out", str(b), *args])
    assert a.read_bytes() == b.read_bytes()
    g = str(a)
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    main(["--no-timing", "--out", str(r1), "tcw", "--graph", g])
    main(["--no-timing", "--out", str(r2), "tcw", "--graph", g])
    assert r1.read_bytes() == r2.read_bytes()


def test_timing_present_by_default(tmp_path):
    out = tmp_path / "t.json"
    main(["--out", str(out), "tcw", "--graph", write_graph(tmp_path, gen_P(1, 3), "g.json")])
    rep = json.loads(out.read_text())
    assert "seconds" in rep["timing"]
    assert rep["command"][0] == "tcw"


def test_documented_examples(tmp_path):
    host = write_graph(tmp_path, gen_P(3, 4), "p34.json")
    k3 = write_graph(tmp_path, complete_graph(3), "k3.json")
    code, rep, _ = run(tmp_path, "immerse", "--host", host, "--pattern", k3, "--mode", "strong")
    assert code == 1 and rep["verdict"] == "no" and rep["seed"] is None
    code, rep, _ = run(tmp_path, "tcw", "--graph", write_graph(tmp_path, gen_P(4, 2), "p42.json"))
    assert (rep["result"]["lower"], rep["result"]["upper"]) == (2, 2)
    code, rep, _ = run(tmp_path, "hopwidth", "--graph", write_graph(tmp_path, gen_P(3, 6), "p36.json"))
    assert rep["result"]["width"] == 0
    code, doc, _ = run(tmp_path, "gen", "P", "3", "4")
    assert len(doc["edges"]) == 9

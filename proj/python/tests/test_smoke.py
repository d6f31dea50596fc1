import json
import math

import pytest

import flowrecom as fr


def cell(r, c):
    return f"r{r}c{c}"


def grid(rows, cols, flow=lambda a, b: 1.0):
    nodes = [
        fr.UnitNode(cell(r, c), 10, 8, 10 + (7 * r + 3 * c) % 5, 10 + (3 * r + 5 * c) % 7 + 1 / 1024, 1.0, 4.0)
        for r in range(rows)
        for c in range(cols)
    ]
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((cell(r, c), cell(r, c + 1), 1.0))
            if r + 1 < rows:
                edges.append((cell(r, c), cell(r + 1, c), 1.0))
    flows = fr.FlowMatrix()
    for a in nodes:
        for b in nodes:
            w = flow(a.id, b.id)
            if w:
                flows.add(a.id, b.id, w)
    return fr.build_graph(nodes, edges, flows)


def worked_example():
    ids = [cell(r, c) for r in range(2) for c in range(4)]
    district = {"r0c0": 1, "r0c1": 1, "r0c2": 2, "r0c3": 2, "r1c0": 3, "r1c1": 3, "r1c2": 4, "r1c3": 4}
    intra = {1: 7, 2: 9, 3: 11, 4: 13}
    inter = iter([1, 1, 1, 4, 4, 2, 3, 3, 5, 2, 3, 3])
    flows = {}
    for d in range(1, 5):
        a, b = [u for u in ids if district[u] == d]
        flows[(a, b)] = intra[d]
    reps = {d: [u for u in ids if district[u] == d][0] for d in range(1, 5)}
    for x in range(1, 5):
        for y in range(1, 5):
            if x != y:
                flows[(reps[x], reps[y])] = next(inter)
    g = grid(2, 4, lambda a, b: flows.get((a, b), 0.0))
    return g, fr.Partition.from_map(g, district)


def test_worked_example_ratio():
    g, plan = worked_example()
    ir, intra, inter = fr.interaction_ratio(plan, g)
    assert (intra, inter) == (40.0, 32.0)
    assert ir == 1.25


def test_errors_carry_codes():
    g, _ = worked_example()
    with pytest.raises(fr.FlowrecomError) as info:
        fr.Partition.from_map(g, {"r0c0": 1})
    assert isinstance(info.value.code, str) and info.value.code
    with pytest.raises(fr.FlowrecomError) as info:
        fr.run_chain(g, fr.Partition.from_map(g, {u: 1 + (i % 4 >= 2) for i, u in enumerate(g.node_ids())}),
                     method="Nope", steps=1)
    assert info.value.code == "InvalidConfig"


def test_chain_is_deterministic_and_valid():
    g = grid(6, 6, lambda a, b: 2.0 if a[1] == b[1] else 0.5)
    seed = fr.Partition.from_assignment(g, [1 + (i // 6) // 3 * 2 + (i % 6) // 3 for i in range(36)])
    kwargs = dict(method="BiasedRST", bias=50, steps=200, seed=9, epsilon=0.2, compactness_multiplier=3,
                  record_assignments_every=10)
    a = fr.run_chain(g, seed, **kwargs)
    b = fr.run_chain(g, seed, **kwargs)
    assert json.dumps(a) == json.dumps(b)
    accepted = [r for r in a if r["accepted"]]
    assert len(accepted) == 201
    for r in accepted:
        if "assignment" in r:
            plan = fr.Partition.from_assignment(g, r["assignment"])
            assert fr.contiguous(plan, g)
            assert fr.interaction_ratio(plan, g)[0] == pytest.approx(r["metrics"]["ir"], rel=1e-12)


def test_analysis_helpers():
    assert fr.ks_two_sample([1, 2, 3], [1, 2, 3])[0] == 0.0
    assert fr.ks_two_sample([1, 2, 3], [7, 8, 9])[0] == 1.0
    assert fr.kolmogorov_survival(1.0) == pytest.approx(0.2699996716773545, abs=1e-12)
    s = fr.summarize([4, 1, 3, 2])
    assert (s["min"], s["max"], s["mean"], s["count"]) == (1, 4, 2.5, 4)
    assert fr.polsby_popper(1.0, 4.0) == pytest.approx(math.pi / 4)


def test_command_round_trip(tmp_path):
    g = grid(4, 4, lambda a, b: 1.0 + (a == b))
    (tmp_path / "nodes.csv").write_text(
        "id,population,voting_age_pop,votes_dem,votes_rep,area,perimeter\n"
        + "".join(f"{cell(r, c)},10,8,{10 + (r + c) % 3},{11 + (r * c) % 4 + 0.25},1,4\n"
                  for r in range(4) for c in range(4)))
    (tmp_path / "edges.csv").write_text("u,v,shared_perimeter\n" + "".join(f"{u},{v},1\n" for u, v, _, _ in g.edges()))
    (tmp_path / "flows.csv").write_text(
        "origin,destination,flow\n" + "".join(f"{a},{b},{w}\n" for (a, b), w in _flows(g).entries().items()))
    (tmp_path / "seed.csv").write_text(
        "unit_id,district\n" + "".join(f"{cell(r, c)},{1 + r // 2 * 2 + c // 2}\n" for r in range(4) for c in range(4)))
    features = [
        {"type": "Feature", "properties": {"id": cell(r, c)},
         "geometry": {"type": "Polygon", "coordinates": [[[c, r], [c + 1, r], [c + 1, r + 1], [c, r + 1], [c, r]]]}}
        for r in range(4) for c in range(4)
    ]
    (tmp_path / "units.geojson").write_text(json.dumps({"type": "FeatureCollection", "features": features}))
    (tmp_path / "run.json").write_text(json.dumps(
        {"method": "RST", "epsilon": 0.3, "steps": 50, "compactness_multiplier": 2, "seed": 3,
         "initial_plan": "seed.csv"}))

    digest = fr.ingest(tmp_path / "nodes.csv", tmp_path / "edges.csv", tmp_path / "data",
                       flow_matrices=[tmp_path / "flows.csv"])
    accepted, rejected, records = fr.run(tmp_path / "run.json", tmp_path / "data", tmp_path / "out")
    assert accepted == 50
    analysis = fr.analyze([("rst", records)], tmp_path / "analysis")
    assert analysis["dataset"] == digest
    manifest = fr.export_web(tmp_path / "data", [("seed", tmp_path / "seed.csv")], tmp_path / "units.geojson",
                             tmp_path / "bundle", analysis=tmp_path / "analysis" / "analysis.json")
    assert manifest["schema"] == "flowrecom-web-bundle/1"
    assert manifest["dataset"] == digest
    scored = fr.score(tmp_path / "data", tmp_path / "seed.csv")
    assert scored == json.loads((tmp_path / "bundle" / "metrics.json").read_text())["seed"]


def _flows(g):
    m = fr.FlowMatrix()
    for a in g.node_ids():
        for b in g.node_ids():
            m.add(a, b, 1.0 + (a == b))
    return m

import pytest

import prophet_sim as ps


def small_loop(unique=3000, reps=4, seed=1):
    spec = ps.TraceSpec()
    spec.unique_addrs = unique
    spec.repetitions = reps
    spec.seed = seed
    return ps.generate_trace(spec)


def small_config():
    cfg = ps.RunConfig()
    cfg.set("cache.total_size", "262144")
    return cfg


def test_generate_and_round_trip(tmp_path):
    t = small_loop()
    assert len(t) == 3000 * 4
    for fmt in ("binary", "text"):
        path = tmp_path / f"t.{fmt}"
        ps.save_trace(path, t, fmt)
        assert ps.load_trace(path) == t


def test_equations():
    assert ps.priority_level(0.30) == 1
    assert ps.priority_level(0.99) == 3
    assert not ps.insert_decision(0.0)
    d = ps.resize_decision(131072)
    assert (d.target_lines, d.metadata_ways, d.prefetcher_enabled) == (10923, 6, True)
    assert not ps.resize_decision(600).prefetcher_enabled
    assert ps.merge_pc(0.5, 0.7, 1, 8) == pytest.approx(0.6)
    assert ps.merge_pc(None, 0.7, 0) == 0.7
    assert ps.merge_app(1000, 2000) == 2000


def test_storage_table():
    rows = {r.structure: r for r in ps.storage_table()}
    assert rows["replacement_state"].kib == 48.0
    assert rows["hint_buffer"].bits == 1536
    assert rows["victim_buffer"].kib == 344.0
    assert "hint_buffer,128,12,1536,192,0.19" in ps.storage_table_csv()


def test_profile_learn_analyze_simulate():
    t = small_loop(6000, 6)
    cfg = small_config()
    counters = ps.profile(t, cfg.effective_profile())
    assert ps.CounterFile.loads(counters.dumps()) == counters
    temporal = [c for c in counters.pcs if c.pc == ps.GENERATOR_PCS["temporal"]][0]
    assert temporal.accuracy > 0.9

    store = ps.learn(ps.CounterStore(), counters)
    assert store.loop_l == 1
    assert ps.CounterStore.loads(store.dumps()).dumps() == store.dumps()

    manifest = ps.analyze(store, cfg.effective_analysis())
    assert ps.HintManifest.loads(manifest.dumps()) == manifest
    assert manifest.hints[0].hint.insert

    sim = cfg.sim
    sim.policy = "nopf"
    base = ps.simulate(t, sim)
    assert base.issued == 0
    sim.policy = "prophet"
    report = ps.simulate(t, sim, manifest)
    assert report.coverage > 0.5
    assert report.csv().startswith("run_id,policy,")


def test_pipeline_helper():
    manifest, reports = ps.pipeline(small_loop(6000, 4), small_config())
    assert set(reports) == {"nopf", "nofilter", "patternconf", "prophet"}
    assert reports["prophet"].coverage >= reports["nopf"].coverage


def test_errors_carry_kind(tmp_path):
    with pytest.raises(ps.ProphetError) as e:
        ps.load_trace(tmp_path / "missing.bin")
    assert e.value.kind == "io error"
    assert e.value.exit_code == 2
    with pytest.raises(ps.ProphetError) as e:
        ps.CounterStore.loads("PRFSTO02\n")
    assert e.value.exit_code == 3
    sim = ps.SimConfig()
    sim.policy = "prophet"
    with pytest.raises(ps.ProphetError):
        ps.simulate(small_loop(10, 2), sim)


def test_cli_entry_point(tmp_path):
    out = str(tmp_path / "t.bin")
    code, _, _ = ps.run_cli(["gen-trace", "--unique-addrs", "100", "--out", out])
    assert code == 0
    code, stdout, _ = ps.run_cli(["simulate", out, "--policy", "nofilter"])
    assert code == 0 and stdout.startswith("run_id,policy")
    code, _, err = ps.run_cli(["profile", str(tmp_path / "nope.bin"), "--out", out])
    assert code == 2 and "nope.bin" in err

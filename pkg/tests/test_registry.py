from DatabaseService import DatabaseService, ScenarioRun, get_registry, registry_url


def test_registry_url(tmp_path):
    assert registry_url(tmp_path / "runs") == f"sqlite:///{(tmp_path / 'runs' / 'runs.db').as_posix()}"
    assert (tmp_path / "runs").is_dir()


def test_run_lifecycle(tmp_path):
    registry = get_registry(tmp_path)
    run = registry.start("abc123", "sweep", lam=0.1, label="two_level.toml", output_dir="out/abc123")
    assert run.id is not None
    assert registry.completed("abc123", "sweep") is None
    assert [r.status for r in registry.runs("running")] == ["running"]

    registry.finish(run, 1, markov_error_sup=0.02, exponent=-2.9)
    completed = registry.completed("abc123", "sweep")
    assert completed.exit_code == 1
    assert completed.markov_error_sup == 0.02
    assert registry.completed("abc123", "simulate") is None


def test_failed_runs_are_not_completed(tmp_path):
    registry = get_registry(tmp_path)
    run = registry.start("def456", "sweep", lam=0.2)
    registry.finish(run, 3, message="eigendecomposition failed")
    assert registry.completed("def456", "sweep") is None
    failed = registry.runs("failed")
    assert len(failed) == 1 and failed[0].message == "eigendecomposition failed"


def test_records_and_delete(tmp_path):
    registry = get_registry(tmp_path)
    for index in range(3):
        registry.start(f"h{index}", "simulate")
    assert len(registry.get(ScenarioRun, {"command": "simulate"}, limit=2)) == 2
    assert registry.delete(ScenarioRun, {"scenario_hash": "h0"}) == 1
    remaining = registry.runs()
    assert sorted(run.scenario_hash for run in remaining) == ["h1", "h2"]
    assert set(remaining[0].to_dict()) >= {"id", "scenario_hash", "created_date", "status"}


def test_close_releases_engine(tmp_path):
    registry = get_registry(tmp_path)
    registry.start("abc123", "sweep")
    url = registry_url(tmp_path)
    assert url in DatabaseService.ENGINES
    registry.close()
    assert url not in DatabaseService.ENGINES
    assert [run.scenario_hash for run in get_registry(tmp_path).runs()] == ["abc123"]

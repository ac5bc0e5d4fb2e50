from kbdebug.bench import (
    ADVERSARIAL,
    FAITHFUL,
    chain_clash_kb,
    random_kb,
    run_benchmark,
)

from .conftest import FIXTURES

KB = str(FIXTURES / "university.kb")


def _cfg(instances, **kw):
    cfg = {"instances": instances, "strategies": ["split", "entropy", "rio"],
           "c": 0.4, "c_min": 0.0, "c_max": 0.5, "epsilon": 0.25,
           "stop": "singleton", "timing": False}
    cfg.update(kw)
    return cfg


def test_worked_example_query_counts():
    rows, report = run_benchmark(_cfg([
        {"label": "target-d2", "kb": KB, "target": ["ax2"]},
        {"label": "target-d6", "kb": KB, "target": ["ax6"]},
    ]))
    counts = {(r.instance, r.strategy): r.queries for r in rows}
    assert counts[("target-d2", "split")] == 3
    assert counts[("target-d2", "entropy")] == 4
    assert counts[("target-d2", "rio")] == 3
    assert counts[("target-d6", "entropy")] == 2
    assert counts[("target-d6", "split")] == 3
    assert all(r.target_found for r in rows)
    assert "aggregate" in report and "comparison" in report


def test_alignment_instance_with_reference():
    rows, _ = run_benchmark(_cfg([{
        "label": "aligned",
        "kb1": str(FIXTURES / "uni1.kb"),
        "kb2": str(FIXTURES / "uni2.kb"),
        "mapping": str(FIXTURES / "uni_mapping.csv"),
        "reference": str(FIXTURES / "uni_reference.csv"),
    }], strategies=["entropy"]))
    (row,) = rows
    assert row.target_found and not row.error


def test_synthetic_instance_runs():
    rows, _ = run_benchmark(_cfg([{
        "label": "chains",
        "synthetic": {"seed": 7, "groups": 3, "total_axioms": 30},
    }], strategies=["rio"], stop="threshold"))
    (row,) = rows
    assert not row.error
    assert row.queries is not None and row.queries >= 1


def test_csv_deterministic_without_timing():
    cfg = _cfg([
        {"label": "target-d2", "kb": KB, "target": ["ax2"]},
        {"label": "chains", "synthetic": {"seed": 3, "groups": 2, "total_axioms": 20}},
    ])
    _, first = run_benchmark(cfg)
    _, second = run_benchmark(cfg)
    assert first == second


def test_per_instance_errors_do_not_abort_the_run():
    rows, report = run_benchmark(_cfg([
        {"label": "missing", "kb": str(FIXTURES / "no-such-file.kb"), "target": ["ax1"]},
        {"label": "target-d6", "kb": KB, "target": ["ax6"]},
    ], strategies=["entropy"]))
    by_label = {r.instance: r for r in rows}
    assert by_label["missing"].error
    assert by_label["target-d6"].queries == 2
    assert "missing" in report


class TestChainClashGenerator:
    def test_structure_and_determinism(self):
        dpi_a, target_a = chain_clash_kb(seed=5, groups=3, total_axioms=100)
        dpi_b, target_b = chain_clash_kb(seed=5, groups=3, total_axioms=100)
        assert target_a == target_b
        assert dpi_a.kb.serialize() == dpi_b.kb.serialize()
        assert len(dpi_a.kb.candidate_ids) == 100
        assert len(target_a) == 3  # one axiom per clash group

    def test_prior_modes(self):
        faithful, target = chain_clash_kb(seed=5, prior_mode=FAITHFUL)
        adversarial, _ = chain_clash_kb(seed=5, prior_mode=ADVERSARIAL)
        t = next(iter(target))
        assert faithful.kb.by_id[t].explicit_prior > 0.1
        assert adversarial.kb.by_id[t].explicit_prior < 0.1

    def test_planted_target_is_a_diagnosis(self):
        from kbdebug.diagnosis import DiagnosisEngine

        dpi, target = chain_clash_kb(seed=11, groups=2, total_axioms=20)
        engine = DiagnosisEngine(dpi)
        assert engine.is_diagnosis(target)


class TestRandomKb:
    def test_deterministic_per_seed(self):
        a = random_kb(12)
        b = random_kb(12)
        if a is None:
            assert b is None
        else:
            assert a.kb.serialize() == b.kb.serialize()

    def test_yields_enough_instances(self):
        good = sum(1 for seed in range(300) if random_kb(seed) is not None)
        assert good >= 50

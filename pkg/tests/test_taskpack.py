import json
import shutil

import pytest

from gateforge.metrics import TierVerdict, classify_tier
from gateforge.taskpack import (
    BenchmarkReport,
    ReferenceMismatchError,
    TaskReportRow,
    TaskSchemaError,
    builtin_task_dir,
    builtin_task_packs,
    discover_task_packs,
    emit_report,
    load_report,
    load_task_pack,
    verify_reference,
)


def builtin(task_id: str):
    return load_task_pack(f"{builtin_task_dir()}/{task_id}")


def copy_pack(task_id: str, tmp_path, mutate_meta=None, mutate_tb=None):
    src = f"{builtin_task_dir()}/{task_id}"
    dst = tmp_path / task_id
    shutil.copytree(src, dst)
    if mutate_meta:
        meta = json.loads((dst / "task.json").read_text())
        mutate_meta(meta)
        (dst / "task.json").write_text(json.dumps(meta))
    if mutate_tb:
        tb = json.loads((dst / "testbench.json").read_text())
        mutate_tb(tb)
        (dst / "testbench.json").write_text(json.dumps(tb))
    return dst


def test_seed_full_adder_pack_loads():
    t = builtin("full_adder")
    assert t.difficulty == "medium"
    assert t.circuit_class == "combinational"
    assert len(t.testbench.vectors) == 8
    assert t.reference.gate_count == 5
    assert t.reference_sei() == pytest.approx(1 / 8)


def test_seed_set_spans_difficulties_and_classes():
    packs = builtin_task_packs()
    assert len(packs) >= 9
    assert {t.difficulty for t in packs} == {"easy", "medium", "hard"}
    assert {t.circuit_class for t in packs} == {"combinational", "sequential"}
    hard_ids = {t.id for t in packs if t.difficulty == "hard"}
    assert {"seq101", "adder4"} <= hard_ids
    for t in packs:
        if t.difficulty == "easy":
            assert 2 <= t.reference.gate_count <= 4


def test_every_seed_reference_verifies():
    for t in builtin_task_packs():
        result = verify_reference(t)
        assert result.correctness == 1.0
        assert result.gate_count == t.reference.gate_count
        assert result.delay == t.reference.delay


def test_unknown_port_in_vector_is_a_schema_violation(tmp_path):
    path = copy_pack("xnor2", tmp_path,
                     mutate_tb=lambda tb: tb["vectors"][0]["inputs"]
                     .update({"ghost": 1}))
    with pytest.raises(TaskSchemaError, match="unknown port bit 'ghost'"):
        load_task_pack(path)


def test_clock_on_combinational_task_is_a_schema_violation(tmp_path):
    path = copy_pack("xnor2", tmp_path,
                     mutate_meta=lambda m: m.update({"clock": "a"}))
    with pytest.raises(TaskSchemaError, match="clock"):
        load_task_pack(path)


def test_sequential_task_requires_a_clock(tmp_path):
    path = copy_pack("counter2", tmp_path,
                     mutate_meta=lambda m: m.update({"clock": None}))
    with pytest.raises(TaskSchemaError, match="clock"):
        load_task_pack(path)


def test_schema_version_is_checked(tmp_path):
    path = copy_pack("xnor2", tmp_path,
                     mutate_meta=lambda m: m.update({"schema_version": 99}))
    with pytest.raises(TaskSchemaError, match="schema_version"):
        load_task_pack(path)


def test_inconsistent_declared_sei_is_rejected(tmp_path):
    path = copy_pack("xnor2", tmp_path,
                     mutate_meta=lambda m: m["human_reference"]
                     .update({"sei": 0.9}))
    with pytest.raises(TaskSchemaError, match="does not match"):
        load_task_pack(path)


def test_checkless_testbench_is_rejected(tmp_path):
    def strip(tb):
        for v in tb["vectors"]:
            v["expected"] = {}

    path = copy_pack("xnor2", tmp_path, mutate_tb=strip)
    with pytest.raises(TaskSchemaError, match="checks"):
        load_task_pack(path)


def test_tampered_reference_is_detected(tmp_path):
    path = copy_pack("full_adder", tmp_path)
    bad = (path / "reference.nl").read_text().replace("or g5", "and g5")
    (path / "reference.nl").write_text(bad)
    with pytest.raises(ReferenceMismatchError, match="fails its own testbench"):
        verify_reference(load_task_pack(path))


def test_wrong_declared_gate_count_is_detected(tmp_path):
    path = copy_pack("full_adder", tmp_path,
                     mutate_meta=lambda m: m["human_reference"]
                     .update({"gate_count": 6, "sei": round(1 / 9, 6)}))
    with pytest.raises(ReferenceMismatchError, match="does not match measured"):
        verify_reference(load_task_pack(path))


def test_discover_sorts_by_id(tmp_path):
    for tid in ("xnor2", "mux2", "and3"):
        copy_pack(tid, tmp_path)
    packs = discover_task_packs(tmp_path)
    assert [t.id for t in packs] == ["and3", "mux2", "xnor2"]


def test_interface_echo_mismatch_is_a_schema_violation(tmp_path):
    def corrupt(tb):
        tb["interface"]["a"]["width"] = 7

    path = copy_pack("xnor2", tmp_path, mutate_tb=corrupt)
    with pytest.raises(TaskSchemaError, match="interface"):
        load_task_pack(path)


def test_optional_per_tier_reference_numbers(tmp_path):
    def add_tiers(meta):
        meta["human_reference"]["tiers"] = {
            "top": {"gate_count": 2, "delay": 2},
            "mid": {"gate_count": 3, "delay": 2},
        }

    path = copy_pack("xnor2", tmp_path, mutate_meta=add_tiers)
    t = load_task_pack(path)
    assert t.reference.tier_sei("top") == pytest.approx(0.25)
    assert t.reference.tier_sei("mid") == pytest.approx(0.2)
    assert t.reference.tier_sei("low") is None


def test_whole_port_integers_expand_to_bits():
    t = builtin("adder2")
    v = t.testbench.vectors[-1]
    assert set(v.inputs) == {"a[0]", "a[1]", "b[0]", "b[1]", "cin"}
    assert set(v.expected) == {"s[0]", "s[1]", "cout"}


# -- reports ------------------------------------------------------------------

def sample_report() -> BenchmarkReport:
    rows = (
        TaskReportRow("xnor2", "easy", 2, 2, {1: 1.0}, 2, 2, 0.25, "verified"),
        TaskReportRow("full_adder", "medium", 2, 0, {1: 0.0}, None, None,
                      None, "failed"),
    )
    return BenchmarkReport(
        rows=rows,
        difficulty_pass_at_1={"easy": 1.0, "medium": 0.0},
        difficulty_sei={"easy": 0.25, "medium": 0.0},
        overall_sei=(0.25 * 1e-5) ** 0.5,
        tier=classify_tier((0.25 * 1e-5) ** 0.5),
        config={"backend": "scripted"},
        wall_seconds=1.23,
    )


def test_machine_report_round_trips():
    report = sample_report()
    text = emit_report(report, "machine")
    loaded = load_report(text)
    assert emit_report(loaded, "machine") == text
    assert loaded.rows == report.rows
    assert loaded.overall_sei == report.overall_sei
    assert loaded.tier == report.tier


def test_machine_report_excludes_wall_time():
    a = sample_report()
    b = BenchmarkReport(a.rows, a.difficulty_pass_at_1, a.difficulty_sei,
                        a.overall_sei, a.tier, a.config, wall_seconds=999.0)
    assert emit_report(a, "machine") == emit_report(b, "machine")


def test_table_shows_only_present_difficulties():
    text = emit_report(sample_report(), "table")
    assert "easy" in text and "medium" in text and "hard" not in text
    assert "overall" in text


def test_table_flags_top_tier():
    rows = (TaskReportRow("t", "easy", 1, 1, {1: 1.0}, 5, 3, 0.115,
                          "verified"),)
    report = BenchmarkReport(rows, {"easy": 1.0}, {"easy": 0.115}, 0.115,
                             classify_tier(0.115), {})
    text = emit_report(report, "table")
    assert "tier: top" in text


def test_single_task_report_table():
    rows = (TaskReportRow("solo", "hard", 1, 1, {1: 1.0}, 5, 3, 0.125,
                          "verified"),)
    report = BenchmarkReport(rows, {"hard": 1.0}, {"hard": 0.125}, 0.125,
                             classify_tier(0.125), {})
    text = emit_report(report, "table")
    assert "hard" in text and "solo" in text


def test_gap_value_is_flagged_in_the_table():
    verdict = classify_tier(0.094)
    assert isinstance(verdict, TierVerdict) and verdict.in_gap
    rows = (TaskReportRow("t", "easy", 1, 1, {1: 1.0}, 5, 3, 0.094,
                          "verified"),)
    report = BenchmarkReport(rows, {"easy": 1.0}, {"easy": 0.094}, 0.094,
                             verdict, {})
    assert "gap" in emit_report(report, "table")

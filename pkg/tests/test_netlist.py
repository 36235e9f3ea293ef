import random

import pytest
from conftest import build_half_adder, random_netlist

from gateforge.netlist import (
    CombinationalLoopError,
    GateKind,
    Netlist,
    NetlistBuilder,
    critical_path_delay,
    errors_of,
    gate_count,
    is_valid,
    levelize,
    structural_report,
    validate,
)


def build_not_chain(length: int) -> Netlist:
    b = NetlistBuilder("chain")
    net = b.input("a")
    y = b.output("y")
    for i in range(length):
        out = y if i == length - 1 else None
        net = b.gate(GateKind.NOT, (net,), out)
    return b.build()


def test_minimal_not_gate_is_valid():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.NOT, (a,), y)
    n = b.build()
    assert validate(n) == []


def test_two_drivers_on_one_net():
    b = NetlistBuilder("top")
    a = b.input("a")
    c = b.input("b")
    y = b.output("y")
    b.gate(GateKind.NOT, (a,), y)
    b.gate(GateKind.NOT, (c,), y)
    n = b.build(check=False)
    kinds = {v.kind for v in errors_of(validate(n))}
    assert kinds == {"multi-driver"}


def test_self_loop_is_a_combinational_loop():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.XOR, (a, y), y)
    n = b.build(check=False)
    kinds = {v.kind for v in errors_of(validate(n))}
    assert "combinational-loop" in kinds
    with pytest.raises(CombinationalLoopError) as exc:
        levelize(n)
    assert exc.value.cycle  # witness present


def test_two_gate_cycle_detected_by_dfs():
    # g1 feeds g2 feeds g1: the DFS oracle must name both gates.
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    w1 = b.wire()
    w2 = b.wire()
    b.gate(GateKind.AND, (a, w2), w1, name="g1")
    b.gate(GateKind.OR, (w1, a), w2, name="g2")
    b.gate(GateKind.NOT, (w1,), y, name="g3")
    n = b.build(check=False)
    loops = [v for v in validate(n) if v.kind == "combinational-loop"]
    assert len(loops) == 1
    assert "g1" in loops[0].message and "g2" in loops[0].message


def test_dff_breaks_the_cycle():
    # Feedback through a register is sequential, not a combinational loop.
    b = NetlistBuilder("top")
    clk = b.input("clk")
    q = b.output("q")
    d = b.gate(GateKind.NOT, (q,))
    b.gate(GateKind.DFF, (d, clk), q)
    n = b.build()
    assert is_valid(n)


def test_arity_violation():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.NAND, (a,), y)  # nand needs two inputs
    n = b.build(check=False)
    assert {v.kind for v in errors_of(validate(n))} == {"arity"}


def test_dangling_net():
    b = NetlistBuilder("top")
    b.input("a")
    y = b.output("y")
    w = b.wire()
    b.gate(GateKind.NOT, (w,), y)
    n = b.build(check=False)
    assert "dangling-net" in {v.kind for v in errors_of(validate(n))}


def test_floating_output_is_a_warning_and_still_counts():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.NOT, (a,), y)
    b.gate(GateKind.AND, (a, a))  # output never read
    n = b.build(check=False)
    violations = validate(n)
    assert errors_of(violations) == []
    assert any(v.kind == "floating-output" and v.severity == "warning"
               for v in violations)
    assert gate_count(n) == 2


def test_gate_count_half_adder():
    assert gate_count(build_half_adder()) == 2


def test_gate_count_empty_passthrough():
    b = NetlistBuilder("wirepass")
    a = b.input("a")
    b.bind_output("y", a)
    n = b.build()
    assert gate_count(n) == 0
    assert critical_path_delay(n) == 0


def test_eight_gate_two_level_design():
    # Two levels of four gates each: count 8, delay 2.
    b = NetlistBuilder("case8")
    ins = [b.input(f"i{k}") for k in range(8)]
    level1 = [b.gate(GateKind.AND, (ins[2 * k], ins[2 * k + 1]))
              for k in range(4)]
    outs = [b.gate(GateKind.OR, (level1[k], level1[(k + 1) % 4]))
            for k in range(4)]
    for k, net in enumerate(outs):
        b.bind_output(f"o{k}", net)
    n = b.build()
    assert gate_count(n) == 8
    assert critical_path_delay(n) == 2


def test_delay_not_chain():
    assert critical_path_delay(build_not_chain(3)) == 3


def test_delay_half_adder():
    assert critical_path_delay(build_half_adder()) == 1


def test_delay_ignores_registers_and_counts_register_boundaries():
    # in -> NOT -> DFF -> NOT -> out: both combinational segments have
    # length 1, the register contributes nothing.
    b = NetlistBuilder("top")
    a = b.input("a")
    clk = b.input("clk")
    y = b.output("y")
    d = b.gate(GateKind.NOT, (a,))
    q = b.gate(GateKind.DFF, (d, clk))
    b.gate(GateKind.NOT, (q,), y)
    n = b.build()
    assert critical_path_delay(n) == 1
    report = structural_report(n)
    assert report.gate_count == 3
    assert report.register_count == 1


def test_floating_gate_off_any_path_adds_no_delay():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.NOT, (a,), y)
    w = b.gate(GateKind.AND, (a, a))
    b.gate(GateKind.NOT, (w,))  # 2-gate floating chain, longer than the path
    n = b.build(check=False)
    assert critical_path_delay(n) == 1


def test_levelize_chain_order():
    n = build_not_chain(2)
    order = levelize(n)
    assert [g.name for g in order] == ["g1", "g2"]


def test_levelize_excludes_registers():
    b = NetlistBuilder("top")
    clk = b.input("clk")
    q = b.output("q")
    d = b.gate(GateKind.NOT, (q,))
    b.gate(GateKind.DFF, (d, clk), q)
    n = b.build()
    assert [g.kind for g in levelize(n)] == [GateKind.NOT]


def _assert_linear_extension(netlist: Netlist) -> None:
    order = levelize(netlist)
    position = {g.output: i for i, g in enumerate(order)}
    for i, g in enumerate(order):
        for net in g.inputs:
            if net in position:
                assert position[net] < i, "consumer scheduled before driver"


def test_levelize_diamond_is_a_linear_extension():
    b = NetlistBuilder("diamond")
    a = b.input("a")
    c = b.input("b")
    y = b.output("y")
    top = b.gate(GateKind.AND, (a, c))
    left = b.gate(GateKind.NOT, (top,))
    right = b.gate(GateKind.XOR, (top, a))
    b.gate(GateKind.OR, (left, right), y)
    _assert_linear_extension(b.build())


def test_levelize_random_dags_respect_dependencies():
    rng = random.Random(1234)
    for _ in range(25):
        n = random_netlist(rng, n_inputs=4, n_gates=50)
        _assert_linear_extension(n)


def test_delay_never_exceeds_gate_count():
    rng = random.Random(99)
    for _ in range(50):
        n = random_netlist(rng, rng.randint(1, 5), rng.randint(1, 30))
        assert critical_path_delay(n) <= gate_count(n)


def test_analyses_invariant_under_net_renaming():
    from dataclasses import replace

    rng = random.Random(8)
    n = random_netlist(rng, 3, 12)
    renamed_nets = {nid: replace(net, name=f"zz{nid}")
                    for nid, net in n.nets.items()}
    m = Netlist(n.name, n.ports, renamed_nets, n.gates, n.port_nets)
    assert gate_count(m) == gate_count(n)
    assert critical_path_delay(m) == critical_path_delay(n)


def test_analyses_invariant_under_gate_reordering():
    rng = random.Random(7)
    n = random_netlist(rng, 3, 12)
    shuffled = list(n.gates)
    rng.shuffle(shuffled)
    m = Netlist(n.name, n.ports, n.nets, tuple(shuffled), n.port_nets)
    assert gate_count(m) == gate_count(n)
    assert critical_path_delay(m) == critical_path_delay(n)


def test_validate_is_pure_and_idempotent():
    b = NetlistBuilder("top")
    a = b.input("a")
    y = b.output("y")
    b.gate(GateKind.XOR, (a, y), y)
    n = b.build(check=False)
    assert validate(n) == validate(n)

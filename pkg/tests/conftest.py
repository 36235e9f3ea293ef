"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import random

from gateforge.netlist import GateKind, Netlist, NetlistBuilder


def build_half_adder() -> Netlist:
    b = NetlistBuilder("half_adder")
    a = b.input("a")
    c = b.input("b")
    s = b.output("s")
    co = b.output("c")
    b.gate(GateKind.XOR, (a, c), s)
    b.gate(GateKind.AND, (a, c), co)
    return b.build()


def build_full_adder() -> Netlist:
    """The 5-gate construction sharing the first xor."""
    b = NetlistBuilder("full_adder")
    a = b.input("a")
    c = b.input("b")
    cin = b.input("cin")
    axb = b.gate(GateKind.XOR, (a, c))
    s = b.gate(GateKind.XOR, (axb, cin))
    ab = b.gate(GateKind.AND, (a, c))
    axb_cin = b.gate(GateKind.AND, (axb, cin))
    co = b.gate(GateKind.OR, (ab, axb_cin))
    b.bind_output("sum", s)
    b.bind_output("cout", co)
    return b.build()


def build_nand_full_adder() -> Netlist:
    """The classic nine-nand construction; same function, different graph."""
    b = NetlistBuilder("full_adder_nand")
    a = b.input("a")
    c = b.input("b")
    cin = b.input("cin")
    g = lambda x, y: b.gate(GateKind.NAND, (x, y))  # noqa: E731
    n1 = g(a, c)
    n2 = g(a, n1)
    n3 = g(c, n1)
    n4 = g(n2, n3)           # a xor b
    n5 = g(n4, cin)
    n6 = g(n4, n5)
    n7 = g(cin, n5)
    s = g(n6, n7)            # sum
    co = g(n5, n1)           # carry
    b.bind_output("sum", s)
    b.bind_output("cout", co)
    return b.build()


def recursive_eval(netlist: Netlist, assignment: dict[str, int]) -> dict[str, int]:
    """Direct recursive evaluation of the gate graph, independent of the
    levelized simulator. Combinational netlists only."""
    driver = {g.output: g for g in netlist.gates}
    input_net = {nid: val for (name, nid), val in
                 zip(netlist.input_bits(),
                     (assignment[n] for n, _ in netlist.input_bits()))}
    memo: dict[int, int] = {}

    def value(nid: int) -> int:
        if nid in memo:
            return memo[nid]
        net = netlist.nets[nid]
        if net.is_const:
            result = net.const_value
        elif nid in input_net:
            result = input_net[nid] & 1
        else:
            gate = driver[nid]
            ins = [value(n) for n in gate.inputs]
            if gate.kind is GateKind.AND:
                result = ins[0] & ins[1]
            elif gate.kind is GateKind.OR:
                result = ins[0] | ins[1]
            elif gate.kind is GateKind.XOR:
                result = ins[0] ^ ins[1]
            elif gate.kind is GateKind.NAND:
                result = 1 - (ins[0] & ins[1])
            elif gate.kind is GateKind.NOT:
                result = 1 - ins[0]
            else:
                raise AssertionError(f"not combinational: {gate.kind}")
        memo[nid] = result
        return result

    return {name: value(nid) for name, nid in netlist.output_bits()}


def random_netlist(rng: random.Random, n_inputs: int, n_gates: int,
                   n_outputs: int | None = None, name: str = "rand") -> Netlist:
    """Random valid combinational netlist: every gate draws inputs from
    earlier nets, outputs are bound to randomly chosen driven nets."""
    kinds = [GateKind.AND, GateKind.OR, GateKind.NOT, GateKind.XOR,
             GateKind.NAND]
    b = NetlistBuilder(name)
    pool = [b.input(f"i{k}") for k in range(n_inputs)]
    if rng.random() < 0.2:
        pool.append(b.const(rng.randint(0, 1)))
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        if kind is GateKind.NOT:
            ins = (rng.choice(pool),)
        else:
            ins = (rng.choice(pool), rng.choice(pool))
        pool.append(b.gate(kind, ins))
    gate_outputs = pool[n_inputs:] or pool
    n_outputs = n_outputs or rng.randint(1, min(3, len(gate_outputs)))
    for k in range(n_outputs):
        b.bind_output(f"o{k}", rng.choice(gate_outputs))
    return b.build()

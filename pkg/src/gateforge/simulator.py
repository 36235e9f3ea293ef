"""Netlist verification engine: vector simulation and functional signatures.

Evaluation is two-state (0/1) and bit-parallel: every net holds a Python
integer whose bit v is the net's value in vector v, so one levelized sweep
evaluates all vectors of a testbench at once. Sequential runs use the
standard synchronous model: per cycle, apply inputs, settle the
combinational logic, check expectations, then clock every register from its
settled data input. Registers reset to 0.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .netlist import (
    Gate,
    GateKind,
    Netlist,
    levelize,
    require_valid,
)

# Exhaustive signatures stop at 12 inputs (4096 rows); wider interfaces get
# sampled signatures from a fixed seed and are flagged approximate.
MAX_EXACT_INPUTS = 12
SAMPLED_VECTOR_COUNT = 1024
_SAMPLED_SEED = 0x5EED


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class TestVector:
    """One stimulus/check row. Keys are port bits: "a" or "bus[3]"."""

    __test__ = False  # not a pytest class

    inputs: dict[str, int]
    expected: dict[str, int | None]
    cycle: int = 0


@dataclass(frozen=True)
class FailureDetail:
    vector_index: int
    port_bit: str
    expected: int
    actual: int


@dataclass(frozen=True)
class SimOutcome:
    passed: int
    failed: int
    first_failure: FailureDetail | None = None

    @property
    def correctness(self) -> float:
        total = self.passed + self.failed
        if total == 0:
            return 0.0
        return self.passed / total


@dataclass(frozen=True)
class FunctionalSignature:
    """Canonical behavior fingerprint, independent of structure.

    columns[j] packs output bit j over all rows: bit r of columns[j] is the
    j-th output bit for input row r. Rows enumerate input values with input
    bit 0 (first declared input bit) as the least significant position.
    """

    n_inputs: int
    n_outputs: int
    columns: tuple[int, ...]
    exact: bool = True

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n_inputs}:{self.n_outputs}:{int(self.exact)}".encode())
        for c in self.columns:
            h.update(b"|" + hex(c).encode())
        return h.hexdigest()

    def row(self, r: int) -> tuple[int, ...]:
        return tuple((c >> r) & 1 for c in self.columns)

    def column_bits(self, j: int) -> list[int]:
        rows = 1 << self.n_inputs if self.exact else SAMPLED_VECTOR_COUNT
        return [(self.columns[j] >> r) & 1 for r in range(rows)]


def _eval_comb(schedule: tuple[Gate, ...], values: dict[int, int],
               mask: int) -> None:
    """Evaluate combinational gates in place over packed values."""
    for g in schedule:
        a = values[g.inputs[0]]
        if g.kind is GateKind.NOT:
            values[g.output] = ~a & mask
            continue
        b = values[g.inputs[1]]
        if g.kind is GateKind.AND:
            values[g.output] = a & b
        elif g.kind is GateKind.OR:
            values[g.output] = a | b
        elif g.kind is GateKind.XOR:
            values[g.output] = a ^ b
        elif g.kind is GateKind.NAND:
            values[g.output] = ~(a & b) & mask
        else:  # pragma: no cover - schedule never contains registers
            raise AssertionError(f"unexpected gate kind {g.kind}")


def _seed_values(netlist: Netlist, mask: int) -> dict[int, int]:
    values = dict.fromkeys(netlist.nets, 0)
    for net in netlist.nets.values():
        if net.is_const:
            values[net.id] = mask if net.const_value else 0
    return values


def _bit_maps(netlist: Netlist) -> tuple[dict[str, int], dict[str, int]]:
    inputs = dict(netlist.input_bits())
    outputs = dict(netlist.output_bits())
    return inputs, outputs


def _check_vector_keys(vector: TestVector, index: int,
                       in_bits: dict[str, int], out_bits: dict[str, int],
                       clock: str | None) -> None:
    for key in vector.inputs:
        if key == clock:
            raise SimulationError(
                f"vector {index}: clock '{clock}' is driven by the harness, "
                "not by vectors")
        if key not in in_bits:
            raise SimulationError(f"vector {index}: '{key}' is not a declared "
                                  "input port bit")
    for key in vector.expected:
        if key not in out_bits:
            raise SimulationError(f"vector {index}: '{key}' is not a declared "
                                  "output port bit")


def simulate_combinational(netlist: Netlist,
                           vectors: list[TestVector]) -> SimOutcome:
    """Run every vector through one levelized sweep and score the checks.

    Each vector with at least one expected output is one pass/fail unit;
    expected bits set to None are don't-cares and never fail. Every input
    bit must be assigned in every vector.
    """
    require_valid(netlist)
    if netlist.dff_gates():
        raise SimulationError("netlist contains registers; "
                              "use simulate_sequential")
    in_bits, out_bits = _bit_maps(netlist)
    for i, v in enumerate(vectors):
        _check_vector_keys(v, i, in_bits, out_bits, clock=None)
        missing = sorted(set(in_bits) - set(v.inputs))
        if missing:
            raise SimulationError(
                f"vector {i}: unassigned input bit(s): {', '.join(missing)}")

    width = max(1, len(vectors))
    mask = (1 << width) - 1
    values = _seed_values(netlist, mask)
    for name, nid in in_bits.items():
        packed = 0
        for i, v in enumerate(vectors):
            if v.inputs[name] & 1:
                packed |= 1 << i
        values[nid] = packed
    _eval_comb(levelize(netlist), values, mask)

    passed = failed = 0
    first: FailureDetail | None = None
    for i, v in enumerate(vectors):
        checks = [(k, e) for k, e in v.expected.items() if e is not None]
        if not checks:
            continue
        ok = True
        for key, exp in sorted(checks):
            actual = (values[out_bits[key]] >> i) & 1
            if actual != (exp & 1):
                ok = False
                if first is None:
                    first = FailureDetail(i, key, exp & 1, actual)
                break
        if ok:
            passed += 1
        else:
            failed += 1
    return SimOutcome(passed, failed, first)


def _resolve_clock(netlist: Netlist, clock: str | None) -> str:
    in_ports = {p.name: p for p in netlist.input_ports()}
    clock_nets = netlist.clock_nets()
    if clock is None:
        if not clock_nets:
            raise SimulationError("no clock port: netlist has no registers "
                                  "and no clock was designated")
        candidates = set()
        bit_owner = {nid: p.name for p in netlist.input_ports()
                     for nid in netlist.port_nets[p.name]}
        for nid in clock_nets:
            if nid not in bit_owner:
                raise SimulationError("register clock pin is not driven by a "
                                      "primary input")
            candidates.add(bit_owner[nid])
        if len(candidates) != 1:
            raise SimulationError(
                f"expected exactly one clock port, found {len(candidates)}")
        clock = candidates.pop()
    if clock not in in_ports:
        raise SimulationError(f"clock '{clock}' is not a declared input port")
    if in_ports[clock].width != 1:
        raise SimulationError(f"clock '{clock}' must be one bit wide")
    clock_net = netlist.port_nets[clock][0]
    for g in netlist.dff_gates():
        if g.clock_input != clock_net:
            raise SimulationError(
                f"register {g.name or '?'} is not clocked by '{clock}'")
    return clock


def simulate_sequential(netlist: Netlist, vectors: list[TestVector],
                        cycles: int, clock: str | None = None) -> SimOutcome:
    """Cycle-accurate run: settle, check, then clock all registers at once.

    Inputs hold their values between vectors; the vector at cycle 0 must
    assign every non-clock input bit. Registers start at 0. When `clock` is
    None it is inferred from the register clock pins.
    """
    require_valid(netlist)
    clock = _resolve_clock(netlist, clock)
    in_bits, out_bits = _bit_maps(netlist)
    drive_bits = {k: v for k, v in in_bits.items()
                  if v != netlist.port_nets[clock][0]}

    by_cycle: dict[int, tuple[int, TestVector]] = {}
    for i, v in enumerate(vectors):
        _check_vector_keys(v, i, in_bits, out_bits, clock)
        if not (0 <= v.cycle < cycles):
            raise SimulationError(
                f"vector {i}: cycle {v.cycle} outside 0..{cycles - 1}")
        if v.cycle in by_cycle:
            raise SimulationError(f"vector {i}: duplicate cycle {v.cycle}")
        by_cycle[v.cycle] = (i, v)

    first_vec = by_cycle.get(0)
    assigned = set(first_vec[1].inputs) if first_vec else set()
    missing = sorted(set(drive_bits) - assigned)
    if missing:
        raise SimulationError(
            "cycle 0 must assign every input bit; missing: " + ", ".join(missing))

    schedule = levelize(netlist)
    dffs = netlist.dff_gates()
    state = {g.output: 0 for g in dffs}
    held: dict[str, int] = {}

    passed = failed = 0
    first: FailureDetail | None = None
    for t in range(cycles):
        entry = by_cycle.get(t)
        if entry is not None:
            for key, val in entry[1].inputs.items():
                held[key] = val & 1
        values = _seed_values(netlist, 1)
        for key, val in held.items():
            values[in_bits[key]] = val
        for nid, q in state.items():
            values[nid] = q
        _eval_comb(schedule, values, 1)

        if entry is not None:
            index, vec = entry
            checks = [(k, e) for k, e in vec.expected.items() if e is not None]
            if checks:
                ok = True
                for key, exp in sorted(checks):
                    actual = values[out_bits[key]]
                    if actual != (exp & 1):
                        ok = False
                        if first is None:
                            first = FailureDetail(index, key, exp & 1, actual)
                        break
                if ok:
                    passed += 1
                else:
                    failed += 1

        state = {g.output: values[g.data_input] for g in dffs}
    return SimOutcome(passed, failed, first)


def sequential_trace(netlist: Netlist, stimulus: list[dict[str, int]],
                     clock: str | None = None) -> dict[str, list[int]]:
    """Drive one input assignment per cycle and record every output stream.

    Same clocking semantics as simulate_sequential, no checking. Each
    stimulus entry must assign every non-clock input bit.
    """
    require_valid(netlist)
    clock = _resolve_clock(netlist, clock)
    in_bits, out_bits = _bit_maps(netlist)
    clock_net = netlist.port_nets[clock][0]
    drive = {k: v for k, v in in_bits.items() if v != clock_net}

    schedule = levelize(netlist)
    dffs = netlist.dff_gates()
    state = {g.output: 0 for g in dffs}
    streams: dict[str, list[int]] = {name: [] for name in out_bits}
    for t, assignment in enumerate(stimulus):
        missing = sorted(set(drive) - set(assignment))
        if missing:
            raise SimulationError(
                f"cycle {t}: unassigned input bit(s): {', '.join(missing)}")
        values = _seed_values(netlist, 1)
        for key, val in assignment.items():
            if key not in drive:
                raise SimulationError(f"cycle {t}: '{key}' is not a drivable "
                                      "input bit")
            values[drive[key]] = val & 1
        for nid, q in state.items():
            values[nid] = q
        _eval_comb(schedule, values, 1)
        for name, nid in out_bits.items():
            streams[name].append(values[nid])
        state = {g.output: values[g.data_input] for g in dffs}
    return streams


def truth_table(netlist: Netlist) -> FunctionalSignature:
    """Exhaustive signature over all input rows (combinational, n <= 12)."""
    require_valid(netlist)
    if netlist.dff_gates():
        raise SimulationError("sequential netlist has no truth table")
    in_bits, _ = _bit_maps(netlist)
    n = len(in_bits)
    if n > MAX_EXACT_INPUTS:
        raise SimulationError(
            f"too many inputs for an exhaustive table ({n} > {MAX_EXACT_INPUTS})")
    rows = 1 << n
    mask = (1 << rows) - 1
    values = _seed_values(netlist, mask)
    for i, (_, nid) in enumerate(netlist.input_bits()):
        pattern = 0
        for r in range(rows):
            if (r >> i) & 1:
                pattern |= 1 << r
        values[nid] = pattern
    _eval_comb(levelize(netlist), values, mask)
    columns = tuple(values[nid] for _, nid in netlist.output_bits())
    return FunctionalSignature(n, len(columns), columns, exact=True)


def sampled_signature(netlist: Netlist,
                      vector_count: int = SAMPLED_VECTOR_COUNT) -> FunctionalSignature:
    """Fixed-seed random-vector signature for wide combinational interfaces."""
    require_valid(netlist)
    if netlist.dff_gates():
        raise SimulationError("sequential netlist has no truth table")
    in_bits = netlist.input_bits()
    n = len(in_bits)
    rng = random.Random(_SAMPLED_SEED)
    rows = [rng.getrandbits(n) for _ in range(vector_count)]
    mask = (1 << vector_count) - 1
    values = _seed_values(netlist, mask)
    for i, (_, nid) in enumerate(in_bits):
        pattern = 0
        for r, row in enumerate(rows):
            if (row >> i) & 1:
                pattern |= 1 << r
        values[nid] = pattern
    _eval_comb(levelize(netlist), values, mask)
    columns = tuple(values[nid] for _, nid in netlist.output_bits())
    return FunctionalSignature(n, len(columns), columns, exact=False)


def functional_signature(netlist: Netlist) -> FunctionalSignature:
    """Exact signature when the interface allows it, sampled otherwise."""
    if len(netlist.input_bits()) <= MAX_EXACT_INPUTS:
        return truth_table(netlist)
    return sampled_signature(netlist)

"""Command-line interface.

Subcommands: run (one task), bench (sampled sweep with ablation profiles),
store (inspect / verify / compact / seed the knowledge store), report
(re-render a results file) and tasks (list or validate task packs).
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile

from .backends import create_backend
from .knowledge import KnowledgeStore
from .metrics import MetricWeights
from .orchestrator import RunConfig, run_benchmark, run_task
from .taskpack import (
    builtin_task_dir,
    builtin_task_packs,
    discover_task_packs,
    emit_report,
    load_report,
    load_task_pack,
    verify_reference,
)


def _load_config(path: str | None, profile: str | None,
                 overrides: dict) -> RunConfig:
    doc: dict = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    weights_doc = doc.pop("weights", None)
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if "pass_ks" in doc:
        doc["pass_ks"] = tuple(doc["pass_ks"])
    if weights_doc:
        doc["weights"] = MetricWeights(**weights_doc)
    if profile:
        return RunConfig.from_profile(profile, **doc)
    return RunConfig(**doc)


def _resolve_tasks(args) -> list:
    if args.tasks:
        return discover_task_packs(args.tasks)
    return builtin_task_packs()


def _add_backend_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend",
                   help="scripted:<script.json> or an http(s) chat endpoint "
                        "(may also come from the config file)")
    p.add_argument("--model", help="model identifier for http backends")
    p.add_argument("--config", help="JSON file mirroring the run config")
    p.add_argument("--store", help="knowledge store directory "
                                   "(default: fresh temporary store)")


def _resolve_backend(args, cfg: RunConfig):
    selector = args.backend or cfg.backend
    if not selector:
        raise SystemExit("no backend: pass --backend or set it in the config")
    return create_backend(selector, args.model or cfg.model)


def _make_store(args) -> KnowledgeStore:
    root = args.store or tempfile.mkdtemp(prefix="gateforge-store-")
    return KnowledgeStore(root)


def _cmd_run(args) -> int:
    task = load_task_pack(args.task)
    cfg = _load_config(args.config, None, {"samples_per_task": 1})
    backend = _resolve_backend(args, cfg)
    store = _make_store(args)
    run = run_task(task, cfg, backend, store)
    print(f"task {task.id}: {run.status} "
          f"(revisions used: {run.revisions_used})")
    if run.result is not None:
        r = run.result
        sei = f"{r.sei:.4f}" if r.sei is not None else "n/a"
        print(f"  G={r.gate_count} D={r.delay} sei={sei}")
    if run.netlist_text and args.emit_netlist:
        print(run.netlist_text, end="")
    if run.error:
        print(f"  error: {run.error}", file=sys.stderr)
    return 0 if run.status == "verified" else 1


def _cmd_bench(args) -> int:
    tasks = _resolve_tasks(args)
    overrides = {
        "samples_per_task": args.n,
        "pass_ks": tuple(args.k) if args.k else None,
        "workers": args.workers,
    }
    cfg = _load_config(args.config, args.profile, overrides)
    backend = _resolve_backend(args, cfg)
    store = _make_store(args)
    report = run_benchmark(tasks, cfg, backend, store, profile=args.profile)
    machine = emit_report(report, "machine")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(machine)
        print(f"results written to {args.out}")
    else:
        print(machine, end="")
    if args.table:
        print(emit_report(report, "table"), end="")
    if report.wall_seconds is not None:
        print(f"wall time: {report.wall_seconds:.2f}s", file=sys.stderr)
    return 0


def _cmd_store(args) -> int:
    store = KnowledgeStore(args.dir, verify=not args.no_verify)
    if args.action == "seed":
        n = store.seed_baseline()
        print(f"seeded {n} baseline entries")
        return 0
    if args.action == "inspect":
        for e in store.entries(include_archived=args.all):
            line = f"#{e.id:<4} {e.kind:15s} {e.name:24s} {e.status}"
            if e.kind == "circuit-pattern":
                line += (f"  G={e.gate_count} D={e.delay} sei={e.sei:.4f} "
                         f"io={e.inputs}/{e.outputs} tags={','.join(e.tags)}")
            else:
                line += f"  class={e.error_class}"
            print(line)
        return 0
    if args.action == "verify":
        problems = store.verify_all()
        for p in problems:
            print(f"FAIL {p}")
        print(f"{len(store.entries())} primary entries, "
              f"{len(problems)} problem(s)")
        return 1 if problems else 0
    if args.action == "compact":
        removed = store.compact()
        print(f"removed {removed} archived entr{'y' if removed == 1 else 'ies'}")
        return 0
    raise AssertionError(args.action)


def _cmd_report(args) -> int:
    with open(args.results, encoding="utf-8") as fh:
        report = load_report(fh.read())
    print(emit_report(report, args.format), end="")
    return 0


def _cmd_tasks(args) -> int:
    root = args.tasks or builtin_task_dir()
    packs = discover_task_packs(root)
    if args.action == "list":
        for t in packs:
            ref = (f"G={t.reference.gate_count} D={t.reference.delay}"
                   if t.reference else "no reference")
            print(f"{t.id:16s} {t.difficulty:8s} {t.circuit_class:14s} {ref}")
        return 0
    if args.action == "validate":
        failures = 0
        for t in packs:
            try:
                result = verify_reference(t)
                print(f"{t.id:16s} ok (G={result.gate_count}, "
                      f"D={result.delay})")
            except Exception as exc:
                failures += 1
                print(f"{t.id:16s} FAIL: {exc}")
        return 1 if failures else 0
    raise AssertionError(args.action)


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gateforge",
        description="Gate-level netlist generation and benchmarking")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one task end to end")
    p.add_argument("--task", required=True, help="task pack directory")
    p.add_argument("--emit-netlist", action="store_true",
                   help="print the verified netlist")
    _add_backend_args(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--tasks", help="directory of task packs "
                                   "(default: built-in seed set)")
    p.add_argument("--n", type=int, help="samples per task")
    p.add_argument("--k", type=int, action="append",
                   help="pass@k values (repeatable)")
    p.add_argument("--profile", choices=("V0", "V1", "V2"),
                   help="retrieval ablation profile")
    p.add_argument("--workers", type=int, help="parallel task workers")
    p.add_argument("--out", help="write machine-readable results here")
    p.add_argument("--table", action="store_true",
                   help="also print the summary table")
    _add_backend_args(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("store", help="knowledge store maintenance")
    p.add_argument("action", choices=("seed", "inspect", "verify", "compact"))
    p.add_argument("--dir", required=True, help="store directory")
    p.add_argument("--all", action="store_true",
                   help="include archived entries in inspect")
    p.add_argument("--no-verify", action="store_true",
                   help="skip load-time re-verification")
    p.set_defaults(func=_cmd_store)

    p = sub.add_parser("report", help="re-render a results file")
    p.add_argument("--results", required=True)
    p.add_argument("--format", choices=("machine", "table"), default="table")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("tasks", help="list or validate task packs")
    p.add_argument("action", choices=("list", "validate"))
    p.add_argument("--tasks", help="directory of task packs "
                                   "(default: built-in seed set)")
    p.set_defaults(func=_cmd_tasks)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

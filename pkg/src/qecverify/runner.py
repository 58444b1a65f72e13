"""Parallel verification driver.

Splits a verification condition into subtasks by enumerating error bits
depth first, closing a branch once the heuristic 2*d*N(ones) + N(bits)
exceeds n, then dispatches the specialized SMT scripts to a pool of
worker-owned solver processes with first-counterexample cancellation.
"""

from __future__ import annotations

import json
import os
import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cexpr import BConst, CExp, Var
from .smt import SolveResult, encode, run_solver
from .vc import ClassicalVC

__all__ = [
    "Subtask",
    "SubtaskResult",
    "RunResult",
    "split",
    "run_parallel",
]


@dataclass
class Subtask:
    """One leaf of the enumeration tree: a partial error assignment
    together with the VC specialized under it."""

    id: int
    assignment: Dict[Var, int]
    vc: ClassicalVC


@dataclass
class SubtaskResult:
    id: int
    verdict: str                 # "unsat" | "sat" | "unknown" | "timeout" | "skipped"
    wall: float
    model: Dict[str, int] = field(default_factory=dict)


@dataclass
class RunResult:
    verdict: str                 # "Verified" | "Refuted" | "Unknown"
    results: List[SubtaskResult]
    model: Dict[str, int] = field(default_factory=dict)
    wall: float = 0.0

    @property
    def completed(self) -> int:
        return sum(1 for r in self.results if r.verdict != "skipped")

    def records(self) -> List[str]:
        """JSON-lines record per subtask: id, verdict, wall time."""
        return [
            json.dumps({"id": r.id, "verdict": r.verdict,
                        "wall": round(r.wall, 4)})
            for r in self.results
        ]


def _specialize(vc: ClassicalVC, assignment: Dict[Var, int]) -> ClassicalVC:
    hyp: CExp = vc.hypothesis
    goal: CExp = vc.goal
    by_name = {v.name: bit for v, bit in assignment.items()}
    # substitute by name: formulas may carry a same-named Var rebuilt with
    # a different inferred kind (e.g. from a stringly-typed gate guard)
    for v in hyp.variables() | goal.variables():
        if v.name in by_name:
            repl = BConst(bool(by_name[v.name]))
            hyp = hyp.substitute(v, repl)
            goal = goal.substitute(v, repl)
    assigned = {v for v in (vc.forall_vars + vc.exists_vars)
                if v.name in by_name} | set(assignment)
    return ClassicalVC(
        hypothesis=hyp,
        goal=goal,
        mode=vc.mode,
        forall_vars=tuple(v for v in vc.forall_vars if v not in assigned),
        exists_vars=tuple(v for v in vc.exists_vars if v not in assigned),
    )


def split(vc: ClassicalVC, error_vars: Sequence[Var], d: int, n: int,
          budget: Optional[int] = None) -> List[Subtask]:
    """Enumerate error bits in index order until 2*d*N(ones) + N(bits) > n.

    Branches whose partial weight already exceeds the budget are pruned
    (they cannot satisfy the hypothesis).  With no enumerable variables,
    or a closing threshold met immediately, the result is the single
    unspecialized task.
    """
    tasks: List[Subtask] = []
    evars = list(error_vars)

    def close(assignment: Dict[Var, int]) -> None:
        tasks.append(Subtask(len(tasks), dict(assignment),
                             _specialize(vc, assignment)))

    def walk(idx: int, ones: int, assignment: Dict[Var, int]) -> None:
        if idx >= len(evars) or 2 * d * ones + idx > n:
            close(assignment)
            return
        v = evars[idx]
        assignment[v] = 0
        walk(idx + 1, ones, assignment)
        if budget is None or ones + 1 <= budget:
            assignment[v] = 1
            walk(idx + 1, ones + 1, assignment)
        del assignment[v]

    walk(0, 0, {})
    return tasks


def _aggregate(results: List[SubtaskResult], mode: str) -> str:
    statuses = [r.verdict for r in results]
    if "sat" in statuses:
        return "Refuted"
    if all(s == "unsat" for s in statuses) or not statuses:
        return "Verified"
    return "Unknown"


def run_parallel(tasks: Sequence[Subtask], jobs: int = 1,
                 solver_cmd: Optional[Sequence[str]] = None,
                 timeout: Optional[float] = None,
                 exists_form: bool = False,
                 dump_smt: Optional[str] = None,
                 on_result=None) -> RunResult:
    """Consume the task queue with `jobs` workers.

    Each worker owns its solver subprocess.  The first satisfiable
    subtask raises the cancellation flag: queued tasks are drained and
    reported as skipped, so the completed count under early termination
    stays below the total.
    """
    start = time.monotonic()
    work: "queue.Queue[Subtask]" = queue.Queue()
    for t in tasks:
        work.put(t)
    cancel = threading.Event()
    lock = threading.Lock()
    results: List[SubtaskResult] = []
    witness: Dict[str, int] = {}

    def record(res: SubtaskResult) -> None:
        with lock:
            results.append(res)
        if on_result is not None:
            on_result(res)

    def worker() -> None:
        nonlocal witness
        while True:
            try:
                task = work.get_nowait()
            except queue.Empty:
                return
            if cancel.is_set():
                record(SubtaskResult(task.id, "skipped", 0.0))
                continue
            script = encode(task.vc, exists_form=exists_form,
                            comment=f"subtask {task.id}")
            if dump_smt:
                path = os.path.join(dump_smt, f"subtask_{task.id:04d}.smt2")
                with open(path, "w") as fh:
                    fh.write(script)
            sr: SolveResult = run_solver(script, solver_cmd=solver_cmd,
                                         timeout=timeout)
            record(SubtaskResult(task.id, sr.status, sr.elapsed, sr.model))
            if sr.status == "sat":
                with lock:
                    if not witness:
                        witness = dict(sr.model)
                        for v, bit in task.assignment.items():
                            witness.setdefault(v.name, bit)
                cancel.set()

    threads = [threading.Thread(target=worker, daemon=True)
               for _ in range(max(1, jobs))]
    for th in threads:
        th.start()
    for th in threads:
        th.join()

    results.sort(key=lambda r: r.id)
    mode = tasks[0].vc.mode if tasks else "valid"
    return RunResult(_aggregate(results, mode), results, witness,
                     time.monotonic() - start)

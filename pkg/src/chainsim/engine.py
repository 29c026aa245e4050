"""Model-agnostic task-chain engine.

A simulation is a sequence of tasks appended to a bidirectional linked list
(the chain).  n worker threads traverse the chain concurrently; each worker
executes the first task the model's dependence rules allow, erases it, and
returns to the head.  Tasks a worker skips over are absorbed into its
worker-local record so dependence can be inferred for later tasks.

Lock discipline (three guard roles, acquired in this global order):
  1. task occupancy locks, in chain order (hand-over-hand while moving);
  2. the chain enter lock (taken only while holding no occupancy lock);
  3. the chain erase lock (guards every read/write of prev/next/head/tail,
     task creation, and splicing).
A finishing worker re-acquires the executed task's occupancy lock *before*
the erase lock, so the hierarchy is never inverted.  A worker parked on an
already-executing task holds no occupancy lock; if that task is erased under
its feet it detects the erased flag and restarts its traversal from the head
(keeping its record, which is conservative and therefore safe).
"""

from __future__ import annotations

import enum
import threading
import time
from dataclasses import dataclass, field
from time import perf_counter
from typing import List, Optional

PENDING = 0
EXECUTING = 1

KIND_CREATED = "Created"
KIND_EXEC_START = "ExecStart"
KIND_EXEC_END = "ExecEnd"
KIND_ERASED = "Erased"
KIND_SKIP_DEPENDENT = "SkipDependent"
KIND_SKIP_BUSY = "SkipBusy"


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    worker_id: int
    task_id: int
    kind: str

    def as_csv(self) -> str:
        return f"{self.seq},{self.worker_id},{self.task_id},{self.kind}"


class Tracer:
    """Global, lock-serialized event log; seq numbers are exact, not wall-clock."""

    def __init__(self):
        self.events: List[TraceEvent] = []
        self._lock = threading.Lock()

    def emit(self, worker_id: int, task_id: int, kind: str) -> None:
        with self._lock:
            self.events.append(TraceEvent(len(self.events), worker_id, task_id, kind))


def write_trace_csv(events: List[TraceEvent], path) -> None:
    with open(path, "w") as fh:
        for ev in events:
            fh.write(ev.as_csv() + "\n")


def read_trace_csv(path) -> List[TraceEvent]:
    events = []
    with open(path) as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"malformed trace line {lineno + 1}: {line!r}")
            events.append(TraceEvent(int(parts[0]), int(parts[1]), int(parts[2]), parts[3]))
    return events


class Task:
    __slots__ = ("id", "phase", "recipe", "prev", "next", "lock", "erased")

    def __init__(self, task_id: int, recipe):
        self.id = task_id
        self.phase = PENDING
        self.recipe = recipe
        self.prev: Optional["Task"] = None
        self.next: Optional["Task"] = None
        self.lock = threading.Lock()  # occupancy guard
        self.erased = False


class Chain:
    """Bidirectional linked list of tasks plus the two chain-level guards."""

    def __init__(self):
        self.head: Optional[Task] = None
        self.tail: Optional[Task] = None
        self.enter_lock = threading.Lock()
        self.erase_lock = threading.Lock()
        self.created_count = 0
        self.erased_count = 0

    def __len__(self) -> int:
        return self.created_count - self.erased_count

    def ids(self) -> List[int]:
        """Snapshot of task ids head to tail (single-threaded use only)."""
        out, node = [], self.head
        while node is not None:
            out.append(node.id)
            node = node.next
        return out


def append_task(chain: Chain, recipe) -> int:
    """Append a task at the tail.  Caller must hold the erase lock."""
    task = Task(chain.created_count, recipe)
    chain.created_count += 1
    if chain.tail is None:
        chain.head = chain.tail = task
    else:
        task.prev = chain.tail
        chain.tail.next = task
        chain.tail = task
    return task.id


def erase_task(chain: Chain, task: Task) -> None:
    """Unlink an executed task.  Caller must hold the erase lock and the
    task's occupancy lock.  The task's own prev/next pointers are left
    intact so a stranded traverser can detect the erasure and restart."""
    if task.prev is not None:
        task.prev.next = task.next
    else:
        chain.head = task.next
    if task.next is not None:
        task.next.prev = task.prev
    else:
        chain.tail = task.prev
    task.erased = True
    chain.erased_count += 1


class CycleResult(enum.Enum):
    EXECUTED_ONE = "ExecutedOne"
    EXHAUSTED_NO_WORK = "ExhaustedNoWork"
    CAP_REACHED = "CapReached"
    ABORTED = "Aborted"


class HandleResult(enum.Enum):
    EXECUTE = "Execute"
    SKIP_DEPENDENT = "SkipDependent"
    SKIP_BUSY = "SkipBusy"


class Worker:
    __slots__ = ("worker_id", "record", "created_this_cycle", "position")

    def __init__(self, worker_id: int, record):
        self.worker_id = worker_id
        self.record = record
        self.created_this_cycle = 0
        self.position: Optional[Task] = None


@dataclass
class EngineConfig:
    n_workers: int = 1
    cycle_cap_C: int = 6
    master_seed: int = 0
    trace_enabled: bool = False
    watchdog_s: Optional[float] = None

    def __post_init__(self):
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        if self.cycle_cap_C < 1:
            raise ValueError("cycle_cap_C must be >= 1")


@dataclass
class RunResult:
    digest: int
    trace: Optional[List[TraceEvent]]
    wall_s: float
    created: int
    erased: int


class WatchdogTimeout(RuntimeError):
    """A run exceeded its watchdog deadline; carries the partial trace."""

    def __init__(self, message: str, trace: Optional[List[TraceEvent]]):
        super().__init__(message)
        self.trace = trace


# creation outcome sentinels
_CAP = "cap"
_EXHAUSTED = "exhausted"
_RETRY = "retry"
_NONEMPTY = "nonempty"


class Engine:
    def __init__(self, model, config: EngineConfig):
        self.model = model
        self.config = config
        self.chain = Chain()
        self.tracer = Tracer() if config.trace_enabled else None
        self._abort = threading.Event()
        self._exhausted = False  # latched once the model declines to create
        self._errors: List[BaseException] = []
        self._error_lock = threading.Lock()

    # -- task handling -------------------------------------------------

    def try_handle(self, worker: Worker, task: Task) -> HandleResult:
        """Classify the task at the worker's position.

        Caller holds the task's occupancy lock, or observed phase EXECUTING
        (in which case occupancy is not required).  On EXECUTE the phase is
        flipped; the caller performs the actual execution and erase.
        """
        model = self.model
        if task.phase == EXECUTING:
            model.absorb(worker.record, task.recipe)
            if self.tracer:
                self.tracer.emit(worker.worker_id, task.id, KIND_SKIP_BUSY)
            return HandleResult.SKIP_BUSY
        if model.depends(worker.record, task.recipe):
            model.absorb(worker.record, task.recipe)
            if self.tracer:
                self.tracer.emit(worker.worker_id, task.id, KIND_SKIP_DEPENDENT)
            return HandleResult.SKIP_DEPENDENT
        task.phase = EXECUTING
        if self.tracer:
            self.tracer.emit(worker.worker_id, task.id, KIND_EXEC_START)
        return HandleResult.EXECUTE

    # -- creation ------------------------------------------------------

    def _create_after_tail(self, worker: Worker, pos: Task):
        """Extend the chain behind `pos` (believed to be the tail)."""
        if worker.created_this_cycle >= self.config.cycle_cap_C:
            return _CAP
        chain = self.chain
        with chain.erase_lock:
            if pos.erased or pos.next is not None:
                return _RETRY  # tail changed under us; re-read links
            recipe = self.model.create()
            if recipe is None:
                self._exhausted = True
                return _EXHAUSTED
            task = Task(chain.created_count, recipe)
            task.lock.acquire()  # fresh lock: never blocks
            chain.created_count += 1
            task.prev = pos
            pos.next = task
            chain.tail = task
            if self.tracer:
                self.tracer.emit(worker.worker_id, task.id, KIND_CREATED)
        worker.created_this_cycle += 1
        return task

    def _create_on_empty(self, worker: Worker):
        """First task of an empty chain, created under the enter lock."""
        if worker.created_this_cycle >= self.config.cycle_cap_C:
            return _CAP
        chain = self.chain
        with chain.enter_lock:
            with chain.erase_lock:
                if chain.head is not None:
                    return _NONEMPTY
                recipe = self.model.create()
                if recipe is None:
                    self._exhausted = True
                    return _EXHAUSTED
                task = Task(chain.created_count, recipe)
                task.lock.acquire()
                chain.created_count += 1
                chain.head = chain.tail = task
                if self.tracer:
                    self.tracer.emit(worker.worker_id, task.id, KIND_CREATED)
        worker.created_this_cycle += 1
        return task

    # -- the worker cycle ----------------------------------------------

    def worker_cycle(self, worker: Worker) -> CycleResult:
        """One traversal between consecutive returns to the chain start."""
        model = self.model
        chain = self.chain
        erase_lock = chain.erase_lock
        model.reset(worker.record)
        worker.created_this_cycle = 0
        pos: Optional[Task] = None
        holds = False  # do we hold pos's occupancy lock?
        abort = self._abort

        def release_pos():
            nonlocal holds
            if holds:
                pos.lock.release()
                holds = False

        while True:
            if abort.is_set():
                release_pos()
                return CycleResult.ABORTED

            # read the next link under the erase lock
            with erase_lock:
                if pos is None or pos.erased:
                    nxt = chain.head  # entry, or restart after losing position
                    if pos is not None and pos.erased:
                        pos = None  # forget the dead node
                    at_tail = False
                else:
                    nxt = pos.next
                    at_tail = nxt is None

            if nxt is None:
                if at_tail:
                    outcome = self._create_after_tail(worker, pos)
                else:
                    release_pos()
                    outcome = self._create_on_empty(worker)
                if isinstance(outcome, Task):
                    release_pos()
                    pos, holds = outcome, True
                elif outcome is _RETRY or outcome is _NONEMPTY:
                    continue
                elif outcome is _CAP:
                    release_pos()
                    return CycleResult.CAP_REACHED
                else:  # _EXHAUSTED
                    release_pos()
                    return CycleResult.EXHAUSTED_NO_WORK
            else:
                # move to nxt: skip past executing tasks without occupancy
                if nxt.phase == EXECUTING:
                    model.absorb(worker.record, nxt.recipe)
                    if self.tracer:
                        self.tracer.emit(worker.worker_id, nxt.id, KIND_SKIP_BUSY)
                    release_pos()
                    pos, holds = nxt, False
                    continue
                nxt.lock.acquire()
                if nxt.erased:
                    nxt.lock.release()
                    continue  # executed+erased while we waited; re-read links
                release_pos()
                pos, holds = nxt, True

            worker.position = pos
            result = self.try_handle(worker, pos)
            if result is not HandleResult.EXECUTE:
                continue

            # execute: release occupancy so others can stream past
            pos.lock.release()
            holds = False
            model.execute(pos.recipe)
            if self.tracer:
                self.tracer.emit(worker.worker_id, pos.id, KIND_EXEC_END)
            pos.lock.acquire()  # re-acquire before splicing (occ -> erase order)
            with erase_lock:
                erase_task(chain, pos)
                if self.tracer:
                    self.tracer.emit(worker.worker_id, pos.id, KIND_ERASED)
            pos.lock.release()
            worker.position = None
            return CycleResult.EXECUTED_ONE

    def _worker_main(self, worker: Worker) -> None:
        chain = self.chain
        try:
            while not self._abort.is_set():
                result = self.worker_cycle(worker)
                if result is CycleResult.ABORTED:
                    return
                if result is CycleResult.EXHAUSTED_NO_WORK:
                    # terminate once no task can ever appear again
                    with chain.enter_lock:
                        with chain.erase_lock:
                            empty = chain.head is None
                        if self._exhausted and empty:
                            return
                    time.sleep(0)  # let executors finish remaining tasks
        except BaseException as exc:  # propagate to the control thread
            with self._error_lock:
                self._errors.append(exc)
            self._abort.set()

    # -- entry point -----------------------------------------------------

    def run(self) -> RunResult:
        config = self.config
        workers = [Worker(i, self.model.new_record()) for i in range(config.n_workers)]
        threads = [
            threading.Thread(target=self._worker_main, args=(w,), daemon=True)
            for w in workers
        ]
        t0 = perf_counter()
        self.model.prepare()  # inside the timed region by contract
        for t in threads:
            t.start()
        deadline = None if config.watchdog_s is None else t0 + config.watchdog_s
        for t in threads:
            while t.is_alive():
                t.join(timeout=None if deadline is None else max(deadline - perf_counter(), 0.01))
                if deadline is not None and perf_counter() > deadline and t.is_alive():
                    self._abort.set()
                    for u in threads:
                        u.join(timeout=5.0)
                    raise WatchdogTimeout(
                        f"run exceeded watchdog of {config.watchdog_s:.3f}s "
                        f"(created={self.chain.created_count}, erased={self.chain.erased_count})",
                        self.tracer.events if self.tracer else None,
                    )
        wall = perf_counter() - t0
        if self._errors:
            raise self._errors[0]
        return RunResult(
            digest=self.model.state_digest(),
            trace=self.tracer.events if self.tracer else None,
            wall_s=wall,
            created=self.chain.created_count,
            erased=self.chain.erased_count,
        )


def run(model, config: EngineConfig) -> RunResult:
    """Run `model` to completion under `config` and return the outcome."""
    return Engine(model, config).run()

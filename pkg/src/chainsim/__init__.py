"""Shared-memory adaptive parallel execution of agent-based simulations."""

from .engine import (Chain, CycleResult, Engine, EngineConfig, HandleResult,
                     RunResult, Task, TraceEvent, WatchdogTimeout, Worker,
                     append_task, erase_task, read_trace_csv, run,
                     write_trace_csv)
from .model_api import Model

__all__ = [
    "Chain", "CycleResult", "Engine", "EngineConfig", "HandleResult", "Model",
    "RunResult", "Task", "TraceEvent", "WatchdogTimeout", "Worker",
    "append_task", "erase_task", "read_trace_csv", "run", "write_trace_csv",
]

__version__ = "0.1.0"

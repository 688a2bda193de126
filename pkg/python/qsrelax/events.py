"""Progress events emitted by long-running commands."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class RunStarted:
    command: str
    total_jobs: int


@dataclass(frozen=True, slots=True)
class JobStarted:
    job: str
    total: int


@dataclass(frozen=True, slots=True)
class JobAdvanced:
    job: str
    completed: int


@dataclass(frozen=True, slots=True)
class JobFinished:
    job: str
    seconds: float
    summary: str = ""


@dataclass(frozen=True, slots=True)
class RunFinished:
    command: str
    status: str


Event = RunStarted | JobStarted | JobAdvanced | JobFinished | RunFinished

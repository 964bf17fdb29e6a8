"""Shared search plumbing: derivations, budgets, run configuration."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .grammar import LexEntry

DEFAULT_BUDGET = 10 ** 6


def ensure_recursion_room(limit: int = 300_000) -> None:
    """Deep budget-bounded regresses need more than the default stack."""
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)


def default_budget() -> int:
    env = os.environ.get("SKG_BUDGET")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Leaf:
    entry: LexEntry


@dataclass(frozen=True)
class Node:
    rule_id: str
    children: tuple  # tuple[Derivation, ...] in daughter order


Derivation = object  # Leaf | Node


def yield_tokens(derivation) -> tuple:
    """Left-to-right sequence of leaf surface tokens."""
    if isinstance(derivation, Leaf):
        return (derivation.entry.surface,)
    return tuple(t for child in derivation.children for t in yield_tokens(child))


def signature(derivation):
    """Hashable identity of a derivation (rule ids + leaf surfaces)."""
    if isinstance(derivation, Leaf):
        return ("lex", derivation.entry.surface, derivation.entry.cat)
    return ("rule", derivation.rule_id,
            tuple(signature(c) for c in derivation.children))


def format_derivation(derivation, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(derivation, Leaf):
        return f"{pad}lex {derivation.entry.surface!r} ({derivation.entry.cat})"
    lines = [f"{pad}rule {derivation.rule_id}"]
    for child in derivation.children:
        lines.append(format_derivation(child, indent + 1))
    return "\n".join(lines)


class BudgetExhausted(Exception):
    """Raised internally when a search runs out of steps."""


@dataclass
class GenConfig:
    step_budget: int = field(default_factory=default_budget)
    max_results: Optional[int] = None
    trace: bool = False

    def __post_init__(self):
        if self.step_budget < 1:
            raise ValueError("step_budget must be positive")


class StepCounter:
    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            raise BudgetExhausted()


@dataclass
class GenResult:
    outputs: list  # list[(surface tuple, Derivation, root description)]
    steps_used: int
    exhausted_budget: bool
    trace_log: list = field(default_factory=list)

    @property
    def surfaces(self):
        return [" ".join(out[0]) for out in self.outputs]

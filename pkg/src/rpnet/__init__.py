"""Reversing Petri nets with guard-controlled reversal."""

from .model import Bond, Neg, Net, State, Transition, Violation, label, tokens_of, validate
from .semantics import (
    FORWARD,
    REVERSE,
    Direction,
    FixedSequence,
    ForwardFirst,
    RandomUniform,
    Step,
    co_enabled,
    con,
    enabled_steps,
    fire,
    force_reverse,
    forward_enabled,
    reverse,
    run,
)
from .netfile import dumps, format_marking, load, loads

__version__ = "0.1.0"


def example_path(name: str = "fig1b.rpn"):
    from importlib import resources

    return resources.files(__package__) / "data" / name

"""Forward execution, causal-order reversal, and seeded schedulers."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .conditions import holds
from .errors import NotCoEnabled, NotEnabled
from .model import Bond, Net, State, positives, tokens_of


class Direction(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"

    @classmethod
    def parse(cls, text: str) -> Direction:
        t = text.strip().lower()
        if t in ("fwd", "forward", "f"):
            return cls.FORWARD
        if t in ("rev", "reverse", "r", "back"):
            return cls.REVERSE
        raise ValueError(f"unknown direction {text!r}")


FORWARD = Direction.FORWARD
REVERSE = Direction.REVERSE


@dataclass(frozen=True)
class Step:
    transition: str
    direction: Direction
    key: int


def con(a: str, elems: Iterable) -> frozenset:
    """Bases connected to *a* through the bonds of *elems*, plus those bonds.

    A bond in *elems* brings its endpoints with it.  Returns the empty set
    when *a* does not occur in *elems*.
    """
    adj: dict[str, list[Bond]] = {}
    present = False
    for e in elems:
        if isinstance(e, Bond):
            adj.setdefault(e.a, []).append(e)
            adj.setdefault(e.b, []).append(e)
        elif e == a:
            present = True
    if not present and a not in adj:
        return frozenset()
    out = {a}
    todo = [a]
    while todo:
        v = todo.pop()
        for bd in adj.get(v, ()):
            if bd in out:
                continue
            out.add(bd)
            w = bd.b if bd.a == v else bd.a
            if w not in out:
                out.add(w)
                todo.append(w)
    return frozenset(out)


def _transition(net: Net, t):
    return net.transitions[t] if isinstance(t, str) else t


def forward_structural(net: Net, s: State, t) -> bool:
    """Clauses (1) and (2) of forward enabledness, without the guard."""
    tr = _transition(net, t)
    m = s.marking
    for x, req, forbid in tr.checks:
        here = m[x]
        if not req <= here or not forbid.isdisjoint(here):
            return False
    for beta in tr.out_bonds:
        for y, lab in tr.inputs.items():
            if beta in m[y] and beta not in lab:
                return False
    return True


def forward_enabled(net: Net, s: State, t) -> bool:
    tr = _transition(net, t)
    return forward_structural(net, s, tr) and holds(tr.guard, s, net)


def fire(net: Net, s: State, t) -> State:
    tr = _transition(net, t)
    if not forward_enabled(net, s, tr):
        raise NotEnabled(tr.id)
    return _fire(net, s, tr)


def _fire(net: Net, s: State, tr) -> State:
    m = s.marking
    new = dict(m)
    for x, lab in tr.inputs.items():
        gone = set()
        for a in tokens_of(lab):
            gone |= con(a, m[x])
        new[x] = new[x] - gone
    remains = {y: m[y] - tr.pre for y in tr.inputs}
    for x, lab in tr.outputs.items():
        lab = positives(lab)
        add = set()
        for a in tokens_of(lab):
            for y in tr.inputs:
                add |= con(a, remains[y] | lab)
        new[x] = new[x] | add
    hist = dict(s.history)
    hist[tr.id] = s.keys(tr.id) | {s.max_key() + 1}
    return State(new, hist)


def causally_clear(net: Net, s: State, t) -> bool:
    """Clause (1) of co-enabledness: effects in place, no live later dependant."""
    tr = _transition(net, t)
    keys = s.keys(tr.id)
    if not keys:
        return False
    k = max(keys)
    m = s.marking
    producers = net.producers
    for y, lab in tr.outputs.items():
        here = m[y]
        for a in tokens_of(lab):
            if a not in here:
                return False
            for e in con(a, here):
                for t2 in producers.get(e, ()):
                    ks = s.history.get(t2)
                    if ks and max(ks) > k:
                        return False
    return True


def co_enabled(net: Net, s: State, t) -> bool:
    tr = _transition(net, t)
    return causally_clear(net, s, tr) and not holds(tr.guard, s, net)


def reverse(net: Net, s: State, t) -> State:
    tr = _transition(net, t)
    if not co_enabled(net, s, tr):
        raise NotCoEnabled(tr.id)
    return _reverse(net, s, tr)


def force_reverse(net: Net, s: State, t) -> State:
    """Reverse ignoring the guard; the causal clause still applies."""
    tr = _transition(net, t)
    if not causally_clear(net, s, tr):
        raise NotCoEnabled(tr.id)
    return _reverse(net, s, tr)


def _reverse(net: Net, s: State, tr) -> State:
    m = s.marking
    new = dict(m)
    for x, lab in tr.outputs.items():
        gone = set()
        for a in tokens_of(lab):
            gone |= con(a, m[x])
        new[x] = new[x] - gone
    remains = {y: m[y] - tr.post for y in tr.outputs}
    for x, lab in tr.inputs.items():
        lab = positives(lab)
        add = set()
        for a in tokens_of(lab):
            for y in tr.outputs:
                add |= con(a, remains[y] | lab)
        new[x] = new[x] | add
    hist = dict(s.history)
    left = s.keys(tr.id) - {max(s.keys(tr.id))}
    if left:
        hist[tr.id] = left
    else:
        del hist[tr.id]
    return State(new, hist)


def step(net: Net, s: State, t: str, direction: Direction) -> tuple[State, Step]:
    if direction is FORWARD:
        s2 = fire(net, s, t)
        return s2, Step(t, FORWARD, max(s2.keys(t)))
    key = max(s.keys(t)) if s.keys(t) else 0
    return reverse(net, s, t), Step(t, REVERSE, key)


def enabled_steps(net: Net, s: State) -> list[tuple[str, Direction]]:
    """All (transition, direction) pairs enabled in *s*, in declaration order."""
    index, free = net.triggers
    cands = set(free)
    for x, elems in s.marking.items():
        for e in elems:
            cands.update(index.get((x, e), ()))
    rank = net.transition_rank
    out = []
    for t in sorted(cands | set(s.history), key=rank.__getitem__):
        tr = net.transitions[t]
        if t in cands and forward_enabled(net, s, tr):
            out.append((t, FORWARD))
        if t in s.history and co_enabled(net, s, tr):
            out.append((t, REVERSE))
    return out


# -- scheduling --------------------------------------------------------------


@dataclass(frozen=True)
class RandomUniform:
    seed: int = 0


@dataclass(frozen=True)
class ForwardFirst:
    seed: int = 0


@dataclass(frozen=True)
class FixedSequence:
    steps: tuple = ()


Policy = Union[RandomUniform, ForwardFirst, FixedSequence]


class RunResult(NamedTuple):
    state: State
    trace: list
    halted: str  # "stuck", "limit" or "exhausted"

    @property
    def converged(self) -> bool:
        return self.halted == "stuck"


def run(net: Net, s0: State, policy: Policy, max_steps: int) -> RunResult:
    """Drive the net until nothing is enabled or *max_steps* steps were taken."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    s = s0
    trace: list[Step] = []
    if isinstance(policy, FixedSequence):
        for t, d in policy.steps[:max_steps]:
            if (t, d) not in enabled_steps(net, s):
                return RunResult(s, trace, "stuck")
            s, st = step(net, s, t, d)
            trace.append(st)
        if len(policy.steps) > max_steps:
            return RunResult(s, trace, "limit")
        return RunResult(s, trace, "exhausted")

    rng = random.Random(policy.seed)
    while len(trace) < max_steps:
        options = enabled_steps(net, s)
        if not options:
            return RunResult(s, trace, "stuck")
        if isinstance(policy, ForwardFirst):
            fwd = [o for o in options if o[1] is FORWARD]
            options = fwd or options
        t, d = options[rng.randrange(len(options))]
        s, st = step(net, s, t, d)
        trace.append(st)
    halted = "limit" if enabled_steps(net, s) else "stuck"
    return RunResult(s, trace, halted)


def replay(net: Net, s0: State, trace: Iterable[Step]) -> State:
    s = s0
    for st in trace:
        s, done = step(net, s, st.transition, st.direction)
        if done.key != st.key:
            raise ValueError(f"trace key mismatch at {st}: replay gave {done.key}")
    return s

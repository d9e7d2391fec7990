"""Seeded generator of small well-formed nets for property testing.

Transitions are drawn against a scratch marking that evolves as they are
generated, so most nets have something enabled at the start and many
contain bond creation, bond breaking, negative requirements and cycles.
Nets failing :func:`validate` or carrying a split hazard are redrawn.
"""

from __future__ import annotations

import random

from . import conditions
from .model import Bond, Kind, Neg, Net, State, Transition, bases_in, bonds_in, label, split_hazards, tokens_of, validate
from .semantics import _fire


def random_net(seed: int, max_places: int = 6, max_transitions: int = 4, max_bases: int = 8) -> Net:
    rng = random.Random(seed)
    while True:
        net = _draw(rng, max_places, max_transitions, max_bases)
        if net is not None and not validate(net) and not split_hazards(net):
            return net


def corpus(n: int, seed: int = 0, **limits) -> list[Net]:
    return [random_net(seed * 1_000_003 + i, **limits) for i in range(n)]


def _draw(rng, max_places, max_transitions, max_bases):
    n_bases = rng.randint(2, max_bases)
    n_places = rng.randint(2, max_places)
    n_trans = rng.randint(1, max_transitions)
    bases = [f"b{i}" for i in range(n_bases)]
    places = [f"P{i}" for i in range(n_places)]

    marking = {p: set() for p in places}
    for b in bases:
        marking[rng.choice(places)].add(b)
    for p in places:
        here = sorted(bases_in(marking[p]))
        for i, u in enumerate(here):
            for w in here[i + 1:]:
                if rng.random() < 0.2:
                    marking[p].add(Bond(u, w))
    initial = {p: frozenset(e) for p, e in marking.items()}

    shell = Net(
        places=tuple(places),
        types={"tok": Kind("unit")},
        bases={b: "tok" for b in bases},
        transitions={},
        values={b: None for b in bases},
        initial=initial,
    )
    state = State.make(places, initial)
    transitions = {}
    for k in range(n_trans):
        tr = _draw_transition(rng, f"t{k}", state, places, bases, first=(k == 0))
        if tr is None:
            return None
        transitions[tr.id] = tr
        state = _fire(shell, state, tr)

    return Net(
        places=tuple(places),
        types={"tok": Kind("unit")},
        bases={b: "tok" for b in bases},
        transitions=transitions,
        values={b: None for b in bases},
        initial=initial,
    )


def _draw_transition(rng, tid, state, places, bases, first):
    occupied = [p for p in places if bases_in(state.marking[p])]
    sources = rng.sample(occupied, k=min(len(occupied), rng.choice((1, 1, 2))))
    inputs = {}
    for x in sources:
        here = state.marking[x]
        hb = sorted(bases_in(here))
        hbonds = sorted(bonds_in(here))
        picked = set(rng.sample(hb, k=rng.randint(1, min(2, len(hb)))))
        if hbonds and rng.random() < 0.4:
            bd = rng.choice(hbonds)
            picked.discard(bd.a)
            picked.discard(bd.b)
            picked.add(bd)
        lab = set(picked)
        absent = [b for b in bases if b not in here]
        if absent and rng.random() < 0.2:
            lab.add(Neg(rng.choice(absent)))
        inputs[x] = lab

    # route listed tokens to one or two destinations
    owner = {}
    for x, lab in inputs.items():
        for b in tokens_of(lab):
            owner[b] = x
    toks = sorted(owner)
    dests = rng.sample(places, k=min(len(places), rng.choice((1, 1, 2))))
    route = {b: rng.choice(dests) for b in toks}
    # keep bonded pairs that are not consumed together
    for x in sources:
        for bd in bonds_in(state.marking[x]):
            if bd.a in route and bd.b in route and bd not in inputs[x]:
                route[bd.b] = route[bd.a]

    outputs = {}
    for b, d in route.items():
        outputs.setdefault(d, set()).add(b)
    for x, lab in inputs.items():
        for bd in bonds_in(lab):
            if route[bd.a] == route[bd.b] and rng.random() < 0.6:
                out = outputs[route[bd.a]]
                out.discard(bd.a)
                out.discard(bd.b)
                out.add(bd)
    for d, out in outputs.items():
        free = sorted(tokens_of(out))
        if len(free) >= 2 and rng.random() < 0.35:
            u, w = rng.sample(free, 2)
            bd = Bond(u, w)
            if any(bd in state.marking[p] for p in places):
                continue
            out.add(bd)
            src = owner[u]
            if owner[w] == src and bd not in inputs[src]:
                inputs[src].add(Neg(bd))

    roll = rng.random()
    if first or roll < 0.45:
        guard = "true"
    elif roll < 0.8:
        b = rng.choice(toks)
        guard = f"in({b}, {owner[b]})"
    elif roll < 0.9:
        guard = f"not in({rng.choice(bases)}, {rng.choice(places)})"
    else:
        guard = "false"
    try:
        ins = {x: label(*lab) for x, lab in inputs.items()}
        outs = {d: label(*out) for d, out in outputs.items()}
    except ValueError:
        return None
    return Transition(tid, ins, outs, conditions.parse(guard), guard)

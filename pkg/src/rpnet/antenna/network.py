"""Build the antenna-selection net from a topology and a channel matrix.

Places ``A1..An`` are antennas and ``M1..Mh`` neighbourhoods.  Power
tokens ``p1..pl`` mark switched-on antennas, ``m1..mh`` stand for the
neighbourhoods and ``a1..an`` carry the channel rows.  An antenna that is
on has its ``a`` token bonded to the ``m`` token of one neighbourhood.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import conditions
from ..conditions import HostFunction
from ..errors import InvalidTopology
from ..model import BASE, IDLIST, REAL, Bond, Kind, Net, State, Transition, label
from .capacity import capacity, from_real_row, to_real_row

ANTENNA_TYPE = "antenna"
SWAP_FN = "capacity_with"


def antenna_place(i: int) -> str:
    return f"A{i + 1}"


def antenna_token(i: int) -> str:
    return f"a{i + 1}"


def hood_place(k: int) -> str:
    return f"M{k + 1}"


def hood_token(k: int) -> str:
    return f"m{k + 1}"


def power_token(r: int) -> str:
    return f"p{r + 1}"


def antenna_index(token: str) -> int:
    return int(token[1:]) - 1


def transition_id(i: int, j: int, k: int, r: int) -> str:
    return f"t{i + 1}_{j + 1}_M{k + 1}_p{r + 1}"


def parse_transition_id(tid: str) -> tuple[int, int, int, int]:
    """Inverse of :func:`transition_id`: zero-based (i, j, k, r)."""
    m = re.fullmatch(r"t(\d+)_(\d+)_M(\d+)_p(\d+)", tid)
    if not m:
        raise ValueError(f"not an antenna transition: {tid}")
    return tuple(int(g) - 1 for g in m.groups())


@dataclass(frozen=True)
class Topology:
    """Antennas 0..n_t-1 grouped into (possibly overlapping) neighbourhoods.

    ``home`` gives, for each initially-on antenna, the neighbourhood whose
    place holds its bonded token; it defaults to the first one containing it.
    """

    n_t: int
    hoods: tuple[tuple[int, ...], ...]
    initial_on: frozenset
    home: tuple[tuple[int, int], ...] = ()

    def homes(self) -> dict[int, int]:
        chosen = dict(self.home)
        for i in sorted(self.initial_on):
            if i not in chosen:
                chosen[i] = next(k for k, h in enumerate(self.hoods) if i in h)
        return chosen

    def links(self) -> list[tuple[int, int, int]]:
        """Ordered antenna pairs (i, j) with the neighbourhood k they share."""
        return [(i, j, k) for k, h in enumerate(self.hoods) for i in h for j in h if i != j]

    def check(self) -> None:
        if self.n_t < 1:
            raise InvalidTopology("need at least one antenna")
        seen = set()
        for h in self.hoods:
            if not h:
                raise InvalidTopology("empty neighbourhood")
            for i in h:
                if not 0 <= i < self.n_t:
                    raise InvalidTopology(f"antenna {i} out of range")
            seen.update(h)
        if seen != set(range(self.n_t)):
            raise InvalidTopology("every antenna must belong to a neighbourhood")
        for i in self.initial_on:
            if not 0 <= i < self.n_t:
                raise InvalidTopology(f"initially-on antenna {i} out of range")
        for i, k in self.homes().items():
            if i not in self.initial_on:
                raise InvalidTopology(f"home given for antenna {i} which is off")
            if not 0 <= k < len(self.hoods) or i not in self.hoods[k]:
                raise InvalidTopology(f"antenna {i} is not in neighbourhood {k}")

    def with_selection(self, on, home=()) -> Topology:
        return Topology(self.n_t, self.hoods, frozenset(on), tuple(sorted(dict(home).items())))


def ring_hoods(n_t: int, size: int = 8, stride: int = 4) -> tuple[tuple[int, ...], ...]:
    """Overlapping windows of *size* antennas every *stride* positions on a ring."""
    if size >= n_t:
        return (tuple(range(n_t)),)
    out = []
    for start in range(0, n_t, stride):
        h = tuple(sorted({(start + o) % n_t for o in range(size)}))
        if h not in out:
            out.append(h)
    return tuple(out)


def ring_topology(n_t: int, initial_on, size: int = 8, stride: int = 4, home=()) -> Topology:
    return Topology(n_t, ring_hoods(n_t, size, stride), frozenset(initial_on), tuple(sorted(dict(home).items())))


@lru_cache(maxsize=None)
def guard_for(i: int, j: int, k: int) -> conditions.Expr:
    """Fire while swapping antenna i for j raises the neighbourhood capacity."""
    hood = f"tokens_in({hood_place(k)}, {ANTENNA_TYPE})"
    a_i, a_j = antenna_token(i), antenna_token(j)
    text = f"{SWAP_FN}({hood}, {a_i}, {a_j}) < {SWAP_FN}({hood}, {a_j}, {a_i})"
    return conditions.parse(text)


def swap_capacity_function(rho: float, n_ts: int, n_r: int, P=None) -> HostFunction:
    """Host function ``capacity_with(active, on, off)``.

    Capacity of the active set with *off* removed and *on* added, reading
    channel rows from the token values of the net.  Results are cached per
    set, which is safe because token values never change during a run.
    """
    cache: dict = {}

    def impl(ctx, active, on, off):
        chosen = frozenset(active) - {off} | {on}
        hit = cache.get(chosen)
        if hit is None:
            rows = [from_real_row(ctx.net.values[a]) for a in sorted(chosen)]
            Hc = np.array(rows).reshape(len(rows), n_r)
            hit = cache[chosen] = capacity(Hc, rho, n_ts, n_r, P)
        return hit

    return HostFunction(SWAP_FN, (IDLIST, BASE, BASE), REAL, impl, needs_context=True)


def initial_marking(top: Topology, n_hoods: int) -> dict[str, set]:
    marking = {antenna_place(i): set() for i in range(top.n_t)}
    marking.update({hood_place(k): {hood_token(k)} for k in range(n_hoods)})
    homes = top.homes()
    for r, i in enumerate(sorted(top.initial_on)):
        marking[antenna_place(i)].add(power_token(r))
        k = homes[i]
        marking[hood_place(k)] |= {antenna_token(i), Bond(antenna_token(i), hood_token(k))}
    for i in range(top.n_t):
        if i not in top.initial_on:
            marking[antenna_place(i)].add(antenna_token(i))
    return marking


def build_net(top: Topology, H, rho: float, n_ts: int, n_r: int, P=None) -> Net:
    top.check()
    H = np.asarray(H, dtype=complex)
    if H.shape != (top.n_t, n_r):
        raise InvalidTopology(f"channel must be {top.n_t}x{n_r}, got {H.shape}")
    if len(top.initial_on) != n_ts:
        raise InvalidTopology(f"{len(top.initial_on)} antennas on, expected {n_ts}")
    n_hoods = len(top.hoods)

    types = {"power": Kind("unit"), "hood": Kind("unit"), ANTENNA_TYPE: Kind("vector", 2 * n_r)}
    bases: dict[str, str] = {}
    values: dict[str, object] = {}
    for r in range(n_ts):
        bases[power_token(r)] = "power"
        values[power_token(r)] = None
    for k in range(n_hoods):
        bases[hood_token(k)] = "hood"
        values[hood_token(k)] = None
    for i in range(top.n_t):
        bases[antenna_token(i)] = ANTENNA_TYPE
        values[antenna_token(i)] = to_real_row(H[i])

    places = tuple(antenna_place(i) for i in range(top.n_t)) + tuple(hood_place(k) for k in range(n_hoods))

    transitions = {}
    for i, j, k in top.links():
        a_i, a_j, m_k = antenna_token(i), antenna_token(j), hood_token(k)
        A_i, A_j, M_k = antenna_place(i), antenna_place(j), hood_place(k)
        for r in range(n_ts):
            p = power_token(r)
            tid = transition_id(i, j, k, r)
            transitions[tid] = Transition(
                tid,
                inputs={A_i: label(p), A_j: label(a_j), M_k: label(Bond(a_i, m_k))},
                outputs={A_i: label(a_i), A_j: label(p), M_k: label(Bond(a_j, m_k))},
                guard=guard_for(i, j, k),
                guard_text=conditions.to_text(guard_for(i, j, k)),
            )

    bonds = frozenset(Bond(antenna_token(i), hood_token(k)) for k, h in enumerate(top.hoods) for i in h)
    return Net(
        places=places,
        types=types,
        bases=bases,
        transitions=transitions,
        values=values,
        initial={p: frozenset(e) for p, e in initial_marking(top, n_hoods).items()},
        bonds=bonds,
        functions={SWAP_FN: swap_capacity_function(rho, n_ts, n_r, P)},
    )


def selection_state(net: Net, top: Topology) -> State:
    """Initial state of *net* for another starting selection of the same size."""
    n_hoods = sum(1 for p in net.places if p.startswith("M"))
    return State.make(net.places, initial_marking(top, n_hoods))


def selected(state: State, n_t: int) -> tuple[int, ...]:
    """Antennas currently holding a power token."""
    return tuple(
        i for i in range(n_t)
        if any(isinstance(e, str) and e.startswith("p") for e in state.marking[antenna_place(i)])
    )


def active_in(state: State, k: int) -> tuple[int, ...]:
    """Antennas whose tokens sit in neighbourhood place k."""
    return tuple(sorted(
        antenna_index(e) for e in state.marking[hood_place(k)]
        if isinstance(e, str) and e.startswith("a")
    ))


def build_hc(state: State, place: str, H, rows: int | None = None) -> np.ndarray:
    """Channel rows of the antennas whose tokens are in *place*; zero rows otherwise."""
    H = np.asarray(H, dtype=complex)
    rows = H.shape[0] if rows is None else rows
    out = np.zeros((rows, H.shape[1]), dtype=complex)
    for e in state.marking[place]:
        if isinstance(e, str) and e.startswith("a"):
            i = antenna_index(e)
            if i < rows:
                out[i] = H[i]
    return out

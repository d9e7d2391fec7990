"""Net structure, states, and well-formedness checks.

Marking elements are plain strings (bases) and :class:`Bond` values.  Arc
labels are frozensets that may additionally hold :class:`Neg` wrappers,
which demand the absence of a base or bond.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Union

from .errors import GuardTypeError


@dataclass(frozen=True, order=True)
class Bond:
    """Undirected bond; endpoints are stored sorted so (a,b) == (b,a)."""

    a: str
    b: str

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"bond endpoints must differ: {self.a}")
        if self.b < self.a:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    @property
    def ends(self) -> tuple[str, str]:
        return (self.a, self.b)

    def __str__(self):
        return f"({self.a},{self.b})"


@dataclass(frozen=True)
class Neg:
    item: Union[str, Bond]

    def __str__(self):
        return f"!{self.item}"


Element = Union[str, Bond]
ArcElement = Union[str, Bond, Neg]


@dataclass(frozen=True)
class Kind:
    name: str
    dim: int | None = None

    def __str__(self):
        return f"vector({self.dim})" if self.name == "vector" else self.name


UNIT = Kind("unit")
BOOLEAN = Kind("boolean")
REAL = Kind("real")
# kinds that only occur inside guards
PLACE = Kind("place")
BASE = Kind("base")
TYPE = Kind("type")
IDLIST = Kind("idlist")


def vector(dim: int | None) -> Kind:
    return Kind("vector", dim)


VALUE_KINDS = ("unit", "boolean", "real", "vector")


def coerce_value(kind: Kind, value: Any) -> Any:
    """Check *value* against a value kind and return its canonical form."""
    if kind.name == "unit":
        if value is not None:
            raise TypeError(f"unit tokens carry no value, got {value!r}")
        return None
    if kind.name == "boolean":
        if not isinstance(value, bool):
            raise TypeError(f"expected boolean, got {value!r}")
        return value
    if kind.name == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"expected real, got {value!r}")
        return float(value)
    if kind.name == "vector":
        try:
            vals = tuple(float(v) for v in value)
        except TypeError:
            raise TypeError(f"expected vector({kind.dim}), got {value!r}") from None
        if kind.dim is not None and len(vals) != kind.dim:
            raise TypeError(f"expected vector({kind.dim}), got length {len(vals)}")
        return vals
    raise TypeError(f"{kind} is not a value kind")


def label(*elements: ArcElement) -> frozenset:
    """Build an arc label, rejecting an element given in both polarities."""
    lab = frozenset(elements)
    for e in lab:
        if isinstance(e, Neg) and e.item in lab:
            raise ValueError(f"{e.item} appears both positively and negatively")
    return lab


def positives(lab: Iterable[ArcElement]) -> frozenset:
    return frozenset(e for e in lab if not isinstance(e, Neg))


def negatives(lab: Iterable[ArcElement]) -> frozenset:
    return frozenset(e.item for e in lab if isinstance(e, Neg))


def tokens_of(lab: Iterable[ArcElement]) -> frozenset:
    """Bases named by a label directly or as endpoints of positive bonds."""
    out = set()
    for e in lab:
        if isinstance(e, str):
            out.add(e)
        elif isinstance(e, Bond):
            out.update(e.ends)
    return frozenset(out)


def closure(lab: Iterable[ArcElement]) -> frozenset:
    """Positive elements of a label plus the endpoints of its bonds."""
    pos = positives(lab)
    return pos | tokens_of(pos)


def bases_in(elems: Iterable[Element]) -> frozenset:
    return frozenset(e for e in elems if isinstance(e, str))


def bonds_in(elems: Iterable[Element]) -> frozenset:
    return frozenset(e for e in elems if isinstance(e, Bond))


@dataclass(frozen=True)
class Transition:
    id: str
    inputs: Mapping[str, frozenset]
    outputs: Mapping[str, frozenset]
    guard: Any  # conditions.Expr
    guard_text: str = field(default="true", compare=False)

    @cached_property
    def pre(self) -> frozenset:
        """Positive elements over all in-arcs, as written."""
        return frozenset().union(*(positives(l) for l in self.inputs.values()))

    @cached_property
    def post(self) -> frozenset:
        return frozenset().union(*(positives(l) for l in self.outputs.values()))

    @cached_property
    def pre_closed(self) -> frozenset:
        return closure(self.pre)

    @cached_property
    def post_closed(self) -> frozenset:
        return closure(self.post)

    @cached_property
    def out_bonds(self) -> frozenset:
        return bonds_in(self.post)

    @cached_property
    def checks(self) -> tuple:
        # (place, required, forbidden) per in-arc
        return tuple(
            (x, positives(l), negatives(l)) for x, l in sorted(self.inputs.items())
        )


@dataclass(frozen=True)
class Net:
    places: tuple[str, ...]
    types: Mapping[str, Kind]
    bases: Mapping[str, str]  # base id -> type id, in declaration order
    transitions: Mapping[str, Transition]
    values: Mapping[str, Any]
    initial: Mapping[str, frozenset]
    bonds: frozenset = frozenset()  # declared bonds; always covers the initial marking
    functions: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        marked = frozenset().union(*(bonds_in(e) for e in self.initial.values()))
        object.__setattr__(self, "bonds", frozenset(self.bonds) | marked)

    def kind_of(self, base: str) -> Kind:
        return self.types[self.bases[base]]

    @cached_property
    def base_rank(self) -> dict[str, int]:
        return {b: i for i, b in enumerate(self.bases)}

    @cached_property
    def transition_rank(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.transitions)}

    @cached_property
    def triggers(self) -> tuple[dict, tuple]:
        """Index transitions by one required (place, element) pair.

        A transition can only be forward-enabled when its trigger element is
        in its trigger place, so enabledness scans can skip the rest.
        """
        index: dict = {}
        free = []
        for tid, tr in self.transitions.items():
            for x, req, _ in tr.checks:
                if req:
                    elem = min(req, key=_elem_key)
                    index.setdefault((x, elem), []).append(tid)
                    break
            else:
                free.append(tid)
        return index, tuple(free)

    @cached_property
    def producers(self) -> dict[Element, tuple[str, ...]]:
        """For each element, the transitions whose closed post-set holds it."""
        out: dict = {}
        for tid, tr in self.transitions.items():
            for e in tr.post_closed:
                out.setdefault(e, []).append(tid)
        return {e: tuple(ts) for e, ts in out.items()}

    def initial_state(self) -> State:
        return State.make(self.places, self.initial)


def _elem_key(e) -> tuple:
    return (0, e, "") if isinstance(e, str) else (1, e.a, e.b)


@dataclass(frozen=True)
class State:
    """A marking (every place present) and a sparse history (no empty entries)."""

    marking: Mapping[str, frozenset]
    history: Mapping[str, frozenset]

    @classmethod
    def make(cls, places, marking, history=None) -> State:
        m = {p: frozenset(marking.get(p, ())) for p in places}
        h = {t: frozenset(ks) for t, ks in (history or {}).items() if ks}
        return cls(m, h)

    def __hash__(self):
        return hash((frozenset(self.marking.items()), frozenset(self.history.items())))

    def keys(self, t: str) -> frozenset:
        return self.history.get(t, frozenset())

    def max_key(self) -> int:
        return max((max(ks) for ks in self.history.values()), default=0)

    def where(self, base: str) -> str | None:
        for p, elems in self.marking.items():
            if base in elems:
                return p
        return None


def state_problems(net: Net, state: State) -> list[str]:
    """Invariant violations of a state: conservation, bond closure, key uniqueness."""
    problems = []
    seen = Counter()
    bond_seen = Counter()
    for p, elems in state.marking.items():
        for e in elems:
            if isinstance(e, Bond):
                bond_seen[e] += 1
                if e.a not in elems or e.b not in elems:
                    problems.append(f"bond {e} in {p} without both endpoints")
            else:
                seen[e] += 1
    for b in net.bases:
        if seen[b] != 1:
            problems.append(f"base {b} occurs {seen[b]} times")
    for b in seen:
        if b not in net.bases:
            problems.append(f"unknown base {b} in marking")
    for bond, n in bond_seen.items():
        if n > 1:
            problems.append(f"bond {bond} occurs in {n} places")
    keys = [k for ks in state.history.values() for k in ks]
    if len(keys) != len(set(keys)):
        problems.append("history keys are not globally distinct")
    if any(k < 1 for k in keys):
        problems.append("history keys must be positive")
    return problems


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str

    def __str__(self):
        return f"{self.code} [{self.where}] {self.message}"


def validate(net: Net) -> list[Violation]:
    """Every well-formedness violation of *net*; an empty list means well-formed."""
    from .conditions import typecheck

    out: list[Violation] = []
    places = set(net.places)

    def bad(code, where, msg):
        out.append(Violation(code, where, msg))

    for b, ty in net.bases.items():
        if ty not in net.types:
            bad("V0", b, f"unknown type {ty}")
            continue
        if b not in net.values:
            bad("V0", b, "no value assigned")
            continue
        try:
            coerce_value(net.types[ty], net.values[b])
        except TypeError as exc:
            bad("V0", b, str(exc))

    for tid, tr in net.transitions.items():
        for x, lab in list(tr.inputs.items()) + list(tr.outputs.items()):
            if x not in places:
                bad("V0", tid, f"arc to unknown place {x}")
            for e in lab:
                item = e.item if isinstance(e, Neg) else e
                for b in (item,) if isinstance(item, str) else item.ends:
                    if b not in net.bases:
                        bad("V0", tid, f"unknown base {b} on arc at {x}")
                if isinstance(e, Neg) and e.item in lab:
                    bad("V0", tid, f"{e.item} both required and forbidden at {x}")

        lost = tokens_of(tr.pre) - tokens_of(tr.post)
        made = tokens_of(tr.post) - tokens_of(tr.pre)
        if lost:
            bad("V1", tid, f"erases {', '.join(sorted(lost))}")
        if made:
            bad("V1", tid, f"creates {', '.join(sorted(made))}")

        outs = sorted(tr.outputs.items())
        for i, (x, lx) in enumerate(outs):
            for y, ly in outs[i + 1:]:
                shared = closure(lx) & closure(ly)
                if shared:
                    names = ", ".join(sorted(map(str, shared)))
                    bad("V2", tid, f"{names} sent to both {x} and {y}")

        for x, lab in outs:
            if negatives(lab):
                bad("V6", tid, f"negative element on out-arc to {x}")

        for beta in tr.out_bonds:
            for y, lab in tr.inputs.items():
                if set(beta.ends) <= tokens_of(lab) and beta not in lab and Neg(beta) not in lab:
                    bad("V7", tid, f"out-bond {beta} may pre-exist in {y} but is not listed there")

        try:
            kind = typecheck(tr.guard, net)
        except GuardTypeError as exc:
            bad("V5", tid, str(exc))
        else:
            if kind != BOOLEAN:
                bad("V5", tid, f"guard has kind {kind}, expected boolean")

    count = Counter()
    for p, elems in net.initial.items():
        if p not in places:
            bad("V3", p, "initial marking names unknown place")
        for e in elems:
            if isinstance(e, str):
                count[e] += 1
            elif e.a not in elems or e.b not in elems:
                bad("V4", p, f"bond {e} without both endpoints")
    for b in net.bases:
        if count[b] != 1:
            bad("V3", b, f"occurs {count[b]} times in the initial marking")
    for b in count:
        if b not in net.bases:
            bad("V3", b, "undeclared base in initial marking")
    return out


def split_hazards(net: Net) -> list[tuple[str, str, str]]:
    """Pairs of tokens a step could tear apart into two destinations.

    Fire and reverse move whole connected components.  If two bases routed to
    different places can still be bonded (through bonds the step does not
    consume) the component would be copied to both.  The check is
    conservative: it uses every bond that can ever exist in the net.
    """
    may = set(net.bonds)
    for elems in net.initial.values():
        may |= bonds_in(elems)
    for tr in net.transitions.values():
        may |= bonds_in(tr.pre) | bonds_in(tr.post)

    def linked(u, w, removed):
        adj: dict = {}
        for bd in may - removed:
            adj.setdefault(bd.a, []).append(bd.b)
            adj.setdefault(bd.b, []).append(bd.a)
        seen, todo = {u}, [u]
        while todo:
            v = todo.pop()
            if v == w:
                return True
            for n in adj.get(v, ()):
                if n not in seen:
                    seen.add(n)
                    todo.append(n)
        return False

    out = []
    for tid, tr in net.transitions.items():
        for src, dst, removed in (
            (tr.inputs, tr.outputs, bonds_in(tr.pre)),
            (tr.outputs, tr.inputs, bonds_in(tr.post)),
        ):
            dest = {}
            for x, lab in dst.items():
                for b in tokens_of(lab):
                    dest[b] = x
            for lab in src.values():
                toks = sorted(tokens_of(lab))
                for i, u in enumerate(toks):
                    for w in toks[i + 1:]:
                        if dest.get(u) != dest.get(w) and linked(u, w, removed):
                            out.append((tid, u, w))
    return out

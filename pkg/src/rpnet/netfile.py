"""Text format for nets, canonical marking dumps, and trace CSVs.

A net file is a sequence of sections::

    TYPES
      power: unit
      antenna: vector(2)
    TOKENS
      p: power
      a_i: antenna = [0.5, -0.2]
    PLACES
      A_i, A_j, M_k
    BONDS
      (a_i,m_k) @ M_k
    MARKING
      p @ A_i
    TRANSITIONS
      transition t_ij
        in A_i: {p}
        out A_j: {p}
        guard: true

``#`` starts a comment.  Negative arc elements are written ``!a`` or
``!(a,b)``.  A bond listed without ``@ place`` is declared but absent
from the initial marking.
"""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path
from typing import Iterable, Mapping

from . import conditions
from .errors import GuardSyntaxError, NetParseError, UnknownIdentifier, ValidationFailed
from .model import (
    VALUE_KINDS,
    Bond,
    Kind,
    Neg,
    Net,
    State,
    Transition,
    bonds_in,
    coerce_value,
    label,
    validate,
)

SECTIONS = ("TYPES", "TOKENS", "PLACES", "BONDS", "MARKING", "TRANSITIONS")
TRACE_COLUMNS = ("step_index", "transition_id", "direction", "occurrence_key")

_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_ID_RE = re.compile(rf"^{_ID}$")
_BOND_RE = re.compile(rf"^\(\s*({_ID})\s*,\s*({_ID})\s*\)$")
_ELEM_RE = re.compile(r"!?\([^)]*\)|[^,\s]+")


def _ident(text, line, what="identifier"):
    text = text.strip()
    if not _ID_RE.match(text):
        raise NetParseError(f"bad {what} {text!r}", line)
    return text


def _parse_kind(text, line) -> Kind:
    text = text.strip()
    m = re.match(r"^vector\s*\(\s*(\d+)\s*\)$", text)
    if m:
        return Kind("vector", int(m.group(1)))
    if text in VALUE_KINDS and text != "vector":
        return Kind(text)
    raise NetParseError(f"unknown value kind {text!r}", line)


def _parse_value(kind: Kind, text: str | None, line):
    if kind.name == "unit":
        if text is not None:
            raise NetParseError("unit tokens take no value", line)
        return None
    if text is None:
        raise NetParseError(f"{kind} token needs a value", line)
    text = text.strip()
    try:
        if kind.name == "boolean":
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if kind.name == "real":
            return float(text)
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(text)
        inner = text[1:-1].strip()
        vals = tuple(float(v) for v in inner.split(",")) if inner else ()
        return coerce_value(kind, vals)
    except (ValueError, TypeError):
        raise NetParseError(f"bad {kind} value {text!r}", line) from None


def _parse_bond(text, line) -> Bond:
    m = _BOND_RE.match(text.strip())
    if not m:
        raise NetParseError(f"bad bond {text!r}", line)
    try:
        return Bond(m.group(1), m.group(2))
    except ValueError as exc:
        raise NetParseError(str(exc), line) from None


def _parse_label(text, line) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise NetParseError(f"arc label must be braced: {text!r}", line)
    elems = []
    for raw in _ELEM_RE.findall(text[1:-1]):
        neg = raw.startswith("!")
        body = raw[1:] if neg else raw
        item = _parse_bond(body, line) if body.startswith("(") else _ident(body, line, "base")
        elems.append(Neg(item) if neg else item)
    try:
        return label(*elems)
    except ValueError as exc:
        raise NetParseError(str(exc), line) from None


def loads(text: str, functions: Mapping | None = None, check: bool = True) -> Net:
    """Parse net text.  With *check*, raise ValidationFailed on any violation."""
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.strip()
        if head in SECTIONS:
            if head in sections:
                raise NetParseError(f"duplicate section {head}", n)
            current = head
            sections[current] = []
            continue
        if current is None:
            raise NetParseError(f"content before any section: {head!r}", n)
        sections[current].append((n, head))

    types: dict[str, Kind] = {}
    for n, line in sections.get("TYPES", []):
        name, sep, kind = line.partition(":")
        if not sep:
            raise NetParseError("expected 'name: kind'", n)
        name = _ident(name, n, "type name")
        if name in types:
            raise NetParseError(f"duplicate type {name}", n)
        types[name] = _parse_kind(kind, n)

    bases: dict[str, str] = {}
    values: dict[str, object] = {}
    for n, line in sections.get("TOKENS", []):
        decl, eq, val = line.partition("=")
        name, sep, ty = decl.partition(":")
        if not sep:
            raise NetParseError("expected 'base: type [= value]'", n)
        name = _ident(name, n, "base")
        ty = _ident(ty, n, "type name")
        if ty not in types:
            raise UnknownIdentifier(f"unknown type {ty}", n)
        if name in bases:
            raise NetParseError(f"duplicate base {name}", n)
        bases[name] = ty
        values[name] = _parse_value(types[ty], val if eq else None, n)

    places: list[str] = []
    for n, line in sections.get("PLACES", []):
        for p in re.split(r"[,\s]+", line.strip()):
            if p:
                p = _ident(p, n, "place")
                if p in places:
                    raise NetParseError(f"duplicate place {p}", n)
                places.append(p)
    if not places:
        raise NetParseError("PLACES section is missing or empty")

    def need_place(p, n):
        if p not in places:
            raise UnknownIdentifier(f"unknown place {p}", n)
        return p

    def need_base(b, n):
        if b not in bases:
            raise UnknownIdentifier(f"unknown base {b}", n)
        return b

    marking: dict[str, set] = {p: set() for p in places}
    declared: set[Bond] = set()
    for n, line in sections.get("BONDS", []):
        body, at, where = line.partition("@")
        bond = _parse_bond(body, n)
        need_base(bond.a, n)
        need_base(bond.b, n)
        declared.add(bond)
        if at:
            marking[need_place(_ident(where, n, "place"), n)].add(bond)

    for n, line in sections.get("MARKING", []):
        body, at, where = line.partition("@")
        if not at:
            raise NetParseError("expected 'base @ place'", n)
        marking[need_place(_ident(where, n, "place"), n)].add(need_base(_ident(body, n), n))

    transitions: dict[str, Transition] = {}
    cur = None

    def close():
        if cur is not None:
            tid, ins, outs, guard, gtext = cur
            transitions[tid] = Transition(tid, ins, outs, guard, gtext)

    for n, line in sections.get("TRANSITIONS", []):
        if line.startswith("transition "):
            close()
            tid = _ident(line[len("transition "):], n, "transition id")
            if tid in transitions:
                raise NetParseError(f"duplicate transition {tid}", n)
            cur = [tid, {}, {}, conditions.TRUE, "true"]
            continue
        if cur is None:
            raise NetParseError("arc or guard outside a transition", n)
        if line.startswith("guard:"):
            gtext = line[len("guard:"):].strip()
            try:
                cur[3] = conditions.parse(gtext)
            except GuardSyntaxError as exc:
                raise NetParseError(f"guard of {cur[0]}: {exc}", n) from None
            cur[4] = gtext
            continue
        m = re.match(rf"^(in|out)\s+({_ID})\s*:\s*(.*)$", line)
        if not m:
            raise NetParseError(f"expected 'in|out place: {{...}}', got {line!r}", n)
        side = cur[1] if m.group(1) == "in" else cur[2]
        p = need_place(m.group(2), n)
        if p in side:
            raise NetParseError(f"duplicate {m.group(1)}-arc at {p}", n)
        lab = _parse_label(m.group(3), n)
        for e in lab:
            item = e.item if isinstance(e, Neg) else e
            for b in (item,) if isinstance(item, str) else item.ends:
                need_base(b, n)
        side[p] = lab
    close()

    net = Net(
        places=tuple(places),
        types=types,
        bases=bases,
        transitions=transitions,
        values=values,
        initial={p: frozenset(e) for p, e in marking.items()},
        bonds=frozenset(declared),
        functions=dict(functions or {}),
    )
    if check:
        problems = validate(net)
        if problems:
            raise ValidationFailed(problems)
    return net


def load(path, functions: Mapping | None = None, check: bool = True) -> Net:
    return loads(Path(path).read_text(), functions, check)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return "[" + ", ".join(repr(float(x)) for x in v) + "]"


def _fmt_label(lab) -> str:
    def key(e):
        neg = isinstance(e, Neg)
        item = e.item if neg else e
        return (isinstance(item, Bond), str(item), neg)

    return "{" + ", ".join(str(e) for e in sorted(lab, key=key)) + "}"


def dumps(net: Net) -> str:
    """Canonical text; ``loads(dumps(net)) == net``."""
    out = ["TYPES"]
    out += [f"  {t}: {k}" for t, k in net.types.items()]
    out.append("TOKENS")
    for b, t in net.bases.items():
        v = net.values[b]
        out.append(f"  {b}: {t}" if v is None else f"  {b}: {t} = {_fmt_value(v)}")
    out.append("PLACES")
    out.append("  " + ", ".join(net.places))
    out.append("BONDS")
    where = {}
    for p, elems in net.initial.items():
        for bd in bonds_in(elems):
            where[bd] = p
    for bd in sorted(net.bonds | set(where)):
        out.append(f"  {bd} @ {where[bd]}" if bd in where else f"  {bd}")
    out.append("MARKING")
    for b in net.bases:
        for p in net.places:
            if b in net.initial.get(p, ()):
                out.append(f"  {b} @ {p}")
    out.append("TRANSITIONS")
    for tid, tr in net.transitions.items():
        out.append(f"  transition {tid}")
        for p in sorted(tr.inputs):
            out.append(f"    in {p}: {_fmt_label(tr.inputs[p])}")
        for p in sorted(tr.outputs):
            out.append(f"    out {p}: {_fmt_label(tr.outputs[p])}")
        out.append(f"    guard: {conditions.to_text(tr.guard)}")
    return "\n".join(out) + "\n"


def save(net: Net, path) -> None:
    Path(path).write_text(dumps(net))


def place_entry(net: Net, state: State, place: str) -> str:
    elems = state.marking[place]
    rank = net.base_rank
    bases = sorted((e for e in elems if isinstance(e, str)), key=lambda b: (rank.get(b, len(rank)), b))
    bonds = sorted(e for e in elems if isinstance(e, Bond))
    body = ",".join(bases)
    if bonds:
        body += ";" + ",".join(map(str, bonds))
    return f"{place}: {body}" if body else f"{place}:"


def format_marking(net: Net, state: State, sep: str = "; ") -> str:
    """Marking dump: places in lexicographic order, bases in declaration order,
    then bonds in lexicographic order after a ``;``."""
    return sep.join(place_entry(net, state, p) for p in sorted(state.marking))


def format_history(state: State) -> str:
    parts = [f"{t}: {{{','.join(map(str, sorted(ks)))}}}" for t, ks in sorted(state.history.items())]
    return "; ".join(parts)


def write_trace(trace: Iterable, dest) -> None:
    """Write steps as CSV to a path or text stream."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_trace(trace, fh)
        return
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for i, st in enumerate(trace):
        w.writerow([i, st.transition, st.direction.value, st.key])


def read_trace(src) -> list:
    from .semantics import Direction, Step

    text = Path(src).read_text() if isinstance(src, (str, Path)) else src.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        Step(r["transition_id"], Direction(r["direction"]), int(r["occurrence_key"]))
        for r in rows
    ]

"""Independent reference computations used by the tests.

Nothing here calls into the engine's semantics: components are grown by
fixpoint iteration, enabledness and step effects follow the set formulas
term by term, and determinants use cofactor expansion.
"""

import itertools
import math
import re

from rpnet.model import Bond, Neg


def component(a, elems):
    """Fixpoint: bases linked to *a* by bonds in *elems*, plus those bonds."""
    elems = set(elems)
    bases = {e for e in elems if isinstance(e, str)}
    bonds = {e for e in elems if isinstance(e, Bond)}
    for bd in bonds:
        bases |= {bd.a, bd.b}
    if a not in bases:
        return set()
    comp = {a}
    changed = True
    while changed:
        changed = False
        for bd in bonds:
            if (bd.a in comp or bd.b in comp) and not {bd.a, bd.b, bd} <= comp:
                comp |= {bd.a, bd.b, bd}
                changed = True
    return comp


def label_tokens(lab):
    out = set()
    for e in lab:
        if isinstance(e, str):
            out.add(e)
        elif isinstance(e, Bond):
            out |= {e.a, e.b}
    return out


def plus(lab):
    return {e for e in lab if not isinstance(e, Neg)}


def guard_value(text, marking):
    """Evaluator for the guard shapes the random corpus produces."""
    text = text.strip()
    if text == "true":
        return True
    if text == "false":
        return False
    m = re.fullmatch(r"(not )?in\((\w+), (\w+)\)", text)
    if not m:
        raise ValueError(f"oracle cannot evaluate {text!r}")
    inside = m.group(2) in marking[m.group(3)]
    return not inside if m.group(1) else inside


def forward_enabled(net, M, H, t):
    tr = net.transitions[t]
    for x, lab in tr.inputs.items():
        for e in lab:
            if isinstance(e, Neg):
                if e.item in M[x]:
                    return False
            elif e not in M[x]:
                return False
    for x, lab in tr.outputs.items():
        for beta in lab:
            if not isinstance(beta, Bond):
                continue
            for y in tr.inputs:
                if beta in M[y] and beta not in tr.inputs[y]:
                    return False
    return guard_value(tr.guard_text, M)


def post_closed(tr):
    out = set()
    for lab in tr.outputs.values():
        out |= plus(lab) | label_tokens(lab)
    return out


def co_enabled(net, M, H, t):
    if not H.get(t):
        return False
    tr = net.transitions[t]
    k = max(H[t])
    for y, lab in tr.outputs.items():
        for a in label_tokens(lab):
            if a not in M[y]:
                return False
            comp = component(a, M[y])
            for t2, tr2 in net.transitions.items():
                if comp & post_closed(tr2):
                    if any(k2 > k for k2 in H.get(t2, ())):
                        return False
    return not guard_value(tr.guard_text, M)


def enabled_pairs(net, M, H):
    out = set()
    for t in net.transitions:
        if forward_enabled(net, M, H, t):
            out.add((t, "forward"))
        if co_enabled(net, M, H, t):
            out.add((t, "reverse"))
    return out


def fire(net, M, H, t):
    tr = net.transitions[t]
    pre = set().union(*(plus(l) for l in tr.inputs.values()))
    M2 = {}
    for x in M:
        removed = set()
        for a in label_tokens(tr.inputs.get(x, ())):
            removed |= component(a, M[x])
        added = set()
        for a in label_tokens(tr.outputs.get(x, ())):
            for y in tr.inputs:
                added |= component(a, (set(M[y]) - pre) | plus(tr.outputs[x]))
        M2[x] = (set(M[x]) - removed) | added
    top = max([0] + [k for ks in H.values() for k in ks])
    H2 = {u: set(ks) for u, ks in H.items()}
    H2.setdefault(t, set()).add(top + 1)
    return M2, H2


def reverse(net, M, H, t):
    tr = net.transitions[t]
    post = set().union(*(plus(l) for l in tr.outputs.values()))
    M2 = {}
    for x in M:
        removed = set()
        for a in label_tokens(tr.outputs.get(x, ())):
            removed |= component(a, M[x])
        added = set()
        for a in label_tokens(tr.inputs.get(x, ())):
            for y in tr.outputs:
                added |= component(a, (set(M[y]) - post) | plus(tr.inputs[x]))
        M2[x] = (set(M[x]) - removed) | added
    H2 = {u: set(ks) for u, ks in H.items()}
    H2[t] = H2[t] - {max(H2[t])}
    return M2, H2


def det(A):
    """Determinant by Laplace expansion along the first row."""
    n = len(A)
    if n == 1:
        return A[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        total += (-1) ** j * A[0][j] * det(minor)
    return total


def capacity_by_cofactors(Hc, rho, n_ts, n_r):
    """log2 det(I + rho (n_r/n_ts) Hc Hc^H) with P = I, in pure Python."""
    rows = [list(map(complex, r)) for r in Hc]
    n = len(rows)
    c = rho * n_r / n_ts
    G = [
        [(1.0 if i == j else 0.0) + c * sum(rows[i][u] * rows[j][u].conjugate() for u in range(n_r))
         for j in range(n)]
        for i in range(n)
    ]
    return math.log2(det(G).real)


def best_subset(H, rho, n_ts, n_r):
    best = -1.0
    for sub in itertools.combinations(range(len(H)), n_ts):
        best = max(best, capacity_by_cofactors([H[i] for i in sub], rho, n_ts, n_r))
    return best


def invariant_breaches(net, marking, history):
    """Conservation, bond closure and key uniqueness, checked from scratch."""
    out = []
    located = [(e, p) for p, elems in marking.items() for e in elems if isinstance(e, str)]
    names = sorted(e for e, _ in located)
    if names != sorted(net.bases):
        out.append(f"bases {names} differ from {sorted(net.bases)}")
    where = dict(located)
    for p, elems in marking.items():
        for e in elems:
            if isinstance(e, Bond) and not (where.get(e.a) == p == where.get(e.b)):
                out.append(f"bond {e} in {p} is not closed")
    keys = [k for ks in history.values() for k in ks]
    if len(keys) != len(set(keys)):
        out.append("duplicate history keys")
    return out

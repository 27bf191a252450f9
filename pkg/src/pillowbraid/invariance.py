"""Hurwitz moves, bounded equivalence search and invariance certificates.

A factorized expression is an ordered tuple of braids.  Invariance of
g_1 ... g_k under h means Hurwitz equivalence with (h^-1 g_1 h) ... (h^-1 g_k h).
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .braid import MERSENNE_61, BraidWord, artin_action, braid_equal, compose, free_inverse, free_reduce
from .catalog import Factorization, TwistFactor, local_system, phi
from .disk import PunctureSystem
from .errors import AmbientMismatchError, InvalidParameterError
from .twists import TwistSpec, compile_spec, simple

# ---------------------------------------------------------------------------
# expressions and moves


@dataclass(frozen=True)
class Expression:
    """An ordered product of braids on a common strand count."""

    strand_count: int
    factors: tuple[BraidWord, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if any(w.strand_count != self.strand_count for w in self.factors):
            raise AmbientMismatchError("all factors must live in the same braid group")

    def __len__(self) -> int:
        return len(self.factors)

    def product(self) -> BraidWord:
        if not self.factors:
            return BraidWord.identity(self.strand_count)
        return compose(list(self.factors))

    def key(self) -> tuple:
        return tuple(artin_action(w).images for w in self.factors)

    def sub(self, lo: int, hi: int) -> "Expression":
        return Expression(self.strand_count, self.factors[lo:hi])


def as_expression(f: Union[Expression, Factorization, Sequence[BraidWord]]) -> Expression:
    if isinstance(f, Expression):
        return f
    if isinstance(f, Factorization):
        return Expression(f.ambient.count, tuple(f.compiled()))
    words = tuple(f)
    if not words:
        raise InvalidParameterError("an empty list has no strand count")
    return Expression(words[0].strand_count, words)


@dataclass(frozen=True)
class HurwitzMove:
    position: int
    direction: str = "right"

    def __post_init__(self):
        if self.direction not in ("left", "right"):
            raise InvalidParameterError(f"direction must be left or right, not {self.direction!r}")
        if self.position < 1:
            raise InvalidParameterError("move positions start at 1")

    def inverse(self) -> "HurwitzMove":
        return HurwitzMove(self.position, "left" if self.direction == "right" else "right")

    def to_json(self) -> list:
        return [self.position, self.direction]


def _reduced(w: BraidWord) -> BraidWord:
    return BraidWord(w.strand_count, free_reduce(w.letters))


def hurwitz_move(f, m: HurwitzMove) -> Expression:
    """right: (a, b) -> (a b a^-1, a); left undoes it: (a, b) -> (b, b^-1 a b)."""
    e = as_expression(f)
    p = m.position
    if not 1 <= p <= len(e) - 1:
        raise InvalidParameterError(f"move position {p} out of range for {len(e)} factors")
    fs = list(e.factors)
    a, b = fs[p - 1], fs[p]
    if m.direction == "right":
        fs[p - 1], fs[p] = _reduced(a * b * a.inverse()), a
    else:
        fs[p - 1], fs[p] = b, _reduced(b.inverse() * a * b)
    return Expression(e.strand_count, tuple(fs))


def apply_moves(f, moves: Iterable[HurwitzMove]) -> Expression:
    e = as_expression(f)
    for m in moves:
        e = hurwitz_move(e, m)
    return e


def conjugate_factorization(f, h: BraidWord) -> Expression:
    """Each factor g becomes h^-1 g h; order is kept."""
    e = as_expression(f)
    if h.strand_count != e.strand_count:
        raise AmbientMismatchError("conjugator lives on a different disk")
    hi = h.inverse()
    return Expression(e.strand_count, tuple(_reduced(hi * g * h) for g in e.factors))


def conjugate_spec_factorization(f: Factorization, h: BraidWord) -> Expression:
    if h.strand_count != f.ambient.count:
        raise AmbientMismatchError("conjugator lives on a different disk")
    return conjugate_factorization(f, h)


# ---------------------------------------------------------------------------
# search


@dataclass
class HurwitzResult:
    status: str  # witness | exhausted | not_equivalent
    moves: list[HurwitzMove] = field(default_factory=list)
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.status == "witness"

    def to_json(self) -> str:
        return json.dumps({"status": self.status, "moves": [m.to_json() for m in self.moves],
                           "explored": self.explored})


_P = MERSENNE_61
_T = 1_234_567_891
_TINV = pow(_T, _P - 2, _P)


@lru_cache(maxsize=None)
def _start(n: int, seed: int) -> tuple[int, ...]:
    return tuple(pow(seed, k + 1, _P) for k in range(n))


def _probe(w: BraidWord, seed: int) -> tuple[int, ...]:
    """Row vector times the unreduced Burau matrix of w, at a fixed t mod p."""
    x = list(_start(w.strand_count, seed))
    t, ti = _T, _TINV
    for g in w.letters:
        i = abs(g) - 1
        a, b = x[i], x[i + 1]
        if g > 0:
            x[i], x[i + 1] = (a * (1 - t) + b) % _P, a * t % _P
        else:
            x[i], x[i + 1] = b * ti % _P, (a + b * (1 - ti)) % _P
    return tuple(x)


def _fkey(w: BraidWord) -> tuple[int, ...]:
    return _probe(w, 7) + _probe(w, 11)


def search_key(e: Expression) -> tuple:
    """Cheap hash key for search deduplication; witnesses are re-checked exactly."""
    return tuple(_fkey(w) for w in e.factors)


def _expand(frontier, seen, limit):
    nxt = []
    for e, k in frontier:
        for p in range(1, len(e)):
            for d in ("right", "left"):
                m = HurwitzMove(p, d)
                e2 = hurwitz_move(e, m)
                k2 = k[:p - 1] + (_fkey(e2.factors[p - 1]), _fkey(e2.factors[p])) + k[p + 1:]
                if k2 in seen:
                    continue
                seen[k2] = (k, m)
                nxt.append((e2, k2))
                if len(seen) > limit:
                    return nxt, True
    return nxt, False


def _trail(seen, k) -> list[HurwitzMove]:
    out = []
    while seen[k] is not None:
        k, m = seen[k]
        out.append(m)
    return out[::-1]


def search_hurwitz_equivalence(f, g, move_budget: int = 6, state_limit: int = 200_000) -> HurwitzResult:
    """Bidirectional breadth-first search; moves in the witness turn f into g.

    States are deduplicated by a Burau hash; a witness is only returned after
    exact replay through the Artin action.
    """
    ef, eg = as_expression(f), as_expression(g)
    if len(ef) != len(eg) or ef.strand_count != eg.strand_count:
        return HurwitzResult("not_equivalent")
    if artin_action(ef.product()) != artin_action(eg.product()):
        return HurwitzResult("not_equivalent")
    if ef.key() == eg.key():
        return HurwitzResult("witness", [], 1)
    kf, kg = search_key(ef), search_key(eg)
    fwd, bwd = {kf: None}, {kg: None}
    ff, fb = [(ef, kf)], [(eg, kg)]
    depth = 0
    while depth < move_budget and (ff or fb):
        side_f = len(fwd) <= len(bwd)
        seen, frontier = (fwd, ff) if side_f else (bwd, fb)
        frontier, capped = _expand(frontier, seen, state_limit)
        if side_f:
            ff = frontier
        else:
            fb = frontier
        depth += 1
        other = bwd if side_f else fwd
        for _, k in frontier:
            if k in other:
                moves = _trail(fwd, k) + [m.inverse() for m in reversed(_trail(bwd, k))]
                if apply_moves(ef, moves).key() == eg.key():
                    return HurwitzResult("witness", moves, len(fwd) + len(bwd))
        if capped:
            break
    return HurwitzResult("exhausted", [], len(fwd) + len(bwd))


def is_invariant_by_search(f, h: BraidWord, move_budget: int = 6, state_limit: int = 200_000) -> HurwitzResult:
    e = as_expression(f)
    return search_hurwitz_equivalence(e, conjugate_factorization(e, h), move_budget, state_limit)


# ---------------------------------------------------------------------------
# pair twists and small integer lattices


def pair_twist_word(system: PunctureSystem, exponents: Mapping[int, int]) -> BraidWord:
    """prod Z_jj'^{m_j}; the factors commute, so order is irrelevant."""
    letters: list[int] = []
    for j, m in sorted(exponents.items()):
        if not m:
            continue
        a, b = system.position(str(j)), system.position(f"{j}'")
        if b != a + 1:
            raise InvalidParameterError(f"punctures {j} and {j}' are not adjacent")
        letters += [a if m > 0 else -a] * abs(m)
    return BraidWord(system.count, tuple(letters))


def system_lines(system: PunctureSystem) -> list[int]:
    return sorted(int(x) for x in system.labels if not x.endswith("'") and f"{x}'" in system)


def _hnf(rows: list[list[int]]):
    """Echelon basis of the row lattice plus a basis of the integer relations.

    Each basis row carries its combination of the inputs; the relations are
    the combinations that reduce to zero.
    """
    k = len(rows)
    work = [(list(r), [int(i == j) for j in range(k)]) for i, r in enumerate(rows)]
    basis = []
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        live = [w for w in work if w[0][col]]
        while len(live) > 1:
            live.sort(key=lambda w: abs(w[0][col]))
            piv = live[0]
            for w in live[1:]:
                q = w[0][col] // piv[0][col]
                w[0][:] = [x - q * y for x, y in zip(w[0], piv[0])]
                w[1][:] = [x - q * y for x, y in zip(w[1], piv[1])]
            live = [w for w in live if w[0][col]]
        if live:
            piv = live[0]
            if piv[0][col] < 0:
                piv[0][:] = [-x for x in piv[0]]
                piv[1][:] = [-x for x in piv[1]]
            basis.append(piv)
            work = [w for w in work if w is not piv]
    return basis, [w[1] for w in work]


def lattice_solve(gens: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer coefficients c with sum c_i gens_i = v, or None."""
    if not gens:
        return [] if not any(v) else None
    basis, _ = _hnf([list(g) for g in gens])
    rest = list(v)
    coeff = [0] * len(gens)
    for row, comb in basis:
        col = next(i for i, x in enumerate(row) if x)
        if rest[col] % row[col]:
            return None
        q = rest[col] // row[col]
        rest = [x - q * y for x, y in zip(rest, row)]
        coeff = [c + q * d for c, d in zip(coeff, comb)]
    return coeff if not any(rest) else None


def lattice_basis(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    if not gens:
        return []
    basis, _ = _hnf([list(g) for g in gens])
    return [tuple(r) for r, _ in basis]


def lattice_intersection(lattices: Sequence[Sequence[Sequence[int]]], k: int) -> list[tuple[int, ...]]:
    """Basis of the intersection of the lattices spanned by each generator list."""
    if not lattices:
        return [tuple(int(i == j) for j in range(k)) for i in range(k)]
    current = lattice_basis(lattices[0])
    for other in lattices[1:]:
        other = lattice_basis(other)
        if not current or not other:
            return []
        rows = [list(r) for r in current] + [[-x for x in r] for r in other]
        _, relations = _hnf(rows)
        n = len(current)
        meet = []
        for rel in relations:
            v = [0] * k
            for c, r in zip(rel[:n], current):
                v = [x + c * y for x, y in zip(v, r)]
            meet.append(v)
        current = lattice_basis([v for v in meet if any(v)])
    return current


# ---------------------------------------------------------------------------
# certificates

LEAF_KINDS = ("commutation", "rule", "explicit_hurwitz", "chakiri")
NODE_KINDS = ("split", "composite", "block_swap")


@dataclass
class InvarianceCertificate:
    kind: str
    lo: int
    hi: int
    h: tuple[int, ...]
    exponents: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    children: list["InvarianceCertificate"] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in LEAF_KINDS + NODE_KINDS:
            raise InvalidParameterError(f"unknown certificate kind {self.kind!r}")

    def leaves(self) -> list["InvarianceCertificate"]:
        if not self.children:
            return [self]
        return [x for c in self.children for x in c.leaves()]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "range": [self.lo, self.hi], "h": list(self.h),
                "exponents": {str(k): v for k, v in self.exponents.items()},
                "data": self.data, "children": [c.to_dict() for c in self.children]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "InvarianceCertificate":
        return cls(d["kind"], d["range"][0], d["range"][1], tuple(d["h"]),
                   {int(k): v for k, v in d.get("exponents", {}).items()}, d.get("data", {}),
                   [cls.from_dict(c) for c in d.get("children", [])])


@dataclass
class CertificationFailure:
    block: str
    reason: str
    lattice: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return False


@lru_cache(maxsize=8192)
def _images(w: BraidWord) -> tuple[tuple[int, ...], ...]:
    return artin_action(w).images


def _subst(outer, word) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        out.extend(outer[x - 1] if x > 0 else free_inverse(outer[-x - 1]))
    return free_reduce(out)


def _commutes(g: BraidWord, h: BraidWord, method: str = "artin") -> bool:
    """Exact test of gh = hg; a Burau probe rejects most non-commuting pairs first."""
    if _fkey(g * h) != _fkey(h * g):
        return False
    if method == "normal_form":
        return braid_equal(g * h, h * g)
    gi, hi = _images(g), _images(h)
    return all(_subst(gi, a) == _subst(hi, b) for a, b in zip(hi, gi))


def _word(e: Expression, letters: Sequence[int]) -> BraidWord:
    return BraidWord(e.strand_count, tuple(letters))


def verify_certificate(cert: InvarianceCertificate, f, method: str = "artin") -> bool:
    """Re-check every leaf against the expression; nodes check coverage and products."""
    e = as_expression(f)
    if not 0 <= cert.lo < cert.hi <= len(e):
        return False
    h = _word(e, cert.h)
    part = e.sub(cert.lo, cert.hi)
    k = cert.kind
    if k in ("commutation", "rule") and "moves" not in cert.data:
        return all(_commutes(g, h, method) for g in part.factors)
    if k in ("explicit_hurwitz", "rule"):
        moves = [HurwitzMove(p, d) for p, d in cert.data["moves"]]
        try:
            moved = apply_moves(part, moves)
        except InvalidParameterError:
            return False
        return moved.key() == conjugate_factorization(part, h).key()
    if k == "chakiri":
        m = cert.data["m"]
        rest = h * part.product() ** (-m)
        return all(_commutes(g, rest, method) for g in part.factors)
    if k == "split":
        edges = [cert.lo] + [c.hi for c in cert.children]
        if [c.lo for c in cert.children] != edges[:-1] or edges[-1] != cert.hi:
            return False
        if any(tuple(c.h) != tuple(cert.h) and not artin_equal_words(e, c.h, cert.h) for c in cert.children):
            return False
        return all(verify_certificate(c, e, method) for c in cert.children)
    if k == "block_swap":
        # (A, B) with B_h = A: moving B left gives (A_{h^-1 P^-1}, A), P = prod A,
        # so it suffices that A is invariant under h P h
        mid = cert.data["split"]
        if len(cert.children) != 1 or not cert.lo < mid < cert.hi:
            return False
        a, b = e.sub(cert.lo, mid), e.sub(mid, cert.hi)
        if len(a) != len(b) or conjugate_factorization(b, h).key() != a.key():
            return False
        child = cert.children[0]
        if (child.lo, child.hi) != (cert.lo, mid):
            return False
        if artin_action(h * a.product() * h) != artin_action(_word(e, child.h)):
            return False
        return verify_certificate(child, e, method)
    if k == "composite":
        if any((c.lo, c.hi) != (cert.lo, cert.hi) for c in cert.children):
            return False
        powers = cert.data["powers"]
        if len(powers) != len(cert.children):
            return False
        prod = BraidWord.identity(e.strand_count)
        for c, p in zip(cert.children, powers):
            prod = prod * _word(e, c.h) ** p
        if artin_action(prod) != artin_action(h):
            return False
        return all(verify_certificate(c, e, method) for c in cert.children)
    return False


def artin_equal_words(e: Expression, a: Sequence[int], b: Sequence[int]) -> bool:
    return artin_action(_word(e, a)) == artin_action(_word(e, b))


# ---------------------------------------------------------------------------
# building certificates

_MID = re.compile(r"^phi\d+\[(\d+)\]$")


def default_partition(f: Factorization) -> list[tuple[int, int]]:
    """Pieces a block is split into before lattices are intersected.

    The eight branch factors in the middle of a 3-point stay together, as do
    the G list and the F F* pair of a 6-point; everything else is a singleton.
    """
    def label(k: int, fac: TwistFactor):
        if ":F" in fac.tag:
            return "F"
        if ":G" in fac.tag:
            return "G"
        mid = _MID.match(fac.tag)
        if fac.group == "three_point" and mid and 1 <= int(mid.group(1)) <= 8:
            return "mid"
        return k

    out: list[tuple[int, int]] = []
    prev = object()
    for k, fac in enumerate(f.factors):
        lab = label(k, fac)
        if out and lab == prev:
            out[-1] = (out[-1][0], k + 1)
        else:
            out.append((k, k + 1))
        prev = lab
    return out


def _rule_for(spec: TwistSpec, u: Mapping[int, int]) -> int | None:
    support = {j for j, m in u.items() if m}
    paired = {int(b[0]) for b in (spec.block_a, spec.block_b) if len(b) == 2}
    if support and support <= paired and abs(spec.epsilon) in (2, 3):
        return abs(spec.epsilon)
    return None


def _rule1_pair(s: TwistSpec, t: TwistSpec, u: Mapping[int, int]) -> bool:
    if not (s.is_simple and t.is_simple and abs(s.epsilon) == abs(t.epsilon) == 1):
        return False
    ends = [{s.path.endpoint_a, s.path.endpoint_b}, {t.path.endpoint_a, t.path.endpoint_b}]
    support = {j for j, m in u.items() if m}
    if len(support) != 2 or len({u[j] for j in support}) != 1:
        return False
    i, j = sorted(support)
    want = [{str(i), f"{j}'"}, {f"{i}'", str(j)}]
    return ends == want or ends == want[::-1]


@dataclass
class _Ctx:
    expr: Expression
    specs: list[TwistSpec] | None
    system: PunctureSystem
    lines: list[int]
    budget: int
    limit: int
    hints: list = field(default_factory=list)
    search_width: int = 8
    tags: list | None = None

    def h(self, v: Sequence[int]) -> BraidWord:
        return pair_twist_word(self.system, dict(zip(self.lines, v)))

    def exps(self, v: Sequence[int]) -> dict:
        return {j: x for j, x in zip(self.lines, v) if x}


def _leaf(ctx: _Ctx, lo: int, hi: int, v: Sequence[int]) -> InvarianceCertificate | None:
    h = ctx.h(v)
    u = ctx.exps(v)
    part = ctx.expr.sub(lo, hi)
    if all(_commutes(g, h) for g in part.factors):
        rule = _rule_for(ctx.specs[lo], u) if ctx.specs and hi == lo + 1 else None
        if rule:
            return InvarianceCertificate("rule", lo, hi, h.letters, u, {"rule": rule})
        return InvarianceCertificate("commutation", lo, hi, h.letters, u)
    if 2 <= hi - lo <= ctx.search_width and ctx.budget:
        r = is_invariant_by_search(part, h, ctx.budget, ctx.limit)
        if r.found:
            data = {"moves": [m.to_json() for m in r.moves]}
            if hi - lo == 2 and ctx.specs and _rule1_pair(ctx.specs[lo], ctx.specs[lo + 1], u):
                data["rule"] = 1
                return InvarianceCertificate("rule", lo, hi, h.letters, u, data)
            return InvarianceCertificate("explicit_hurwitz", lo, hi, h.letters, u, data)
    return None


def _touched(ctx: _Ctx, lo: int, hi: int) -> list[int]:
    if not ctx.specs:
        return list(range(len(ctx.lines)))
    seen = set()
    for s in ctx.specs[lo:hi]:
        for lab in s.block_a + s.block_b:
            seen.add(int(lab.rstrip("'")))
    return [k for k, j in enumerate(ctx.lines) if j in seen]


def _chakiri_candidates(ctx: _Ctx, lo: int, hi: int):
    import itertools
    k = len(ctx.lines)
    idx = _touched(ctx, lo, hi)
    if len(idx) <= 4:
        for vals in itertools.product(range(-2, 3), repeat=len(idx)):
            if any(vals):
                v = [0] * k
                for i, x in zip(idx, vals):
                    v[i] = x
                yield tuple(v)
    for c in (1, -1, 2, -2):
        yield tuple(c if i in idx else 0 for i in range(k))
        yield (c,) * k


def _chakiri_leaf(ctx: _Ctx, lo: int, hi: int, v, q_powers) -> InvarianceCertificate | None:
    part = ctx.expr.sub(lo, hi)
    h = ctx.h(v)
    for m, qm in q_powers:
        rest = h * qm
        if all(_commutes(g, rest) for g in part.factors):
            return InvarianceCertificate("chakiri", lo, hi, h.letters, ctx.exps(v), {"m": m})
    return None


def _piece_generators(ctx: _Ctx, lo: int, hi: int, chakiri: bool = True):
    k = len(ctx.lines)
    gens: list[tuple[tuple[int, ...], InvarianceCertificate]] = []

    def covered(v):
        return lattice_solve([g for g, _ in gens], v) is not None

    for a, b, v, moves in ctx.hints:
        if (a, b) == (lo, hi) and not covered(v):
            h = ctx.h(v)
            part = ctx.expr.sub(lo, hi)
            ms = [HurwitzMove(p, d) for p, d in moves]
            if apply_moves(part, ms).key() == conjugate_factorization(part, h).key():
                gens.append((v, InvarianceCertificate("explicit_hurwitz", lo, hi, h.letters, ctx.exps(v),
                                                      {"moves": [m.to_json() for m in ms], "hint": True})))
    units = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    for v in units:
        if covered(v):
            continue
        c = _leaf(ctx, lo, hi, v)
        if c:
            gens.append((v, c))
    if len(gens) < k:
        near = _touched(ctx, lo, hi)
        for i in near:
            for j in (t for t in near if t > i):
                for sign in (1, -1):
                    v = tuple(1 if t == i else sign if t == j else 0 for t in range(k))
                    if not covered(v):
                        c = _leaf(ctx, lo, hi, v)
                        if c:
                            gens.append((v, c))
    if _is_ff_pair(ctx, lo, hi) and len(lattice_basis([g for g, _ in gens])) < k:
        near = _touched(ctx, lo, hi)
        inner = None
        for i in near:
            for j in (t for t in near if t > i):
                v = tuple(int(t in (i, j)) for t in range(k))
                if not covered(v):
                    if inner is None:
                        inner = _piece_generators(ctx, lo, (lo + hi) // 2)
                    c = _block_swap_leaf(ctx, lo, hi, v, inner)
                    if c:
                        gens.append((v, c))
    if chakiri and hi - lo >= 2 and len(lattice_basis([g for g, _ in gens])) < k:
        q = ctx.expr.sub(lo, hi).product()
        q_powers = [(-1, q), (1, q.inverse())]
        for v in _chakiri_candidates(ctx, lo, hi):
            if not covered(v):
                c = _chakiri_leaf(ctx, lo, hi, v, q_powers)
                if c:
                    gens.append((v, c))
    return gens


def _is_ff_pair(ctx: _Ctx, lo: int, hi: int) -> bool:
    """A range holding F followed by its conjugate F*."""
    if not ctx.tags or (hi - lo) % 2 or hi - lo < 2:
        return False
    mid = (lo + hi) // 2
    first, second = ctx.tags[lo:mid], ctx.tags[mid:hi]
    return all(":F" in t and not t.endswith("*") for t in first) and \
        [t + "*" for t in first] == second


def _block_swap_leaf(ctx: _Ctx, lo: int, hi: int, v, inner) -> InvarianceCertificate | None:
    """Invariance of (A, A_{h^-1}) under h, reduced to A under h P h (P = prod A)."""
    import itertools
    mid = (lo + hi) // 2
    e = ctx.expr
    a, b = e.sub(lo, mid), e.sub(mid, hi)
    h = ctx.h(v)
    if conjugate_factorization(b, h).key() != a.key():
        return None
    p = a.product()
    g = h * p * h
    near = _touched(ctx, lo, mid)
    k = len(ctx.lines)
    for vals in itertools.product(range(-2, 3), repeat=len(near)):
        u = [0] * k
        for i, x in zip(near, vals):
            u[i] = x
        u = tuple(u)
        w = p * g * ctx.h(u).inverse()
        if not all(_commutes(x, w) for x in a.factors):
            continue
        parts = [InvarianceCertificate("chakiri", lo, mid, p.inverse().letters, {}, {"m": -1}),
                 InvarianceCertificate("commutation", lo, mid, w.letters)]
        if any(u):
            cu = _combine(ctx, inner, u, lo, mid)
            if cu is None:
                continue
            parts.append(cu)
        child = InvarianceCertificate("composite", lo, mid, g.letters, {}, {"powers": [1] * len(parts)}, parts)
        return InvarianceCertificate("block_swap", lo, hi, h.letters, ctx.exps(v), {"split": mid}, [child])
    return None


def _combine(ctx: _Ctx, gens, v, lo: int, hi: int) -> InvarianceCertificate | None:
    coeff = lattice_solve([g for g, _ in gens], v)
    if coeff is None:
        return None
    used = [(c, cert) for c, (_, cert) in zip(coeff, gens) if c]
    if len(used) == 1 and used[0][0] == 1:
        return used[0][1]
    h = ctx.h(v)
    return InvarianceCertificate("composite", lo, hi, h.letters, ctx.exps(v),
                                 {"powers": [c for c, _ in used]}, [cert for _, cert in used])


def _block_generators(ctx: _Ctx, partition: Sequence[tuple[int, int]]):
    k = len(ctx.lines)
    lo, hi = partition[0][0], partition[-1][1]
    if len(partition) == 1:
        return _piece_generators(ctx, lo, hi), []
    pieces = [_piece_generators(ctx, a, b) for a, b in partition]
    common = lattice_intersection([[g for g, _ in p] for p in pieces], k)
    gens = []
    for v in common:
        children = [_combine(ctx, p, v, a, b) for p, (a, b) in zip(pieces, partition)]
        gens.append((v, InvarianceCertificate("split", lo, hi, ctx.h(v).letters, ctx.exps(v), {}, children)))
    whole = []
    if len(lattice_basis([g for g, _ in gens])) < k:
        q = ctx.expr.sub(lo, hi).product()
        q_powers = [(-1, q), (1, q.inverse())]
        for v in _chakiri_candidates(ctx, lo, hi):
            if lattice_solve([g for g, _ in gens + whole], v) is None:
                c = _chakiri_leaf(ctx, lo, hi, v, q_powers)
                if c:
                    whole.append((v, c))
    return gens + whole, pieces


def catalog_hints(f: Factorization, catalog: dict | None = None) -> list:
    """Stored Hurwitz witnesses that apply to a single vertex block."""
    blocks = {x.block for x in f.factors}
    if len(blocks) != 1:
        return []
    (blk,) = blocks
    if not blk.startswith("phi"):
        return []
    from .dataset import load_catalog
    catalog = catalog or load_catalog()
    rec = catalog["phi"][blk[3:]]
    lines = system_lines(f.ambient)
    names = dict(zip("ijk", sorted(rec["lines"])))
    out = []
    for w in catalog.get("invariance_hints", {}).get("witnesses", []):
        if w["block_kind"] != rec["kind"] or w["line"] not in names:
            continue
        j = names[w["line"]]
        if j in lines:
            v = tuple(int(x == j) for x in lines)
            out.append((w["range"][0], w["range"][1], v, [tuple(m) for m in w["moves"]]))
    return out


def _context(f, system, budget, limit, hints=None) -> _Ctx:
    if isinstance(f, Factorization):
        specs = [x.spec for x in f.factors]
        system = f.ambient
        if hints is None:
            hints = catalog_hints(f)
    else:
        specs = None
        if system is None:
            raise InvalidParameterError("a bare expression needs its puncture system")
    tags = [x.tag for x in f.factors] if isinstance(f, Factorization) else None
    return _Ctx(as_expression(f), specs, system, system_lines(system), budget, limit,
                list(hints or []), tags=tags)


def invariance_lattice(f, system: PunctureSystem | None = None, partition=None,
                       budget: int = 8, limit: int = 20_000, hints=None) -> list[tuple[int, ...]]:
    """Basis of the pair-twist exponent vectors the certifier can prove."""
    ctx = _context(f, system, budget, limit, hints)
    part = partition or (default_partition(f) if ctx.specs else [(0, len(ctx.expr))])
    gens, _ = _block_generators(ctx, part)
    return lattice_basis([g for g, _ in gens])


def certify_invariance(f, h: Union[BraidWord, Mapping[int, int]], system: PunctureSystem | None = None,
                       partition=None, budget: int = 8, limit: int = 20_000, name: str = "block",
                       hints=None):
    """A verified certificate that f is invariant under h, or a CertificationFailure.

    With a mapping, h is prod Z_jj'^{m_j} over the lines of the puncture system;
    lines outside it are ignored.  The search uses commutation, the three
    invariance rules, bounded Hurwitz search, Chakiri conjugation relative to the
    pieces' products, splitting and composition.
    """
    ctx = _context(f, system, budget, limit, hints)
    n = len(ctx.expr)
    if n == 0:
        raise InvalidParameterError("nothing to certify")
    if isinstance(h, BraidWord):
        return _certify_word(ctx, h, name)
    v = tuple(int(h.get(j, 0)) for j in ctx.lines)
    if not any(v):
        return InvarianceCertificate("commutation", 0, n, (), {})
    part = partition or (default_partition(f) if ctx.specs else [(0, n)])
    gens, pieces = _block_generators(ctx, part)
    cert = _combine(ctx, gens, v, 0, n)
    if cert is not None:
        return cert
    basis = lattice_basis([g for g, _ in gens])
    for p, (a, b) in zip(pieces, part):
        if lattice_solve([g for g, _ in p], v) is None:
            tag = f"{name} factors {a}..{b - 1}"
            return CertificationFailure(tag, "no certified piece covers these exponents", basis)
    return CertificationFailure(name, "exponents outside the certified lattice", basis)


def _certify_word(ctx: _Ctx, h: BraidWord, name: str):
    e = ctx.expr
    if h.strand_count != e.strand_count:
        raise AmbientMismatchError("conjugator lives on a different disk")
    n = len(e)
    ok = [_commutes(g, h) for g in e.factors]
    children = []
    k = 0
    while k < n:
        if ok[k]:
            children.append(InvarianceCertificate("commutation", k, k + 1, h.letters))
            k += 1
            continue
        end = k
        while end < n and not ok[end]:
            end += 1
        part = e.sub(k, end)
        r = is_invariant_by_search(part, h, ctx.budget, ctx.limit) if end - k >= 2 else None
        if r is None or not r.found:
            break
        children.append(InvarianceCertificate("explicit_hurwitz", k, end, h.letters, {},
                                              {"moves": [m.to_json() for m in r.moves]}))
        k = end
    else:
        return children[0] if len(children) == 1 else InvarianceCertificate("split", 0, n, h.letters, {}, {}, children)
    q = e.product()
    for m, qm in ((-1, q), (1, q.inverse())):
        rest = h * qm
        if all(_commutes(g, rest) for g in e.factors):
            return InvarianceCertificate("chakiri", 0, n, h.letters, {}, {"m": m})
    return CertificationFailure(f"{name} factor {k}", "neither commutation, search nor Chakiri applies")


# ---------------------------------------------------------------------------
# disjoint supports and line classes


@dataclass(frozen=True)
class CommutationCheck:
    disjoint: bool
    commute: bool

    def __bool__(self) -> bool:
        return self.commute


def _span(spec: TwistSpec, system: PunctureSystem) -> tuple[int, int] | None:
    if spec.conjugators:
        return None
    pos = [system.position(x) for x in spec.block_a + spec.block_b]
    return min(pos), max(pos)


def check_disjoint_commutation(a: TwistSpec, b: TwistSpec, system: PunctureSystem) -> CommutationCheck:
    """Unconjugated twists on non-overlapping intervals of the axis commute.

    The geometric verdict is confirmed algebraically with the normal form;
    a disagreement raises, since it would mean the lane model is wrong.
    """
    sa, sb = _span(a, system), _span(b, system)
    disjoint = sa is not None and sb is not None and (sa[1] < sb[0] or sb[1] < sa[0])
    wa, wb = compile_spec(a, system), compile_spec(b, system)
    commute = braid_equal(wa * wb, wb * wa)
    if disjoint and not commute:
        raise InvalidParameterError(f"{a} and {b} have disjoint supports but do not commute")
    return CommutationCheck(disjoint, commute)


def six_point_pairs(m: int, catalog: dict | None = None) -> dict[str, tuple[int, int]]:
    """The three line pairs of a 6-point: the figure pair, the rho pair and the rest."""
    from .dataset import load_catalog
    from .twists import parse_spec
    catalog = catalog or load_catalog()
    rec = catalog["phi"][str(m)]
    if rec["kind"] != "six_point":
        raise InvalidParameterError(f"phi{m} is not a 6-point")
    rho = tuple(sorted(int(parse_spec(s).path.endpoint_a) for s in rec["rho"]))
    fig = next(x for x in rec["F"] if isinstance(x, dict) and "figure" in x)
    ab = tuple(sorted((int(fig["map"]["a"]), int(fig["map"]["b"]))))
    rest = tuple(sorted(set(rec["lines"]) - set(rho) - set(ab)))
    return {"horizontal": ab, "vertical": rho, "diagonal": rest}


def propagate_classes(catalog: dict | None = None, count: int = 24) -> tuple[frozenset[int], ...]:
    """Union the paired lines of every 6-point; lines left alone stay singletons."""
    from .dataset import load_catalog
    catalog = catalog or load_catalog()
    parent = list(range(count + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for key, rec in catalog["phi"].items():
        if rec["kind"] != "six_point":
            continue
        for i, j in six_point_pairs(int(key), catalog).values():
            parent[find(i)] = find(j)
    groups: dict[int, set[int]] = {}
    for j in range(1, count + 1):
        groups.setdefault(find(j), set()).add(j)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=lambda s: (len(s), min(s))))

"""Presentations of the complement group read off a factorization.

Generators are the loops g_1..g_n around the punctures in left-to-right
order, seen from a basepoint below the axis.  A path that passes above a
puncture conjugates by that puncture's generator: crossing the ray of
puncture m right-to-left contributes g_m, left-to-right g_m^-1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .braid import BraidWord, artin_action, free_inverse, free_reduce
from .catalog import Factorization, TwistFactor
from .disk import Arc, PunctureSystem
from .errors import InvalidInvarianceError, InvalidParameterError, UnsupportedFactorError
from .twists import TwistSpec, expand_all

# exponent classes of the invariance corollary, as line indices
LINE_CLASSES: tuple[frozenset[int], ...] = tuple(frozenset(c) for c in (
    {1, 2}, {3, 7}, {6, 11}, {10, 12}, {14, 17}, {19, 24},
    {4, 5, 8, 9}, {13, 18, 20, 23}, {15, 16, 21, 22}))


@dataclass(frozen=True)
class Relation:
    word: tuple[int, ...]
    kind: str
    factor_index: int | None = None
    tag: str = ""


@dataclass
class Presentation:
    labels: tuple[str, ...]
    relations: list[Relation] = field(default_factory=list)

    @property
    def generator_count(self) -> int:
        return len(self.labels)

    def __post_init__(self):
        n = len(self.labels)
        for r in self.relations:
            if any(not 1 <= abs(x) <= n for x in r.word):
                raise InvalidParameterError("relator mentions an unknown generator")

    def relators(self) -> list[tuple[int, ...]]:
        return [r.word for r in self.relations]

    def to_text(self) -> str:
        n = self.generator_count
        lines = ["generators: " + " ".join(f"g{k}" for k in range(1, n + 1))]
        for r in self.relations:
            lines.append(" ".join(f"g{abs(x)}" + ("^-1" if x < 0 else "") for x in r.word))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "generators": [f"g{k}" for k in range(1, self.generator_count + 1)],
            "labels": list(self.labels),
            "relations": [{"word": list(r.word), "kind": r.kind,
                           "factor_index": r.factor_index, "tag": r.tag} for r in self.relations],
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Presentation":
        d = json.loads(text)
        rels = [Relation(tuple(r["word"]), r["kind"], r.get("factor_index"), r.get("tag", ""))
                for r in d["relations"]]
        return cls(tuple(d["labels"]), rels)


# ---------------------------------------------------------------------------
# loops


def _conj(c: Sequence[int], x: int) -> tuple[int, ...]:
    return free_reduce(tuple(c) + (x,) + free_inverse(c))


def arc_loop_words(start: int, end: int, traversal: Sequence[int], split: int | None = None):
    """(A, B) for a path from ``start`` to ``end`` with the given ray crossings.

    ``split`` is the number of crossings before the cut point M.
    """
    w = tuple(traversal)
    s = len(w) // 2 if split is None else split
    if not 0 <= s <= len(w):
        raise InvalidParameterError("split point outside the path")
    to_start = free_inverse(w[:s])
    to_end = w[s:]
    return _conj(to_start, start), _conj(to_end, end)


def factor_arc(spec: TwistSpec, system: PunctureSystem) -> Arc:
    if not spec.is_simple:
        raise InvalidParameterError("loop words need a simple factor")
    return spec.path.to_arc(system)


def loop_words(factor: TwistFactor | TwistSpec | Arc, system: PunctureSystem, split: int | None = None):
    if isinstance(factor, Arc):
        arc = factor
    else:
        arc = factor_arc(factor.spec if isinstance(factor, TwistFactor) else factor, system)
    return arc_loop_words(arc.a, arc.b, arc.word, split)


def format_word(word: Sequence[int], system: PunctureSystem) -> str:
    """Loop word in puncture labels, e.g. ``6' 6 5' 6^-1 6'^-1``."""
    return " ".join(system.label(abs(x)) + ("^-1" if x < 0 else "") for x in word)


def _relator(a: tuple[int, ...], b: tuple[int, ...], eps: int) -> tuple[int, ...]:
    ai, bi = free_inverse(a), free_inverse(b)
    if eps == 1:
        return free_reduce(a + bi)
    if eps == 2:
        return free_reduce(a + b + ai + bi)
    if eps == 3:
        return free_reduce(a + b + a + bi + ai + bi)
    raise UnsupportedFactorError(f"no van Kampen relation for exponent {eps}")


_KINDS = {1: "branch", 2: "node", 3: "cusp"}


def emit_relations(f: Factorization) -> Presentation:
    rels: list[Relation] = []
    for idx, fac in enumerate(f.factors):
        for spec in expand_all(fac.spec, f.ambient):
            eps = abs(spec.epsilon)
            if eps == 4:
                raise UnsupportedFactorError("tangency factors belong to the degenerate curve")
            a, b = loop_words(spec, f.ambient)
            rels.append(Relation(_relator(a, b, eps), _KINDS[eps], idx, fac.tag))
    return Presentation(f.ambient.labels, rels)


def projective_closure(p: Presentation) -> Presentation:
    n = p.generator_count
    rel = Relation(tuple(range(n, 0, -1)), "projective")
    return Presentation(p.labels, p.relations + [rel])


# ---------------------------------------------------------------------------
# abelianization


def smith_invariants(rows: list[list[int]], ncols: int) -> tuple[list[int], int]:
    """Nontrivial elementary divisors and free rank of Z^ncols / rowspace."""
    m = [list(r) for r in rows if any(r)]
    divisors: list[int] = []
    t = 0
    while True:
        live = [(abs(v), i, j) for i in range(t, len(m)) for j in range(t, ncols) if (v := m[i][j])]
        if not live:
            break
        _, i, j = min(live)
        m[t], m[i] = m[i], m[t]
        for r in m:
            r[t], r[j] = r[j], r[t]
        while True:
            piv = m[t][t]
            dirty = False
            for i in range(t + 1, len(m)):
                q = m[i][t] // piv
                if q:
                    row, prow = m[i], m[t]
                    for j in range(t, ncols):
                        row[j] -= q * prow[j]
                dirty |= m[i][t] != 0
            for j in range(t + 1, ncols):
                q = m[t][j] // piv
                if q:
                    for r in m:
                        r[j] -= q * r[t]
                dirty |= m[t][j] != 0
            if not dirty:
                bad = next((i for i in range(t + 1, len(m))
                            if any(m[i][j] % piv for j in range(t + 1, ncols))), None)
                if bad is None:
                    break
                for j in range(t, ncols):
                    m[t][j] += m[bad][j]
                continue
            cands = [(abs(m[i][t]), i, t) for i in range(t, len(m)) if m[i][t]]
            cands += [(abs(m[t][j]), t, j) for j in range(t, ncols) if m[t][j]]
            _, i, j = min(cands)
            m[t], m[i] = m[i], m[t]
            for r in m:
                r[t], r[j] = r[j], r[t]
        divisors.append(abs(m[t][t]))
        t += 1
        m = m[:t] + [r for r in m[t:] if any(r[t:])]
    return [d for d in divisors if d != 1], ncols - len(divisors)


@dataclass(frozen=True)
class Abelianization:
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def abelianization(p: Presentation) -> Abelianization:
    n = p.generator_count
    rows = []
    for r in p.relations:
        v = [0] * n
        for x in r.word:
            v[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(v)
    torsion, free = smith_invariants(rows, n)
    return Abelianization(free, tuple(sorted(torsion)))


# ---------------------------------------------------------------------------
# invariance expansion


def _line_of(label: str) -> int:
    return int(label.rstrip("'"))


def check_classes(exponents: Mapping[int, int], classes: Iterable[frozenset[int]] = LINE_CLASSES) -> None:
    for cls in classes:
        vals = {exponents.get(j, 0) for j in cls}
        if len(vals) > 1:
            raise InvalidInvarianceError(
                f"exponents must agree on lines {sorted(cls)}, got {sorted(vals)}")


def invariance_braid(system: PunctureSystem, exponents: Mapping[int, int]) -> BraidWord:
    letters: list[int] = []
    for j, m in sorted(exponents.items()):
        if not m:
            continue
        a = system.position(str(j))
        b = system.position(f"{j}'")
        if b != a + 1:
            raise InvalidParameterError(f"punctures {j} and {j}' are not adjacent")
        letters += [a if m > 0 else -a] * abs(m)
    return BraidWord(system.count, tuple(letters))


def expand_by_invariance(p: Presentation, system: PunctureSystem, exponents: Mapping[int, int],
                         classes: Iterable[frozenset[int]] = LINE_CLASSES) -> Presentation:
    """Append R_rho for every relation R; exponents are given per line."""
    check_classes(exponents, classes)
    if not any(exponents.values()):
        return p
    images = artin_action(invariance_braid(system, exponents)).images
    new = []
    for r in p.relations:
        w: list[int] = []
        for x in r.word:
            img = images[abs(x) - 1]
            w += img if x > 0 else free_inverse(img)
        new.append(Relation(free_reduce(w), r.kind, r.factor_index, r.tag + "^rho"))
    return Presentation(p.labels, p.relations + new)


def parse_exponents(text: str, lines: Iterable[int] = range(1, 25)) -> dict[int, int]:
    """'all=1' or '4=2,13=-1' (a line stands for its whole class)."""
    out = {j: 0 for j in lines}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in part:
            raise InvalidParameterError(f"bad exponent item {part!r}")
        k, v = part.split("=", 1)
        try:
            val = int(v)
        except ValueError:
            raise InvalidParameterError(f"bad exponent value {v!r}") from None
        if k.strip() == "all":
            for j in out:
                out[j] = val
            continue
        try:
            j = int(k)
        except ValueError:
            raise InvalidParameterError(f"bad line index {k!r}") from None
        if j not in out:
            raise InvalidParameterError(f"line {j} out of range")
        out[j] = val
    return out


def class_exponents(text: str) -> dict[int, int]:
    """Like parse_exponents, but a single line's value spreads to its class."""
    raw = parse_exponents(text)
    explicit = {int(p.split("=")[0]) for p in text.split(",") if p.strip() and not p.strip().startswith("all")}
    out = dict(raw)
    for j in explicit:
        for cls in LINE_CLASSES:
            if j in cls:
                clash = sorted(k for k in cls & explicit if raw[k] != raw[j])
                if clash:
                    raise InvalidInvarianceError(
                        f"lines {j} and {clash[0]} share a class but got {raw[j]} and {raw[clash[0]]}")
                for k in cls:
                    out[k] = raw[j]
    return out

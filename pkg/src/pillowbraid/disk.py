"""
Arcs in the punctured disk and their transport under braids.

Punctures sit on the real axis at positions 1..n. From every puncture m a
vertical ray r_m goes up to the boundary; the base point is on the boundary
below the axis. Letter ``m`` records a crossing of r_m from right to left,
``-m`` a crossing from left to right, so the counterclockwise loop around m
(starting below) is the single letter ``m`` and the boundary loop is
g_n ... g_1.

An arc between punctures a < b, run from just below a to just below b, has a
crossing word in the free group on g_1..g_n. Spiralling at either end changes
it only by powers of g_a on the left and g_b on the right, so the isotopy
class is the double coset <g_a> w <g_b>, stored as its shortest
representative. A path passing above m (left to right) contributes ``-m``;
passing below contributes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .braid import BraidWord, free_inverse, free_reduce
from .errors import InvalidParameterError, InvalidStateError


@dataclass(frozen=True)
class PunctureSystem:
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise InvalidParameterError("puncture labels must be unique")
        object.__setattr__(self, "_index", {lab: k + 1 for k, lab in enumerate(self.labels)})

    @property
    def count(self) -> int:
        return len(self.labels)

    def position(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise InvalidParameterError(f"unknown puncture {label!r}") from None

    def label(self, position: int) -> str:
        return self.labels[position - 1]

    def __contains__(self, label) -> bool:
        return str(label) in self._index

    def between(self, a, b) -> list[str]:
        pa, pb = sorted((self.position(a), self.position(b)))
        return list(self.labels[pa:pb - 1])

    @property
    def is_doubled(self) -> bool:
        return any(lab.endswith("'") for lab in self.labels)

    def sub(self, labels: Iterable) -> "PunctureSystem":
        """Subsystem keeping the given labels in ambient order."""
        keep = {str(x) for x in labels}
        return PunctureSystem(tuple(lab for lab in self.labels if lab in keep))


def base_system(count: int = 24) -> PunctureSystem:
    return PunctureSystem(tuple(str(i) for i in range(1, count + 1)))


def doubled_system(count: int = 24) -> PunctureSystem:
    """Labels 1,1',2,2',...; label i at strand 2i-1 and i' at strand 2i."""
    labels = []
    for i in range(1, count + 1):
        labels += [str(i), f"{i}'"]
    return PunctureSystem(tuple(labels))


def double_system(system: PunctureSystem) -> PunctureSystem:
    if system.is_doubled:
        raise InvalidStateError("system is already doubled")
    labels = []
    for lab in system.labels:
        labels += [lab, lab + "'"]
    return PunctureSystem(tuple(labels))


def _coset_rep(w: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    lo, hi = 0, len(w)
    while lo < hi and abs(w[lo]) == a:
        lo += 1
    while hi > lo and abs(w[hi - 1]) == b:
        hi -= 1
    return w[lo:hi]


@dataclass(frozen=True)
class Arc:
    """Isotopy class of a simple arc; positions are 1-based, a < b."""

    n: int
    a: int
    b: int
    word: tuple[int, ...] = ()

    @classmethod
    def make(cls, n: int, a: int, b: int, word: Sequence[int] = ()) -> "Arc":
        if a == b:
            raise InvalidParameterError("arc endpoints must differ")
        if not (1 <= a <= n and 1 <= b <= n):
            raise InvalidParameterError("arc endpoint outside the disk")
        w = free_reduce(word)
        if a > b:
            a, b, w = b, a, free_inverse(w)
        return cls(n, a, b, _coset_rep(w, a, b))

    @classmethod
    def lane(cls, n: int, a: int, b: int, above: Iterable[int] = ()) -> "Arc":
        above = set(above)
        lo, hi = sorted((a, b))
        return cls.make(n, lo, hi, tuple(-m for m in range(lo + 1, hi) if m in above))

    def lane_data(self) -> frozenset[int] | None:
        """Above-set if the arc is a monotone lane path, else None."""
        prev = self.a
        above = []
        for x in self.word:
            m = -x
            if m <= prev or m >= self.b:
                return None
            above.append(m)
            prev = m
        return frozenset(above)

    def is_straight(self) -> bool:
        return self.b == self.a + 1 and not self.word


# Push-forward of loops under the counterclockwise half twist sigma_k:
#   g_k -> g_{k+1},  g_{k+1} -> g_{k+1} g_k g_{k+1}^-1.

def _psi_letter(x: int, k: int, sign: int) -> tuple[int, ...]:
    m = abs(x)
    s = 1 if x > 0 else -1
    if m == k:
        img = (k + 1,) if sign > 0 else (-k, k + 1, k)
    elif m == k + 1:
        img = (k + 1, k, -(k + 1)) if sign > 0 else (k,)
    else:
        return (x,)
    return img if s > 0 else free_inverse(img)


def push_loop(word: Sequence[int], w: BraidWord) -> tuple[int, ...]:
    """Image of a loop word under the homeomorphism of ``w`` (leftmost letter first)."""
    out = free_reduce(word)
    for x in w.letters:
        k, sign = abs(x), (1 if x > 0 else -1)
        out = free_reduce([y for letter in out for y in _psi_letter(letter, k, sign)])
    return out


def _moved(pos: int, k: int) -> int:
    if pos == k:
        return k + 1
    if pos == k + 1:
        return k
    return pos


def _stick(pos: int, k: int, sign: int) -> tuple[int, ...]:
    """Crossing word of the image of the vertical stick below ``pos``."""
    if sign > 0 and pos == k + 1:
        return (k + 1,)
    if sign < 0 and pos == k:
        return (-k,)
    return ()


def transport(arc: Arc, w: BraidWord) -> Arc:
    """Image of ``arc`` under the homeomorphism of ``w`` (leftmost letter first)."""
    if w.strand_count != arc.n:
        raise InvalidParameterError("arc and braid live on different disks")
    a, b, word = arc.a, arc.b, arc.word
    for x in w.letters:
        k = abs(x)
        sign = 1 if x > 0 else -1
        img: list[int] = []
        for y in word:
            img.extend(_psi_letter(y, k, sign))
        new = free_inverse(_stick(a, k, sign)) + tuple(img) + _stick(b, k, sign)
        na, nb = _moved(a, k), _moved(b, k)
        a, b, word = na, nb, _coset_rep(free_reduce(new), na, nb)
    return Arc.make(arc.n, a, b, word)


def lane_straightener(arc_a: int, arc_b: int, above: Iterable[int], n: int) -> BraidWord:
    """Braid u moving b next to a along the lanes: transport(lane arc, u) is straight."""
    above = set(above)
    letters = []
    for m in range(arc_b - 1, arc_a, -1):
        letters.append(m if m in above else -m)
    return BraidWord(n, tuple(letters))


def compile_lane_halftwist(n: int, a: int, b: int, above: Iterable[int] = ()) -> BraidWord:
    """Positive half twist along the lane path from a to b (a < b)."""
    lo, hi = sorted((a, b))
    u = lane_straightener(lo, hi, above, n)
    return BraidWord(n, u.letters + (lo,) + u.inverse().letters)


def _complexity(arc: Arc) -> tuple[int, int]:
    return (len(arc.word), arc.b - arc.a)


def straighten(arc: Arc, max_expansions: int = 200000) -> tuple[BraidWord, int]:
    """Find u with transport(arc, u) straight between k and k+1; returns (u, k).

    Lane arcs are handled directly; otherwise a best-first search on
    (word length, span) runs until a lane arc is reached.
    """
    import heapq

    n = arc.n
    lanes = arc.lane_data()
    if lanes is not None:
        return lane_straightener(arc.a, arc.b, lanes, n), arc.a
    heap = [(_complexity(arc), 0, arc, ())]
    seen = {arc}
    tick = 0
    while heap and tick < max_expansions:
        _, _, cur, path = heapq.heappop(heap)
        lanes = cur.lane_data()
        if lanes is not None:
            u = lane_straightener(cur.a, cur.b, lanes, n)
            return BraidWord(n, path + u.letters), cur.a
        for k in range(1, n):
            for s in (k, -k):
                img = transport(cur, BraidWord(n, (s,)))
                if img in seen:
                    continue
                seen.add(img)
                tick += 1
                heapq.heappush(heap, (_complexity(img), tick, img, path + (s,)))
    raise InvalidStateError(f"cannot straighten arc {arc}")


def halftwist_of_arc(arc: Arc) -> BraidWord:
    u, k = straighten(arc)
    return BraidWord(arc.n, u.letters + (k,) + u.inverse().letters)

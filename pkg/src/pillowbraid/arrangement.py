"""Line arrangement of the degenerated (2,2)-pillow and its parasitic products."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import AuditError, InternalConsistencyError, InvalidParameterError
from .twists import TwistSpec, block


@dataclass(frozen=True)
class Line:
    index: int
    a: int
    b: int

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class LineArrangement:
    vertex_count: int
    lines: tuple[Line, ...]
    point_types: dict

    def line(self, t: int) -> Line:
        if not 1 <= t <= len(self.lines):
            raise InvalidParameterError(f"line index {t} out of range")
        return self.lines[t - 1]

    def lines_at(self, v: int) -> list[int]:
        return [l.index for l in self.lines if v in l.vertices]

    def meets(self, p: int, t: int) -> bool:
        return bool(self.line(p).vertices & self.line(t).vertices)

    def three_points(self) -> list[int]:
        return sorted(v for v, k in self.point_types.items() if k == "three_point")

    def six_points(self) -> list[int]:
        return sorted(v for v, k in self.point_types.items() if k == "six_point")


@dataclass(frozen=True)
class DisjointnessTable:
    pairs: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        p, t = pair
        return (min(p, t), max(p, t)) in self.pairs


def _dt_indices(catalog: dict) -> dict[int, set[int]]:
    return {int(t): set(rec["indices"]) for t, rec in catalog["degenerate_Dt"].items()}


def build_pillow(catalog: dict | None = None) -> LineArrangement:
    """Reconstruct line endpoints by exhaustive search.

    Constraints: lines sorted by (b, a); two lines meet iff their pair is
    absent from the D_t lists; vertex valences 3 or 6; the given triples at
    the 3-points.
    """
    if catalog is None:
        from .dataset import load_catalog
        catalog = load_catalog()
    arr = catalog["arrangement"]
    nv, nl = arr["vertex_count"], arr["line_count"]
    triples = {int(v): set(ls) for v, ls in arr["three_points"].items()}
    six = set(arr["six_points"])
    valence = {v: 3 for v in triples} | {v: 6 for v in six}
    if set(valence) != set(range(1, nv + 1)):
        raise InternalConsistencyError("every vertex must be a 3-point or a 6-point")
    disjoint = _dt_indices(catalog)
    at_vertex = {t: v for v, ls in triples.items() for t in ls}
    pairs = sorted(combinations(range(1, nv + 1), 2), key=lambda ab: (ab[1], ab[0]))

    chosen: list[tuple[int, int]] = []
    load = {v: 0 for v in valence}
    solutions = []

    def ok(t: int, ab: tuple[int, int]) -> bool:
        if chosen and (ab[1], ab[0]) <= (chosen[-1][1], chosen[-1][0]):
            return False
        for v in ab:
            if load[v] >= valence[v]:
                return False
            if v in triples and t not in triples[v]:
                return False
        if t in at_vertex and at_vertex[t] not in ab:
            return False
        for p, cd in enumerate(chosen, start=1):
            meet = bool(set(ab) & set(cd))
            if meet == (p in disjoint.get(t, set())):
                return False
        return True

    def search(t: int):
        if t > nl:
            if all(load[v] == valence[v] for v in valence):
                solutions.append(list(chosen))
            return len(solutions) > 1
        for ab in pairs:
            if ok(t, ab):
                chosen.append(ab)
                for v in ab:
                    load[v] += 1
                if search(t + 1):
                    return True
                for v in ab:
                    load[v] -= 1
                chosen.pop()
        return False

    search(1)
    if not solutions:
        raise InternalConsistencyError("no line arrangement satisfies the D_t tables")
    if len(solutions) > 1:
        raise InternalConsistencyError("line arrangement is not determined by the data")
    lines = tuple(Line(i, a, b) for i, (a, b) in enumerate(solutions[0], start=1))
    types = {v: ("three_point" if v in triples else "six_point") for v in valence}
    return LineArrangement(nv, lines, types)


def disjoint_pairs(arr: LineArrangement) -> DisjointnessTable:
    n = len(arr.lines)
    return DisjointnessTable(frozenset(
        (p, t) for p, t in combinations(range(1, n + 1), 2) if not arr.meets(p, t)))


def _check_indices(arr: LineArrangement, t: int, indices) -> None:
    expected = {p for p in range(1, t) if not arr.meets(p, t)}
    got = set(indices)
    if got != expected:
        bad = sorted(got ^ expected)
        raise AuditError(f"D_{t}: pair(s) {[(p, t) for p in bad]} disagree with the arrangement")


def build_Dt(arr: LineArrangement, t: int, catalog: dict | None = None) -> list[TwistSpec]:
    """Degenerate parasitic product over the undoubled 24-point system."""
    if catalog is None:
        from .dataset import load_catalog
        catalog = load_catalog()
    rec = catalog["degenerate_Dt"].get(str(t))
    if rec is None:
        raise InvalidParameterError(f"no D_{t} in the catalog")
    _check_indices(arr, t, rec["indices"])
    return [block((str(p),), (str(t),), 2, rec["bar"], rec["marks"]) for p in rec["indices"]]


def ctilde_lines(arr: LineArrangement, j: int) -> list[int]:
    if not 1 <= j <= arr.vertex_count:
        raise InvalidParameterError(f"vertex {j} out of range")
    return [l.index for l in arr.lines if l.a == j]


def build_Ctilde(arr: LineArrangement, j: int, catalog: dict | None = None) -> list[TwistSpec]:
    out = []
    for t in ctilde_lines(arr, j):
        out += build_Dt(arr, t, catalog)
    return out

"""
Decorated halftwists: lane paths, twist specifications, compilation to
braid words, macro expansion of block twists and path transport.

Compact notation (used by the catalog and the CLI)::

    Z^2{3 3',19}            block node, default lanes (below)
    Zb^-2{1,3}              bar: above every intermediate puncture
    Zt{1,2'}(1')            figure path, lanes given explicitly
    Z{1,19}(3)(13-14')      above 3 and the range 13..14' (plain Z)
    Z{19,19'} @ [Z^2{3 3',19} Z^2{1 1',19}]     conjugated by h1 h2

For plain and tilde factors the parenthesised marks list the punctures the
path passes above; for bar factors they list the ones it passes below.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Union

from .braid import BraidWord, compose, conjugate, full_twist
from .disk import Arc, PunctureSystem, compile_lane_halftwist, transport
from .errors import MalformedSpecError, UnsupportedFactorError


class SingularityKind(str, Enum):
    BRANCH = "branch"
    NODE = "node"
    CUSP = "cusp"
    TANGENCY = "tangency"
    MULTIPLE = "multiple"

    @classmethod
    def from_epsilon(cls, epsilon: int) -> "SingularityKind":
        return {1: cls.BRANCH, 2: cls.NODE, 3: cls.CUSP, 4: cls.TANGENCY}.get(abs(epsilon), cls.MULTIPLE)

    @property
    def degree(self) -> int:
        return {"branch": 1, "node": 2, "cusp": 3, "tangency": 4}.get(self.value, 0)


MACROS = ("none", "cusp-triple-left", "cusp-triple-right", "lemma25-expansion")

Conjugator = tuple[Union["TwistSpec", BraidWord], int]


@dataclass(frozen=True)
class LanePath:
    """Path between two punctures; lanes are resolved against a system.

    ``marked`` holds labels or ``"x-y"`` ranges; they are the above-exceptions
    of a plain path and the below-exceptions of a bar path.
    """

    endpoint_a: str
    endpoint_b: str
    bar: bool = False
    marked: tuple[str, ...] = ()
    conjugators: tuple[Conjugator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "endpoint_a", str(self.endpoint_a))
        object.__setattr__(self, "endpoint_b", str(self.endpoint_b))
        object.__setattr__(self, "marked", tuple(str(m) for m in self.marked))
        object.__setattr__(self, "conjugators", tuple(self.conjugators))
        if self.endpoint_a == self.endpoint_b:
            raise MalformedSpecError("path endpoints must differ")

    def marked_labels(self, system: PunctureSystem) -> set[str]:
        out: set[str] = set()
        for item in self.marked:
            if "-" in item:
                lo, hi = item.split("-", 1)
                pa, pb = sorted((system.position(lo), system.position(hi)))
                out.update(system.label(p) for p in range(pa, pb + 1))
            else:
                system.position(item)
                out.add(item)
        return out

    def lanes(self, system: PunctureSystem, skip: Iterable[str] = ()) -> dict[str, str]:
        """Map from every intermediate puncture to 'above' or 'below'."""
        skip = set(skip)
        marks = self.marked_labels(system)
        out = {}
        for lab in system.between(self.endpoint_a, self.endpoint_b):
            if lab in skip:
                continue
            up = (lab not in marks) if self.bar else (lab in marks)
            out[lab] = "above" if up else "below"
        return out

    def above_positions(self, system: PunctureSystem, skip: Iterable[str] = ()) -> set[int]:
        return {system.position(l) for l, s in self.lanes(system, skip).items() if s == "above"}

    def conjugated(self, by: Union["TwistSpec", BraidWord], power: int = 1) -> "LanePath":
        return replace(self, conjugators=self.conjugators + ((by, power),))

    def to_arc(self, system: PunctureSystem) -> Arc:
        pa, pb = system.position(self.endpoint_a), system.position(self.endpoint_b)
        lo, hi = sorted((pa, pb))
        arc = Arc.lane(system.count, lo, hi, self.above_positions(system))
        return transport(arc, conjugator_word(self.conjugators, system))


@dataclass(frozen=True)
class TwistSpec:
    path: LanePath
    epsilon: int = 1
    block_a: tuple[str, ...] = ()
    block_b: tuple[str, ...] = ()
    macro: str = "none"
    figure_path: bool = False

    def __post_init__(self):
        if not self.block_a:
            object.__setattr__(self, "block_a", (self.path.endpoint_a,))
        if not self.block_b:
            object.__setattr__(self, "block_b", (self.path.endpoint_b,))
        object.__setattr__(self, "block_a", tuple(str(x) for x in self.block_a))
        object.__setattr__(self, "block_b", tuple(str(x) for x in self.block_b))
        if self.macro not in MACROS:
            raise MalformedSpecError(f"unknown macro {self.macro!r}")
        if self.epsilon == 0 or abs(self.epsilon) > 4:
            raise MalformedSpecError(f"exponent {self.epsilon} outside 1..4")
        for blk in (self.block_a, self.block_b):
            if len(blk) not in (1, 2):
                raise MalformedSpecError("blocks hold one or two punctures")
            if len(blk) == 2 and blk[1] != blk[0] + "'":
                raise MalformedSpecError(f"block {blk} is not a primed pair")
        if set(self.block_a) & set(self.block_b):
            raise MalformedSpecError("blocks overlap")

    @property
    def bar(self) -> bool:
        return self.path.bar

    @property
    def kind(self) -> SingularityKind:
        return SingularityKind.from_epsilon(self.epsilon)

    @property
    def is_simple(self) -> bool:
        return len(self.block_a) == 1 and len(self.block_b) == 1

    @property
    def degree(self) -> int:
        """Exponent sum of the compiled factor."""
        if abs(self.epsilon) == 3 and not self.is_simple:
            return 9
        return self.epsilon * len(self.block_a) * len(self.block_b)

    @property
    def conjugators(self) -> tuple[Conjugator, ...]:
        return self.path.conjugators

    def conjugated(self, by, power: int = 1) -> "TwistSpec":
        return replace(self, path=self.path.conjugated(by, power))

    def conjugated_first(self, by, power: int = 1) -> "TwistSpec":
        """Conjugate innermost: (g^{by^power})^{existing stack}."""
        p = self.path
        return replace(self, path=replace(p, conjugators=((by, power),) + p.conjugators))

    def with_epsilon(self, epsilon: int) -> "TwistSpec":
        return replace(self, epsilon=epsilon)

    def __str__(self) -> str:
        return format_spec(self)


def simple(a: str, b: str, epsilon: int = 1, bar: bool = False, marked: Iterable[str] = (),
           conjugators: Iterable[Conjugator] = ()) -> TwistSpec:
    return TwistSpec(LanePath(a, b, bar, tuple(marked), tuple(conjugators)), epsilon)


def block(a: Iterable[str], b: Iterable[str], epsilon: int = 2, bar: bool = False,
          marked: Iterable[str] = (), conjugators: Iterable[Conjugator] = ()) -> TwistSpec:
    a, b = tuple(str(x) for x in a), tuple(str(x) for x in b)
    macro = "lemma25-expansion"
    if abs(epsilon) == 3:
        macro = "cusp-triple-left" if len(a) == 2 else "cusp-triple-right"
    if len(a) == 1 and len(b) == 1:
        macro = "none"
    return TwistSpec(LanePath(a[0], b[0], bar, tuple(marked), tuple(conjugators)), epsilon, a, b, macro)


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


def _ordered_blocks(spec: TwistSpec, system: PunctureSystem):
    a, b = spec.block_a, spec.block_b
    if system.position(a[0]) > system.position(b[0]):
        a, b = b, a
    return a, b


def conjugator_word(conjugators, system: PunctureSystem) -> BraidWord:
    n = system.count
    parts = []
    for by, power in conjugators:
        w = by if isinstance(by, BraidWord) else compile_spec(by, system)
        if w.strand_count != n:
            raise MalformedSpecError("conjugator lives on a different disk")
        parts.append(w ** power)
    return compose(parts) if parts else BraidWord.identity(n)


def compile_halftwist(spec: TwistSpec, system: PunctureSystem) -> BraidWord:
    """Compile a simple factor H^epsilon along its lanes, then conjugate."""
    if not spec.is_simple or spec.macro != "none":
        raise MalformedSpecError("compile_halftwist takes simple specs; expand macros first")
    pa = system.position(spec.path.endpoint_a)
    pb = system.position(spec.path.endpoint_b)
    lo, hi = sorted((pa, pb))
    h = compile_lane_halftwist(system.count, lo, hi, spec.path.above_positions(system))
    core = h ** spec.epsilon
    if not spec.conjugators:
        return core
    return conjugate(core, conjugator_word(spec.conjugators, system))


@lru_cache(maxsize=8192)
def compile_spec(spec: TwistSpec, system: PunctureSystem) -> BraidWord:
    """Compile any spec, expanding macros first."""
    if spec.is_simple and spec.macro == "none":
        return compile_halftwist(spec, system)
    return compose([compile_halftwist(s, system) for s in expand_all(spec, system)])


def block_twist_word(spec: TwistSpec, system: PunctureSystem) -> BraidWord:
    """Even block twist built directly: slide block B next to A, twist, slide back.

    Independent of :func:`expand_macro`; used to check the expansion rules.
    """
    if spec.epsilon % 2:
        raise UnsupportedFactorError("direct block construction needs an even exponent")
    n = system.count
    a, b = _ordered_blocks(spec, system)
    pa = system.position(a[0])
    a_end = system.position(a[-1])
    pb = system.position(b[0])
    s = len(b)
    above = spec.path.above_positions(system, skip=a + b)
    slide = []
    for m in range(pb - 1, a_end, -1):
        sign = 1 if m in above else -1
        slide += [sign * (m + t) for t in range(s)]
    u = BraidWord(n, tuple(slide))
    width = len(a) + s

    def twist(count: int, offset: int) -> BraidWord:
        return BraidWord(n, tuple(x + offset for x in full_twist(count).letters)) if count > 1 else BraidWord.identity(n)

    core = compose([twist(width, pa - 1), twist(len(a), pa - 1).inverse(), twist(s, a_end).inverse()])
    core = core ** (spec.epsilon // 2)
    body = compose([u, core, u.inverse()])
    if not spec.conjugators:
        return body
    return conjugate(body, conjugator_word(spec.conjugators, system))


# ---------------------------------------------------------------------------
# macro expansion
# ---------------------------------------------------------------------------


def _inner(spec: TwistSpec, x: str, y: str, epsilon: int, extra=()) -> TwistSpec:
    """Simple factor x->y inheriting lanes; block partners follow the bar flag."""
    p = spec.path
    return TwistSpec(LanePath(x, y, p.bar, p.marked, tuple(extra) + p.conjugators), epsilon)


def expand_macro(spec: TwistSpec, system: PunctureSystem | None = None) -> list[TwistSpec]:
    """One level of expansion of a block spec into simpler specs.

    Nodes follow the block identities (the order flips for negative
    exponents and for bar paths); cusps on a block become the conjugated
    triple (Z^3)^{Z_pair} Z^3 (Z^3)^{Z_pair^-1}.
    """
    if spec.is_simple:
        if spec.macro != "none":
            raise MalformedSpecError("macro on a simple factor")
        return [spec]
    e = spec.epsilon
    if abs(e) == 1:
        raise MalformedSpecError("branch factors have no block form")
    a, b = spec.block_a, spec.block_b
    if system is not None:
        a, b = _ordered_blocks(spec, system)
    if abs(e) == 3:
        if e < 0 or (len(a) == 2 and len(b) == 2):
            raise MalformedSpecError("cusp macros need one doubled block and a positive exponent")
        pair = a if len(a) == 2 else b
        core = _inner(spec, a[0], b[0], 3)
        pivot = simple(pair[0], pair[1])
        return [core.conjugated_first(pivot, 1), core, core.conjugated_first(pivot, -1)]
    if abs(e) != 2:
        raise UnsupportedFactorError("only nodes and cusps have block expansions")
    if len(a) == 2 and len(b) == 2:
        first = block((a[1],), b, e, spec.bar, spec.path.marked, spec.conjugators)
        second = block((a[0],), b, e, spec.bar, spec.path.marked, spec.conjugators)
        out = [first, second]
    elif len(a) == 2:
        out = [_inner(spec, a[1], b[0], e), _inner(spec, a[0], b[0], e)]
    else:
        out = [_inner(spec, a[0], b[1], e), _inner(spec, a[0], b[0], e)]
    if (e < 0) != spec.bar:
        out.reverse()
    return out


def expand_all(spec: TwistSpec, system: PunctureSystem | None = None) -> list[TwistSpec]:
    out = []
    stack = [spec]
    while stack:
        s = stack.pop()
        if s.is_simple:
            if s.macro != "none":
                raise MalformedSpecError("macro on a simple factor")
            out.append(s)
        else:
            stack.extend(reversed(expand_macro(s, system)))
    return out


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------


def lane_path_from_arc(arc: Arc, system: PunctureSystem) -> LanePath | None:
    lanes = arc.lane_data()
    if lanes is None:
        return None
    return LanePath(system.label(arc.a), system.label(arc.b), False,
                    tuple(system.label(m) for m in sorted(lanes)))


def apply_braid_to_path(path: LanePath, w: BraidWord, system: PunctureSystem) -> LanePath:
    """Image of ``path`` under ``w``, reduced to plain lane form when it is one."""
    arc = transport(path.to_arc(system), w)
    lane = lane_path_from_arc(arc, system)
    if lane is not None:
        return lane
    return path.conjugated(w, 1)


def same_path(p: LanePath, q: LanePath, system: PunctureSystem) -> bool:
    return p.to_arc(system) == q.to_arc(system)


# ---------------------------------------------------------------------------
# notation
# ---------------------------------------------------------------------------


def _format_block(blk) -> str:
    return " ".join(blk)


def format_spec(spec: TwistSpec) -> str:
    head = "Z" + ("b" if spec.bar else "") + ("t" if spec.figure_path else "")
    if spec.epsilon != 1:
        head += f"^{spec.epsilon}"
    text = f"{head}{{{_format_block(spec.block_a)},{_format_block(spec.block_b)}}}"
    text += "".join(f"({m})" for m in spec.path.marked)
    if spec.conjugators:
        items = []
        for by, power in spec.conjugators:
            if isinstance(by, BraidWord):
                raise MalformedSpecError("raw braid conjugators have no compact notation")
            s = by if power == 1 else by.with_epsilon(by.epsilon * power)
            items.append(format_spec(s))
        text += " @ [" + " ".join(items) + "]"
    return text


_HEAD = re.compile(r"\s*Z(b?)(t?)(?:\^(-?\d+))?\{([^,{}]+),([^,{}]+)\}")
_MARK = re.compile(r"\s*\(([^()]+)\)")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, msg: str):
        raise MalformedSpecError(f"{msg} at offset {self.pos} in {self.text!r}")

    def spec(self) -> TwistSpec:
        m = _HEAD.match(self.text, self.pos)
        if not m:
            self.fail("expected Z{..,..}")
        self.pos = m.end()
        bar, tilde, eps, ba, bb = m.groups()
        epsilon = int(eps) if eps else 1
        a = tuple(ba.split())
        b = tuple(bb.split())
        if not a or not b:
            self.fail("empty block")
        marks = []
        while True:
            mm = _MARK.match(self.text, self.pos)
            if not mm:
                break
            marks.append(mm.group(1).strip().replace(" ", ""))
            self.pos = mm.end()
        conj = []
        rest = self.text[self.pos:]
        stripped = rest.lstrip()
        if stripped.startswith("@"):
            self.pos += len(rest) - len(stripped) + 1
            self.skip_ws()
            if not self.text.startswith("[", self.pos):
                self.fail("expected [")
            self.pos += 1
            while True:
                self.skip_ws()
                if self.text.startswith("]", self.pos):
                    self.pos += 1
                    break
                c = self.spec()
                conj.append((c, 1))
        spec = block(a, b, epsilon, bool(bar), marks, conj)
        if tilde:
            spec = replace(spec, figure_path=True)
        return spec

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t,;":
            self.pos += 1


def parse_spec(text: str) -> TwistSpec:
    p = _Parser(text)
    spec = p.spec()
    p.skip_ws()
    if p.pos != len(text):
        p.fail("trailing characters")
    return spec


# ---------------------------------------------------------------------------
# drawing
# ---------------------------------------------------------------------------


def _arc_points(arc: Arc) -> list[tuple[float, float]]:
    """Waypoints: crossings sit above their puncture, other passes dip below."""
    pts = [(float(arc.a), 0.0)]
    x = float(arc.a)
    depth = 0
    for step, letter in enumerate(arc.word):
        m = abs(letter)
        depth += 1
        h = 0.25 + 0.12 * depth
        going_right = letter < 0
        start = x + (0.3 if going_right else -0.3) * (1 if step else 0)
        target = m
        lo, hi = sorted((start, target))
        if any(lo < k < hi for k in range(1, arc.n + 1)):
            pts.append(((start + target) / 2, -h))
        pts.append((target - 0.3 if going_right else target + 0.3, h * 0.6))
        pts.append((float(target), h))
        x = float(target)
        pts.append((target + 0.3 if going_right else target - 0.3, h * 0.6))
    last = pts[-1][0]
    lo, hi = sorted((last, arc.b))
    if any(lo < k < hi for k in range(1, arc.n + 1)) or arc.word:
        pts.append(((last + arc.b) / 2, -(0.25 + 0.12 * (depth + 1))))
    pts.append((float(arc.b), 0.0))
    return pts


def render_path(paths: Union[LanePath, Iterable[LanePath]], system: PunctureSystem,
                title: str = "") -> str:
    """SVG drawing of one or more paths on the punctured axis."""
    if isinstance(paths, LanePath):
        paths = [paths]
    paths = list(paths)
    n = system.count
    scale, pad = 40.0, 30.0
    width = pad * 2 + scale * (n + 1)
    height = 220.0
    mid = height / 2

    def xy(p):
        return pad + p[0] * scale, mid - p[1] * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.0f} {height:.0f}">']
    if title:
        out.append(f'<title>{title}</title>')
    out.append(f'<line x1="{pad:.1f}" y1="{mid:.1f}" x2="{width - pad:.1f}" y2="{mid:.1f}" '
               'stroke="#bbb" stroke-dasharray="4 3"/>')
    colours = ["#c0392b", "#2471a3", "#239b56", "#7d3c98", "#b9770e"]
    for i, path in enumerate(paths):
        arc = path.to_arc(system)
        pts = [xy(p) for p in _arc_points(arc)]
        d = f"M {pts[0][0]:.1f} {pts[0][1]:.1f}"
        for k in range(1, len(pts)):
            (x0, y0), (x1, y1) = pts[k - 1], pts[k]
            d += f" Q {x0:.1f} {y1:.1f} {x1:.1f} {y1:.1f}" if abs(y1 - y0) > 1e-9 else f" L {x1:.1f} {y1:.1f}"
        out.append(f'<path d="{d}" fill="none" stroke="{colours[i % len(colours)]}" stroke-width="1.6"/>')
    for k in range(1, n + 1):
        x, y = xy((k, 0))
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="black"/>')
        out.append(f'<text x="{x:.1f}" y="{y + 16:.1f}" font-size="10" text-anchor="middle">'
                   f'{system.label(k)}</text>')
    out.append("</svg>")
    return "\n".join(out)


def relabel(spec: TwistSpec, mapping) -> TwistSpec:
    """Rename punctures; ``mapping`` maps base names, primes are carried along."""

    def lab(x: str) -> str:
        base = x.rstrip("'")
        return str(mapping.get(base, base)) + x[len(base):]

    def mark(m: str) -> str:
        if "-" in m:
            lo, hi = m.split("-", 1)
            return f"{lab(lo)}-{lab(hi)}"
        return lab(m)

    p = spec.path
    conj = tuple((c if isinstance(c, BraidWord) else relabel(c, mapping), k) for c, k in p.conjugators)
    path = LanePath(lab(p.endpoint_a), lab(p.endpoint_b), p.bar, tuple(mark(m) for m in p.marked), conj)
    return replace(spec, path=path, block_a=tuple(lab(x) for x in spec.block_a),
                   block_b=tuple(lab(x) for x in spec.block_b))

"""
Local monodromies, assembly of the global factorization and its audits.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Iterator

from .arrangement import LineArrangement, build_pillow
from .braid import (MERSENNE_61, BraidWord, _burau_columns, compose, compose_permutations,
                    full_twist, normal_form, permutation, random_burau_parameters)
from .dataset import load_catalog
from .disk import PunctureSystem, doubled_system
from .errors import InvalidParameterError
from .regeneration import build_Ci
from .twists import (SingularityKind, TwistSpec, compile_spec, expand_all, parse_spec,
                     relabel, simple)


@dataclass(frozen=True)
class TwistFactor:
    spec: TwistSpec
    tag: str
    block: str = ""
    group: str = ""

    def __post_init__(self):
        if not self.tag:
            raise InvalidParameterError("every factor needs a provenance tag")

    @property
    def kind(self) -> SingularityKind:
        return self.spec.kind

    @property
    def degree(self) -> int:
        return self.spec.degree


@dataclass(frozen=True)
class Factorization:
    ambient: PunctureSystem
    factors: tuple[TwistFactor, ...]

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[TwistFactor]:
        return iter(self.factors)

    def __add__(self, other: "Factorization") -> "Factorization":
        if other.ambient != self.ambient:
            from .errors import AmbientMismatchError
            raise AmbientMismatchError("factorizations live on different disks")
        return Factorization(self.ambient, self.factors + other.factors)

    def expanded(self) -> "Factorization":
        out = []
        for f in self.factors:
            parts = expand_all(f.spec, self.ambient)
            if len(parts) == 1:
                out.append(f)
            else:
                out += [replace(f, spec=s, tag=f"{f.tag}.{k}") for k, s in enumerate(parts)]
        return Factorization(self.ambient, tuple(out))

    def compiled(self) -> list[BraidWord]:
        return [compile_spec(f.spec, self.ambient) for f in self.factors]

    def word(self) -> BraidWord:
        return compose(self.compiled())

    def blocks(self) -> dict[str, "Factorization"]:
        out: dict[str, list[TwistFactor]] = {}
        for f in self.factors:
            out.setdefault(f.block, []).append(f)
        return {k: Factorization(self.ambient, tuple(v)) for k, v in out.items()}

    def degree(self) -> int:
        return sum(f.degree for f in self.factors)

    def census(self) -> dict[str, int]:
        counts = {"cusp": 0, "node": 0, "branch": 0}
        for f in self.expanded():
            k = f.kind.value
            counts[k] = counts.get(k, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# building blocks from the catalog
# ---------------------------------------------------------------------------


def local_system(lines: Iterable[int]) -> PunctureSystem:
    labels = []
    for t in sorted(lines):
        labels += [str(t), f"{t}'"]
    return PunctureSystem(tuple(labels))


def _figure_spec(catalog: dict, ref: dict) -> TwistSpec:
    fig = catalog["figure_paths"][ref["figure"]]
    slot = fig["slots"][ref["slot"]]
    conj = [(parse_spec(c), 1) for c in slot.get("conjugators", [])]
    spec = simple(slot["from"], slot["to"], 1, False, slot.get("marks", []), conj)
    spec = replace(spec, figure_path=True)
    return relabel(spec, ref["map"])


def _expand_items(items, rec: dict, catalog: dict, tag: str) -> list[tuple[TwistSpec, str]]:
    out: list[tuple[TwistSpec, str]] = []
    for k, item in enumerate(items):
        here = f"{tag}[{k}]"
        if isinstance(item, str):
            out.append((parse_spec(item), here))
        elif "figure" in item:
            out.append((_figure_spec(catalog, item), here + "~"))
        elif item.get("ref") == "G":
            out += _expand_items(rec["G"], rec, catalog, here + ":G")
        elif item.get("ref") == "FF*":
            f_part = _expand_items(rec["F"], rec, catalog, here + ":F")
            rho = [(parse_spec(c), 1) for c in rec["rho"]]
            out += f_part
            for spec, t in f_part:
                for c in rho:
                    spec = spec.conjugated(*c)
                out.append((spec, t + "*"))
        elif "conj" in item:
            inner = _expand_items(item["items"], rec, catalog, here)
            conj = [(parse_spec(c), 1) for c in item["conj"]]
            for spec, t in inner:
                for c in conj:
                    spec = spec.conjugated(*c)
                out.append((spec, t))
        else:
            raise InvalidParameterError(f"unrecognised catalog item at {here}")
    return out


def _ambient_for(lines, system: PunctureSystem | None, local: bool) -> PunctureSystem:
    if local:
        return local_system(lines)
    return system if system is not None else doubled_system(24)


def phi_3point(m: int, catalog: dict | None = None, system: PunctureSystem | None = None,
               local: bool = False) -> Factorization:
    catalog = catalog or load_catalog()
    rec = catalog["phi"].get(str(m))
    if rec is None or rec["kind"] != "three_point":
        raise InvalidParameterError(f"vertex {m} is not a 3-point")
    i, j, k = sorted(rec["lines"])
    mapping = {"i": str(i), "j": str(j), "k": str(k)}
    factors = tuple(
        TwistFactor(relabel(parse_spec(s), mapping), f"phi{m}[{n}]", f"phi{m}", "three_point")
        for n, s in enumerate(catalog["three_point_template"]))
    return Factorization(_ambient_for(rec["lines"], system, local), factors)


def phi_6point(m: int, catalog: dict | None = None, system: PunctureSystem | None = None,
               local: bool = False) -> Factorization:
    catalog = catalog or load_catalog()
    rec = catalog["phi"].get(str(m))
    if rec is None or rec["kind"] != "six_point":
        raise InvalidParameterError(f"vertex {m} is not a 6-point")
    items = _expand_items(rec["body"], rec, catalog, f"phi{m}")
    factors = tuple(TwistFactor(s, t, f"phi{m}", "six_point") for s, t in items)
    return Factorization(_ambient_for(rec["lines"], system, local), factors)


def phi_sub(m: int, part: str, catalog: dict | None = None, local: bool = True) -> Factorization:
    """The G list, the F list or F^{rho^-1} ("F*") of a 6-point, unconjugated."""
    catalog = catalog or load_catalog()
    rec = catalog["phi"][str(m)]
    if part == "G":
        items = _expand_items(rec["G"], {**rec, "G": []}, catalog, f"phi{m}:G")
        items = [it for it in items]
    elif part == "F":
        items = _expand_items(rec["F"], rec, catalog, f"phi{m}:F")
    elif part == "FF*":
        items = _expand_items([{"ref": "FF*"}], rec, catalog, f"phi{m}")
    else:
        raise InvalidParameterError(f"unknown part {part!r}")
    factors = tuple(TwistFactor(s, t, f"phi{m}", "six_point") for s, t in items)
    return Factorization(_ambient_for(rec["lines"], None, local), factors)


def phi(m: int, catalog: dict | None = None, system: PunctureSystem | None = None,
        local: bool = False) -> Factorization:
    catalog = catalog or load_catalog()
    kind = catalog["phi"][str(m)]["kind"]
    fn = phi_3point if kind == "three_point" else phi_6point
    return fn(m, catalog, system, local)


def parasitic(j: int, arr: LineArrangement | None = None, catalog: dict | None = None,
              system: PunctureSystem | None = None) -> Factorization:
    catalog = catalog or load_catalog()
    arr = arr or build_pillow(catalog)
    specs = build_Ci(j, arr, catalog)
    factors = tuple(TwistFactor(s, f"C{j}[{n}]", f"C{j}", "parasitic") for n, s in enumerate(specs))
    return Factorization(system or doubled_system(24), factors)


def assemble_delta48(catalog: dict | None = None) -> Factorization:
    catalog = catalog or load_catalog()
    arr = build_pillow(catalog)
    system = doubled_system(24)
    total = Factorization(system, ())
    for j in range(1, 11):
        total = total + parasitic(j, arr, catalog, system) + phi(j, catalog, system)
    return total


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------

LEVELS = ("degree", "census", "permutation", "burau", "normal_form")


@dataclass
class AuditReport:
    level: str
    degree_total: int = 0
    subtotals: dict = field(default_factory=dict)
    census: dict = field(default_factory=dict)
    permutation_ok: bool | None = None
    impure_blocks: list = field(default_factory=list)
    burau_results: list = field(default_factory=list)
    nf_result: bool | None = None
    first_divergence: dict | None = None
    local_checks: list = field(default_factory=list)
    expected_degree: int | None = None
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = self.expected_degree is None or self.degree_total == self.expected_degree
        if self.census:
            ok &= 3 * self.census["cusp"] + 2 * self.census["node"] + self.census["branch"] == self.degree_total
        if self.permutation_ok is not None:
            ok &= self.permutation_ok
        if self.burau_results:
            ok &= all(r["equal"] for r in self.burau_results)
        if self.nf_result is not None:
            ok &= self.nf_result
        return bool(ok)

    def to_json(self) -> str:
        d = asdict(self)
        d["passed"] = self.passed
        return json.dumps(d, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"audit level: {self.level}"]
        st = self.subtotals
        if st:
            lines.append(f"degree: {self.degree_total} = {st.get('three_point', 0)} + "
                         f"{st.get('six_point', 0)} + {st.get('parasitic', 0)}")
        else:
            lines.append(f"degree: {self.degree_total}")
        if self.expected_degree is not None:
            lines.append(f"expected degree: {self.expected_degree}")
        if self.census:
            c = self.census
            lines.append(f"census: cusps={c['cusp']} nodes={c['node']} branch={c['branch']}")
        if self.permutation_ok is not None:
            lines.append("permutation: " + ("identity" if self.permutation_ok else "NOT identity"))
            if self.impure_blocks:
                lines.append("  impure blocks: " + ", ".join(self.impure_blocks))
        for r in self.burau_results:
            lines.append(f"burau t={r['t']}: " + ("equal" if r["equal"] else "DIFFERENT"))
        if self.nf_result is not None:
            lines.append("normal form: " + ("equal" if self.nf_result else "DIFFERENT"))
        for chk in self.local_checks:
            lines.append(f"local {chk['block']}: " + ("ok" if chk["ok"] else "FAILED") + f"  ({chk['identity']})")
        if self.first_divergence:
            d = self.first_divergence
            lines.append(f"first divergence: block {d['block']} starting at factor {d['factor_index']} ({d['tag']})")
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _degree_part(f: Factorization, report: AuditReport) -> None:
    sub: dict[str, int] = {}
    for fac in f:
        sub[fac.group] = sub.get(fac.group, 0) + fac.degree
    report.degree_total = sum(sub.values())
    report.subtotals = sub
    n = f.ambient.count
    report.expected_degree = n * (n - 1)


def _pure_or_pairing(p, system: PunctureSystem) -> bool:
    """Identity, or a product of swaps j <-> j' of paired punctures."""
    for k, img in enumerate(p, start=1):
        if img == k:
            continue
        a, b = system.labels[k - 1], system.labels[img - 1]
        if p[img - 1] != k or a.rstrip("'") != b.rstrip("'"):
            return False
    return True


def _block_offsets(f: Factorization) -> dict[str, int]:
    out: dict[str, int] = {}
    for k, fac in enumerate(f.factors):
        out.setdefault(fac.block, k)
    return out


def audit(f: Factorization, level: str = "degree", seeds: int = 3, seed: int | None = 0,
          catalog: dict | None = None) -> AuditReport:
    """Run the audit stack up to ``level``; failures are report content."""
    if level not in LEVELS:
        raise InvalidParameterError(f"unknown audit level {level!r}")
    rank = LEVELS.index(level)
    report = AuditReport(level)
    t0 = time.perf_counter()
    _degree_part(f, report)
    report.timings["degree"] = time.perf_counter() - t0
    if rank >= 1:
        t0 = time.perf_counter()
        report.census = f.census()
        report.timings["census"] = time.perf_counter() - t0
    if rank >= 2:
        t0 = time.perf_counter()
        n = f.ambient.count
        total = tuple(range(1, n + 1))
        for name, blk in f.blocks().items():
            p = tuple(range(1, n + 1))
            for w in blk.compiled():
                p = compose_permutations(p, permutation(w))
            if not _pure_or_pairing(p, f.ambient):
                report.impure_blocks.append(name)
            total = compose_permutations(total, p)
        report.permutation_ok = total == tuple(range(1, n + 1)) and not report.impure_blocks
        report.timings["permutation"] = time.perf_counter() - t0
    if rank >= 3:
        t0 = time.perf_counter()
        n = f.ambient.count
        target = full_twist(n)
        words = f.compiled()
        for t in random_burau_parameters(seeds, MERSENNE_61, seed):
            cols = None
            for w in words:
                cols = _burau_columns(w, t, MERSENNE_61, cols)
            ref = _burau_columns(target, t, MERSENNE_61)
            report.burau_results.append({"t": t, "equal": cols == ref})
        report.timings["burau"] = time.perf_counter() - t0
        if not all(r["equal"] for r in report.burau_results):
            localize(f, report, catalog)
    if rank >= 4:
        t0 = time.perf_counter()
        report.nf_result = normal_form(f.word()) == normal_form(full_twist(f.ambient.count))
        report.timings["normal_form"] = time.perf_counter() - t0
    return report


def localize(f: Factorization, report: AuditReport, catalog: dict | None = None) -> None:
    """Attach local checks; the first failing block becomes the divergence point."""
    from .local import local_checks

    offsets = _block_offsets(f)
    checks = local_checks(catalog)
    report.local_checks = checks
    for chk in checks:
        if not chk["ok"] and chk["block"] in offsets:
            k = offsets[chk["block"]]
            report.first_divergence = {"block": chk["block"], "factor_index": k, "tag": f.factors[k].tag}
            return
    order = list(offsets)
    if order:
        report.first_divergence = {"block": "global", "factor_index": 0,
                                   "tag": "all local checks pass; mismatch comes from the global embedding"}

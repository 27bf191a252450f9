"""Regeneration rules and the regenerated parasitic products C_i."""

from __future__ import annotations

from dataclasses import dataclass

from .arrangement import LineArrangement, _check_indices, ctilde_lines
from .disk import PunctureSystem, double_system, doubled_system
from .errors import InvalidParameterError, MalformedSpecError
from .twists import TwistSpec, block, simple

__all__ = ["RegenerationChoice", "double_system", "apply_rule", "regenerated_Dt", "build_Ci"]

_VARIANTS = {
    "first": (None,),
    "second": ("ii'_j", "i_jj'", "ii'_jj'"),
    "third": ("ii'_j", "i_jj'"),
}
_RULE_EPSILON = {"first": 1, "second": 2, "third": 4}


@dataclass(frozen=True)
class RegenerationChoice:
    rule: str
    variant: str | None = None

    def __post_init__(self):
        if self.rule not in _VARIANTS:
            raise InvalidParameterError(f"unknown rule {self.rule!r}")
        if self.variant not in _VARIANTS[self.rule]:
            raise InvalidParameterError(f"variant {self.variant!r} does not belong to rule {self.rule}")


def _double_marks(marks) -> tuple[str, ...]:
    out = []
    for m in marks:
        if "-" in m:
            lo, hi = m.split("-", 1)
            out.append(f"{lo}-{hi}'")
        else:
            out += [m, m + "'"]
    return tuple(out)


def apply_rule(factor: TwistSpec, choice: RegenerationChoice) -> list[TwistSpec]:
    """Rewrite a factor of the degenerate curve on the doubled puncture system."""
    if not factor.is_simple:
        raise MalformedSpecError("regeneration rules act on simple factors")
    if abs(factor.epsilon) != _RULE_EPSILON[choice.rule]:
        raise MalformedSpecError(
            f"rule {choice.rule} expects exponent {_RULE_EPSILON[choice.rule]}, got {factor.epsilon}")
    if factor.conjugators:
        raise MalformedSpecError("conjugated factors are regenerated through their conjugators separately")
    i, j = factor.path.endpoint_a, factor.path.endpoint_b
    bar, marks = factor.bar, _double_marks(factor.path.marked)
    if choice.rule == "first":
        # the i -> j' lane goes over i' (plain) or under j (bar); either way
        # the pair stays invariant under Z_ii' Z_jj'
        extra = (j,) if bar else (i + "'",)
        return [simple(i, j + "'", 1, bar, marks + extra), simple(i + "'", j, 1, bar, marks)]
    a = (i, i + "'") if choice.variant.startswith("ii'") else (i,)
    b = (j, j + "'") if choice.variant.endswith("jj'") else (j,)
    eps = 2 if choice.rule == "second" else 3
    return [block(a, b, eps, bar, marks)]


def regenerated_Dt(t: int, catalog: dict | None = None, arr: LineArrangement | None = None) -> list[TwistSpec]:
    if catalog is None:
        from .dataset import load_catalog
        catalog = load_catalog()
    rec = catalog["regenerated_Dt"].get(str(t))
    if rec is None:
        raise InvalidParameterError(f"no regenerated D_{t} in the catalog")
    degenerate = catalog["degenerate_Dt"][str(t)]["indices"]
    if sorted(rec["indices"]) != sorted(degenerate):
        from .errors import AuditError
        raise AuditError(f"regenerated D_{t} pairs differ from the degenerate table")
    if arr is not None:
        _check_indices(arr, t, rec["indices"])
    ts = str(t)
    return [block((str(p), f"{p}'"), (ts, ts + "'"), 2, rec["bar"], rec["marks"]) for p in rec["indices"]]


def build_Ci(j: int, arr: LineArrangement, catalog: dict | None = None) -> list[TwistSpec]:
    out = []
    for t in ctilde_lines(arr, j):
        out += regenerated_Dt(t, catalog, arr)
    return out


def regenerated_system(count: int = 24) -> PunctureSystem:
    return doubled_system(count)

"""Local identities each vertex monodromy must satisfy in its own small disk.

A 3-point on lines i<j<k, regenerated, has total monodromy
Delta^2_6 * (Z_ii' Z_jj' Z_kk')^-1; a 6-point the analogous 12-strand
product.  Inside a 6-point the pair F * F^{rho^-1} multiplies to
Delta^2_8 * prod Z_jj'^-2 over its four lines.
"""

from __future__ import annotations

from .braid import BraidWord, burau_equal, compose, full_twist
from .catalog import Factorization, local_system, phi, phi_sub
from .dataset import load_catalog
from .twists import compile_spec, parse_spec, simple

_SEEDS = (1234567, 98765431, 271828183)


def _pair_twists(lines, system, power: int) -> BraidWord:
    words = [compile_spec(simple(str(t), f"{t}'"), system) for t in sorted(lines)]
    return compose(words).inverse() ** power


def expected_local(lines, power: int = 1) -> BraidWord:
    """Delta^2 on the doubled lines times the inverse pair twists."""
    system = local_system(lines)
    return full_twist(system.count) * _pair_twists(lines, system, power)


def ff_lines(rec: dict) -> list[int]:
    rho = {int(parse_spec(s).path.endpoint_a) for s in rec["rho"]}
    fig = next(x for x in rec["F"] if isinstance(x, dict) and "figure" in x)
    return sorted(rho | {int(fig["map"]["a"]), int(fig["map"]["b"])})


def check_phi(m: int, catalog: dict | None = None) -> dict:
    catalog = catalog or load_catalog()
    rec = catalog["phi"][str(m)]
    f = phi(m, catalog, local=True)
    n = 2 * len(rec["lines"])
    ok = burau_equal(f.word(), expected_local(rec["lines"]), _SEEDS)
    return {"block": f"phi{m}", "ok": ok,
            "identity": f"phi{m} = Delta^2_{n} * prod Z_jj'^-1"}


def check_ff(m: int, catalog: dict | None = None) -> dict:
    catalog = catalog or load_catalog()
    rec = catalog["phi"][str(m)]
    lines = ff_lines(rec)
    sub = phi_sub(m, "FF*", catalog)
    f = Factorization(local_system(lines), sub.factors)
    ok = burau_equal(f.word(), expected_local(lines, 2), _SEEDS)
    return {"block": f"phi{m}:FF*", "ok": ok,
            "identity": "F F* = Delta^2_8 * prod Z_jj'^-2 on lines " + ",".join(map(str, lines))}


def local_checks(catalog: dict | None = None) -> list[dict]:
    """One entry per identity; 6-points report the F F* pair before the whole block."""
    catalog = catalog or load_catalog()
    out = []
    for key in sorted(catalog["phi"], key=int):
        m = int(key)
        if catalog["phi"][key]["kind"] == "six_point":
            out.append(check_ff(m, catalog))
        out.append(check_phi(m, catalog))
    return out

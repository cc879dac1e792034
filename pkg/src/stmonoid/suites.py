"""Verification suites: named checks with expected values and their provenance.

A check is a plain record naming a module-level evaluator and its keyword
arguments, so suites can run in worker processes.  ``expected`` is either a
literal, one of the predicates "zero"/"nonzero", or "report-only" for values
that are recorded without being asserted.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from . import __version__
from .barkoszul import bar_homology
from .buildings import connectivity_bound, skeleta_agree, tits_homology, yn_homology
from .chains import homology_dims
from .exactla import CoefficientField
from .oriented import oriented_module
from .steinberg import frame_count, pbw_count, presentation_dim_oracle
from .subspaces import gl_order
from .tor import (
    TorTable,
    chain_dim,
    chain_dim_formula,
    coinvariants_dim,
    koszul_complex,
    ls_cokernel,
    ls_l1_degree3,
    ls_orbits,
    ls_raw_count,
    oriented_tor,
    sharbly_generators,
    sharbly_tor,
)

__all__ = ["Check", "SUITES", "build_suite", "run_check", "evaluate", "make_report"]

REPORT_ONLY = "report-only"


@dataclass
class Check:
    name: str
    evaluator: str
    kwargs: dict
    expected: object
    provenance: str
    params: dict = field(default_factory=dict)


def evaluate(expected, actual) -> bool:
    if expected == REPORT_ONLY:
        return True
    if expected == "zero":
        return actual == 0
    if expected == "nonzero":
        return actual is not None and actual != 0
    return expected == actual


# --------------------------------------------------------------------------
# evaluators (module level so they pickle)

def _k(name: str) -> CoefficientField:
    return CoefficientField.parse(name)


@lru_cache(maxsize=None)
def _koszul_cells(q: int, kname: str, n: int, i_max: int) -> dict:
    C = koszul_complex(n, q, _k(kname), i_max)
    return {i: h for i, h in homology_dims(C) if i <= i_max}


def ev_tor(q, k, n, i, i_max=None):
    return _koszul_cells(q, k, n, i if i_max is None else i_max).get(i)


def ev_tor_row(q, k, i, n_max, i_max=None):
    return [ev_tor(q, k, n, i, i_max) for n in range(n_max + 1)]


def ev_tor_degree_bound(q, k, n_max, i_max):
    """Cells (i, n) with n > 2i and nonzero Tor; the bound says there are none."""
    bad = []
    for n in range(n_max + 1):
        for i, h in _koszul_cells(q, k, n, i_max).items():
            if n > 2 * i and h:
                bad.append([i, n])
    return bad


def ev_chain_dim(i, n, q):
    return chain_dim(i, n, q)


def ev_chain_dim_formula_agrees(q, n_max):
    return all(chain_dim(i, n, q) == chain_dim_formula(i, n, q) for n in range(n_max + 1) for i in range(n + 1))


def ev_tor_csv_roundtrip(q, k, n_max, i_max):
    t = TorTable("koszul", q, _k(k))
    for n in range(n_max + 1):
        for i, h in _koszul_cells(q, k, n, i_max).items():
            t.entries[(i, n)] = h
    text = t.to_csv()
    return TorTable.from_csv(text).to_csv() == text


def ev_sharbly_disagreements(q, k, n_max, i_max):
    """Cells where Sharbly and Koszul homology differ (expected: none)."""
    sh = sharbly_tor(n_max, i_max, q, _k(k))
    bad = []
    for (i, n), h in sorted(sh.entries.items()):
        if i > n:
            continue
        kz = ev_tor(q, k, n, i, i_max)
        if kz != h:
            bad.append([i, n, h, kz])
    return bad


def ev_sharbly_degree0_count(n, q, k):
    return len(sharbly_generators(n, 0, q, _k(k).char)) == frame_count(n, q)


def ev_yn_homology(n, q, k):
    return [h for _, h in yn_homology(n, q, _k(k))]


def ev_yn_connectivity(n, q, k):
    hom = ev_yn_homology(n, q, k)
    # the list starts at degree -1
    return [h for i, h in zip(range(-1, len(hom) - 1), hom) if i <= connectivity_bound(n) and h]


def ev_yn_tor_mismatches(n, q, k):
    """Degrees i where H~_i(Y_n) differs from Tor_{i-n+2}(K^n) from the full Koszul complex."""
    tor = dict(homology_dims(koszul_complex(n, q, _k(k))))
    hom = ev_yn_homology(n, q, k)
    bad = []
    for i, h in zip(range(-1, len(hom) - 1), hom):
        j = i - n + 2
        expect = tor.get(j, 0) if j >= 0 else 0
        if h != expect:
            bad.append([i, h, expect])
    return bad


def ev_skeleta_agree(n, q):
    return skeleta_agree(n, q)


def ev_tits(n, q, k):
    return [[i, h] for i, h in tits_homology(n, q, _k(k)) if h]


def ev_ls(q, k):
    return ls_l1_degree3(q, _k(k))


def ev_ls_cokernel(n, q, k):
    return ls_cokernel(n, q, _k(k))


def ev_ls_free_action(n, i, q):
    return len(ls_orbits(n, i, q)) * gl_order(n, q) == ls_raw_count(n, i, q)


def ev_coinvariants(group, n, q, module, k):
    return coinvariants_dim(group, n, q, module, _k(k))


def ev_oriented_dim(p, n, k, which="steinberg", orientation=1):
    return oriented_module(p, n, orientation, which, _k(k)).dim


def ev_oriented_dims_stable(p, n, fields):
    return len({ev_oriented_dim(p, n, k) for k in fields}) == 1


@lru_cache(maxsize=None)
def _oriented_cells(p, k, n_max, i_max):
    return dict(oriented_tor(p, n_max, i_max, _k(k)).entries)


def ev_oriented_row(p, k, i, n_max):
    cells = _oriented_cells(p, k, n_max, 1)
    return [cells.get((i, n)) for n in range(n_max + 1)]


def ev_oriented_matches_unoriented(p, k, n_max):
    cells = _oriented_cells(p, k, n_max, 1)
    bad = []
    for (i, n), h in sorted(cells.items()):
        u = ev_tor(p, k, n, i, 1)
        if u != h:
            bad.append([i, n, h, u])
    return bad


def ev_steinberg_dims(n, q, k):
    return [pbw_count(n, q), presentation_dim_oracle(n, q, _k(k)).dim]


def ev_bar_homology(n, q, k):
    return [h for _, h in bar_homology(n, q, _k(k))]


# --------------------------------------------------------------------------
# suites

def _tor_limits(q: int, budget: str) -> int:
    if q == 2:
        return 5 if budget == "full" else 4
    if q == 3:
        return 4 if budget == "full" else 3
    return 2


def suite_koszul(q, k, budget):
    n_max = _tor_limits(q, budget)
    out = [
        Check("koszul.tor0_support", "ev_tor_row", dict(q=q, k=k, i=0, n_max=n_max, i_max=1),
              [1] + [0] * n_max, "derived"),
    ]
    if q in (2, 3):
        out.append(Check("koszul.tor1_n2_nonzero", "ev_tor", dict(q=q, k=k, n=2, i=1), "nonzero", "stated"))
        out.append(Check("koszul.tor1_n2_dim", "ev_tor", dict(q=q, k=k, n=2, i=1), {2: 1, 3: 3}[q], "derived"))
        for n in range(3, min(n_max, 4) + 1):
            out.append(Check(f"koszul.tor1_n{n}_zero", "ev_tor", dict(q=q, k=k, n=n, i=1), 0, "stated"))
    if q == 2 and n_max >= 4:
        out.append(Check("koszul.tor2_n4_nonzero", "ev_tor", dict(q=q, k=k, n=4, i=2), "nonzero", "stated"))
        out.append(Check("koszul.tor2_n4_dim", "ev_tor", dict(q=q, k=k, n=4, i=2), REPORT_ONLY, "derived"))
    if q == 2 and n_max >= 5:
        out.append(Check("koszul.tor2_n5_zero", "ev_tor", dict(q=q, k=k, n=5, i=2), 0, "stated"))
    if q in (2, 3):
        out.append(Check("koszul.tor2_n3_dim", "ev_tor", dict(q=q, k=k, n=3, i=2), REPORT_ONLY, "derived"))
    i_max = 2 if q == 2 else 1
    out.append(Check("koszul.degree_bound", "ev_tor_degree_bound", dict(q=q, k=k, n_max=min(n_max, 4), i_max=i_max),
                     [], "stated"))
    return out


def suite_tor(q, k, budget):
    out = [
        Check("tor.chain_dim_2_4_3", "ev_chain_dim", dict(i=2, n=4, q=3), 189540, "stated"),
        Check("tor.chain_dim_2_4_2", "ev_chain_dim", dict(i=2, n=4, q=2), 3360, "derived"),
        Check(f"tor.chain_dim_2_4_{q}_formula", "ev_chain_dim", dict(i=2, n=4, q=q),
              (q ** 4 - 1) * (q ** 3 - 1) * q ** 6 // (2 * (q - 1) ** 2), "stated"),
        Check("tor.chain_dim_degree0", "ev_chain_dim", dict(i=0, n=4, q=q), q ** comb(4, 2), "stated"),
        Check("tor.chain_dim_closed_form", "ev_chain_dim_formula_agrees", dict(q=q, n_max=4), True, "derived"),
        Check("tor.csv_roundtrip", "ev_tor_csv_roundtrip", dict(q=q, k=k, n_max=3, i_max=1), True, "trivial"),
    ]
    return out


def suite_sharbly(q, k, budget):
    if q != 2:
        return [Check("sharbly.skipped", "ev_none", dict(q=q), REPORT_ONLY, "trivial")]
    n_max = 4
    return [
        Check("sharbly.agrees_with_koszul", "ev_sharbly_disagreements", dict(q=2, k=k, n_max=n_max, i_max=2), [],
              "derived"),
        Check("sharbly.degree0_frames", "ev_sharbly_degree0_count", dict(n=3, q=2, k=k), True, "stated"),
    ]


def ev_none(**kw):
    return None


_YN = {2: (2, 3, 4), 3: (2, 3)}


def suite_yn(q, k, budget):
    if q not in _YN:
        return [Check("yn.skipped", "ev_none", dict(q=q), REPORT_ONLY, "trivial")]
    out = []
    for n in _YN[q]:
        out.append(Check(f"yn.connectivity_n{n}", "ev_yn_connectivity", dict(n=n, q=q, k=k), [], "stated"))
        out.append(Check(f"yn.matches_tor_n{n}", "ev_yn_tor_mismatches", dict(n=n, q=q, k=k), [], "stated"))
        out.append(Check(f"yn.skeleta_n{n}", "ev_skeleta_agree", dict(n=n, q=q), True, "stated"))
    out.append(Check("yn.h1_y2", "ev_yn_homology", dict(n=2, q=q, k=k), [0, 0, {2: 1, 3: 3}[q]], "derived"))
    for n in (2, 3):
        out.append(Check(f"yn.tits_n{n}", "ev_tits", dict(n=n, q=q, k=k), [[n - 2, q ** comb(n, 2)]], "stated"))
    return out


def suite_ls(q, k, budget):
    if q not in (2, 3):
        return [Check("ls.skipped", "ev_none", dict(q=q), REPORT_ONLY, "trivial")]
    return [
        Check("ls.degree3_cokernel", "ev_ls", dict(q=q, k=k), 0, "stated"),
        Check("ls.degree1_cokernel", "ev_ls_cokernel", dict(n=1, q=q, k=k), 0, "trivial"),
        Check("ls.free_action", "ev_ls_free_action", dict(n=3, i=1, q=q), True, "derived"),
    ]


def suite_oriented(q, k, budget):
    out = [Check(f"oriented.p3_st_n{n}", "ev_oriented_dim", dict(p=3, n=n, k=k), 3 ** comb(n, 2), "stated")
           for n in (1, 2, 3)]
    out += [
        Check("oriented.p5_apartment_n1", "ev_oriented_dim", dict(p=5, n=1, k=k, which="apartment"), 1, "trivial"),
        Check("oriented.p5_st_n2", "ev_oriented_dim", dict(p=5, n=2, k=k), REPORT_ONLY, "derived"),
        Check("oriented.p5_st_n2_stable", "ev_oriented_dims_stable", dict(p=5, n=2, fields=("rat", "p2")), True,
              "derived"),
        Check("oriented.p5_st_n3", "ev_oriented_dim", dict(p=5, n=3, k=k), REPORT_ONLY, "derived"),
        Check("oriented.p3_matches_unoriented", "ev_oriented_matches_unoriented", dict(p=3, k=k, n_max=3), [],
              "derived"),
        Check("oriented.p5_tor0", "ev_oriented_row", dict(p=5, k=k, i=0, n_max=3), [1, 0, 0, 0], "stated"),
        Check("oriented.p5_tor1_row", "ev_oriented_row", dict(p=5, k=k, i=1, n_max=3), REPORT_ONLY, "derived"),
        Check("oriented.p5_tor1_n3_zero", "ev_oriented_tor1_n3", dict(p=5, k=k), 0, "stated"),
    ]
    return out


def ev_oriented_tor1_n3(p, k):
    return ev_oriented_row(p, k, 1, 3)[3]


def suite_coinv(q, k, budget):
    out = [
        Check(f"coinv.gl2_q{q}", "ev_coinvariants", dict(group="GL", n=2, q=q, module="steinberg", k=k), 0, "stated"),
        Check(f"coinv.gl1_q{q}", "ev_coinvariants", dict(group="GL", n=1, q=q, module="steinberg", k=k), 1,
              "trivial"),
    ]
    if q == 2:
        out.append(Check("coinv.gl3_q2_f2", "ev_coinvariants", dict(group="GL", n=3, q=2, module="steinberg", k="p2"),
                         0, "derived"))
    if q % 2:
        out.append(Check(f"coinv.sl2_q{q}", "ev_coinvariants", dict(group="SL", n=2, q=q, module="steinberg", k=k),
                         REPORT_ONLY, "derived"))
    return out


SUITES = {
    "koszul": suite_koszul,
    "tor": suite_tor,
    "sharbly": suite_sharbly,
    "yn": suite_yn,
    "ls": suite_ls,
    "oriented": suite_oriented,
    "coinv": suite_coinv,
}


def build_suite(name: str, q: int, k: str, budget: str = "small") -> list:
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for nm in names:
        checks.extend(SUITES[nm](q, k, budget))
    for c in checks:
        c.params = {key: (list(v) if isinstance(v, tuple) else v) for key, v in c.kwargs.items()}
    return checks


def run_check(check: Check) -> dict:
    t = time.perf_counter()
    try:
        actual = globals()[check.evaluator](**check.kwargs)
        ok = evaluate(check.expected, actual)
        error = None
    except Exception as exc:  # a crashing check is a failing check
        actual, ok, error = None, False, f"{type(exc).__name__}: {exc}"
    out = {
        "name": check.name,
        "params": check.params,
        "expected": check.expected,
        "provenance": check.provenance,
        "actual": actual,
        "pass": ok,
        "ms": round(1000 * (time.perf_counter() - t), 1),
    }
    if error:
        out["error"] = error
    return out


def make_report(suite: str, q: int, k: str, budget: str, results: list) -> dict:
    timings = {r["name"]: r.pop("ms") for r in results}
    return {
        "schema": 1,
        "suite": suite,
        "params": {"q": q, "coeff": k, "budgets": {"size": budget}},
        "checks": results,
        "timings_ms": timings,
        "version": __version__,
    }

"""Command-line front end.

Every subcommand prints its numbers as an aligned table.  Bad flags exit
with status 2 and a failed asserted check with status 1.
"""
from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__
from .chains import CorruptCache, homology_dims, load_complex, save_complex
from .exactla import CoefficientField
from .steinberg import (
    ApartmentSymbol,
    InvalidApartment,
    TooLarge,
    format_element,
    parse_symbol,
    pbw_count,
    presentation_dim_oracle,
    straighten,
)
from .subspaces import full_space

COEFF_HELP = "coefficients: rat or pP for a prime P"


def format_table(headers, rows) -> str:
    cells = [[str(h) for h in headers]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(headers))]
    return "\n".join("  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in cells)


def _coeff(ctx, param, value):
    try:
        return CoefficientField.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _prime_q(ctx, param, value):
    if value is None:
        return value
    if value < 2 or any(value % d == 0 for d in range(2, int(value ** 0.5) + 1)):
        raise click.BadParameter("q must be a prime")
    return value


def _cache_dir(ctx) -> Path | None:
    return ctx.obj.get("cache") if ctx.obj else None


def cached_homology(cache: Path | None, key: str, build):
    """Homology of ``build()``, reusing stored ranks when ``key`` is cached."""
    key = f"{key}_v{__version__}"
    if cache is not None and (cache / key / "manifest.json").exists():
        try:
            C, manifest = load_complex(cache, key, load_matrices=False)
            if set(manifest["differentials"]) <= set(manifest.get("ranks", {})):
                return homology_dims(C), C
        except CorruptCache as exc:
            click.echo(f"warning: {exc}; recomputing", err=True)
    C = build()
    hom = homology_dims(C)
    if cache is not None:
        save_complex(C, cache, key, extra={"version": __version__})
    return hom, C


def _fail_on_too_large(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except TooLarge as exc:
        raise click.UsageError(str(exc))


@click.group()
@click.option("--cache", "cache_dir", envvar="STMONOID_CACHE", default=".stcache", show_default=True,
              type=click.Path(file_okay=False), help="directory for stored complexes")
@click.option("--no-cache", is_flag=True, help="neither read nor write the cache")
@click.version_option(__version__, prog_name="stmonoid")
@click.pass_context
def main(ctx, cache_dir, no_cache):
    """Steinberg modules, bar and Koszul complexes, and Tor over F_q."""
    ctx.obj = {"cache": None if no_cache else Path(cache_dir)}


@main.command("dim-steinberg")
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--n", type=click.IntRange(0), required=True)
@click.option("--oracle", is_flag=True, help="also compute the presentation quotient")
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
def dim_steinberg(q, n, oracle, coeff):
    """Dimension of St(F_q^n)."""
    click.echo(pbw_count(n, q))
    if oracle:
        click.echo(format_table(["basis", "presentation"],
                                [[pbw_count(n, q), _fail_on_too_large(presentation_dim_oracle, n, q, coeff).dim]]))


@main.command("straighten")
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--symbol", required=True, help='apartment symbol such as "[1,0;1,1]"')
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
def straighten_cmd(q, symbol, coeff):
    """Expand an apartment class in the PBW basis."""
    try:
        vecs = parse_symbol(symbol, q)
        if not vecs:
            raise ValueError("empty symbol")
        x = straighten(ApartmentSymbol(full_space(len(vecs[0]), q), vecs), coeff)
    except (ValueError, InvalidApartment) as exc:
        raise click.BadParameter(str(exc), param_hint="--symbol")
    click.echo(format_element(x))


@main.command("bar")
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--n", type=click.IntRange(1), required=True)
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
@click.pass_context
def bar_cmd(ctx, q, n, coeff):
    """Homology of the reduced bar complex in internal degree n."""
    from .barkoszul import build_bar

    key = f"bar_q{q}_n{n}_k{coeff.name}"
    hom, C = _fail_on_too_large(cached_homology, _cache_dir(ctx), key, lambda: build_bar(n, q, coeff))
    click.echo(format_table(["s", "dim C_s", "dim H_s"], [[s, C.dim(s), h] for s, h in hom]))


@main.command("tor")
@click.option("--method", type=click.Choice(["koszul", "sharbly"]), default="koszul", show_default=True)
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--nmax", type=click.IntRange(0), required=True)
@click.option("--imax", type=click.IntRange(0), required=True)
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="also write the table as CSV")
@click.pass_context
def tor_cmd(ctx, method, q, nmax, imax, coeff, csv_path):
    """Tor over the apartment monoid with Steinberg coefficients."""
    from .tor import TorTable, _check_koszul_budget, koszul_complex, sharbly_tor

    if method == "sharbly":
        table = _fail_on_too_large(sharbly_tor, nmax, imax, q, coeff)
    else:
        _fail_on_too_large(_check_koszul_budget, nmax, imax, q)
        table = TorTable("koszul", q, coeff)
        for n in range(nmax + 1):
            hom, _ = cached_homology(_cache_dir(ctx), f"koszul_q{q}_n{n}_i{imax}_k{coeff.name}",
                                     lambda: koszul_complex(n, q, coeff, imax))
            for i, h in hom:
                if i <= imax:
                    table.entries[(i, n)] = h
    rows = [[i, n, d] for (i, n), d in sorted(table.entries.items())]
    click.echo(format_table(["i", "n", "dim Tor_i"], rows))
    if csv_path:
        Path(csv_path).write_text(table.to_csv())


@main.command("yn")
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--n", type=click.IntRange(1), required=True)
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
@click.option("--facets", type=click.Path(dir_okay=False), help="write the facet list of Y_n")
def yn_cmd(q, n, coeff, facets):
    """Reduced homology of Y_n(F_q)."""
    from .buildings import reduced_homology, yn_complex

    Y = _fail_on_too_large(yn_complex, n, q)
    if facets:
        Y.write_facets(facets)
    click.echo(format_table(["i", "dim H~_i"], reduced_homology(Y, coeff)))


@main.command("ls-check")
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
def ls_check(q, coeff):
    """Cokernel of d_2 on the Lee–Szczarba coinvariants in degree 3."""
    from .tor import ls_l1_degree3

    click.echo(format_table(["q", "k", "dim coker"], [[q, coeff.name, _fail_on_too_large(ls_l1_degree3, q, coeff)]]))


@main.command("oriented")
@click.option("--p", type=int, required=True, callback=_prime_q)
@click.option("--nmax", type=click.IntRange(0), required=True)
@click.option("--imax", type=click.IntRange(0, 1), default=1, show_default=True)
@click.option("--coeff", default="rat", callback=_coeff, help=COEFF_HELP)
def oriented_cmd(p, nmax, imax, coeff):
    """Oriented Steinberg dimensions and oriented Tor."""
    from .oriented import oriented_module
    from .tor import oriented_tor

    if p == 2:
        raise click.BadParameter("p must be odd", param_hint="--p")
    table = _fail_on_too_large(oriented_tor, p, nmax, imax, coeff)
    rows = []
    for n in range(nmax + 1):
        dim = oriented_module(p, n, 1, "steinberg", coeff).dim
        rows.append([n, dim] + [table.entries.get((i, n), 0 if i > n else "") for i in range(imax + 1)])
    click.echo(format_table(["n", "dim St"] + [f"Tor_{i}" for i in range(imax + 1)], rows))


@main.command("verify")
@click.option("--suite", type=click.Choice(["koszul", "tor", "sharbly", "yn", "ls", "oriented", "coinv", "all"]),
              default="all", show_default=True)
@click.option("--q", type=int, required=True, callback=_prime_q)
@click.option("--coeff", default="rat", help=COEFF_HELP)
@click.option("--out", type=click.Path(dir_okay=False), help="JSON report path")
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True)
@click.option("--budget", type=click.Choice(["small", "full"]), default="small", show_default=True,
              help="full adds the largest cells (q=2, n=5 Koszul)")
def verify(suite, q, coeff, out, jobs, budget):
    """Run a verification suite and report every check."""
    from .suites import build_suite, make_report, run_check

    _coeff(None, None, coeff)
    checks = build_suite(suite, q, coeff, budget)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(run_check, checks))
    else:
        results = [run_check(c) for c in checks]
    report = make_report(suite, q, coeff, budget, results)
    rows = [[r["name"], json.dumps(r["expected"]), json.dumps(r["actual"]), "pass" if r["pass"] else "FAIL"]
            for r in report["checks"]]
    click.echo(format_table(["check", "expected", "actual", "result"], rows))
    if out:
        Path(out).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    failed = [r["name"] for r in report["checks"] if not r["pass"]]
    if failed:
        click.echo(f"{len(failed)} check(s) failed: {', '.join(failed)}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()

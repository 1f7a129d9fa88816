"""Command line surface: seed mutation, diagram completion, consistency
checks, the hyperplane-trading transform, theta functions, and the shipped
verification suites.

Exit codes: 0 success, 1 a requested check failed, 2 bad input.  Flags have
environment mirrors CLUSTERSCATTER_ORDER, _DEPTH, _SEED, _JSON, _SVG,
_SUITE and _Q_SEED; all output is deterministic byte for byte.
"""

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import click

from . import _verify
from .cluster_core import pattern_walk, seed_from_json, seed_to_json
from .monoid_ring import Exponent, LaurentSeries, series_to_str
from .scattering import (
    ScatteringDiagram,
    build_initial,
    check_consistency,
    complete_rank2,
    diagram_to_json,
    render_svg,
    tk_invariance_check,
    wall_label,
)
from .theta import GenericityError, _endpoint_draw, enumerate_broken_lines

SEED_OPT = dict(
    envvar="CLUSTERSCATTER_SEED",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Seed JSON file.",
)


@dataclass(frozen=True)
class Config:
    """Resolved invocation settings; every default is explicit."""

    order: int = 6
    depth: int = 4
    q_seed: int = 0
    seed_path: str | None = None
    json_path: str | None = None
    svg_path: str | None = None
    suite: str | None = None

    def to_json(self) -> dict:
        return asdict(self)


def config_from_json(data: dict) -> Config:
    return Config(**data)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_seed(path: str, semifield: bool):
    try:
        data = json.loads(Path(path).read_text())
        return seed_from_json(data, semifield=semifield)
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise click.UsageError(f"cannot load seed from {path}: {err}")


def _parse_word(word: str) -> tuple[int, ...]:
    cleaned = word.replace(",", " ")
    chunks = cleaned.split()
    out: list[int] = []
    for chunk in chunks:
        if not chunk.isdigit():
            raise click.UsageError(f"mutation word must be digits, got {word!r}")
        if len(chunks) == 1 and len(chunk) > 1:
            out.extend(int(c) for c in chunk)
        else:
            out.append(int(chunk))
    return tuple(out)


def _parse_vector(text: str, n: int) -> tuple[int, ...]:
    try:
        vec = tuple(int(x) for x in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise click.UsageError(f"exponent must be comma-separated integers, got {text!r}")
    if len(vec) != n:
        raise click.UsageError(f"exponent must have {n} entries, got {text!r}")
    return vec


def _group_seed(seed_path: str):
    s = _load_seed(seed_path, semifield=False)
    if s.cluster is not None:
        s = replace(s, cluster=None)
    return s


def _completed(seed_path: str, order: int) -> ScatteringDiagram:
    try:
        return complete_rank2(build_initial(_group_seed(seed_path), order))
    except ValueError as err:
        raise click.UsageError(str(err))


def _tnames(lat) -> list[str]:
    out = []
    for i in range(lat.n):
        rng = lat.block_range(i)
        out.extend(f"t{i + 1}{j + 1}" for j in range(len(rng)))
    return out


@click.group()
def cli():
    """Exact rank-2 wall diagrams, theta functions, and seed mutation."""


@cli.command()
@click.option("--seed", "seed_path", **SEED_OPT)
@click.argument("word", default="")
def mutate(seed_path, word):
    """Mutate a seed along WORD and print the canonical seed JSON.

    WORD is digits, optionally comma separated: "121" and "1,2,1" agree.
    An empty word re-serializes the seed canonically.
    """
    s = _load_seed(seed_path, semifield=True)
    try:
        s2 = pattern_walk(s, _parse_word(word))
    except (IndexError, ValueError) as err:
        raise click.UsageError(str(err))
    click.echo(_dumps(seed_to_json(s2)), nl=False)


@cli.command()
@click.option("--seed", "seed_path", **SEED_OPT)
@click.option("--order", envvar="CLUSTERSCATTER_ORDER", default=6, show_default=True)
@click.option(
    "--json",
    "json_path",
    envvar="CLUSTERSCATTER_JSON",
    type=click.Path(dir_okay=False),
    help="Write the diagram as JSON here.",
)
@click.option(
    "--svg",
    "svg_path",
    envvar="CLUSTERSCATTER_SVG",
    type=click.Path(dir_okay=False),
    help="Write a picture here.",
)
def scatter(seed_path, order, json_path, svg_path):
    """Complete the seed's diagram to --order and list its walls."""
    D = _completed(seed_path, order)
    lat = D.seed.coeff_lattice
    for w in D.walls:
        kind = "incoming" if w.incoming else "outgoing"
        click.echo(f"ray ({w.ray[0]},{w.ray[1]}) {kind}: {wall_label(w, lat)}")
    if json_path:
        Path(json_path).write_text(_dumps(diagram_to_json(D)))
    if svg_path:
        Path(svg_path).write_text(render_svg(D))


@cli.command("scatter-check")
@click.option("--seed", "seed_path", **SEED_OPT)
@click.option("--order", envvar="CLUSTERSCATTER_ORDER", default=6, show_default=True)
@click.option(
    "--completed",
    is_flag=True,
    help="Check the completed diagram instead of the bare initial one.",
)
@click.pass_context
def scatter_check(ctx, seed_path, order, completed):
    """Report order-by-order consistency of a seed's diagram.

    The bare initial diagram is usually inconsistent, which is what
    completion repairs; an inconsistent diagram exits with code 1.
    """
    s = _group_seed(seed_path)
    try:
        D = build_initial(s, order)
        if completed:
            D = complete_rank2(D)
        rep = check_consistency(D)
    except ValueError as err:
        raise click.UsageError(str(err))
    click.echo(
        _dumps(
            {
                "consistent": rep.consistent,
                "order": rep.order,
                "first_failure_degree": rep.first_failure_degree,
            }
        ),
        nl=False,
    )
    if not rep.consistent:
        ctx.exit(1)


@cli.command("scatter-mutate")
@click.option("--seed", "seed_path", **SEED_OPT)
@click.option("--k", required=True, type=int, help="Mutation direction.")
@click.option("--order", envvar="CLUSTERSCATTER_ORDER", default=4, show_default=True)
@click.option(
    "--json",
    "json_path",
    envvar="CLUSTERSCATTER_JSON",
    type=click.Path(dir_okay=False),
    help="Write the transformed diagram as JSON here.",
)
@click.pass_context
def scatter_mutate(ctx, seed_path, k, order, json_path):
    """Trade the direction-k hyperplane across the completed diagram and
    confirm the result matches the mutated seed's own completion."""
    s = _group_seed(seed_path)
    try:
        moved, _, ok = tk_invariance_check(s, k, order)
    except (ValueError, IndexError) as err:
        raise click.UsageError(str(err))
    click.echo(_dumps({"k": k, "order": order, "invariant": ok}), nl=False)
    if json_path:
        Path(json_path).write_text(_dumps(diagram_to_json(moved)))
    if not ok:
        ctx.exit(1)


@cli.command()
@click.option("--seed", "seed_path", **SEED_OPT)
@click.option("--m", "m_text", required=True, help='Exponent, e.g. "-1,0".')
@click.option("--order", envvar="CLUSTERSCATTER_ORDER", default=6, show_default=True)
@click.option(
    "--q-seed",
    envvar="CLUSTERSCATTER_Q_SEED",
    default=0,
    show_default=True,
    help="Deterministic endpoint draw.",
)
@click.option(
    "--trace",
    "trace_path",
    type=click.Path(dir_okay=False),
    help="Write every broken line here as JSON.",
)
def theta(seed_path, m_text, order, q_seed, trace_path):
    """Theta function of an exponent over the completed diagram, presented
    at the all-positive chamber."""
    D = _completed(seed_path, order)
    p0 = _parse_vector(m_text, D.n)
    endpoint = None
    lines: tuple = ()
    if any(p0):
        last = None
        got = False
        for attempt in range(40):
            endpoint = _endpoint_draw(q_seed, attempt)
            try:
                lines = enumerate_broken_lines(D, p0, endpoint, order)
                got = True
                break
            except (GenericityError, ValueError) as err:
                last = err
        if not got:
            raise click.ClickException(f"no generic endpoint found: {last}")
        terms: dict[Exponent, int] = {}
        for bl in lines:
            c, t, m = bl.final
            e = Exponent(m, t)
            terms[e] = terms.get(e, 0) + c
        series = LaurentSeries(terms, order)
    else:
        series = LaurentSeries.monomial(p0, (0,) * D.dims[1], 1, order)
    lat = D.seed.coeff_lattice
    click.echo(series_to_str(series, [f"A{i + 1}" for i in range(D.n)], _tnames(lat)))
    if trace_path:
        payload = {
            "p0": list(p0),
            "order": order,
            "endpoint": None if endpoint is None else [str(q) for q in endpoint],
            "lines": [
                {
                    "segments": [
                        {"c": c, "t": list(t), "m": list(m)} for c, t, m in bl.segments
                    ],
                    "bends": [
                        {"point": [str(q) for q in pt], "ray": list(ray)}
                        for pt, ray in bl.bends
                    ],
                }
                for bl in lines
            ],
        }
        Path(trace_path).write_text(_dumps(payload))


@cli.command()
@click.option("--suite", envvar="CLUSTERSCATTER_SUITE", default="all", show_default=True)
@click.option(
    "--order",
    envvar="CLUSTERSCATTER_ORDER",
    default=None,
    type=int,
    help="Override the suite's diagram order.",
)
@click.option(
    "--depth",
    envvar="CLUSTERSCATTER_DEPTH",
    default=None,
    type=int,
    help="Override the suite's exploration depth.",
)
@click.pass_context
def verify(ctx, suite, order, depth):
    """Run a shipped verification suite and print a JSON report."""
    try:
        checks = _verify.run_suite(suite, order=order, depth=depth)
    except KeyError as err:
        raise click.UsageError(str(err.args[0]))
    report = {
        "suite": suite,
        "checks": [
            {"name": name, "pass": ok, "counterexample": ce} for name, ok, ce in checks
        ],
        "pass": all(ok for _, ok, _ in checks),
    }
    click.echo(_dumps(report), nl=False)
    if not report["pass"]:
        ctx.exit(1)


def main():
    cli(prog_name="clusterscatter")


if __name__ == "__main__":
    main()

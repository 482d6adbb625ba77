"""CLI interface for bukzor-singular."""

import csv
import json
import logging
from collections.abc import Callable
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any
from typing import Literal
from typing import TextIO

import click

from bukzor_singular import __version__
from bukzor_singular import format as fmt
from bukzor_singular import parse
from bukzor_singular.best_approx import BestApproxSequence
from bukzor_singular.best_approx import TargetPoint
from bukzor_singular.best_approx import best_sequence
from bukzor_singular.best_approx import exponent_profile
from bukzor_singular.best_approx import naive_best_sequence
from bukzor_singular.best_approx import singular_witness
from bukzor_singular.best_approx import uniform_decay_check
from bukzor_singular.best_approx import verify_bai3
from bukzor_singular.cantor.measure import mass_measure
from bukzor_singular.cantor.params import TreeParams
from bukzor_singular.cantor.params import resolve_b
from bukzor_singular.cantor.tiling import build_tiling
from bukzor_singular.cantor.tiling import verify_tiling
from bukzor_singular.cantor.tree import CHECK_GROUPS
from bukzor_singular.cantor.tree import CantorTree
from bukzor_singular.cantor.tree import Check
from bukzor_singular.cantor.tree import build_tree
from bukzor_singular.cantor.tree import verify_tree
from bukzor_singular.certified import precision_ceiling
from bukzor_singular.config import AUDIT_BUDGET
from bukzor_singular.config import DEFAULT_CAP
from bukzor_singular.config import MAX_PRECISION
from bukzor_singular.config import NODE_BUDGET
from bukzor_singular.config import TILING_LIMIT
from bukzor_singular.config import RunConfig
from bukzor_singular.dimension_lab import audit_shells
from bukzor_singular.dimension_lab import boxcount
from bukzor_singular.dimension_lab import counting_profile
from bukzor_singular.dimension_lab import leaf_points
from bukzor_singular.dimension_lab import local_dimension
from bukzor_singular.dimension_lab import scene_from_node
from bukzor_singular.dimension_lab import upper_covering_audit
from bukzor_singular.errors import SingularError
from bukzor_singular.exponents import formula_row
from bukzor_singular.exponents import packing_threshold
from bukzor_singular.exponents import remark_tau
from bukzor_singular.exponents import s1
from bukzor_singular.exponents import upper_gamma
from bukzor_singular.rational_geometry import PrimitiveVector
from bukzor_singular.rational_geometry import farey_lattice
from bukzor_singular.rational_geometry import make_primitive
from bukzor_singular.types import IntVector3
from bukzor_singular.types import NodeId
from bukzor_singular.types import SearchStrategy
from bukzor_singular.types import TreeCheck

logger = logging.getLogger(__name__)

DEFAULT_ROOT = "1,0,2"
DEFAULT_MU_RANGE = "0.51:0.99:0.005"
DEFAULT_SCALES = "2^-4..2^-20"
DEFAULT_CHECKS = "nestedness,disjoint,packing,bands"
LOG_FORMAT = logging.Formatter("%(levelname)s %(name)s: %(message)s")


class Parsed(click.ParamType):
    """A click type backed by one of the ``parse`` functions."""

    def __init__(self, name: str, parser: Callable[[str], Any]) -> None:
        self.name = name
        self._parser = parser

    def convert(
        self, value: Any, param: click.Parameter | None, ctx: Any
    ) -> Any:
        if not isinstance(value, str):
            return value
        try:
            return self._parser(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


FRACTION = Parsed("fraction", parse.parse_fraction)
INTEGER = Parsed("integer", parse.parse_int)
VECTOR = Parsed("p1,p2,q", parse.parse_vector)
POINT = Parsed("a,b", parse.parse_point)
MU_RANGE = Parsed("lo:hi:step", parse.parse_range)
SCALES = Parsed("scales", parse.parse_scales)
B_VALUE = Parsed("b", parse.parse_b)
QMAX = Parsed("qmax", parse.parse_qmax)
CHECKS = Parsed("checks", parse.parse_checks)


class _EchoHandler(logging.Handler):
    """Log records go to stderr through click, so stdout stays clean."""

    def emit(self, record: logging.LogRecord) -> None:
        click.echo(self.format(record), err=True)


def _configure_logging(verbose: int, quiet: bool) -> None:
    levels = (logging.WARNING, logging.INFO, logging.DEBUG)
    level = logging.ERROR if quiet else levels[min(verbose, 2)]
    package = logging.getLogger("bukzor_singular")
    for handler in list(package.handlers):
        if isinstance(handler, _EchoHandler):
            package.removeHandler(handler)
    handler = _EchoHandler()
    handler.setFormatter(LOG_FORMAT)
    package.addHandler(handler)
    package.setLevel(level)


@dataclass(frozen=True, slots=True)
class _Globals:
    precision: int
    jobs: int
    seed: int
    deterministic: bool


def _config(ctx: click.Context, **params: Any) -> RunConfig:
    g: _Globals = ctx.find_object(_Globals) or _Globals(
        MAX_PRECISION, 1, 0, True
    )
    return RunConfig(
        command=ctx.command_path.partition(" ")[2],
        params={k: _jsonable(v) for k, v in params.items()},
        precision=g.precision,
        jobs=g.jobs,
        deterministic=g.deterministic,
        seed=g.seed,
    )


def _jsonable(value: Any) -> Any:
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]  # pyright: ignore
    return str(value)


@contextmanager
def _guarded(cfg: RunConfig) -> Iterator[None]:
    """Run under the precision ceiling; library errors exit with status 1."""
    try:
        with precision_ceiling(cfg.precision):
            yield
    except (SingularError, ValueError) as e:
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        raise click.exceptions.Exit(1) from e


def _write_json(cfg: RunConfig, payload: dict[str, Any], path: str) -> None:
    with click.open_file(path, "w") as out:
        out.write(cfg.dumps(payload) + "\n")


def _primitive(v: IntVector3) -> PrimitiveVector:
    return make_primitive(*v)


def _json_option(help: str) -> Callable[..., Any]:
    """``--json`` alone prints to stdout; ``--json PATH`` writes a file."""
    return click.option(
        "--json",
        "json_path",
        is_flag=False,
        flag_value="-",
        default=None,
        metavar="[PATH]",
        help=help,
    )


@click.group()
@click.version_option(__version__, prog_name="bukzor-singular")
@click.option(
    "-v", "--verbose", count=True, help="More logging (-v info, -vv debug)"
)
@click.option("-q", "--quiet", is_flag=True, help="Only log errors")
@click.option(
    "--precision",
    type=click.IntRange(64, MAX_PRECISION),
    default=MAX_PRECISION,
    show_default=True,
    help="Bits a certified comparison may refine to",
)
@click.option(
    "-j",
    "--jobs",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Worker processes for tree levels and counting profiles",
)
@click.option("--seed", type=int, default=0, help="Seed for sampling")
@click.option(
    "--deterministic/--no-deterministic",
    default=True,
    help="Strided instead of seeded sampling",
)
@click.pass_context
def main(
    ctx: click.Context,
    verbose: int,
    quiet: bool,
    precision: int,
    jobs: int,
    seed: int,
    deterministic: bool,
) -> None:
    """Singular vectors, Farey lattices and dimension bounds."""
    _configure_logging(verbose, quiet)
    ctx.obj = _Globals(precision, jobs, seed, deterministic)


# lattice


@main.group()
def lattice() -> None:
    """Farey lattices of rational points."""


@lattice.command()
@click.option("--x", "x", type=VECTOR, required=True, help="p1,p2,q")
@_json_option("Write the lattice as JSON")
@click.pass_context
def minima(ctx: click.Context, x: IntVector3, json_path: str | None) -> None:
    """Reduced basis and successive minima of Λ_x."""
    cfg = _config(ctx, x=x)
    with _guarded(cfg):
        L = farey_lattice(_primitive(x))
        data = fmt.lattice(L)
    if json_path:
        _write_json(cfg, {"lattice": data}, json_path)
        return
    click.echo(f"x: {L.owner}")
    click.echo(f"u1: ({L.u1.a}, {L.u1.b})")
    click.echo(f"u2: ({L.u2.a}, {L.u2.b})")
    click.echo(f"lam1_sq: {L.lam1_sq}")
    click.echo(f"lam2_sq: {L.lam2_sq}")
    mark = "✓" if data["covolume_ok"] else "✗"
    click.echo(f"covolume: {L.covolume} {mark}")
    click.echo(f"minkowski: {'✓' if data['minkowski_ok'] else '✗'}")


# best approximations


@main.command()
@click.option("--theta", type=POINT, required=True, help="a,b")
@click.option(
    "--radius",
    type=FRACTION,
    default="0",
    help="Radius of an enclosure around θ",
)
@click.option("--qmax", type=INTEGER, required=True)
@click.option(
    "--strategy",
    type=click.Choice(["auto", "scan", "tube"]),
    default="auto",
    show_default=True,
)
@click.option(
    "--oracle", is_flag=True, help="Use the exhaustive scan over every q"
)
@click.option(
    "--verify-bai3",
    is_flag=True,
    help="Check the distance relations between consecutive records",
)
@_json_option("Write the sequence as JSON")
@click.pass_context
def bestapprox(
    ctx: click.Context,
    theta: tuple[Fraction, Fraction],
    radius: Fraction,
    qmax: int,
    strategy: SearchStrategy,
    oracle: bool,
    verify_bai3: bool,
    json_path: str | None,
) -> None:
    """Best simultaneous approximations of θ up to height qmax."""
    cfg = _config(
        ctx,
        theta=theta,
        radius=radius,
        qmax=qmax,
        strategy=strategy,
        oracle=oracle,
    )
    with _guarded(cfg):
        target = TargetPoint.enclosure(theta, radius)
        if oracle:
            seq = naive_best_sequence(target, qmax)
        else:
            seq = best_sequence(target, qmax, strategy)
        payload: dict[str, Any] = {"sequence": fmt.sequence(seq)}
        report = verify_bai3(seq) if verify_bai3 else None
        if report is not None:
            payload["bai3"] = fmt.bai3(report)
    if json_path:
        _write_json(cfg, payload, json_path)
    else:
        for rec in seq.records:
            click.echo(f"{rec.q}: {rec.x} r²={rec.rn_sq}")
        if seq.terminal:
            click.echo("terminal: θ is rational")
        if report is not None:
            click.echo(f"bai3: {'✓' if report.ok else '✗'} ({report.checked})")
            for line in report.violations:
                click.echo(f"  {line}")
    if report is not None and not report.ok:
        ctx.exit(1)


# formulas


@main.group()
def formulas() -> None:
    """Closed-form dimension bounds."""


@formulas.command()
@click.option(
    "--mu",
    type=MU_RANGE,
    default=DEFAULT_MU_RANGE,
    show_default=True,
    help="lo:hi:step or a single μ",
)
@click.option("--out", default="-", help="Output path (default stdout)")
@click.option(
    "--format",
    "out_format",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
@click.pass_context
def table(
    ctx: click.Context,
    mu: list[Fraction],
    out: str,
    out_format: Literal["csv", "json"],
) -> None:
    """Upper, lower and packing bounds with b₀, γ and τ per μ."""
    cfg = _config(ctx, mu=mu, format=out_format)
    with _guarded(cfg):
        rows = [
            fmt.formula_csv(row, _tau(row.mu)) for row in map(formula_row, mu)
        ]
    if out_format == "json":
        _write_json(cfg, {"rows": rows}, out)
        return
    with click.open_file(out, "w") as stream:
        _write_csv_header(cfg, stream)
        writer = csv.DictWriter(
            stream, fieldnames=fmt.FORMULA_COLUMNS, lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)


def _tau(mu: Fraction) -> Fraction | None:
    if 2 * mu * mu >= 1:
        return None
    return remark_tau(mu, resolve_b(mu, "auto"))


def _write_csv_header(cfg: RunConfig, stream: TextIO) -> None:
    header = cfg.provenance()
    generated = header.pop("generated")
    stream.write(f"# {json.dumps(header, sort_keys=True)}\n")
    stream.write(f"# generated {generated}\n")


@formulas.command()
@click.pass_context
def threshold(ctx: click.Context) -> None:
    """μ where the packing bound overtakes the Hausdorff upper bound."""
    cfg = _config(ctx)
    with _guarded(cfg):
        crossing = packing_threshold()
    click.echo(
        f"[{fmt.decimal_str(crossing.lower, 8)},"
        f" {fmt.decimal_str(crossing.upper, 8)}]"
    )


# trees


def _load_tree(stream: TextIO) -> CantorTree:
    try:
        data = json.load(stream)
        return CantorTree.from_dict(data.get("tree", data))
    except (KeyError, TypeError, AttributeError) as e:
        raise ValueError(f"Malformed tree file: {e!r}") from e


@main.group()
def tree() -> None:
    """Build and verify capped Cantor trees."""


@tree.command()
@click.option("--mu", type=FRACTION, required=True)
@click.option("--b", "b", type=B_VALUE, default="auto", show_default=True)
@click.option("--depth", type=click.IntRange(min=0), required=True)
@click.option(
    "--cap",
    type=click.IntRange(min=1),
    default=DEFAULT_CAP,
    show_default=True,
    help="Children kept per node",
)
@click.option("--root", type=VECTOR, default=DEFAULT_ROOT, show_default=True)
@click.option("--budget", type=INTEGER, default=str(NODE_BUDGET))
@click.option("--out", default="-", help="Output path (default stdout)")
@click.pass_context
def build(
    ctx: click.Context,
    mu: Fraction,
    b: Fraction | Literal["auto"],
    depth: int,
    cap: int,
    root: IntVector3,
    budget: int,
    out: str,
) -> None:
    """Grow and verify the tree of --root to --depth generations."""
    cfg = _config(ctx, mu=mu, b=b, depth=depth, cap=cap, root=root)
    with _guarded(cfg):
        params = TreeParams.of(mu, b, cap=cap)
        result = build_tree(
            _primitive(root), params, depth, budget=budget, jobs=cfg.jobs
        )
    summary = {
        "nodes": len(result.nodes),
        "depth": result.depth,
        "leaves": len(result.leaves()),
    }
    _write_json(cfg, {"tree": result.to_dict(), "summary": summary}, out)
    logger.info("built %d nodes to depth %d", len(result.nodes), depth)


@tree.command()
@click.option("--in", "source", type=click.File("r"), required=True)
@click.option(
    "--checks", type=CHECKS, default=DEFAULT_CHECKS, show_default=True
)
@click.option("--report", default="-", help="Report path (default stdout)")
@click.option(
    "--s", "s", default="s1", help="Exponent of the counting profile"
)
@click.option("--tiling-limit", type=INTEGER, default=str(TILING_LIMIT))
@click.pass_context
def verify(
    ctx: click.Context,
    source: TextIO,
    checks: list[TreeCheck],
    report: str,
    s: str,
    tiling_limit: int,
) -> None:
    """Re-run the certified checks of a stored tree."""
    cfg = _config(ctx, source=source.name, checks=checks, s=s)
    with _guarded(cfg):
        stored = _load_tree(source)
        payload, ok = _verify_payload(stored, checks, s, tiling_limit, cfg)
    _write_json(cfg, payload, report)
    if not ok:
        for node, name in payload["failures"]:
            click.echo(f"node {node}: {name}", err=True)
        ctx.exit(1)


def _verify_payload(
    stored: CantorTree,
    checks: list[TreeCheck],
    s: str,
    tiling_limit: int,
    cfg: RunConfig,
) -> tuple[dict[str, Any], bool]:
    result = verify_tree(stored)
    nodes = [r.select(checks) for r in result.nodes.values()]
    names = frozenset[str]().union(*(CHECK_GROUPS[g] for g in checks))
    siblings = {
        node: [c for c in found if c.name in names]
        for node, found in result.siblings.items()
    }
    failures = [
        (r.node, c.name)
        for r in nodes
        for c in r.checks
        if c.structural and not (c.ok or c.exempt)
    ]
    band_misses = [
        [r.node, c.name]
        for r in nodes
        for c in r.checks
        if not (c.structural or c.ok or c.exempt)
    ]
    failures += [
        (node, c.name)
        for node, found in siblings.items()
        for c in found
        if c.structural and not c.ok
    ]
    payload: dict[str, Any] = {
        "checks": list(checks),
        "nodes": [fmt.node_report(r) for r in nodes],
        "siblings": [
            {"node": node, "checks": [fmt.check(c) for c in found]}
            for node, found in siblings.items()
        ],
    }
    internal = [n.id for n in stored.nodes if stored.children_of(n.id)]
    if "tiling" in checks:
        tilings = []
        for node in internal:
            tiling = build_tiling(
                stored.node(node).x, stored.params, tiling_limit
            )
            tiling_report = verify_tiling(tiling, stored.params)
            tilings.append(fmt.tiling_report(node, tiling, tiling_report))
            failures += [
                (node, c.name)
                for c in tiling_report.checks
                if c.structural and not c.ok
            ]
        payload["tiling"] = tilings
    if "counting" in checks:
        exponent = _exponent(s, stored.params)
        profiles = []
        for node in internal:
            scene = scene_from_node(stored, node, tiling_limit)
            profile = counting_profile(scene, exponent, jobs=cfg.jobs)
            profiles.append(fmt.counting(node, profile))
            if not profile.ok:
                failures.append((node, "counting_bound"))
        payload["counting"] = profiles
    payload["failures"] = [[node, name] for node, name in failures]
    payload["band_misses"] = band_misses
    payload["ok"] = not failures
    return payload, not failures


def _exponent(s: str, params: TreeParams) -> Fraction:
    """--s value; ``s1`` is the lower-bound exponent of the tree's (μ, b)."""
    if s.strip() == "s1":
        return Fraction(s1(params.mu, params.b))
    return parse.parse_fraction(s)


# singular vectors


@main.group()
def singular() -> None:
    """Generate and verify singular vectors."""


@singular.command()
@click.option("--mu", type=FRACTION, required=True)
@click.option("--b", "b", type=B_VALUE, default="auto", show_default=True)
@click.option("--depth", type=click.IntRange(min=1), required=True)
@click.option("--root", type=VECTOR, default=DEFAULT_ROOT, show_default=True)
@click.option("--out", default="-", help="Output path (default stdout)")
@click.pass_context
def generate(
    ctx: click.Context,
    mu: Fraction,
    b: Fraction | Literal["auto"],
    depth: int,
    root: IntVector3,
    out: str,
) -> None:
    """Follow one branch to --depth and enclose the point below it."""
    cfg = _config(ctx, mu=mu, b=b, depth=depth, root=root)
    with _guarded(cfg):
        params = TreeParams.of(mu, b, cap=1)
        branch = build_tree(_primitive(root), params, depth, jobs=cfg.jobs)
        leaf = max(branch.leaves(), key=branch.depth_of)
        theta = branch.extract(leaf)
    payload = {
        "theta": {
            "center": fmt.point(theta.center),
            "radius": str(theta.radius),
        },
        "path": [fmt.vector(n.x) for n in branch.path(leaf)],
        "params": branch.params.as_dict(),
    }
    _write_json(cfg, payload, out)


def _load_target(stream: TextIO) -> tuple[TargetPoint, list[int]]:
    try:
        data = json.load(stream)
        center = tuple(Fraction(c) for c in data["theta"]["center"])
        radius = Fraction(data["theta"]["radius"])
        heights = [int(v[2]) for v in data.get("path", [])]
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"Malformed target file: {e!r}") from e
    a, b = center
    return TargetPoint.enclosure((a, b), radius), heights


def _auto_qmax(heights: list[int]) -> int:
    """Height of the fifth node of the branch, or of its deepest node."""
    if not heights:
        raise ValueError("--qmax auto needs a target file with a path")
    return heights[min(4, len(heights) - 1)]


def _singular_checks(
    seq: BestApproxSequence, mu: Fraction
) -> tuple[dict[str, Any], bool]:
    records = seq.records
    first = 2 if len(records) > 2 else 1
    witness = singular_witness(seq, mu, range(first, len(records)))
    qmin = records[min(first, len(records) - 1)].q
    decay = uniform_decay_check(seq, mu, qmin, seq.qmax)
    grid = sorted({r.q for r in records[first:]} | {seq.qmax})
    payload = {
        "sequence": fmt.sequence(seq),
        "witness": fmt.witness(witness),
        "decay": fmt.decay(decay),
        "profile": fmt.profile(exponent_profile(seq, grid)),
    }
    ok = witness.passed and decay.ok and not witness.degenerate
    payload["ok"] = ok
    return payload, ok


@singular.command("verify")
@click.option("--in", "source", type=click.File("r"), help="generate output")
@click.option("--theta", type=POINT, help="a,b instead of --in")
@click.option("--mu", type=FRACTION, required=True)
@click.option("--qmax", type=QMAX, default="auto", show_default=True)
@click.option(
    "--strategy",
    type=click.Choice(["auto", "scan", "tube"]),
    default="auto",
    show_default=True,
)
@click.option("--report", default="-", help="Report path (default stdout)")
@click.pass_context
def verify_singular(
    ctx: click.Context,
    source: TextIO | None,
    theta: tuple[Fraction, Fraction] | None,
    mu: Fraction,
    qmax: int | Literal["auto"],
    strategy: SearchStrategy,
    report: str,
) -> None:
    """Best approximations, the λ₁ witness and the D(Q) decay check."""
    if (source is None) == (theta is None):
        raise click.UsageError("Give exactly one of --in and --theta")
    cfg = _config(
        ctx,
        source=None if source is None else source.name,
        theta=theta,
        mu=mu,
        qmax=qmax,
        strategy=strategy,
    )
    with _guarded(cfg):
        if source is not None:
            target, heights = _load_target(source)
        else:
            assert theta is not None
            target, heights = TargetPoint.exact(*theta), []
        limit = _auto_qmax(heights) if qmax == "auto" else qmax
        seq = best_sequence(target, limit, strategy)
        payload, ok = _singular_checks(seq, mu)
    _write_json(cfg, payload, report)
    if not ok:
        reason = "degenerate" if seq.terminal else "failed"
        click.echo(f"not certified singular at μ = {mu}: {reason}", err=True)
        ctx.exit(1)


# dimension diagnostics


@main.group()
def dim() -> None:
    """Dimension diagnostics on trees and coverings."""


@dim.command("boxcount")
@click.option("--tree", "source", type=click.File("r"), required=True)
@click.option(
    "--scales", type=SCALES, default=DEFAULT_SCALES, show_default=True
)
@_json_option("Write the fit as JSON")
@click.pass_context
def dim_boxcount(
    ctx: click.Context,
    source: TextIO,
    scales: list[Fraction],
    json_path: str | None,
) -> None:
    """Box-counting slope of the leaf centers."""
    cfg = _config(ctx, source=source.name, scales=scales)
    with _guarded(cfg):
        stored = _load_tree(source)
        fit = boxcount(leaf_points(stored), scales)
        target = Fraction(s1(stored.params.mu, stored.params.b))
    if json_path:
        data = {**fmt.box_count(fit), "s1": fmt.decimal_str(target)}
        _write_json(cfg, {"boxcount": data}, json_path)
        return
    lo, hi = fit.band()
    click.echo(f"slope: {fit.slope:.4f} ± {fit.stderr:.4f}")
    click.echo(f"band: [{lo:.4f}, {hi:.4f}]  s1: {float(target):.4f}")


@dim.command("local")
@click.option("--tree", "source", type=click.File("r"), required=True)
@click.option("--s", "s", default="s1", show_default=True)
@click.option("--sample", type=click.IntRange(min=1), default=None)
@click.option("--tolerance", type=FRACTION, default="1/5", show_default=True)
@_json_option("Write the ratios as JSON")
@click.pass_context
def dim_local(
    ctx: click.Context,
    source: TextIO,
    s: str,
    sample: int | None,
    tolerance: Fraction,
    json_path: str | None,
) -> None:
    """Local dimensions of the cylinder measure at the leaves."""
    cfg = _config(ctx, source=source.name, s=s, sample=sample)
    with _guarded(cfg):
        stored = _load_tree(source)
        exponent = _exponent(s, stored.params)
        measure = mass_measure(stored, exponent)
        result = local_dimension(
            measure,
            stored,
            sample,
            tolerance,
            seed=None if cfg.deterministic else cfg.seed,
        )
    if json_path:
        data = {
            **fmt.local(result),
            "measure_ok": measure.ok,
            "truncated": measure.truncated,
        }
        _write_json(cfg, {"local": data}, json_path)
        return
    q = result.quantiles
    click.echo(
        f"q10 {q['q10']:.4f}  median {q['median']:.4f}  q90 {q['q90']:.4f}"
    )
    click.echo(f"below s − tol: {result.share_below:.1%}")
    if result.flagged:
        click.echo("flagged: too many leaves below s − tol")


@dim.command("counting")
@click.option("--tree", "source", type=click.File("r"), required=True)
@click.option("--node", type=click.IntRange(min=0), default=0)
@click.option("--s", "s", default="s1", show_default=True)
@click.option("--tiling-limit", type=INTEGER, default=str(TILING_LIMIT))
@_json_option("Write the profile as JSON")
@click.pass_context
def dim_counting(
    ctx: click.Context,
    source: TextIO,
    node: int,
    s: str,
    tiling_limit: int,
    json_path: str | None,
) -> None:
    """card(S ∩ B(a, r))/r^s against the counting bound at one node."""
    cfg = _config(ctx, source=source.name, node=node, s=s)
    with _guarded(cfg):
        stored = _load_tree(source)
        if node >= len(stored.nodes):
            raise ValueError(f"No node {node} in {len(stored.nodes)} nodes")
        scene = scene_from_node(stored, NodeId(node), tiling_limit)
        profile = counting_profile(
            scene, _exponent(s, stored.params), jobs=cfg.jobs
        )
    if json_path:
        data = fmt.counting(NodeId(node), profile)
        _write_json(cfg, {"counting": data}, json_path)
    else:
        for row in profile.rows:
            mark = "✗" if row.violated else "✓"
            click.echo(f"r={row.r} count={row.count} case={row.case} {mark}")
    if not profile.ok:
        ctx.exit(1)


@dim.command("upper-audit")
@click.option("--mu", type=FRACTION, required=True)
@click.option("--s", "s", type=FRACTION, required=True)
@click.option("--cutoff", type=INTEGER, required=True, help="Height cutoff")
@click.option(
    "--gamma",
    default="0",
    show_default=True,
    help="Ball-family parameter, or 'auto' for the balancing γ",
)
@click.option("--root", type=VECTOR, default=DEFAULT_ROOT, show_default=True)
@click.option("--budget", type=INTEGER, default=str(AUDIT_BUDGET))
@_json_option("Write the audit as JSON")
@click.pass_context
def dim_upper_audit(
    ctx: click.Context,
    mu: Fraction,
    s: Fraction,
    cutoff: int,
    gamma: str,
    root: IntVector3,
    budget: int,
    json_path: str | None,
) -> None:
    """Truncated s-cost of the covering σ_μ(x) relative to B(x)."""
    cfg = _config(ctx, mu=mu, s=s, cutoff=cutoff, gamma=gamma, root=root)
    with _guarded(cfg):
        g = (
            upper_gamma(mu)[0]
            if gamma.strip() == "auto"
            else parse.parse_fraction(gamma)
        )
        result = upper_covering_audit(
            _primitive(root), mu, s, g, cutoff, budget
        )
        rows = audit_shells(result)
    if json_path:
        _write_json(cfg, {"audit": fmt.audit(result, rows)}, json_path)
        return
    click.echo(f"ratio: {fmt.mpf_str(result.ratio)} over {len(result.terms)}")
    for row in rows:
        mass = fmt.mpf_str(row.mass)
        click.echo(f"({row.lo}, {row.hi}]: {row.terms} terms, {mass}")
    click.echo(f"predicted decay exponent: {result.predicted_decay}")


if __name__ == "__main__":
    main()

"""
Command-line interface.

Usage:
    conjoint validate SCENARIO
    conjoint joint SCENARIO [--format text|csv]
    conjoint predict SCENARIO
    conjoint retrodict SCENARIO
    conjoint compare SCENARIO
    conjoint sample SCENARIO --n 1000000 --seed 7

Exit codes: 0 success, 1 invalid scenario, 2 usage error (including a
missing file), 3 numerical failure. Tables go to standard output,
diagnostics to standard error.
"""
from __future__ import annotations

import csv
import io
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import click
import numpy as np

from .linalg import DEFAULT_TOL, Tolerance
from .model import InvalidScenarioError, assemble_complete_state
from .oracle import RNG_ALGORITHM, enumerate_joint, sample_joint, tv_distance
from .probability import (
    ConditionalTable,
    Direction,
    JointTable,
    conditional,
    divergence_report,
    joint_distribution,
    marginal_a,
    marginal_b,
)
from .scenario_io import ScenarioDocument, ScenarioParseError, load_scenario

__all__ = [
    "CommandOutcome",
    "cmd_validate",
    "cmd_joint",
    "cmd_predict",
    "cmd_retrodict",
    "cmd_compare",
    "cmd_sample",
    "main",
]

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
MASK = "—"


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    rendered: str = ""
    errors: str = ""


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _p4(x: float) -> str:
    return MASK if np.isnan(x) else f"{x + 0.0:.4f}"


def _full(x: float) -> str:
    return "" if np.isnan(x) else format(float(x) + 0.0, ".17g")


def _grid(corner: str, rows: list, cols: list, cells: list) -> list:
    """Right-aligned text grid; ``cells[r][c]`` are preformatted strings."""
    table = [[corner] + cols] + [[r] + list(c) for r, c in zip(rows, cells)]
    widths = [max(len(row[k]) for row in table if k < len(row)) for k in range(len(table[0]))]
    lines = []
    for row in table:
        parts = [row[0].ljust(widths[0])] + [cell.rjust(widths[k + 1]) for k, cell in enumerate(row[1:])]
        lines.append("  ".join(parts).rstrip())
    return lines


def _joint_lines(jt: JointTable, corner: str = "p(a,b)") -> list:
    pa, pb = marginal_a(jt), marginal_b(jt)
    dim_a, dim_b = jt.shape
    cols = [f"b={b}" for b in range(dim_b)] + ["p(A=a)"]
    rows = [f"a={a}" for a in range(dim_a)] + ["p(B=b)"]
    cells = [[_p4(jt.p[a, b]) for b in range(dim_b)] + [_p4(pa[a])] for a in range(dim_a)]
    cells.append([_p4(x) for x in pb] + [""])
    return _grid(corner, rows, cols, cells)


def _plain_lines(p: np.ndarray, corner: str) -> list:
    dim_a, dim_b = p.shape
    return _grid(corner, [f"a={a}" for a in range(dim_a)], [f"b={b}" for b in range(dim_b)],
                 [[_p4(p[a, b]) for b in range(dim_b)] for a in range(dim_a)])


def _side_by_side(left: list, right: list, gap: int = 6) -> list:
    width = max(len(line) for line in left)
    height = max(len(left), len(right))
    left = left + [""] * (height - len(left))
    right = right + [""] * (height - len(right))
    return [(l.ljust(width + gap) + r).rstrip() for l, r in zip(left, right)]


def _csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["quantity", "a", "b", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _title(doc: ScenarioDocument, what: str) -> str:
    name = doc.metadata.name or "unnamed"
    return f"{what} [{name}]"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _run(path, eps: Optional[float], body: Callable[[ScenarioDocument, Tolerance], CommandOutcome]) -> CommandOutcome:
    try:
        tol = DEFAULT_TOL if eps is None else Tolerance(eps)
    except ValueError as exc:
        return CommandOutcome(EXIT_USAGE, errors=f"error: {exc}\n")
    if not os.path.isfile(path):
        return CommandOutcome(EXIT_USAGE, errors=f"error: no such scenario file: {path}\n")
    try:
        doc = load_scenario(path, tol)
    except ScenarioParseError as exc:
        return CommandOutcome(EXIT_INVALID, errors="".join(f"{d}\n" for d in exc.diagnostics))
    except OSError as exc:
        return CommandOutcome(EXIT_USAGE, errors=f"error: {exc}\n")
    warnings = "".join(f"{d}\n" for d in doc.warnings)
    try:
        with np.errstate(over="raise", divide="raise", invalid="raise"):
            outcome = body(doc, tol)
    except InvalidScenarioError as exc:
        return CommandOutcome(EXIT_INVALID, errors=warnings + "".join(f"error: {v}\n" for v in exc.violations))
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        return CommandOutcome(EXIT_NUMERICAL, errors=warnings + f"numerical failure: {exc}\n")
    return CommandOutcome(outcome.exit_code, outcome.rendered, warnings + outcome.errors)


def _complete_joint(doc: ScenarioDocument, tol: Tolerance) -> JointTable:
    s = doc.scenario
    return joint_distribution(assemble_complete_state(s.preparation, tol), s.evolution, s.basis_a, s.basis_b, tol)


def cmd_validate(path, eps: Optional[float] = None) -> CommandOutcome:
    return _run(path, eps, lambda doc, tol: CommandOutcome(EXIT_OK, "OK\n"))


def cmd_joint(path, fmt: str = "text", eps: Optional[float] = None) -> CommandOutcome:
    def body(doc, tol):
        jt = _complete_joint(doc, tol)
        if fmt == "csv":
            rows = [["joint", a, b, _full(jt.p[a, b])] for a in range(jt.shape[0]) for b in range(jt.shape[1])]
            rows += [["marginal_a", a, "", _full(x)] for a, x in enumerate(marginal_a(jt))]
            rows += [["marginal_b", "", b, _full(x)] for b, x in enumerate(marginal_b(jt))]
            return CommandOutcome(EXIT_OK, _csv(rows))
        lines = [_title(doc, "joint probabilities p(A=a, B=b)"), ""] + _joint_lines(jt)
        return CommandOutcome(EXIT_OK, "\n".join(lines) + "\n")

    return _run(path, eps, body)


def _render_conditional(doc: ScenarioDocument, ct: ConditionalTable, jt: JointTable, fmt: str) -> CommandOutcome:
    predictive = ct.direction is Direction.PREDICTIVE
    quantity = "p(b|a)" if predictive else "p(a|b)"
    if fmt == "csv":
        rows = [[quantity, a, b, _full(ct.p[a, b])] for a in range(ct.p.shape[0]) for b in range(ct.p.shape[1])]
        return CommandOutcome(EXIT_OK, _csv(rows))
    title = "predictive p(B=b | A=a)" if predictive else "retrodictive p(A=a | B=b)"
    lines = [_title(doc, title), ""] + _plain_lines(ct.p, quantity)
    marg = marginal_a(jt) if predictive else marginal_b(jt)
    for k in np.flatnonzero(ct.masked):
        name = f"p(A={k})" if predictive else f"p(B={k})"
        lines.append(f"{MASK} undefined: {name} = {marg[k]:.4g}, nothing to condition on")
    return CommandOutcome(EXIT_OK, "\n".join(lines) + "\n")


def cmd_predict(path, fmt: str = "text", eps: Optional[float] = None) -> CommandOutcome:
    def body(doc, tol):
        jt = _complete_joint(doc, tol)
        return _render_conditional(doc, conditional(jt, Direction.PREDICTIVE), jt, fmt)

    return _run(path, eps, body)


def cmd_retrodict(path, fmt: str = "text", eps: Optional[float] = None) -> CommandOutcome:
    def body(doc, tol):
        jt = _complete_joint(doc, tol)
        return _render_conditional(doc, conditional(jt, Direction.RETRODICTIVE), jt, fmt)

    return _run(path, eps, body)


def cmd_compare(path, fmt: str = "text", eps: Optional[float] = None) -> CommandOutcome:
    def body(doc, tol):
        rep = divergence_report(doc.scenario, tol)
        conv, comp = rep.conventional_joint, rep.complete_joint
        if fmt == "csv":
            rows = []
            for label, t in (("conventional", conv), ("complete", comp)):
                rows += [[label, a, b, _full(t.p[a, b])] for a in range(t.shape[0]) for b in range(t.shape[1])]
            rows.append(["total_variation", "", "", _full(rep.total_variation)])
            rows.append(["max_entry_gap", "", "", _full(rep.max_entry_gap)])
            return CommandOutcome(EXIT_OK, _csv(rows))
        left = ["conventional  p(a) p(b|a)", ""] + _joint_lines(conv)
        right = ["complete  p(a,b)", ""] + _joint_lines(comp)
        lines = [_title(doc, "conventional vs complete description"), ""] + _side_by_side(left, right)
        lines += ["", f"total_variation  {_p4(rep.total_variation)}", f"max_entry_gap    {_p4(rep.max_entry_gap)}"]
        return CommandOutcome(EXIT_OK, "\n".join(lines) + "\n")

    return _run(path, eps, body)


def cmd_sample(path, n: Optional[int], seed: int = 0, fmt: str = "text", eps: Optional[float] = None,
               workers: int = 1) -> CommandOutcome:
    if n is None or n < 1:
        return CommandOutcome(EXIT_USAGE, errors="error: --n must be a positive sample count\n")
    if not 0 <= seed < 2**64:
        return CommandOutcome(EXIT_USAGE, errors="error: --seed must be an unsigned 64-bit integer\n")

    def body(doc, tol):
        run = sample_joint(doc.scenario, n, seed, workers=workers, tol=tol)
        exact = enumerate_joint(doc.scenario, tol)
        freq = run.frequencies
        tv = tv_distance(freq, exact)
        dim_a, dim_b = run.counts.shape
        if fmt == "csv":
            rows = [["count", a, b, int(run.counts[a, b])] for a in range(dim_a) for b in range(dim_b)]
            rows += [["frequency", a, b, _full(freq[a, b])] for a in range(dim_a) for b in range(dim_b)]
            rows.append(["tv_distance", "", "", _full(tv)])
            return CommandOutcome(EXIT_OK, _csv(rows))
        counts = _grid("count", [f"a={a}" for a in range(dim_a)], [f"b={b}" for b in range(dim_b)],
                       [[str(int(c)) for c in row] for row in run.counts])
        lines = [_title(doc, f"sampled conjoint outcomes, n={n}, seed={seed}, rng={RNG_ALGORITHM}"), ""]
        lines += _side_by_side(counts, _plain_lines(freq, "frequency"))
        lines += ["", "exact", ""] + _plain_lines(exact.p, "p(a,b)")
        lines += ["", f"tv_distance  {_p4(tv)}"]
        return CommandOutcome(EXIT_OK, "\n".join(lines) + "\n")

    return _run(path, eps, body)


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------


def _emit(outcome: CommandOutcome) -> None:
    if outcome.rendered:
        click.echo(outcome.rendered, nl=False)
    if outcome.errors:
        click.echo(outcome.errors, nl=False, err=True)
    sys.exit(outcome.exit_code)


_scenario_arg = click.argument("scenario", type=click.Path(dir_okay=False))
_eps_opt = click.option("--eps", type=float, default=None,
                        help=f"Validation tolerance (default {DEFAULT_TOL.eps:g}).")
_format_opt = click.option("--format", "fmt", type=click.Choice(["text", "csv"]), default="text",
                           show_default=True)


@click.group()
def main():
    """Measurement statistics for experimenter/system scenarios."""


@main.command()
@_scenario_arg
@_eps_opt
def validate(scenario, eps):
    """Parse and validate a scenario file."""
    _emit(cmd_validate(scenario, eps))


@main.command()
@_scenario_arg
@_format_opt
@_eps_opt
def joint(scenario, fmt, eps):
    """Joint table p(a,b) of the final conjoint measurement."""
    _emit(cmd_joint(scenario, fmt, eps))


@main.command()
@_scenario_arg
@_format_opt
@_eps_opt
def predict(scenario, fmt, eps):
    """Predictive conditionals p(b|a)."""
    _emit(cmd_predict(scenario, fmt, eps))


@main.command()
@_scenario_arg
@_format_opt
@_eps_opt
def retrodict(scenario, fmt, eps):
    """Retrodictive conditionals p(a|b)."""
    _emit(cmd_retrodict(scenario, fmt, eps))


@main.command()
@_scenario_arg
@_format_opt
@_eps_opt
def compare(scenario, fmt, eps):
    """Conventional versus complete joint tables and their total variation."""
    _emit(cmd_compare(scenario, fmt, eps))


@main.command()
@_scenario_arg
@click.option("--n", "n", type=int, required=True, help="Number of samples.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_format_opt
@_eps_opt
def sample(scenario, n, seed, workers, fmt, eps):
    """Draw conjoint outcomes and compare frequencies with the exact table."""
    _emit(cmd_sample(scenario, n, seed, fmt, eps, workers))


if __name__ == "__main__":
    main()

"""Program-level solve: lowering, the IPM call, and solution recovery."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import Stalled
from .program import ConicProgram, ConicSolution, to_solver_form
from .solver import RawSolution, SolverOptions, solve_form

__all__ = ["solve", "SolverOptions"]


def _recover(program: ConicProgram, form, raw: RawSolution) -> ConicSolution:
    values: dict[str, np.ndarray] = {}
    for name, sl in form.var_slices.items():
        values[name] = raw.x[sl].copy()
    for name, sl in form.slack_slices.items():
        if name not in values:  # eliminated slack blocks live in s
            values[name] = raw.s[sl].copy()
    # soc blocks were lowered to free copies; drop the arrow helpers
    for name in list(values):
        if name.endswith("__arrow"):
            del values[name]

    # row indices refer to the soc-lowered program, whose first rows are the
    # original ones; report duals for the original rows only
    n_lowered = len(form.kept_rows) + sum(len(p) for p in form.elim_rows.values())
    y = np.full(max(n_lowered, len(program.rows)), np.nan)
    if raw.y is not None and len(form.kept_rows):
        for i, r in enumerate(form.kept_rows):
            y[r] = raw.y[i]
    for name, picks in form.elim_rows.items():
        sl = form.slack_slices[name]
        for i, (r, coef) in enumerate(picks):
            y[r] = raw.z[sl.start + i] / coef
    y = y[: len(program.rows)]

    return ConicSolution(
        status=raw.status,
        objective=raw.pobj,
        values=values,
        y=y,
        residuals=raw.residuals,
        iterations=raw.iterations,
    )


def solve(program: ConicProgram, options: Optional[SolverOptions] = None) -> ConicSolution:
    """Solve a conic program with the reference interior-point method.

    Raises Stalled (with a partial solution attached) when no conclusive
    status is reached within the iteration limit.
    """
    issues = program.validate()
    if issues:
        raise ValueError("invalid program: " + "; ".join(issues))
    form = to_solver_form(program)
    try:
        raw = solve_form(form, options)
    except Stalled as exc:
        if exc.solution is not None:
            exc.solution = _recover(program, form, exc.solution)
        raise
    return _recover(program, form, raw)

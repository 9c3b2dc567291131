"""Multiobjective LP data, dominance relations, and the scalarization oracle.

The epsilon-constraint oracle (one LP per grid point) is the ground truth
used in tests and plots; the approximation pipeline never relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, SolverFailure

__all__ = [
    "MOLP",
    "ObjectivePoint",
    "ScalarizationResult",
    "validate",
    "scalarize_epsilon_constraint",
    "pareto_front_oracle",
    "dominates",
    "molp_to_json",
    "molp_from_json",
]

FEAS_TOL = 1e-7


@dataclass(frozen=True)
class MOLP:
    """min (c^1'x, ..., c^k'x) over Ax <= b."""

    A: np.ndarray
    b: np.ndarray
    objectives: np.ndarray  # k x n
    names: Optional[tuple] = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        C = np.atleast_2d(np.asarray(self.objectives, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "objectives", C)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def k(self) -> int:
        return self.objectives.shape[0]


@dataclass(frozen=True)
class ObjectivePoint:
    f: np.ndarray

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.f, dtype=float))
        if not np.all(np.isfinite(f)):
            raise ValueError("objective point must be finite")
        object.__setattr__(self, "f", f)

    @property
    def k(self) -> int:
        return self.f.shape[0]


@dataclass(frozen=True)
class ScalarizationResult:
    status: str  # optimal | infeasible | unbounded
    x: Optional[np.ndarray] = None
    f: Optional[ObjectivePoint] = None


def validate(molp: MOLP) -> list[str]:
    """Invariant violations as human-readable strings; empty means valid."""
    issues = []
    if molp.k < 2:
        issues.append("k must be >= 2")
    if molp.m < 1:
        issues.append("m must be >= 1")
    if molp.n < 1:
        issues.append("n must be >= 1")
    if molp.b.shape != (molp.m,):
        issues.append(f"b has length {molp.b.shape[0]}, expected {molp.m}")
    if molp.objectives.shape[1] != molp.n:
        issues.append(
            f"objectives have length {molp.objectives.shape[1]}, expected {molp.n}"
        )
    for i, v in enumerate(molp.b):
        if not np.isfinite(v):
            issues.append(f"b[{i}] not finite")
    if not np.all(np.isfinite(molp.A)):
        issues.append("A contains non-finite entries")
    if not np.all(np.isfinite(molp.objectives)):
        issues.append("objectives contain non-finite entries")
    if molp.names is not None and len(molp.names) != molp.k:
        issues.append("names must have one label per objective")
    return issues


def scalarize_epsilon_constraint(molp: MOLP, u) -> ScalarizationResult:
    """min c^k'x  s.t.  c^i'x <= u_i (i < k), Ax <= b."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (molp.k - 1,):
        raise DimensionMismatch(f"u must have length {molp.k - 1}")
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be finite")
    A_ub = np.vstack([molp.A, molp.objectives[:-1]])
    b_ub = np.concatenate([molp.b, u])
    res = linprog(
        molp.objectives[-1],
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=(None, None),
        method="highs",
    )
    if res.status == 2:
        return ScalarizationResult("infeasible")
    if res.status == 3:
        return ScalarizationResult("unbounded")
    if res.status != 0:
        raise SolverFailure(f"LP solver failed: {res.message}")
    x = np.asarray(res.x, dtype=float)
    if np.any(molp.A @ x > molp.b + FEAS_TOL):
        raise SolverFailure("LP solution violates Ax <= b beyond feasTol")
    f = ObjectivePoint(molp.objectives @ x)
    return ScalarizationResult("optimal", x=x, f=f)


def pareto_front_oracle(molp: MOLP, grid) -> list[dict]:
    """Scalarize every grid point; infeasible points are flagged.

    Returns one record per point: {"u", "feasible", "f_k"}.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    out = []
    for u in grid:
        r = scalarize_epsilon_constraint(molp, u)
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        if r.status == "optimal":
            out.append({"u": u_arr, "feasible": True, "f_k": float(r.f.f[-1])})
        else:
            out.append({"u": u_arr, "feasible": False, "f_k": None})
    return out


def dominates(f1: ObjectivePoint, f2: ObjectivePoint) -> str:
    """'strong' iff f1 < f2 componentwise, 'weak' iff f1 <= f2 and f1 != f2."""
    if f1.k != f2.k:
        raise DimensionMismatch("objective points must have the same k")
    if np.all(f1.f < f2.f):
        return "strong"
    if np.all(f1.f <= f2.f) and np.any(f1.f < f2.f):
        return "weak"
    return "none"


def molp_to_json(molp: MOLP) -> dict:
    doc = {
        "A": molp.A.tolist(),
        "b": molp.b.tolist(),
        "objectives": molp.objectives.tolist(),
    }
    if molp.names is not None:
        doc["names"] = list(molp.names)
    return doc


def molp_from_json(doc: dict) -> MOLP:
    return MOLP(
        A=np.asarray(doc["A"], dtype=float),
        b=np.asarray(doc["b"], dtype=float),
        objectives=np.asarray(doc["objectives"], dtype=float),
        names=tuple(doc["names"]) if "names" in doc else None,
    )

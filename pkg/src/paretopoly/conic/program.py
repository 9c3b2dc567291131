"""Solver-neutral conic program IR.

A program is a set of named variable blocks (free / nonneg / soc / psd),
linear equality constraints over those blocks, and a linear objective.
PSD blocks are stored in scaled-vector (svec) coordinates so that the
trace inner product becomes a plain dot product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch, Unsupported

__all__ = [
    "Block",
    "ConicProgram",
    "ConicSolution",
    "SolverForm",
    "svec",
    "smat",
    "svec_len",
    "svec_indices",
    "lower_socs",
    "split_free",
]

_SQRT2 = math.sqrt(2.0)


def svec_len(order: int) -> int:
    return order * (order + 1) // 2


def svec_indices(order: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(order) for j in range(i, order)]


def svec(M: np.ndarray) -> np.ndarray:
    """Scaled upper-triangle vectorization; keeps <A,X> = svec(A).svec(X)."""
    M = np.asarray(M, dtype=float)
    r = M.shape[0]
    out = np.empty(svec_len(r))
    k = 0
    for i in range(r):
        out[k] = M[i, i]
        k += 1
        for j in range(i + 1, r):
            out[k] = _SQRT2 * 0.5 * (M[i, j] + M[j, i])
            k += 1
    return out


def smat(v: np.ndarray, order: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    M = np.empty((order, order))
    k = 0
    for i in range(order):
        M[i, i] = v[k]
        k += 1
        for j in range(i + 1, order):
            M[i, j] = M[j, i] = v[k] / _SQRT2
            k += 1
    return M


@dataclass(frozen=True)
class Block:
    """A named variable block.  size is the vector length (psd: matrix order)."""

    name: str
    cone: str  # free | nonneg | soc | psd
    size: int

    def __post_init__(self):
        if self.cone not in ("free", "nonneg", "soc", "psd"):
            raise ValueError(f"unknown cone {self.cone!r}")
        if self.size < 1:
            raise ValueError("block size must be >= 1")
        if self.cone == "soc" and self.size < 2:
            raise ValueError("soc blocks need size >= 2")

    @property
    def scalar_len(self) -> int:
        return svec_len(self.size) if self.cone == "psd" else self.size


class ConicProgram:
    """min c'x  s.t.  (equalities over blocks),  each block in its cone."""

    def __init__(self, metadata: Optional[dict] = None):
        self.blocks: list[Block] = []
        self._index: dict[str, int] = {}
        self.rows: list[dict[str, np.ndarray]] = []
        self.rhs: list[float] = []
        self.objective: dict[str, np.ndarray] = {}
        self.metadata: dict = metadata or {}

    # -- construction -------------------------------------------------

    def add_block(self, name: str, cone: str, size: int) -> Block:
        if name in self._index:
            raise ValueError(f"duplicate block {name!r}")
        b = Block(name, cone, size)
        self._index[name] = len(self.blocks)
        self.blocks.append(b)
        return b

    def block(self, name: str) -> Block:
        return self.blocks[self._index[name]]

    def _coerce(self, name: str, value) -> np.ndarray:
        if name not in self._index:
            raise DimensionMismatch(f"constraint references undeclared block {name!r}")
        blk = self.block(name)
        arr = np.asarray(value, dtype=float)
        if blk.cone == "psd" and arr.ndim == 2:
            if arr.shape != (blk.size, blk.size):
                raise DimensionMismatch(f"coefficient for {name!r} has wrong shape")
            if not np.allclose(arr, arr.T, atol=1e-12):
                raise ValueError(f"psd coefficient for {name!r} must be symmetric")
            arr = svec(arr)
        arr = np.atleast_1d(arr)
        if arr.shape != (blk.scalar_len,):
            raise DimensionMismatch(f"coefficient for {name!r} has wrong length")
        return arr

    def add_equality(self, coeffs: dict, rhs: float) -> int:
        row = {name: self._coerce(name, v) for name, v in coeffs.items()}
        self.rows.append(row)
        self.rhs.append(float(rhs))
        return len(self.rows) - 1

    def set_objective(self, coeffs: dict):
        self.objective = {name: self._coerce(name, v) for name, v in coeffs.items()}

    def add_objective_term(self, name: str, value):
        arr = self._coerce(name, value)
        if name in self.objective:
            self.objective[name] = self.objective[name] + arr
        else:
            self.objective[name] = arr

    # -- assembly -----------------------------------------------------

    @property
    def num_scalars(self) -> int:
        return sum(b.scalar_len for b in self.blocks)

    def offsets(self) -> dict[str, int]:
        out = {}
        pos = 0
        for b in self.blocks:
            out[b.name] = pos
            pos += b.scalar_len
        return out

    def assemble(self):
        """Dense (c, A, b) over the concatenated scalar layout."""
        off = self.offsets()
        N = self.num_scalars
        c = np.zeros(N)
        for name, v in self.objective.items():
            c[off[name] : off[name] + len(v)] += v
        A = np.zeros((len(self.rows), N))
        for r, row in enumerate(self.rows):
            for name, v in row.items():
                A[r, off[name] : off[name] + len(v)] += v
        return c, A, np.asarray(self.rhs, dtype=float)

    def validate(self) -> list[str]:
        issues = []
        names = {b.name for b in self.blocks}
        for r, row in enumerate(self.rows):
            for name in row:
                if name not in names:
                    issues.append(f"row {r} references undeclared block {name!r}")
        for name in self.objective:
            if name not in names:
                issues.append(f"objective references undeclared block {name!r}")
        return issues

    def copy(self) -> "ConicProgram":
        p = ConicProgram(metadata=dict(self.metadata))
        for b in self.blocks:
            p.add_block(b.name, b.cone, b.size)
        p.rows = [dict(r) for r in self.rows]
        p.rhs = list(self.rhs)
        p.objective = dict(self.objective)
        return p


@dataclass
class ConicSolution:
    status: str  # optimal | infeasible | unbounded | stalled
    objective: Optional[float]
    values: dict[str, np.ndarray]  # primal value per block (svec for psd)
    y: Optional[np.ndarray]  # duals of kept equality rows (by original row index)
    residuals: dict[str, float]
    iterations: int = 0

    def value(self, name: str) -> np.ndarray:
        return self.values[name]

    def value_matrix(self, name: str, order: int) -> np.ndarray:
        return smat(self.values[name], order)


# ---------------------------------------------------------------------------
# Lowerings
# ---------------------------------------------------------------------------


def lower_socs(program: ConicProgram) -> ConicProgram:
    """Replace each soc block (t, v) by a free copy plus an arrow-matrix
    psd slack [[t, v'], [v, t I]], tied down with equalities."""
    if not any(b.cone == "soc" for b in program.blocks):
        return program
    p = ConicProgram(metadata=dict(program.metadata))
    for b in program.blocks:
        if b.cone == "soc":
            p.add_block(b.name, "free", b.size)
            p.add_block(b.name + "__arrow", "psd", b.size)
        else:
            p.add_block(b.name, b.cone, b.size)
    p.rows = [dict(r) for r in program.rows]
    p.rhs = list(program.rhs)
    p.objective = dict(program.objective)
    for b in program.blocks:
        if b.cone != "soc":
            continue
        q = b.size
        arrow = b.name + "__arrow"
        for i, j in svec_indices(q):
            S = np.zeros((q, q))
            S[i, j] = S[j, i] = 1.0
            coeffs = {arrow: S}
            t = np.zeros(q)
            if i == j:
                t[0] = -1.0  # diagonal entries all equal t
                coeffs[b.name] = t
            elif i == 0:
                t[j] = -1.0  # first row holds v
                coeffs[b.name] = t
            # off-diagonal entries below the arrow stay zero
            p.add_equality(coeffs, 0.0)
    return p


def split_free(program: ConicProgram) -> ConicProgram:
    """Rewrite every free block as the difference of two nonneg blocks."""
    if not any(b.cone == "free" for b in program.blocks):
        return program
    p = ConicProgram(metadata=dict(program.metadata))
    for b in program.blocks:
        if b.cone == "free":
            p.add_block(b.name + "__pos", "nonneg", b.size)
            p.add_block(b.name + "__neg", "nonneg", b.size)
        else:
            p.add_block(b.name, b.cone, b.size)

    def expand(row: dict) -> dict:
        out = {}
        for name, v in row.items():
            if program.block(name).cone == "free":
                out[name + "__pos"] = v
                out[name + "__neg"] = -v
            else:
                out[name] = v
        return out

    for row, rhs in zip(program.rows, program.rhs):
        p.add_equality(expand(row), rhs)
    p.objective = {k: np.asarray(v) for k, v in expand(program.objective).items()}
    return p


# ---------------------------------------------------------------------------
# Solver form: Gx + s = h, s in cones, Ax = b, x free
# ---------------------------------------------------------------------------


@dataclass
class SolverForm:
    c: np.ndarray
    G: np.ndarray
    h: np.ndarray
    dims: list  # ("l", n) then ("s", order) entries, in G row order
    A: np.ndarray
    b: np.ndarray
    # recovery
    var_slices: dict[str, slice]  # block -> slice into x
    slack_slices: dict[str, slice]  # block -> slice into s
    kept_rows: list[int]  # original row indices that became A rows
    elim_rows: dict[str, list[tuple[int, float]]]  # block -> [(row, coef)] per comp
    obj_offset: float = 0.0


def to_solver_form(program: ConicProgram) -> SolverForm:
    program = lower_socs(program)
    c_full, A_full, b_full = program.assemble()
    off = program.offsets()
    nrows = len(program.rows)

    coned = [b for b in program.blocks if b.cone in ("nonneg", "psd")]
    # rows touching each scalar column
    touch: dict[int, list[int]] = {}
    for r, row in enumerate(program.rows):
        for name, v in row.items():
            base = off[name]
            for i in np.nonzero(v)[0]:
                touch.setdefault(base + int(i), []).append(r)

    coned_cols = set()
    for b in coned:
        coned_cols.update(range(off[b.name], off[b.name] + b.scalar_len))

    claimed: set[int] = set()
    elim: dict[str, list[tuple[int, float]]] = {}
    for b in coned:
        cols = range(off[b.name], off[b.name] + b.scalar_len)
        picks = []
        ok = True
        for col in cols:
            rows = touch.get(col, [])
            if len(rows) != 1 or rows[0] in claimed:
                ok = False
                break
            r = rows[0]
            # the row may touch no other coned column
            row_cols = [
                off[name] + int(i)
                for name, v in program.rows[r].items()
                for i in np.nonzero(v)[0]
            ]
            if any(cc in coned_cols and cc != col for cc in row_cols):
                ok = False
                break
            picks.append((col, r, A_full[r, col]))
        if ok and len({r for _, r, _ in picks}) == len(picks):
            claimed.update(r for _, r, _ in picks)
            elim[b.name] = [(r, coef) for _, r, coef in picks]

    # x variables: free blocks plus coned blocks that were not eliminated
    var_blocks = [b for b in program.blocks if b.cone == "free" or b.name not in elim]
    var_slices = {}
    pos = 0
    for b in var_blocks:
        var_slices[b.name] = slice(pos, pos + b.scalar_len)
        pos += b.scalar_len
    nx = pos

    col_map = np.full(program.num_scalars, -1, dtype=int)
    for b in var_blocks:
        s = var_slices[b.name]
        col_map[off[b.name] : off[b.name] + b.scalar_len] = np.arange(s.start, s.stop)

    def project(full_row: np.ndarray) -> np.ndarray:
        out = np.zeros(nx)
        nz = np.nonzero(full_row)[0]
        for j in nz:
            cj = col_map[j]
            if cj >= 0:
                out[cj] += full_row[j]
        return out

    # G rows: nonneg group first, then each psd block contiguously
    G_rows_l: list[np.ndarray] = []
    h_l: list[float] = []
    G_rows_s: list[tuple[str, list[np.ndarray], list[float]]] = []
    slack_order: list[tuple[str, int]] = []  # (block, rows) in final order

    def cone_rows(b: Block) -> tuple[list[np.ndarray], list[float]]:
        rows_out: list[np.ndarray] = []
        h_out: list[float] = []
        if b.name in elim:
            for r, coef in elim[b.name]:
                full = A_full[r].copy()
                full[off[b.name] : off[b.name] + b.scalar_len] = 0.0
                rows_out.append(project(full) / coef)
                h_out.append(b_full[r] / coef)
        else:
            s = var_slices[b.name]
            for i in range(b.scalar_len):
                row = np.zeros(nx)
                row[s.start + i] = -1.0
                rows_out.append(row)
                h_out.append(0.0)
        return rows_out, h_out

    for b in coned:
        rows_out, h_out = cone_rows(b)
        if b.cone == "nonneg":
            slack_order.append((b.name, len(G_rows_l)))
            G_rows_l.extend(rows_out)
            h_l.extend(h_out)
        else:
            G_rows_s.append((b.name, rows_out, h_out))

    dims: list = []
    if G_rows_l:
        dims.append(("l", len(G_rows_l)))
    G_list = list(G_rows_l)
    h_list = list(h_l)
    slack_slices: dict[str, slice] = {}
    for name, start in slack_order:
        blk = program.block(name)
        slack_slices[name] = slice(start, start + blk.scalar_len)
    for name, rows_out, h_out in G_rows_s:
        blk = program.block(name)
        dims.append(("s", blk.size))
        slack_slices[name] = slice(len(G_list), len(G_list) + len(rows_out))
        G_list.extend(rows_out)
        h_list.extend(h_out)

    G = np.asarray(G_list) if G_list else np.zeros((0, nx))
    h = np.asarray(h_list) if h_list else np.zeros(0)

    kept = [r for r in range(nrows) if r not in claimed]
    A = (
        np.asarray([project(A_full[r]) for r in kept])
        if kept
        else np.zeros((0, nx))
    )
    b = np.asarray([b_full[r] for r in kept]) if kept else np.zeros(0)

    # objective over x plus the constant picked up from eliminated slacks
    c = np.zeros(nx)
    obj_offset = 0.0
    nz = np.nonzero(c_full)[0]
    for j in nz:
        cj = col_map[j]
        if cj >= 0:
            c[cj] += c_full[j]
    elim_cols = [j for j in nz if col_map[j] < 0]
    if elim_cols:
        # c_elim . s with s = h - Gx for the block's rows
        for b2 in coned:
            if b2.name not in elim:
                continue
            base = off[b2.name]
            for i, (r, coef) in enumerate(elim[b2.name]):
                cval = c_full[base + i]
                if cval == 0.0:
                    continue
                sl = slack_slices[b2.name]
                c -= cval * G[sl.start + i]
                obj_offset += cval * h[sl.start + i]

    return SolverForm(
        c=c,
        G=G,
        h=h,
        dims=dims,
        A=A,
        b=b,
        var_slices=var_slices,
        slack_slices=slack_slices,
        kept_rows=kept,
        elim_rows=elim,
        obj_offset=obj_offset,
    )

"""SDPA sparse format (.dat-s) export / import.

Layout: line 1 = number of constraints, line 2 = number of blocks,
line 3 = block sizes (negative size = diagonal block), line 4 = RHS
vector, then one "matno blkno i j value" entry per line with matno 0
denoting the objective matrix and matno i the i-th constraint matrix.
Only upper-triangle entries are written.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ParseError, Unsupported
from .program import ConicProgram, svec_indices, svec_len

__all__ = ["export_sdpa", "import_sdpa"]

_SQRT2 = math.sqrt(2.0)


def _fmt(v: float) -> str:
    return repr(float(v))


def _block_entries(program: ConicProgram, coeffs: dict) -> list[tuple[int, int, int, float]]:
    """(blkno, i, j, value) matrix entries for one coefficient row."""
    out = []
    for blkno, blk in enumerate(program.blocks, start=1):
        if blk.name not in coeffs:
            continue
        v = coeffs[blk.name]
        if blk.cone == "nonneg":
            for j in np.nonzero(v)[0]:
                out.append((blkno, int(j) + 1, int(j) + 1, float(v[j])))
        else:  # psd, svec coefficients
            for k, (i, j) in enumerate(svec_indices(blk.size)):
                val = v[k]
                if val == 0.0:
                    continue
                if i != j:
                    val = val / _SQRT2
                out.append((blkno, i + 1, j + 1, float(val)))
    return out


def export_sdpa(program: ConicProgram) -> str:
    for blk in program.blocks:
        if blk.cone not in ("nonneg", "psd"):
            raise Unsupported(
                f"block {blk.name!r} has cone {blk.cone!r}; lower socs and split "
                "free variables before exporting"
            )
    m = len(program.rows)
    lines = [str(m), str(len(program.blocks))]
    sizes = [
        str(-blk.size) if blk.cone == "nonneg" else str(blk.size)
        for blk in program.blocks
    ]
    lines.append(" ".join(sizes))
    lines.append(" ".join(_fmt(r) for r in program.rhs))
    for blkno, i, j, val in _block_entries(program, program.objective):
        lines.append(f"0 {blkno} {i} {j} {_fmt(val)}")
    for matno, row in enumerate(program.rows, start=1):
        for blkno, i, j, val in _block_entries(program, row):
            lines.append(f"{matno} {blkno} {i} {j} {_fmt(val)}")
    return "\n".join(lines) + "\n"


def import_sdpa(text: str) -> ConicProgram:
    raw_lines = text.splitlines()
    lines = []
    for lineno, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("*", '"')):
            continue
        lines.append((lineno, stripped))
    if len(lines) < 4:
        raise ParseError("file needs at least 4 header lines", line=len(raw_lines))

    def parse_int(token: str, lineno: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"expected integer, got {token!r}", line=lineno)

    lineno, tok = lines[0]
    m = parse_int(tok.split()[0], lineno)
    lineno, tok = lines[1]
    nblocks = parse_int(tok.split()[0], lineno)
    lineno, tok = lines[2]
    sizes = [parse_int(t, lineno) for t in tok.replace(",", " ").split()]
    if len(sizes) != nblocks:
        raise ParseError(f"expected {nblocks} block sizes, got {len(sizes)}", line=lineno)
    lineno, tok = lines[3]
    try:
        rhs = [float(t) for t in tok.replace(",", " ").split()]
    except ValueError:
        raise ParseError("bad RHS vector", line=lineno)
    if len(rhs) != m:
        raise ParseError(f"expected {m} RHS values, got {len(rhs)}", line=lineno)

    program = ConicProgram()
    for b, size in enumerate(sizes, start=1):
        if size < 0:
            program.add_block(f"block{b}", "nonneg", -size)
        elif size > 0:
            program.add_block(f"block{b}", "psd", size)
        else:
            raise ParseError("block size 0", line=lines[2][0])

    coeff_rows = [
        {
            blk.name: np.zeros(blk.scalar_len)
            for blk in program.blocks
        }
        for _ in range(m + 1)
    ]
    svec_pos = {
        blk.name: {pair: k for k, pair in enumerate(svec_indices(blk.size))}
        for blk in program.blocks
        if blk.cone == "psd"
    }

    for lineno, line in lines[4:]:
        toks = line.replace(",", " ").split()
        if len(toks) != 5:
            raise ParseError(f"expected 5 tokens, got {len(toks)}", line=lineno)
        matno = parse_int(toks[0], lineno)
        blkno = parse_int(toks[1], lineno)
        i = parse_int(toks[2], lineno)
        j = parse_int(toks[3], lineno)
        try:
            val = float(toks[4])
        except ValueError:
            raise ParseError(f"bad value {toks[4]!r}", line=lineno)
        if not 0 <= matno <= m:
            raise ParseError(f"matrix number {matno} out of range", line=lineno)
        if not 1 <= blkno <= nblocks:
            raise ParseError(f"block number {blkno} out of range", line=lineno)
        blk = program.blocks[blkno - 1]
        if i > j:
            raise ParseError("entries must be upper triangle (i <= j)", line=lineno)
        if blk.cone == "nonneg":
            if i != j:
                raise ParseError("off-diagonal entry in a diagonal block", line=lineno)
            if not 1 <= i <= blk.size:
                raise ParseError(f"index {i} out of range", line=lineno)
            coeff_rows[matno][blk.name][i - 1] += val
        else:
            if not (1 <= i <= blk.size and 1 <= j <= blk.size):
                raise ParseError(f"indices ({i},{j}) out of range", line=lineno)
            k = svec_pos[blk.name][(i - 1, j - 1)]
            coeff_rows[matno][blk.name][k] += val if i == j else val * _SQRT2

    def compact(row: dict) -> dict:
        return {name: v for name, v in row.items() if np.any(v != 0.0)}

    program.set_objective(compact(coeff_rows[0]))
    for matno in range(1, m + 1):
        program.add_equality(compact(coeff_rows[matno]), rhs[matno - 1])
    return program

"""Conic duality at the IR level.

For the standard form  min c'x  s.t.  sum_B R_B x_B = r,  x_B in K_B,
the dual is  max r'y  s.t.  c_B - R_B' y in K_B*  per block.  The result
is expressed as another ConicProgram in min convention (objective -r'y),
so the dual's reported optimum is the negative of the returned program's
optimal value; weak duality reads  -opt(dual) <= opt(primal).
"""

from __future__ import annotations

import numpy as np

from .program import Block, ConicProgram

__all__ = ["dualize"]


def dualize(program: ConicProgram) -> ConicProgram:
    c, A, b = program.assemble()
    off = program.offsets()
    p = len(program.rows)
    dual = ConicProgram(
        metadata={"dual_of": program.metadata.get("name", "program"), "objective_sign": -1}
    )
    dual.add_block("y", "free", max(p, 1))
    for blk in program.blocks:
        if blk.cone != "free":
            dual.add_block("slack_" + blk.name, blk.cone, blk.size)

    for blk in program.blocks:
        sl = slice(off[blk.name], off[blk.name] + blk.scalar_len)
        Rb = A[:, sl]  # p x len
        cb = c[sl]
        for i in range(blk.scalar_len):
            coeffs: dict = {}
            yrow = np.zeros(max(p, 1))
            yrow[:p] = Rb[:, i]
            if np.any(yrow != 0.0):
                coeffs["y"] = yrow
            if blk.cone != "free":
                sv = np.zeros(blk.scalar_len)
                sv[i] = 1.0
                coeffs["slack_" + blk.name] = sv
            if not coeffs:
                # unconstrained component: c_b[i] must be zero for feasibility;
                # keep the row so infeasibility is detected by the solver
                coeffs["y"] = np.zeros(max(p, 1))
            dual.add_equality(coeffs, float(cb[i]))

    obj = np.zeros(max(p, 1))
    obj[:p] = -b
    dual.set_objective({"y": obj})
    return dual

from .program import (
    Block,
    ConicProgram,
    ConicSolution,
    lower_socs,
    smat,
    split_free,
    svec,
    svec_indices,
    svec_len,
    to_solver_form,
)
from .solve import SolverOptions, solve
from .dualize import dualize
from .sdpa import export_sdpa, import_sdpa

__all__ = [
    "Block",
    "ConicProgram",
    "ConicSolution",
    "SolverOptions",
    "solve",
    "dualize",
    "export_sdpa",
    "import_sdpa",
    "lower_socs",
    "split_free",
    "smat",
    "svec",
    "svec_indices",
    "svec_len",
    "to_solver_form",
]

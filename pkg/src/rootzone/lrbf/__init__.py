from .assemble import SparseSystem, assemble, assemble_table
from .kernel import OperatorSpec, RbfKernel
from .nodes import (
    NodeCloud,
    Stencil,
    brute_force_neighbors,
    build_stencils,
    default_stencil_size,
    neighbor_table,
)
from .weights import COND_LIMIT, OperatorWeights, local_gram, operator_row, weight_rows

__all__ = [
    "COND_LIMIT",
    "NodeCloud",
    "OperatorSpec",
    "OperatorWeights",
    "RbfKernel",
    "SparseSystem",
    "Stencil",
    "assemble",
    "assemble_table",
    "brute_force_neighbors",
    "build_stencils",
    "default_stencil_size",
    "local_gram",
    "neighbor_table",
    "operator_row",
    "weight_rows",
]

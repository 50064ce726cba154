"""
Dense values, sparse operators and reverse-mode differentiation.
"""

from bikt.core.tensor.gradcheck import grad_check
from bikt.core.tensor.matrix import Matrix, SparseCSR, as_matrix, check_csr, csr_from_entries
from bikt.core.tensor.ops import (
    abs_,
    add,
    add_bias,
    concat_cols,
    cross_entropy,
    dropout,
    kl_div_rows,
    matmul,
    mul_const,
    relu,
    scalar,
    scale,
    scale_rows,
    softmax_cross_entropy,
    softmax_rows,
    spmm,
    sub,
    sum_all,
    take_rows,
    value_of,
)
from bikt.core.tensor.tape import GradTape, Node, Value

__all__ = [
    "GradTape",
    "Matrix",
    "Node",
    "SparseCSR",
    "Value",
    "abs_",
    "add",
    "add_bias",
    "as_matrix",
    "check_csr",
    "concat_cols",
    "cross_entropy",
    "csr_from_entries",
    "dropout",
    "grad_check",
    "kl_div_rows",
    "matmul",
    "mul_const",
    "relu",
    "scalar",
    "scale",
    "scale_rows",
    "softmax_cross_entropy",
    "softmax_rows",
    "spmm",
    "sub",
    "sum_all",
    "take_rows",
    "value_of",
]

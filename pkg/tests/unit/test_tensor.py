"""
Unit tests for the tensor core: primitives, tape and gradient checking.
"""

import math
import zlib

import numpy as np
import pytest
import scipy.sparse as sp

from bikt.core.errors import DimensionError, EvaluationError, LabelRangeError
from bikt.core.tensor import (
    GradTape,
    abs_,
    add,
    add_bias,
    check_csr,
    concat_cols,
    cross_entropy,
    csr_from_entries,
    dropout,
    grad_check,
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
)

TRIALS = 100


def weighted_sum(value, weights):
    """Scalar sum(value * weights), to give every output entry its own upstream."""
    return sum_all(mul_const(value, weights))


def test_matmul_examples():
    """Test matmul on hand-computed products."""
    assert np.array_equal(matmul(np.eye(2), np.array([[3.0, 4.0], [5.0, 6.0]])),
                          [[3.0, 4.0], [5.0, 6.0]])
    assert np.array_equal(matmul([[1.0, 2.0]], [[3.0], [4.0]]), [[11.0]])


def test_matmul_gradient_example():
    """Test gradient of sum(a.b) with respect to a."""
    tape = GradTape()
    a = tape.watch(np.array([[1.0, 2.0]]))
    out = sum_all(matmul(a, np.array([[3.0], [4.0]])))
    (grad,) = tape.gradient(out, [a])
    assert np.allclose(grad, [[3.0, 4.0]])


def test_matmul_shape_mismatch_names_shapes():
    """Test dimension error message contains both shapes."""
    with pytest.raises(DimensionError, match=r"\(1, 2\).*\(3, 1\)"):
        matmul(np.ones((1, 2)), np.ones((3, 1)))


def test_spmm_examples():
    """Test sparse products including the identity operator."""
    m = np.array([[2.0], [4.0]])
    assert np.array_equal(spmm(sp.identity(2, format="csr"), m), m)
    half = sp.csr_matrix(np.full((2, 2), 0.5))
    assert np.array_equal(spmm(half, m), [[3.0], [3.0]])


def test_spmm_gradient_is_transpose_times_ones():
    """Test gradient of sum(spmm(s, m)) with respect to m."""
    rng = np.random.default_rng(0)
    s = sp.random(5, 4, density=0.5, random_state=1, format="csr")
    tape = GradTape()
    m = tape.watch(rng.uniform(-2, 2, (4, 3)))
    (grad,) = tape.gradient(sum_all(spmm(s, m)), [m])
    assert np.allclose(grad, s.T @ np.ones((5, 3)))


def test_spmm_shape_mismatch():
    with pytest.raises(DimensionError):
        spmm(sp.identity(3, format="csr"), np.ones((2, 1)))


def test_relu_and_concat_examples():
    """Test relu values, relu subgradient and concat."""
    assert np.array_equal(relu(np.array([[-1.0, 2.0]])), [[0.0, 2.0]])
    assert np.array_equal(concat_cols([[1.0]], [[2.0]]), [[1.0, 2.0]])

    tape = GradTape()
    x = tape.watch(np.array([[-1.0, 2.0]]))
    (grad,) = tape.gradient(weighted_sum(relu(x), np.array([[5.0, 5.0]])), [x])
    assert np.array_equal(grad, [[0.0, 5.0]])


def test_relu_gradient_at_zero_is_zero():
    tape = GradTape()
    x = tape.watch(np.zeros((1, 3)))
    (grad,) = tape.gradient(sum_all(relu(x)), [x])
    assert np.array_equal(grad, np.zeros((1, 3)))


def test_structural_shape_errors():
    """Test shape checks of elementwise and structural ops."""
    with pytest.raises(DimensionError):
        add(np.ones((2, 2)), np.ones((2, 3)))
    with pytest.raises(DimensionError):
        add_bias(np.ones((2, 3)), np.ones((1, 2)))
    with pytest.raises(DimensionError):
        concat_cols(np.ones((2, 1)), np.ones((3, 1)))


def test_softmax_rows_examples():
    """Test softmax symmetry, stability and a hand oracle."""
    assert np.allclose(softmax_rows(np.array([[0.0, 0.0]])), [[0.5, 0.5]])
    stable = softmax_rows(np.array([[1000.0, 0.0]]))
    assert np.all(np.isfinite(stable))
    assert stable[0, 0] == pytest.approx(1.0)
    assert stable[0, 1] == pytest.approx(0.0, abs=1e-300)
    assert np.allclose(softmax_rows(np.array([[math.log(2.0), 0.0]])), [[2 / 3, 1 / 3]])


def test_softmax_rows_are_distributions():
    """Test rows sum to one and entries lie in [0, 1]."""
    rng = np.random.default_rng(7)
    for _ in range(TRIALS):
        probs = softmax_rows(rng.uniform(-50, 50, (4, 6)))
        assert np.all(np.abs(probs.sum(axis=1) - 1.0) <= 1e-12)
        assert probs.min() >= 0.0 and probs.max() <= 1.0


def test_cross_entropy_examples():
    """Test cross-entropy on uniform, one-hot and a hand oracle."""
    uniform = np.full((3, 4), 0.25)
    assert cross_entropy(uniform, np.array([0, 2, 3])) == pytest.approx(math.log(4))
    onehot = np.eye(3)
    assert cross_entropy(onehot, np.array([0, 1, 2])) == 0.0
    assert cross_entropy(np.array([[0.25, 0.75]]), np.array([1])) == pytest.approx(0.2877, abs=1e-4)


def test_cross_entropy_clamps_zero_probability():
    value = cross_entropy(np.array([[1.0, 0.0]]), np.array([1]))
    assert value == pytest.approx(-math.log(1e-12))


def test_cross_entropy_label_out_of_range():
    """Test out-of-range labels raise an index error."""
    with pytest.raises(LabelRangeError):
        cross_entropy(np.full((1, 2), 0.5), np.array([2]))
    with pytest.raises(IndexError):
        softmax_cross_entropy(np.zeros((1, 2)), np.array([-1]))


def test_softmax_cross_entropy_matches_composition():
    """Test fused loss value against cross_entropy(softmax(x))."""
    rng = np.random.default_rng(3)
    logits = rng.uniform(-2, 2, (5, 3))
    labels = np.array([0, 1, 2, 1, 0])
    fused = scalar(softmax_cross_entropy(logits, labels))
    assert fused == pytest.approx(cross_entropy(softmax_rows(logits), labels), rel=1e-12)


def test_softmax_cross_entropy_row_weights():
    logits = np.array([[0.0, 0.0], [5.0, 0.0]])
    labels = np.array([0, 0])
    weighted = scalar(softmax_cross_entropy(logits, labels, np.array([1.0, 0.0])))
    assert weighted == pytest.approx(math.log(2))


def test_softmax_cross_entropy_floored_rows_have_no_gradient():
    """Test a row whose label probability hits the floor is constant in the logits."""
    tape = GradTape()
    logits = tape.watch(np.array([[0.0, 100.0], [0.0, 1.0]]))
    loss = softmax_cross_entropy(logits, np.array([0, 0]))
    assert scalar(loss) == pytest.approx((-math.log(1e-12) + math.log(1.0 + math.e)) / 2)
    (grad,) = tape.gradient(loss, [logits])
    assert np.array_equal(grad[0], [0.0, 0.0])
    p = math.e / (1.0 + math.e)
    assert np.allclose(grad[1], [-p / 2, p / 2])


def test_kl_div_rows_examples():
    """Test KL on equal rows and a hand oracle."""
    p = np.array([[0.2, 0.8], [0.6, 0.4]])
    assert scalar(kl_div_rows(p, p)) == 0.0
    assert scalar(kl_div_rows(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]]))) == pytest.approx(
        math.log(2)
    )
    half = np.full((2, 2), 0.5)
    assert scalar(kl_div_rows(half, half)) == 0.0


def test_kl_div_rows_nonnegative_on_random_distributions():
    rng = np.random.default_rng(11)
    for _ in range(TRIALS):
        p = softmax_rows(rng.uniform(-3, 3, (3, 4)))
        q = softmax_rows(rng.uniform(-3, 3, (3, 4)))
        assert scalar(kl_div_rows(p, q)) >= -1e-12


def test_kl_div_rows_gradient_flows_into_q_only():
    tape = GradTape()
    p = tape.watch(np.array([[0.3, 0.7]]))
    q = tape.watch(np.array([[0.5, 0.5]]))
    grad_p, grad_q = tape.gradient(kl_div_rows(p, q), [p, q])
    assert np.array_equal(grad_p, np.zeros((1, 2)))
    assert np.allclose(grad_q, [[-0.6, -1.4]])


def test_kl_div_rows_shape_mismatch():
    with pytest.raises(DimensionError):
        kl_div_rows(np.full((1, 2), 0.5), np.full((2, 2), 0.5))


def _random_cases():
    """(name, function of params, param shapes) for every differentiable primitive."""
    rng = np.random.default_rng(2024)
    sparse = sp.random(4, 3, density=0.6, random_state=5, format="csr")
    labels = np.array([0, 2, 1, 2])
    target = softmax_rows(rng.uniform(-1, 1, (4, 3)))
    index = np.array([0, 2, 2, 1])
    row_w = rng.uniform(0.5, 1.5, 4)
    const = rng.uniform(-2, 2, (4, 3))
    up = rng.uniform(-1, 1, (4, 3))
    up_wide = rng.uniform(-1, 1, (4, 5))
    return [
        ("matmul", lambda ps: weighted_sum(matmul(ps[0], ps[1]), up), [(4, 2), (2, 3)]),
        ("spmm", lambda ps: weighted_sum(spmm(sparse, ps[0]), up), [(3, 3)]),
        ("relu", lambda ps: weighted_sum(relu(ps[0]), up), [(4, 3)]),
        ("add", lambda ps: weighted_sum(add(ps[0], ps[1]), up), [(4, 3), (4, 3)]),
        ("sub", lambda ps: weighted_sum(sub(ps[0], ps[1]), up), [(4, 3), (4, 3)]),
        ("add_bias", lambda ps: weighted_sum(add_bias(ps[0], ps[1]), up), [(4, 3), (1, 3)]),
        ("concat_cols", lambda ps: weighted_sum(concat_cols(ps[0], ps[1]), up_wide),
         [(4, 2), (4, 3)]),
        ("scale", lambda ps: weighted_sum(scale(ps[0], -1.7), up), [(4, 3)]),
        ("mul_const", lambda ps: weighted_sum(mul_const(ps[0], const), up), [(4, 3)]),
        ("scale_rows", lambda ps: weighted_sum(scale_rows(ps[0], row_w), up), [(4, 3)]),
        ("abs", lambda ps: weighted_sum(abs_(ps[0]), up), [(4, 3)]),
        ("take_rows", lambda ps: weighted_sum(take_rows(ps[0], index), up), [(3, 3)]),
        ("dropout", lambda ps: weighted_sum(dropout(ps[0], 0.5, np.random.default_rng(9)), up),
         [(4, 3)]),
        ("softmax_rows", lambda ps: weighted_sum(softmax_rows(ps[0]), up), [(4, 3)]),
        ("softmax_cross_entropy", lambda ps: softmax_cross_entropy(ps[0], labels), [(4, 3)]),
        ("kl_div_rows", lambda ps: kl_div_rows(target, softmax_rows(ps[0])), [(4, 3)]),
    ]


@pytest.mark.parametrize("case", _random_cases(), ids=lambda case: case[0])
def test_primitive_gradients_match_finite_differences(case):
    """Test every primitive against central differences on random inputs."""
    _, function, shapes = case
    rng = np.random.default_rng(zlib.crc32(case[0].encode()))
    for _ in range(TRIALS):
        params = [rng.uniform(-2, 2, shape) for shape in shapes]
        assert grad_check(function, params, step=1e-6) < 1e-4


def test_grad_check_examples():
    """Test grad_check on a product, a classifier loss and a constant."""
    rng = np.random.default_rng(1)
    product = grad_check(lambda ps: sum_all(matmul(ps[0], ps[1])),
                         [rng.uniform(-2, 2, (2, 3)), rng.uniform(-2, 2, (3, 2))])
    assert product < 1e-6

    x = rng.uniform(-2, 2, (5, 4))
    y = np.array([0, 1, 2, 0, 1])
    classifier = grad_check(lambda ps: softmax_cross_entropy(matmul(x, ps[0]), y),
                            [rng.uniform(-2, 2, (4, 3))])
    assert classifier < 1e-4

    assert grad_check(lambda ps: np.array([[3.0]]), [np.ones((2, 2))]) == 0.0


def test_grad_check_rejects_bad_step_and_nonfinite():
    with pytest.raises(ValueError):
        grad_check(lambda ps: sum_all(ps[0]), [np.ones((1, 1))], step=1e-2)
    with pytest.raises(EvaluationError):
        grad_check(lambda ps: scale(sum_all(ps[0]), float("inf")), [np.ones((1, 1))])


def test_tape_gradient_requires_scalar_target():
    tape = GradTape()
    x = tape.watch(np.ones((2, 2)))
    with pytest.raises(DimensionError):
        tape.gradient(relu(x), [x])


def test_tape_accumulates_reused_inputs():
    """Test a node used twice receives the sum of both contributions."""
    tape = GradTape()
    x = tape.watch(np.array([[2.0]]))
    (grad,) = tape.gradient(sum_all(add(scale(x, 3.0), x)), [x])
    assert np.array_equal(grad, [[4.0]])


def test_tapes_cannot_be_mixed():
    a = GradTape().watch(np.ones((1, 1)))
    b = GradTape().watch(np.ones((1, 1)))
    with pytest.raises(ValueError):
        add(a, b)


def test_ops_are_deterministic():
    rng = np.random.default_rng(5)
    x = rng.uniform(-2, 2, (6, 4))
    w = rng.uniform(-2, 2, (4, 3))
    first = softmax_rows(relu(matmul(x, w)))
    second = softmax_rows(relu(matmul(x, w)))
    assert np.array_equal(first, second)


def test_csr_helpers_build_canonical_matrices():
    matrix = csr_from_entries([1, 0, 1], [2, 1, 2], [1.0, 2.0, 3.0], (2, 3))
    check_csr(matrix)
    assert matrix.nnz == 2
    assert matrix[1, 2] == 4.0

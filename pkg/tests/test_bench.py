import numpy as np
import pytest

from tbrk.bench import (GridSpec, ProblemSpec, build_rhs, compile_expression,
                        convdiff_operator, convection_1d, exp_sum_inverse, inverse_linear_rhs,
                        laplacian_1d, oracle_solve_dense, phi_diag, phi_values,
                        problem_operators, random_tt_rhs, sample_dense, separable_rhs)
from tbrk.errors import SizeOverflow, UnsupportedExpression
from tbrk.tensors import to_full, tt_full


def test_grid_spec():
    g = GridSpec(5)
    assert g.h == 0.25 and np.allclose(g.points, [0.25, 0.5, 0.75, 1.0, 1.25])
    with pytest.raises(ValueError):
        GridSpec(2)
    with pytest.raises(ValueError):
        ProblemSpec(kind="heat")
    with pytest.raises(ValueError):
        ProblemSpec(kind="convdiff", epsilon=0)


def test_laplacian_second_order():
    errs, hs = [], []
    for n in (32, 64, 128):
        g = GridSpec(n)
        L = (n + 1) * g.h  # homogeneous Dirichlet at 0 and L
        x = g.points
        u = np.sin(np.pi * x / L)
        f = (np.pi / L) ** 2 * u
        uh = np.linalg.solve(laplacian_1d(g).to_dense(), f)
        errs.append(np.max(np.abs(uh - u)))
        hs.append(g.h)
    orders = [np.log(errs[k] / errs[k + 1]) / np.log(hs[k] / hs[k + 1]) for k in range(2)]
    assert all(1.9 <= p <= 2.1 for p in orders), orders


def test_operator_stencils():
    g = GridSpec(6)
    A = laplacian_1d(g).to_dense()
    assert np.allclose(A * g.h ** 2, 2 * np.eye(6) - np.eye(6, k=1) - np.eye(6, k=-1))
    B = convection_1d(g).to_dense()
    assert np.allclose(B, -B.T)
    assert np.allclose(B * 2 * g.h, np.eye(6, k=1) - np.eye(6, k=-1))


def test_phi_handling():
    g = GridSpec(5)
    assert np.allclose(phi_diag("1", g), np.eye(5))
    assert np.allclose(phi_values("x**2", g), (np.arange(1, 6) * 0.25) ** 2)
    assert np.allclose(phi_values(lambda x: 3 * x, g), 3 * g.points)
    eps = 0.3
    assert np.allclose(convdiff_operator(g, eps, "0").to_dense(),
                       eps * laplacian_1d(g).to_dense())
    M = convdiff_operator(g, eps, "1 + x").to_dense()
    ref = eps * laplacian_1d(g).to_dense() + np.diag(1 + g.points) @ convection_1d(g).to_dense()
    assert np.allclose(M, ref)


def test_problem_operators_share_profiles():
    g = GridSpec(8, 3)
    ops = problem_operators(ProblemSpec("convdiff", 0.1, ["1+x", "0", "0"]), g)
    assert ops[1] is ops[2] and ops[0] is not ops[1]
    assert len(problem_operators(ProblemSpec(), g)) == 3


def test_compile_expression():
    f = compile_expression("sin(pi*x) + exp(-x)/2")
    x = np.linspace(0, 1, 7)
    assert np.allclose(f(x), np.sin(np.pi * x) + np.exp(-x) / 2)
    assert np.allclose(compile_expression("2")(x), 2)
    for bad in ("import os", "x +", "__import__('os')", "y + 1", "foo(x)"):
        with pytest.raises(UnsupportedExpression):
            compile_expression(bad)


def test_separable_rhs_is_rank_one():
    g = GridSpec(10, 3)
    T = separable_rhs("sin(pi*x)", g)
    assert T.ranks == (1, 1, 1)
    s = np.sin(np.pi * g.points)
    assert np.allclose(T.full(), np.einsum("i,j,k->ijk", s, s, s))
    assert np.allclose(tt_full(separable_rhs("sin(pi*x)", g, "tt")), T.full())


def test_exp_sum_accuracy():
    a, b, tol = 1.0, 1e4, 1e-8
    w, t = exp_sum_inverse(a, b, tol)
    s = np.geomspace(a, b, 2000)
    approx = np.exp(-np.outer(s, t)) @ w
    assert np.max(np.abs(1 / s - approx) * s) <= tol


@pytest.mark.parametrize("fmt", ["tucker", "tt"])
def test_inverse_linear_rhs_accuracy(fmt):
    g = GridSpec(64, 3)
    tol = 1e-10
    T = inverse_linear_rhs(g, fmt, tol)
    ref = sample_dense(lambda x, y, z: 1 / (1 + x + y + z), g)
    err = np.linalg.norm(to_full(T) - ref) / np.linalg.norm(ref)
    assert err <= tol


def test_inverse_pairs_rhs():
    g = GridSpec(12, 4)
    T = build_rhs("inv-pairs", g, "tt", 1e-10)
    ref = sample_dense(lambda a, b, c, d: 1 / ((1 + a + b) * (1 + c + d)), g)
    assert np.linalg.norm(to_full(T) - ref) <= 1e-10 * np.linalg.norm(ref)
    with pytest.raises(UnsupportedExpression):
        build_rhs("inv-pairs", GridSpec(12, 3))


def test_random_tt_is_deterministic():
    g = GridSpec(9, 4)
    a, b = random_tt_rhs(g, 3, seed=5), random_tt_rhs(g, 3, seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(a.cores, b.cores))
    assert not np.array_equal(random_tt_rhs(g, 3, seed=6).cores[0], a.cores[0])
    with pytest.raises(UnsupportedExpression):
        build_rhs("random-tt:2", g, "tucker")
    with pytest.raises(UnsupportedExpression):
        build_rhs("nonsense", g)


def test_oracle_cases():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    B = rng.standard_normal((3, 3)) + 4 * np.eye(3)
    C = rng.standard_normal((4, 3))
    X = oracle_solve_dense([A, B], C)
    assert np.allclose(A @ X + X @ B.T, C)
    D = [np.diag([1.0, 2.0]), np.diag([3.0, 5.0])]
    X = oracle_solve_dense(D, np.ones((2, 2)))
    assert np.allclose(X, 1 / (np.array([1.0, 2.0])[:, None] + np.array([3.0, 5.0])[None, :]))
    g = GridSpec(12, 3)
    ops = problem_operators(ProblemSpec("convdiff", 0.5, ["1+x", "x", "0"]), g)
    Cf = rng.standard_normal((12, 12, 12))
    X = oracle_solve_dense(ops, Cf)
    R = Cf - sum(np.moveaxis(np.tensordot(op.to_dense(), X, axes=(1, i)), 0, i)
                 for i, op in enumerate(ops))
    scale = sum(np.linalg.norm(op.to_dense(), 2) for op in ops) * np.linalg.norm(X)
    assert np.linalg.norm(R) <= 1e-13 * (scale + np.linalg.norm(Cf))
    with pytest.raises(SizeOverflow):
        oracle_solve_dense([np.eye(30)] * 3, np.ones((30, 30, 30)))

import numpy as np
import pytest

from metricfix import Expression
from metricfix.errors import EvaluationError, InputError


@pytest.mark.parametrize(
    "src,args,want",
    [
        ("1", (), 1.0),
        ("1 + 2 * 3", (), 7.0),
        ("(1 + 2) * 3", (), 9.0),
        ("2 ^ 3 ^ 2", (), 512.0),
        ("-2 ^ 2", (), -4.0),
        ("-x1 * 3", (2.0,), -6.0),
        ("8 / 4 / 2", (), 1.0),
        ("10 - 3 - 2", (), 5.0),
        ("2 ** 3", (), 8.0),
        ("3 × 2 ÷ 4", (), 1.5),
        ("abs(x1 - 5)", (2.0,), 3.0),
        ("max(x1, x2, 0.5)", (0.1, 0.2), 0.5),
        ("min(x1, -x2)", (1.0, 2.0), -2.0),
        ("1e-1 + .5", (), 0.6),
        ("-(x1 - 0.25 - 0.5*x2)^2", (0.5, 0.5), 0.0),
    ],
)
def test_evaluation(src, args, want):
    values = args + (0.0,) * (2 - len(args))
    assert Expression(src, 2)(*values) == pytest.approx(want, abs=1e-15)


def test_vectorized_matches_scalar():
    e = Expression("-(x1 - 0.25 - 0.5*x2)^2 + abs(x1 - x2)", 2)
    a, b = np.meshgrid(np.linspace(0, 1, 7), np.linspace(0, 1, 5), indexing="ij")
    grid = e(a, b)
    for i in range(7):
        for j in range(5):
            assert grid[i, j] == e(a[i, j], b[i, j])


@pytest.mark.parametrize("src", ["1 +", "(1", "x3", "foo(1)", "abs(1, 2)", "1 $ 2", "2 3", ""])
def test_parse_errors(src):
    with pytest.raises(InputError):
        Expression(src, 2)


def test_runtime_errors():
    with pytest.raises(EvaluationError):
        Expression("1 / (x1 - x2)", 2)(1.0, 1.0)
    with pytest.raises(EvaluationError):
        Expression("(0 - 1) ^ 0.5", 0)()
    with pytest.raises(EvaluationError):
        Expression("10 ^ 400", 0)()

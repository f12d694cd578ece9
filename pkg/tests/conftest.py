import numpy as np
import pytest

from nullframe.coframe import NullCoframe

CHART4 = ("x", "y", "z", "w")


def random_coframe(seed: int, amp: float = 0.15) -> NullCoframe:
    """A smooth null coframe: a constant frame plus small trigonometric perturbations."""
    rng = np.random.default_rng(seed)

    def term():
        a, b, c = rng.uniform(-1, 1, 3)
        v = CHART4[rng.integers(4)]
        u = CHART4[rng.integers(4)]
        return f"{amp * a:.4f}*sin({b:.3f}*{v} + {c:.3f}*{u})"

    def real_row(base):
        return [f"{base[k]} + {term()}" for k in range(4)]

    theta1 = [f"{a} + {term()} + i*({term()})" for a in ("0.6", "0.1", "0.2", "-0.1")]
    theta1[1] = f"0.1 + i + {term()} + i*({term()})"
    theta3 = real_row(["1", "0.2", "0", "0.1"])
    theta4 = real_row(["0.1", "0", "1", "0.3"])
    theta4[3] = f"0.3 + 0.5*x^2 + {term()}"
    return NullCoframe.from_expressions(CHART4, theta1, theta3, theta4, name=f"random {seed}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

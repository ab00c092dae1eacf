import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from renyigan_lab.distributions import DiscreteDist

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def normalized(weights) -> DiscreteDist:
    w = np.asarray(weights, dtype=float)
    return DiscreteDist(w / w.sum())


@st.composite
def discrete_pairs(draw, min_size=2, max_size=64, floor=1e-3):
    """Pairs of probability vectors with every entry bounded away from 0."""
    n = draw(st.integers(min_size, max_size))
    weights = st.lists(st.floats(floor, 1.0), min_size=n, max_size=n)
    return normalized(draw(weights)), normalized(draw(weights))


def central_difference(f, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of scalar ``f`` at ``x``."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        old = x[i]
        x[i] = old + h
        up = f(x)
        x[i] = old - h
        down = f(x)
        x[i] = old
        grad[i] = (up - down) / (2 * h)
    return grad


def relative_error(a, b) -> float:
    a, b = np.ravel(a), np.ravel(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-8)
    return float(np.linalg.norm(a - b) / scale)


# acceptance summary ------------------------------------------------------------
#
# test_acceptance.py appends one line per criterion; they are echoed at the
# end of the run so they show up without -s.

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

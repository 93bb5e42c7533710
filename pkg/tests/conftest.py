import numpy as np
import pytest

from aloff_wallach.g2_family import G2Params

# criterion number -> (ok, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_params(rng: np.random.Generator, k: int, l: int, lo: float = 0.3, hi: float = 3.0) -> G2Params:
    vals = rng.uniform(lo, hi, 4) * rng.choice([-1.0, 1.0], 4)
    return G2Params(k, l, *vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")

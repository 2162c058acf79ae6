import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from autensemble.codes import build_qrm15, get_code

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def qrm():
    return build_qrm15()


@pytest.fixture(scope="session")
def bb72():
    return get_code("bb72")


@st.composite
def binary_arrays(draw, max_rows=12, max_cols=12, min_rows=1, min_cols=1):
    r = draw(st.integers(min_rows, max_rows))
    c = draw(st.integers(min_cols, max_cols))
    bits = draw(st.lists(st.integers(0, 1), min_size=r * c, max_size=r * c))
    return np.array(bits, dtype=np.uint8).reshape(r, c)


def gf2_rank_oracle(a: np.ndarray) -> int:
    """Plain dense elimination, independent of the bit-packed kernel."""
    a = a.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        hit = np.nonzero(a[r:, c])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        a[[r, p]] = a[[p, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == a.shape[0]:
            break
    return r


def in_rowspace(H, v) -> bool:
    from autensemble.gf2 import BinaryMatrix, rank

    v = np.asarray(v, dtype=np.uint8)[None, :]
    return rank(H.vstack(BinaryMatrix.from_array(v))) == rank(H)


def unit(n: int, j: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.uint8)
    e[j] = 1
    return e


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(num: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import contextlib
import time

import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_err(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """``with acceptance(n, title) as detail:`` records PASS/FAIL for criterion
    ``n``; append strings to ``detail`` to show measured values."""
    results = request.config.stash[_ACCEPTANCE]

    @contextlib.contextmanager
    def record(number, title):
        detail = []
        start = time.perf_counter()
        try:
            yield detail
        except BaseException as exc:
            results[number] = ("FAIL", title, detail + [f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"],
                               time.perf_counter() - start)
            raise
        results[number] = ("PASS", title, detail, time.perf_counter() - start)
        print(f"criterion {number}: PASS {title}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        status, title, detail, secs = results[n]
        extra = "; ".join(detail)
        terminalreporter.write_line(f"criterion {n:>2} {status}  {title} [{secs:.1f} s]"
                                    + (f"  {extra}" if extra else ""))

import numpy as np
import pytest

from skgeom import jets


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240611))


@pytest.fixture(params=["python", "cython"])
def kernel(request):
    if request.param == "cython" and not jets.compiled_available():
        pytest.skip("compiled kernel not built")
    previous = jets.set_kernel(request.param)
    yield request.param
    jets.set_kernel(previous)


_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``with criterion(n): ...`` records PASS/FAIL for acceptance criterion n."""
    results = request.config.stash.setdefault(_CRITERIA, {})

    class _Record:
        def __init__(self, number):
            self.number = number

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            ok = exc_type is None
            results[self.number] = results.get(self.number, True) and ok
            print(f"criterion {self.number}: {'PASS' if ok else 'FAIL'}")
            return False

    return _Record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if results[number] else 'FAIL'}")

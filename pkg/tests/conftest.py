import pytest

from kcoverage.engine import Simulator
from kcoverage.harness.experiment import figure5_config
from kcoverage.verification import check_cgs_safety

SEEDS = tuple(range(1, 21))
_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture(scope="session")
def criterion(request):
    """criterion(n, ok, detail) records the verdict line printed at the end."""
    store = request.config.stash[_RESULTS]

    def record(n, ok, detail):
        store[n] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(store, key=lambda n: (isinstance(n, str), str(n).zfill(3))):
        ok, detail = store[n]
        label = f"criterion {n:2d}" if isinstance(n, int) else n
        terminalreporter.write_line(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")


class Figure5Runs:
    """Simulators of the grid preset over 20 seeds, run once per session."""

    def __init__(self):
        self._cache = {}

    def get(self, scheduler, loss=0.0, p_sleep=0.4):
        key = (scheduler, loss, p_sleep)
        if key not in self._cache:
            sims = []
            for seed in SEEDS:
                sim = Simulator(figure5_config(scheduler=scheduler, loss_probability=loss, p_sleep=p_sleep,
                                               seed=seed))
                sim.trace = sim.run()
                sims.append(sim)
            self._cache[key] = sims
        return self._cache[key]


@pytest.fixture(scope="session")
def figure5_runs():
    return Figure5Runs()


@pytest.fixture(scope="session")
def cgs_safety():
    return check_cgs_safety(200)

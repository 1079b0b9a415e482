import json

import pytest

from ecolife.correction import apply_corrections, fit_normal_mle
from ecolife.dataset import deathpool_window, parse_dataset
from ecolife.fixtures import BUNDLED, load_bundled
from ecolife.liveness import FixtureProber, FixtureStore, classify_all, load_successor_table

# acceptance criteria report lines, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture(scope="session")
def bundled_paths():
    return load_bundled()


@pytest.fixture(scope="session")
def bundled_ds(bundled_paths):
    return parse_dataset(bundled_paths[0])


@pytest.fixture(scope="session")
def bundled_truth():
    return json.loads((BUNDLED / "truth.json").read_text())["entities"]


@pytest.fixture(scope="session")
def bundled_verdicts(bundled_ds, bundled_paths):
    prober = FixtureProber(FixtureStore(bundled_paths[1]))
    return classify_all(bundled_ds, prober, load_successor_table())


@pytest.fixture(scope="session")
def bundled_fit(bundled_ds):
    return fit_normal_mle(deathpool_window(bundled_ds, kind="all"))


@pytest.fixture(scope="session")
def bundled_corrected(bundled_ds, bundled_verdicts, bundled_fit):
    return apply_corrections(bundled_ds, bundled_verdicts, bundled_fit, seed=0)

import numpy as np
import pytest

from robust_priors.datasets import planted_items
from robust_priors.harness import median_split, pairwise_encode

# Planted environments standing in for the real paired-comparison datasets.
# Fixed before any sweep was run; all cues carry positive weight.
PLANTED = {
    "compensatory": dict(weights=[1.0] * 6, seed=101),
    "noncompensatory": dict(weights=[3.0, 2.0, 1.0, 0.5, 0.25], seed=202),
    "mixed": dict(weights=list(np.linspace(2.0, 0.5, 7)), seed=303),
}


def planted_decision_dataset(name, n_items=60, noise=1.5):
    spec = PLANTED[name]
    rng = np.random.default_rng(spec["seed"])
    attrs, crit = planted_items(n_items, spec["weights"], rng, noise=noise)
    items, _ = median_split(attrs, "paired")
    return pairwise_encode(items, crit, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def criterion_report():
    def record(number, passed, detail):
        _ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fmri_cells():
    """100-iteration cells shared by the fMRI invariants and acceptance checks."""
    from robust_priors.fmri.config import SimConfig
    from robust_priors.fmri.experiment import run_cell

    base = SimConfig()
    cells = {}
    for isi, snr in ((2.0, 10.0), (2.0, 20.0), (3.0, 20.0), (4.0, 20.0)):
        cells[(isi, snr)] = run_cell(base.with_(ISI=isi, sigma2_psi=snr), iterations=100)
    return cells
